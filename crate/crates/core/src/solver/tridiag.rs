//! Tridiagonal elimination.

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
/// `lower[0]` and `upper[n-1]` are ignored. Returns `None` on a zero pivot.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Option<Vec<f64>> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 {
            return None;
        }
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Some(x)
}

/// Factorised backward-Euler diffusion matrix `I - r D2` on `n` cells with
/// mirrored ends: rows `(1+r, -r)`, `(-r, 1+2r, -r)`, `(-r, 1+r)`.
#[derive(Debug, Clone)]
pub struct NeumannTridiag {
    r: f64,
    upper_mod: Vec<f64>,
    inv_denom: Vec<f64>,
}

impl NeumannTridiag {
    pub fn new(n: usize, r: f64) -> Self {
        assert!(n >= 2 && r >= 0.0);
        let mut upper_mod = vec![0.0; n];
        let mut inv_denom = vec![0.0; n];
        let diag = |i: usize| {
            if i == 0 || i == n - 1 {
                1.0 + r
            } else {
                1.0 + 2.0 * r
            }
        };
        let mut prev = 0.0;
        for i in 0..n {
            let lower = if i == 0 { 0.0 } else { -r };
            let inv = 1.0 / (diag(i) - lower * prev);
            inv_denom[i] = inv;
            let upper = if i + 1 < n { -r } else { 0.0 };
            upper_mod[i] = upper * inv;
            prev = upper_mod[i];
        }
        NeumannTridiag {
            r,
            upper_mod,
            inv_denom,
        }
    }

    pub fn len(&self) -> usize {
        self.inv_denom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_denom.is_empty()
    }

    /// Overwrites the right-hand side with the solution.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        x[0] *= self.inv_denom[0];
        for i in 1..n {
            x[i] = (x[i] + self.r * x[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_mod[i] * x[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn apply(r: f64, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { x[i - 1] } else { x[i] };
                let right = if i + 1 < n { x[i + 1] } else { x[i] };
                x[i] - r * (left - 2.0 * x[i] + right)
            })
            .collect()
    }

    #[test]
    fn neumann_solve_inverts_operator() {
        let x: Vec<f64> = (0..17).map(|i| (i as f64 * 0.7).sin() + 2.0).collect();
        for &r in &[0.0, 0.3, 10.0, 1e4] {
            let mut b = apply(r, &x);
            NeumannTridiag::new(x.len(), r).solve_in_place(&mut b);
            for (a, e) in b.iter().zip(&x) {
                assert_relative_eq!(a, e, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn neumann_solve_matches_general_solver() {
        let n = 9;
        let r = 2.5;
        let rhs: Vec<f64> = (0..n).map(|i| (i * i) as f64).collect();
        let lower = vec![-r; n];
        let upper = vec![-r; n];
        let mut diag = vec![1.0 + 2.0 * r; n];
        diag[0] = 1.0 + r;
        diag[n - 1] = 1.0 + r;
        let general = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        let mut fast = rhs.clone();
        NeumannTridiag::new(n, r).solve_in_place(&mut fast);
        for (a, b) in fast.iter().zip(&general) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn mass_and_constants_preserved() {
        let t = NeumannTridiag::new(32, 7.0);
        let mut c = vec![3.0; 32];
        t.solve_in_place(&mut c);
        for x in &c {
            assert_relative_eq!(*x, 3.0, max_relative = 1e-14);
        }
        let mut x: Vec<f64> = (0..32).map(|i| (i % 5) as f64).collect();
        let before: f64 = x.iter().sum();
        t.solve_in_place(&mut x);
        assert_relative_eq!(x.iter().sum::<f64>(), before, max_relative = 1e-14);
    }

    #[test]
    fn zero_pivot_detected() {
        assert!(solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).is_none());
    }
}

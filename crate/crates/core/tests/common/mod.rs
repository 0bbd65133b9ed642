//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// Objective of the four/five-dimensional threshold, written out again so the
/// oracle does not share code with the library.
pub fn h_reference(n: f64, d1: f64, d2: f64, e: f64, eta: f64) -> f64 {
    (n / (18.0 * d2 * e)).sqrt()
        + ((1.0 / (2.0 * e)) * (1.0 / eta + n / (2.0 * d2))).sqrt()
        + ((1.0 / (d2 - eta)) * (2.0 / eta + n / (2.0 * d2))).sqrt()
            * (2f64.sqrt() + (d1 + d2) / (2.0 * ((d1 - e) * (d2 - eta)).sqrt()))
}

/// Dense-grid brute force: `res x res` uniform interior grid over
/// `(0, d1) x (0, d2)`, then repeated zoomed grids around the incumbent.
pub fn h_brute_force(n: u32, d1: f64, d2: f64, res: usize) -> (f64, f64, f64) {
    let n = n as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 1..res {
        let e = d1 * i as f64 / res as f64;
        for j in 1..res {
            let eta = d2 * j as f64 / res as f64;
            let v = h_reference(n, d1, d2, e, eta);
            if v < best.0 {
                best = (v, e, eta);
            }
        }
    }
    let (mut half_e, mut half_eta) = (d1 / res as f64, d2 / res as f64);
    for _ in 0..12 {
        let (_, ce, ceta) = best;
        let local = 40;
        for i in 0..=local {
            let e = ce - half_e + 2.0 * half_e * i as f64 / local as f64;
            if !(e > 0.0 && e < d1) {
                continue;
            }
            for j in 0..=local {
                let eta = ceta - half_eta + 2.0 * half_eta * j as f64 / local as f64;
                if !(eta > 0.0 && eta < d2) {
                    continue;
                }
                let v = h_reference(n, d1, d2, e, eta);
                if v < best.0 {
                    best = (v, e, eta);
                }
            }
        }
        half_e /= 4.0;
        half_eta /= 4.0;
    }
    best
}

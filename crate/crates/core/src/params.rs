//! Shared domain types: physical parameters, the logistic source, the box
//! grid and the solution state.

use std::fmt;
use std::sync::Arc;

use ndarray::{ArrayD, IxDyn};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("{0} must be finite")]
    NotFinite(&'static str),
    #[error("n must be at least 1")]
    Dimension,
    #[error("source argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("source violates f(0) >= 0: f(0) = {0}")]
    NegativeAtZero(f64),
    #[error("source certificate violated at s = {s}: f(s) = {value} > a - mu s^2 = {bound}")]
    CertificateViolated { s: f64, value: f64, bound: f64 },
    #[error("grid: {0}")]
    Grid(String),
    #[error("state: {0}")]
    State(String),
}

/// Physical constants of the chemotaxis-growth system plus the spatial
/// dimension `n` the thresholds are evaluated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub d1: f64,
    pub d2: f64,
    pub chi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub mu: f64,
    pub a: f64,
    pub n: u32,
}

impl Parameters {
    /// Unit parameters in three dimensions with the given damping rate.
    pub fn unit(mu: f64) -> Self {
        Parameters {
            d1: 1.0,
            d2: 1.0,
            chi: 1.0,
            alpha: 1.0,
            beta: 1.0,
            kappa: 1.0,
            mu,
            a: 0.0,
            n: 3,
        }
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        let fields = [
            ("d1", self.d1),
            ("d2", self.d2),
            ("chi", self.chi),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("a", self.a),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(ParamError::NotFinite(name));
            }
        }
        for (name, value) in [
            ("d1", self.d1),
            ("d2", self.d2),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("mu", self.mu),
        ] {
            if value <= 0.0 {
                return Err(ParamError::NotPositive(name));
            }
        }
        if self.a < 0.0 {
            return Err(ParamError::Negative("a"));
        }
        if self.n < 1 {
            return Err(ParamError::Dimension);
        }
        Ok(self)
    }

    /// Homogeneous equilibrium `(kappa/mu, alpha kappa/(beta mu))`.
    pub fn equilibrium(&self) -> (f64, f64) {
        let u = self.kappa / self.mu;
        (u, self.alpha * u / self.beta)
    }
}

/// Declared pair `(a, mu)` with `f(s) <= a - mu s^2` for `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub a: f64,
    pub mu: f64,
}

#[derive(Clone)]
pub enum SourceKind {
    /// `f(s) = kappa s - mu s^2`
    StandardLogistic {
        kappa: f64,
        mu: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKind::StandardLogistic { kappa, mu } => f
                .debug_struct("StandardLogistic")
                .field("kappa", kappa)
                .field("mu", mu)
                .finish(),
            SourceKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// The reaction term of the cell equation together with its logistic
/// certificate.
#[derive(Debug, Clone)]
pub struct SourceFunction {
    kind: SourceKind,
    certificate: Option<Certificate>,
}

/// Sample points used to check a certificate: zero plus 30 geometric
/// points from 1e-3 to 1e6.
pub fn certificate_samples() -> Vec<f64> {
    let mut samples = Vec::with_capacity(31);
    samples.push(0.0);
    for k in 0..30 {
        let exponent = -3.0 + 9.0 * k as f64 / 29.0;
        samples.push(10f64.powf(exponent));
    }
    samples
}

impl SourceFunction {
    /// Standard logistic source. For `kappa <= 0` the certificate is
    /// `(0, mu)`; for `kappa > 0` half of the damping is traded for the
    /// ceiling, giving `(kappa^2 / (2 mu), mu / 2)`.
    pub fn standard_logistic(kappa: f64, mu: f64) -> Self {
        let certificate = if kappa > 0.0 {
            Certificate {
                a: kappa * kappa / (2.0 * mu),
                mu: mu / 2.0,
            }
        } else {
            Certificate { a: 0.0, mu }
        };
        SourceFunction {
            kind: SourceKind::StandardLogistic { kappa, mu },
            certificate: Some(certificate),
        }
    }

    /// `f = 0`. No certificate exists since `mu` must be positive.
    pub fn zero() -> Self {
        SourceFunction {
            kind: SourceKind::StandardLogistic {
                kappa: 0.0,
                mu: 0.0,
            },
            certificate: None,
        }
    }

    pub fn from_params(params: &Parameters) -> Self {
        Self::standard_logistic(params.kappa, params.mu)
    }

    /// Any source with an explicit certificate; the certificate is checked
    /// on [`certificate_samples`].
    pub fn with_certificate(
        kind: SourceKind,
        certificate: Certificate,
    ) -> Result<Self, ParamError> {
        let source = SourceFunction {
            kind,
            certificate: Some(certificate),
        };
        source.check_certificate()?;
        Ok(source)
    }

    pub fn custom<F>(f: F, a: f64, mu: f64) -> Result<Self, ParamError>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_certificate(SourceKind::Custom(Arc::new(f)), Certificate { a, mu })
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn certificate(&self) -> Option<Certificate> {
        self.certificate
    }

    pub fn is_standard(&self) -> bool {
        matches!(self.kind, SourceKind::StandardLogistic { .. })
    }

    #[inline]
    pub(crate) fn value(&self, s: f64) -> f64 {
        match &self.kind {
            SourceKind::StandardLogistic { kappa, mu } => kappa * s - mu * s * s,
            SourceKind::Custom(f) => f(s),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64, ParamError> {
        if s < 0.0 || s.is_nan() {
            return Err(ParamError::NegativeArgument(s));
        }
        Ok(self.value(s))
    }

    pub fn check_certificate(&self) -> Result<(), ParamError> {
        let Some(Certificate { a, mu }) = self.certificate else {
            return Ok(());
        };
        if !(a >= 0.0) {
            return Err(ParamError::Negative("a"));
        }
        if !(mu > 0.0) {
            return Err(ParamError::NotPositive("mu"));
        }
        let at_zero = self.value(0.0);
        if !(at_zero >= 0.0) {
            return Err(ParamError::NegativeAtZero(at_zero));
        }
        for s in certificate_samples() {
            let value = self.value(s);
            let bound = a - mu * s * s;
            // relative slack for the cancellation in a - mu s^2 at large s
            let slack = 1e-12 * (a.abs() + mu * s * s + value.abs());
            if !(value <= bound + slack) {
                return Err(ParamError::CertificateViolated { s, value, bound });
            }
        }
        Ok(())
    }

    /// Lipschitz estimate of the source on `[0, s_max]`.
    pub(crate) fn lipschitz(&self, s_max: f64) -> f64 {
        match &self.kind {
            SourceKind::StandardLogistic { kappa, mu } => kappa.abs() + 2.0 * mu * s_max.max(0.0),
            SourceKind::Custom(f) => {
                let top = s_max.max(1e-12);
                let samples = 64;
                let step = top / samples as f64;
                let mut lip: f64 = 0.0;
                let mut prev = f(0.0);
                for k in 1..=samples {
                    let next = f(step * k as f64);
                    lip = lip.max((next - prev).abs() / step);
                    prev = next;
                }
                lip
            }
        }
    }
}

/// Uniform cell-centred grid on the box `[0, L_1] x ... x [0, L_dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    extents: Vec<f64>,
    cells: Vec<usize>,
}

pub const MIN_CELLS: usize = 4;

impl Grid {
    pub fn new(extents: &[f64], cells: &[usize]) -> Result<Self, ParamError> {
        let dim = extents.len();
        if !(1..=3).contains(&dim) {
            return Err(ParamError::Grid(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if cells.len() != dim {
            return Err(ParamError::Grid(format!(
                "{} extents but {} cell counts",
                dim,
                cells.len()
            )));
        }
        if let Some(bad) = extents.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
            return Err(ParamError::Grid(format!("extent {bad} must be positive")));
        }
        if let Some(bad) = cells.iter().find(|&&c| c < MIN_CELLS) {
            return Err(ParamError::Grid(format!(
                "at least {MIN_CELLS} cells per axis required, got {bad}"
            )));
        }
        Ok(Grid {
            extents: extents.to_vec(),
            cells: cells.to_vec(),
        })
    }

    /// Unit box with `cells` cells along each of `dim` axes.
    pub fn unit(dim: usize, cells: usize) -> Result<Self, ParamError> {
        Self::new(&vec![1.0; dim], &vec![cells; dim])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / self.cells[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).product()
    }

    /// |Omega|
    pub fn measure(&self) -> f64 {
        self.extents.iter().product()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> IxDyn {
        IxDyn(&self.cells)
    }

    pub fn zeros(&self) -> ArrayD<f64> {
        ArrayD::zeros(self.shape())
    }

    pub fn constant(&self, value: f64) -> ArrayD<f64> {
        ArrayD::from_elem(self.shape(), value)
    }

    /// Field whose value at each cell centre is `f(x)`.
    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> ArrayD<f64> {
        let mut x = vec![0.0; self.dim()];
        ArrayD::from_shape_fn(self.shape(), |idx| {
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = (idx[k] as f64 + 0.5) * self.spacing(k);
            }
            f(&x)
        })
    }
}

/// The pair `(u, v)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: ArrayD<f64>,
    pub v: ArrayD<f64>,
    pub t: f64,
}

impl State {
    pub fn new(u: ArrayD<f64>, v: ArrayD<f64>, t: f64) -> Result<Self, ParamError> {
        if u.shape() != v.shape() {
            return Err(ParamError::State(format!(
                "u has shape {:?} but v has shape {:?}",
                u.shape(),
                v.shape()
            )));
        }
        if let Some(bad) = u
            .iter()
            .chain(v.iter())
            .find(|x| !(**x >= 0.0) || !x.is_finite())
        {
            return Err(ParamError::State(format!(
                "fields must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(State { u, v, t })
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<(), ParamError> {
        if self.u.shape() != grid.cells() {
            return Err(ParamError::State(format!(
                "field shape {:?} does not match grid {:?}",
                self.u.shape(),
                grid.cells()
            )));
        }
        Ok(())
    }
}

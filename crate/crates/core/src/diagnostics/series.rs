use std::io::{Read, Write};

use super::{
    functional_z3, functional_z45, gradient_squared, lp_norm, lyapunov_h, DiagnosticsError, Lp,
};
use crate::params::{Grid, Parameters, State};
use crate::thresholds::{CoefficientSet3D, CoefficientSet45D};

/// H is only evaluated while `min u` exceeds this floor.
pub const VACUUM_FLOOR: f64 = 1e-12;

/// Table header. The last two columns feed the convergence audits.
pub const CSV_COLUMNS: [&str; 14] = [
    "t",
    "mass_u",
    "L2_u",
    "L3_u",
    "Linf_u",
    "L2_gradv",
    "L4_gradv",
    "L6_gradv",
    "z3",
    "z45",
    "H",
    "clamp_count",
    "Linf_v",
    "eq_dist",
];

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass_u: f64,
    pub l2_u: f64,
    pub l3_u: f64,
    pub linf_u: f64,
    pub l2_gradv: f64,
    pub l4_gradv: f64,
    pub l6_gradv: f64,
    pub z3: Option<f64>,
    pub z45: Option<f64>,
    pub h: Option<f64>,
    pub clamp_count: u64,
    pub linf_v: f64,
    /// `‖u - u*‖∞ + ‖v - v*‖∞` when a positive equilibrium exists.
    pub equilibrium_distance: Option<f64>,
    pub vacuum: bool,
}

/// Computes records from states.
#[derive(Debug, Clone)]
pub struct Monitor {
    grid: Grid,
    params: Parameters,
    z3: Option<CoefficientSet3D>,
    z45: Option<CoefficientSet45D>,
}

impl Monitor {
    pub fn new(grid: Grid, params: Parameters) -> Self {
        Monitor {
            grid,
            params,
            z3: None,
            z45: None,
        }
    }

    pub fn with_z3(mut self, c: CoefficientSet3D) -> Self {
        self.z3 = Some(c);
        self
    }

    pub fn with_z45(mut self, c: CoefficientSet45D) -> Self {
        self.z45 = Some(c);
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn record(&self, state: &State, clamp_count: u64) -> DiagnosticsRecord {
        let g = &self.grid;
        let grad = gradient_squared(&state.v, g).mapv(f64::sqrt);
        let min_u = state.u.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        let vacuum = !(min_u > VACUUM_FLOOR);
        let positive = self.params.kappa > 0.0;
        let h = if positive && !vacuum {
            lyapunov_h(state, g, &self.params).ok()
        } else {
            None
        };
        let equilibrium_distance = positive.then(|| {
            let (us, vs) = self.params.equilibrium();
            let du = state.u.iter().fold(0.0f64, |m, &x| m.max((x - us).abs()));
            let dv = state.v.iter().fold(0.0f64, |m, &x| m.max((x - vs).abs()));
            du + dv
        });
        DiagnosticsRecord {
            t: state.t,
            mass_u: lp_norm(&state.u, Lp::L1, g),
            l2_u: lp_norm(&state.u, Lp::L2, g),
            l3_u: lp_norm(&state.u, Lp::L3, g),
            linf_u: lp_norm(&state.u, Lp::Inf, g),
            l2_gradv: lp_norm(&grad, Lp::L2, g),
            l4_gradv: lp_norm(&grad, Lp::L4, g),
            l6_gradv: lp_norm(&grad, Lp::L6, g),
            z3: self.z3.as_ref().map(|c| functional_z3(state, g, c)),
            z45: self.z45.as_ref().map(|c| functional_z45(state, g, c)),
            h,
            clamp_count,
            linf_v: lp_norm(&state.v, Lp::Inf, g),
            equilibrium_distance,
            vacuum,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub records: Vec<DiagnosticsRecord>,
}

fn cell(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

impl DiagnosticsSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    /// Values of a named column; also accepts `Linf_v` and `eq_dist`.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let pick: fn(&DiagnosticsRecord) -> Option<f64> = match name {
            "t" => |r| Some(r.t),
            "mass_u" => |r| Some(r.mass_u),
            "L2_u" => |r| Some(r.l2_u),
            "L3_u" => |r| Some(r.l3_u),
            "Linf_u" => |r| Some(r.linf_u),
            "L2_gradv" => |r| Some(r.l2_gradv),
            "L4_gradv" => |r| Some(r.l4_gradv),
            "L6_gradv" => |r| Some(r.l6_gradv),
            "z3" => |r| r.z3,
            "z45" => |r| r.z45,
            "H" => |r| r.h,
            "clamp_count" => |r| Some(r.clamp_count as f64),
            "Linf_v" => |r| Some(r.linf_v),
            "eq_dist" => |r| r.equilibrium_distance,
            _ => return None,
        };
        Some(self.records.iter().map(pick).collect())
    }

    /// Largest value of a column over samples with `t` in `[a, b]`.
    pub fn max_in(&self, name: &str, a: f64, b: f64) -> Option<f64> {
        let col = self.column(name)?;
        self.records
            .iter()
            .zip(col)
            .filter(|(r, _)| r.t >= a && r.t <= b)
            .filter_map(|(_, x)| x)
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DiagnosticsError> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| DiagnosticsError::Csv(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(err)?;
        for r in &self.records {
            w.write_record([
                cell(Some(r.t)),
                cell(Some(r.mass_u)),
                cell(Some(r.l2_u)),
                cell(Some(r.l3_u)),
                cell(Some(r.linf_u)),
                cell(Some(r.l2_gradv)),
                cell(Some(r.l4_gradv)),
                cell(Some(r.l6_gradv)),
                cell(r.z3),
                cell(r.z45),
                cell(r.h),
                r.clamp_count.to_string(),
                cell(Some(r.linf_v)),
                cell(r.equilibrium_distance),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| DiagnosticsError::Csv(e.to_string()))
    }
}

/// Reads the `t` column and one named column from a diagnostics table,
/// skipping rows where that column is empty.
pub fn read_csv_column<R: Read>(
    input: R,
    column: &str,
) -> Result<(Vec<f64>, Vec<f64>), DiagnosticsError> {
    let mut r = csv::Reader::from_reader(input);
    let err = |e: csv::Error| DiagnosticsError::Csv(e.to_string());
    let headers = r.headers().map_err(err)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DiagnosticsError::Csv(format!("no column named {name}")))
    };
    let (ti, ci) = (find("t")?, find(column)?);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row.map_err(err)?;
        let field = row.get(ci).unwrap_or("");
        if field.is_empty() {
            continue;
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| DiagnosticsError::Csv(format!("row {}: bad number {s:?}", line + 2)))
        };
        times.push(parse(row.get(ti).unwrap_or(""))?);
        values.push(parse(field)?);
    }
    Ok((times, values))
}

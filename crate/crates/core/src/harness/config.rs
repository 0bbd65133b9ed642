//! Flat `key = value` configuration with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::params::{Grid, Parameters};
use crate::solver::{Scheme, SolverConfig};
use crate::thresholds::{gamma_rate, mu1};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("[{section}] {key}: unknown key")]
    UnknownKey { section: String, key: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("[{section}] {key}: missing required key")]
    Missing {
        section: &'static str,
        key: &'static str,
    },
    #[error("[{section}] {key}: {message}")]
    Invalid {
        section: &'static str,
        key: &'static str,
        message: String,
    },
    #[error("scenario {scenario}: {message}")]
    Constraint {
        scenario: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Boundedness,
    ConvergencePositiveKappa,
    DecayZeroKappa,
    DecayNegativeKappa,
    ConvexComparison,
    SmallDiffusionSweep,
    ManufacturedOrder,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Boundedness,
        Scenario::ConvergencePositiveKappa,
        Scenario::DecayZeroKappa,
        Scenario::DecayNegativeKappa,
        Scenario::ConvexComparison,
        Scenario::SmallDiffusionSweep,
        Scenario::ManufacturedOrder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Boundedness => "boundedness",
            Scenario::ConvergencePositiveKappa => "convergence-positive-kappa",
            Scenario::DecayZeroKappa => "decay-zero-kappa",
            Scenario::DecayNegativeKappa => "decay-negative-kappa",
            Scenario::ConvexComparison => "convex-comparison",
            Scenario::SmallDiffusionSweep => "small-diffusion-sweep",
            Scenario::ManufacturedOrder => "manufactured-order",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

/// Initial data as written in the `[ic]` section.
#[derive(Debug, Clone, PartialEq)]
pub enum IcSpec {
    ConstantPlusPerturbation {
        u: f64,
        v: f64,
        amplitude: f64,
    },
    GaussianBump {
        u_base: f64,
        v_base: f64,
        amplitude: f64,
        width: f64,
        centre: Option<Vec<f64>>,
    },
    /// Snapshot files as written by the solver.
    CustomField {
        u_file: PathBuf,
        v_file: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: Parameters,
    pub grid: Grid,
    pub solver: SolverConfig,
    pub ic: IcSpec,
    pub scenario: Scenario,
    pub convex: bool,
    pub output: PathBuf,
    pub seed: u64,
    /// Decay-fit window; the second half of the run when absent.
    pub window: Option<(f64, f64)>,
    /// Parameter swept by the small-diffusion scenario.
    pub sweep_axis: String,
    pub sweep_values: Vec<f64>,
    /// Number of grids in the manufactured-order scenario.
    pub levels: usize,
}

pub const PARAM_AXES: [&str; 7] = ["d1", "d2", "chi", "alpha", "beta", "kappa", "mu"];

/// Sets a floating-point field of `Parameters` by name.
pub fn set_param(p: &mut Parameters, axis: &str, value: f64) -> Option<()> {
    let slot = match axis {
        "d1" => &mut p.d1,
        "d2" => &mut p.d2,
        "chi" => &mut p.chi,
        "alpha" => &mut p.alpha,
        "beta" => &mut p.beta,
        "kappa" => &mut p.kappa,
        "mu" => &mut p.mu,
        "a" => &mut p.a,
        _ => return None,
    };
    *slot = value;
    Some(())
}

const SECTIONS: [(&str, &[&str]); 5] = [
    (
        "params",
        &["d1", "d2", "chi", "alpha", "beta", "kappa", "mu", "a", "n"],
    ),
    ("grid", &["cells", "extents"]),
    (
        "solver",
        &[
            "dt_initial",
            "dt_min",
            "t_end",
            "cfl_safety",
            "scheme",
            "blowup_linf_threshold",
            "snapshot_stride",
            "strang",
            "keep_states",
        ],
    ),
    (
        "ic",
        &[
            "kind",
            "u",
            "v",
            "amplitude",
            "u_base",
            "v_base",
            "width",
            "centre",
            "u_file",
            "v_file",
        ],
    ),
    (
        "scenario",
        &[
            "name",
            "convex",
            "output",
            "seed",
            "window",
            "sweep_axis",
            "sweep_values",
            "levels",
        ],
    ),
];

type Table = BTreeMap<(&'static str, &'static str), String>;

fn tokenize(text: &str) -> Result<Table, ConfigError> {
    let mut table = Table::new();
    let mut section: Option<(&'static str, &'static [&'static str])> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .copied()
                    .ok_or_else(|| ConfigError::UnknownSection(name.to_string()))?,
            );
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            message: format!("expected key = value, got {line:?}"),
        })?;
        let (sec, keys) = section.ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            message: "key before any [section] header".into(),
        })?;
        let key = key.trim();
        let known = keys
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey {
                section: sec.to_string(),
                key: key.to_string(),
            })?;
        if table
            .insert((sec, known), value.trim().to_string())
            .is_some()
        {
            return Err(ConfigError::Syntax {
                line: i + 1,
                message: format!("[{sec}] {key} given twice"),
            });
        }
    }
    Ok(table)
}

struct Reader {
    table: Table,
}

impl Reader {
    fn raw(&self, section: &'static str, key: &'static str) -> Option<&str> {
        self.table.get(&(section, key)).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(
        &self,
        section: &'static str,
        key: &'static str,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(s) => s.parse::<T>().map(Some).map_err(|_| ConfigError::Invalid {
                section,
                key,
                message: format!("expected {what}, got {s:?}"),
            }),
        }
    }

    fn f64(&self, section: &'static str, key: &'static str) -> Result<Option<f64>, ConfigError> {
        let value = self.parse::<f64>(section, key, "a number")?;
        if let Some(x) = value {
            if !x.is_finite() {
                return Err(ConfigError::Invalid {
                    section,
                    key,
                    message: "must be finite".into(),
                });
            }
        }
        Ok(value)
    }

    fn req_f64(&self, section: &'static str, key: &'static str) -> Result<f64, ConfigError> {
        self.f64(section, key)?
            .ok_or(ConfigError::Missing { section, key })
    }

    fn list<T: std::str::FromStr>(
        &self,
        section: &'static str,
        key: &'static str,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(s) => parse_list(s)
                .map(Some)
                .map_err(|message| ConfigError::Invalid {
                    section,
                    key,
                    message,
                }),
        }
    }
}

/// Comma- or whitespace-separated list.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| format!("bad list entry {t:?}")))
        .collect()
}

fn invalid(section: &'static str, key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        section,
        key,
        message: message.into(),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let r = Reader {
        table: tokenize(text)?,
    };

    let params = Parameters {
        d1: r.req_f64("params", "d1")?,
        d2: r.req_f64("params", "d2")?,
        chi: r.req_f64("params", "chi")?,
        alpha: r.req_f64("params", "alpha")?,
        beta: r.req_f64("params", "beta")?,
        kappa: r.req_f64("params", "kappa")?,
        mu: r.req_f64("params", "mu")?,
        a: r.f64("params", "a")?.unwrap_or(0.0),
        n: r.parse::<u32>("params", "n", "a positive integer")?
            .unwrap_or(3),
    };
    let params = params.validate().map_err(|e| {
        let msg = e.to_string();
        let key = ["d1", "d2", "chi", "alpha", "beta", "kappa", "mu", "a", "n"]
            .into_iter()
            .find(|k| msg.starts_with(&format!("{k} ")))
            .unwrap_or("n");
        invalid("params", key, msg)
    })?;

    let cells: Vec<usize> = r.list("grid", "cells")?.ok_or(ConfigError::Missing {
        section: "grid",
        key: "cells",
    })?;
    let extents: Vec<f64> = r
        .list("grid", "extents")?
        .unwrap_or_else(|| vec![1.0; cells.len()]);
    let grid = Grid::new(&extents, &cells).map_err(|e| invalid("grid", "cells", e.to_string()))?;

    let d = SolverConfig::default();
    let scheme = match r.raw("solver", "scheme") {
        None => d.scheme,
        Some(s) => Scheme::parse(s).ok_or_else(|| {
            invalid(
                "solver",
                "scheme",
                format!("expected imex-adi or fully-explicit, got {s:?}"),
            )
        })?,
    };
    let solver = SolverConfig {
        dt_initial: r.f64("solver", "dt_initial")?.unwrap_or(d.dt_initial),
        dt_min: r.f64("solver", "dt_min")?.unwrap_or(d.dt_min),
        t_end: r.f64("solver", "t_end")?.unwrap_or(d.t_end),
        cfl_safety: r.f64("solver", "cfl_safety")?.unwrap_or(d.cfl_safety),
        scheme,
        blowup_linf_threshold: r
            .f64("solver", "blowup_linf_threshold")?
            .unwrap_or(d.blowup_linf_threshold),
        snapshot_stride: r
            .parse("solver", "snapshot_stride", "a positive integer")?
            .unwrap_or(d.snapshot_stride),
        strang: r
            .parse("solver", "strang", "true or false")?
            .unwrap_or(d.strang),
        keep_states: r
            .parse("solver", "keep_states", "true or false")?
            .unwrap_or(d.keep_states),
    };
    solver
        .validate()
        .map_err(|e| invalid("solver", "dt_initial", e.to_string()))?;

    let kind = r.raw("ic", "kind").ok_or(ConfigError::Missing {
        section: "ic",
        key: "kind",
    })?;
    let ic = match kind {
        "constant-plus-perturbation" => IcSpec::ConstantPlusPerturbation {
            u: r.req_f64("ic", "u")?,
            v: r.req_f64("ic", "v")?,
            amplitude: r.f64("ic", "amplitude")?.unwrap_or(0.0),
        },
        "gaussian-bump" => IcSpec::GaussianBump {
            u_base: r.f64("ic", "u_base")?.unwrap_or(0.0),
            v_base: r.f64("ic", "v_base")?.unwrap_or(0.0),
            amplitude: r.req_f64("ic", "amplitude")?,
            width: r.req_f64("ic", "width")?,
            centre: r.list("ic", "centre")?,
        },
        "custom-field" => IcSpec::CustomField {
            u_file: r
                .raw("ic", "u_file")
                .map(PathBuf::from)
                .ok_or(ConfigError::Missing {
                    section: "ic",
                    key: "u_file",
                })?,
            v_file: r
                .raw("ic", "v_file")
                .map(PathBuf::from)
                .ok_or(ConfigError::Missing {
                    section: "ic",
                    key: "v_file",
                })?,
        },
        other => return Err(invalid(
            "ic",
            "kind",
            format!(
                "expected constant-plus-perturbation, gaussian-bump or custom-field, got {other:?}"
            ),
        )),
    };
    let allowed: &[&str] = match &ic {
        IcSpec::ConstantPlusPerturbation { .. } => &["kind", "u", "v", "amplitude"],
        IcSpec::GaussianBump { .. } => {
            &["kind", "u_base", "v_base", "amplitude", "width", "centre"]
        }
        IcSpec::CustomField { .. } => &["kind", "u_file", "v_file"],
    };
    for ((section, key), _) in r.table.range(("ic", "")..) {
        if *section == "ic" && !allowed.contains(key) {
            return Err(invalid("ic", key, format!("not used by kind {kind}")));
        }
    }

    let name = r.raw("scenario", "name").ok_or(ConfigError::Missing {
        section: "scenario",
        key: "name",
    })?;
    let scenario = Scenario::parse(name)
        .ok_or_else(|| invalid("scenario", "name", format!("unknown scenario {name:?}")))?;
    let window = match r.list::<f64>("scenario", "window")? {
        None => None,
        Some(w) if w.len() == 2 && w[0] < w[1] => Some((w[0], w[1])),
        Some(_) => {
            return Err(invalid(
                "scenario",
                "window",
                "expected two increasing times a,b",
            ))
        }
    };
    let cfg = ExperimentConfig {
        params,
        grid,
        solver,
        ic,
        scenario,
        convex: r
            .parse("scenario", "convex", "true or false")?
            .unwrap_or(false),
        output: PathBuf::from(r.raw("scenario", "output").unwrap_or("out")),
        seed: r
            .parse("scenario", "seed", "a nonnegative integer")?
            .unwrap_or(0),
        window,
        sweep_axis: r.raw("scenario", "sweep_axis").unwrap_or("d1").to_string(),
        sweep_values: r.list("scenario", "sweep_values")?.unwrap_or_default(),
        levels: r.parse("scenario", "levels", "an integer")?.unwrap_or(3),
    };
    cfg.check_scenario()?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// Constraints that depend on the chosen scenario.
    pub fn check_scenario(&self) -> Result<(), ConfigError> {
        let s = self.scenario.as_str();
        let fail = |message: String| {
            Err(ConfigError::Constraint {
                scenario: s,
                message,
            })
        };
        let p = &self.params;
        match self.scenario {
            Scenario::Boundedness | Scenario::ConvexComparison | Scenario::SmallDiffusionSweep
                if !matches!(p.n, 3..=5) =>
            {
                return fail(format!("thresholds need n in 3, 4, 5, got n = {}", p.n));
            }
            _ => {}
        }
        match self.scenario {
            Scenario::ConvergencePositiveKappa => {
                if !(p.kappa > 0.0) {
                    return fail(format!("requires kappa > 0, got {}", p.kappa));
                }
                if !(p.mu > mu1(p)) {
                    return fail(format!("requires mu > mu1 = {}, got {}", mu1(p), p.mu));
                }
                if let Err(e) = gamma_rate(p) {
                    return fail(e.to_string());
                }
            }
            Scenario::DecayZeroKappa if p.kappa != 0.0 => {
                return fail(format!("requires kappa = 0, got {}", p.kappa));
            }
            Scenario::DecayNegativeKappa if !(p.kappa < 0.0) => {
                return fail(format!("requires kappa < 0, got {}", p.kappa));
            }
            Scenario::ConvexComparison => {
                if p.d1 != p.d2 || !(p.chi > 0.0) {
                    return fail("requires d1 = d2 and chi > 0".into());
                }
            }
            Scenario::SmallDiffusionSweep => {
                if self.sweep_values.is_empty() {
                    return fail("sweep_values must not be empty".into());
                }
                check_axis(p, &self.sweep_axis, &self.sweep_values).or_else(fail)?;
            }
            Scenario::ManufacturedOrder if self.levels < 3 => {
                return fail(format!("needs at least 3 levels, got {}", self.levels));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let s = &self.solver;
        let join_f = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let _ = writeln!(out, "[params]");
        for (k, v) in [
            ("d1", p.d1),
            ("d2", p.d2),
            ("chi", p.chi),
            ("alpha", p.alpha),
            ("beta", p.beta),
            ("kappa", p.kappa),
            ("mu", p.mu),
            ("a", p.a),
        ] {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "n = {}", p.n);
        let _ = writeln!(out, "\n[grid]");
        let cells: Vec<String> = self.grid.cells().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "cells = {}", cells.join(","));
        let _ = writeln!(out, "extents = {}", join_f(self.grid.extents()));
        let _ = writeln!(out, "\n[solver]");
        let _ = writeln!(out, "dt_initial = {}", s.dt_initial);
        let _ = writeln!(out, "dt_min = {}", s.dt_min);
        let _ = writeln!(out, "t_end = {}", s.t_end);
        let _ = writeln!(out, "cfl_safety = {}", s.cfl_safety);
        let _ = writeln!(out, "scheme = {}", s.scheme.as_str());
        let _ = writeln!(out, "blowup_linf_threshold = {}", s.blowup_linf_threshold);
        let _ = writeln!(out, "snapshot_stride = {}", s.snapshot_stride);
        let _ = writeln!(out, "strang = {}", s.strang);
        let _ = writeln!(out, "keep_states = {}", s.keep_states);
        let _ = writeln!(out, "\n[ic]");
        match &self.ic {
            IcSpec::ConstantPlusPerturbation { u, v, amplitude } => {
                let _ = writeln!(out, "kind = constant-plus-perturbation");
                let _ = writeln!(out, "u = {u}\nv = {v}\namplitude = {amplitude}");
            }
            IcSpec::GaussianBump {
                u_base,
                v_base,
                amplitude,
                width,
                centre,
            } => {
                let _ = writeln!(out, "kind = gaussian-bump");
                let _ = writeln!(out, "u_base = {u_base}\nv_base = {v_base}");
                let _ = writeln!(out, "amplitude = {amplitude}\nwidth = {width}");
                if let Some(c) = centre {
                    let _ = writeln!(out, "centre = {}", join_f(c));
                }
            }
            IcSpec::CustomField { u_file, v_file } => {
                let _ = writeln!(out, "kind = custom-field");
                let _ = writeln!(
                    out,
                    "u_file = {}\nv_file = {}",
                    u_file.display(),
                    v_file.display()
                );
            }
        }
        let _ = writeln!(out, "\n[scenario]");
        let _ = writeln!(out, "name = {}", self.scenario.as_str());
        let _ = writeln!(out, "convex = {}", self.convex);
        let _ = writeln!(out, "output = {}", self.output.display());
        let _ = writeln!(out, "seed = {}", self.seed);
        if let Some((a, b)) = self.window {
            let _ = writeln!(out, "window = {a},{b}");
        }
        let _ = writeln!(out, "sweep_axis = {}", self.sweep_axis);
        if !self.sweep_values.is_empty() {
            let _ = writeln!(out, "sweep_values = {}", join_f(&self.sweep_values));
        }
        let _ = writeln!(out, "levels = {}", self.levels);
        out
    }
}

/// Checks that every value is admissible for the named parameter.
pub fn check_axis(base: &Parameters, axis: &str, values: &[f64]) -> Result<(), String> {
    if !PARAM_AXES.contains(&axis) {
        return Err(format!(
            "sweep axis must be one of {}, got {axis:?}",
            PARAM_AXES.join(", ")
        ));
    }
    for &v in values {
        let mut p = *base;
        set_param(&mut p, axis, v);
        p.validate().map_err(|e| format!("{axis} = {v}: {e}"))?;
    }
    Ok(())
}

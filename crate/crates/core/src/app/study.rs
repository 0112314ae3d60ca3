//! Convergence sweeps for the manufactured solution and cavity runs.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{export_subdomain_csv, export_vtk, write_csv};
use super::problems::{Cavity, Example1};
use crate::analysis::{observed_orders, relative_error_series, ErrorEntry};
use crate::error::{Error, Result};
use crate::fem::{ElementPair, FESpace, Field};
use crate::mesh::{generate_structured_unit_square, Pattern};
use crate::scheme::{Capture, RunConfig, RunHistory, SchemeKind, Solver};

/// Desk-scale mesh divisions for `dt = h²` and `dt = h³`.
pub const DEFAULT_N_H2: [usize; 5] = [8, 12, 16, 24, 32];
pub const DEFAULT_N_H3: [usize; 4] = [8, 10, 12, 16];
pub const FULL_N_H2: [usize; 5] = [16, 23, 32, 45, 64];
pub const FULL_N_H3: [usize; 5] = [16, 19, 23, 27, 32];

/// Window `(0.3, 0.7) × (0.8, 1.0)` below the lid.
pub const CAVITY_WINDOW: [[f64; 2]; 2] = [[0.3, 0.8], [0.7, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DtRule {
    H2,
    H3,
}

impl DtRule {
    pub fn dt(self, h: f64) -> f64 {
        match self {
            DtRule::H2 => h * h,
            DtRule::H3 => h * h * h,
        }
    }

    pub fn default_sizes(self, full: bool) -> Vec<usize> {
        match (self, full) {
            (DtRule::H2, false) => DEFAULT_N_H2.to_vec(),
            (DtRule::H3, false) => DEFAULT_N_H3.to_vec(),
            (DtRule::H2, true) => FULL_N_H2.to_vec(),
            (DtRule::H3, true) => FULL_N_H3.to_vec(),
        }
    }
}

impl std::str::FromStr for DtRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h2" => Ok(DtRule::H2),
            "h3" => Ok(DtRule::H3),
            _ => Err(Error::invalid(format!("unknown dt rule '{s}' (expected h2 or h3)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub scheme: SchemeKind,
    pub pair: ElementPair,
    pub pattern: Pattern,
    pub nu: f64,
    pub t_final: f64,
    pub dt_rule: DtRule,
    pub sizes: Vec<usize>,
    pub strict_cfl: bool,
    pub reproducible: bool,
}

impl StudyConfig {
    pub fn new(scheme: SchemeKind, nu: f64, dt_rule: DtRule, sizes: Vec<usize>) -> Self {
        StudyConfig {
            scheme,
            pair: ElementPair::TaylorHood,
            pattern: Pattern::Crisscross,
            nu,
            t_final: 1.0,
            dt_rule,
            sizes,
            strict_cfl: false,
            reproducible: true,
        }
    }
}

/// One line of a sweep. `errors` and `orders` are NaN when unavailable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    /// `E_H1_u`, `E_L2_p`, `E_L2inf_u`.
    pub errors: [f64; 3],
    /// Order against the previous row.
    pub orders: [f64; 3],
    /// `ok` or a failure description.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub rows: Vec<SweepRow>,
}

impl ErrorSeries {
    /// Builds rows and pairwise orders between consecutive successful runs.
    pub fn from_results(results: Vec<(usize, f64, f64, std::result::Result<ErrorEntry, String>)>) -> Result<Self> {
        let mut rows: Vec<SweepRow> = results
            .into_iter()
            .map(|(n, h, dt, r)| match r {
                Ok(e) => SweepRow {
                    n,
                    h,
                    dt,
                    errors: [e.velocity_linf_h1, e.pressure_l2_l2, e.velocity_linf_l2],
                    orders: [f64::NAN; 3],
                    status: "ok".into(),
                },
                Err(msg) => SweepRow {
                    n,
                    h,
                    dt,
                    errors: [f64::NAN; 3],
                    orders: [f64::NAN; 3],
                    status: msg,
                },
            })
            .collect();
        for i in 1..rows.len() {
            if rows[i].is_ok() && rows[i - 1].is_ok() {
                let h = [rows[i - 1].h, rows[i].h];
                for q in 0..3 {
                    rows[i].orders[q] = observed_orders(&h, &[rows[i - 1].errors[q], rows[i].errors[q]])?[0];
                }
            }
        }
        Ok(ErrorSeries { rows })
    }

    /// Order of quantity `q` (0: H¹ of u, 1: ℓ²(L²) of p, 2: ℓ∞(L²) of u) on the last row.
    pub fn last_order(&self, q: usize) -> Option<f64> {
        self.rows.last().map(|r| r.orders[q]).filter(|o| o.is_finite())
    }
}

/// Example 1 on each mesh of `config.sizes`; runs execute in parallel.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ErrorSeries> {
    if config.sizes.is_empty() {
        return Err(Error::invalid("mesh size list is empty"));
    }
    if config.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("mesh sizes must be strictly increasing"));
    }
    let problem = Arc::new(Example1::new(config.nu)?);
    let results = config
        .sizes
        .par_iter()
        .map(|&n| -> Result<_> {
            let h = 1.0 / n as f64;
            let dt = config.dt_rule.dt(h);
            let outcome = match run_example1(config, problem.clone(), n, dt) {
                Ok(history) => match history.failure {
                    None => relative_error_series(&history, n, h).map_err(|e| e.to_string()),
                    Some(f) => Err(format!("failed at step {}: {}", f.step, f.error)),
                },
                Err(e @ (Error::InvalidArgument(_) | Error::SingularGeometry { .. })) => return Err(e),
                Err(e) => Err(format!("failed: {e}")),
            };
            if let Err(msg) = &outcome {
                log::warn!("N = {n}: {msg}");
            }
            Ok((n, h, dt, outcome))
        })
        .collect::<Result<Vec<_>>>()?;
    ErrorSeries::from_results(results)
}

fn run_example1(config: &StudyConfig, problem: Arc<Example1>, n: usize, dt: f64) -> Result<RunHistory> {
    let mesh = Arc::new(generate_structured_unit_square(n, config.pattern)?);
    let space = Arc::new(FESpace::new(mesh, config.pair)?);
    let mut rc = RunConfig::new(config.nu, config.t_final, dt, config.scheme, config.pair);
    rc.strict_cfl = config.strict_cfl;
    rc.reproducible = config.reproducible;
    rc.capture = Capture {
        errors: true,
        snapshot_every: None,
    };
    Solver::new(space, problem, rc)?.run()
}

/// Runs the Example 1 sweep and writes `convergence_<scheme>_<rule>.csv` into `out`.
pub fn run_convergence_study_to(config: &StudyConfig, out: &Path) -> Result<ErrorSeries> {
    let series = run_convergence_study(config)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let name = format!("convergence_{}_{:?}.csv", config.scheme, config.dt_rule).to_lowercase();
    write_csv(&series, &out.join(name))?;
    Ok(series)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub scheme: SchemeKind,
    pub pair: ElementPair,
    pub pattern: Pattern,
    pub nu: f64,
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    /// Snapshot interval in steps; the final state is always kept.
    pub snapshot_every: usize,
    pub strict_cfl: bool,
    pub reproducible: bool,
}

impl CavityConfig {
    pub fn new(scheme: SchemeKind, nu: f64, n: usize, dt: f64) -> Self {
        CavityConfig {
            scheme,
            pair: ElementPair::TaylorHood,
            pattern: Pattern::Crisscross,
            nu,
            n,
            dt,
            t_final: 8.0,
            snapshot_every: usize::MAX,
            strict_cfl: false,
            reproducible: false,
        }
    }
}

pub struct CavityRun {
    pub space: Arc<FESpace>,
    pub history: RunHistory,
    /// Oscillation indicator `max |u_h|` over the window, per snapshot.
    pub window_max: Vec<(usize, f64)>,
}

pub fn run_cavity(config: &CavityConfig) -> Result<CavityRun> {
    let mesh = Arc::new(generate_structured_unit_square(config.n, config.pattern)?);
    let space = Arc::new(FESpace::new(mesh, config.pair)?);
    let mut rc = RunConfig::new(config.nu, config.t_final, config.dt, config.scheme, config.pair);
    rc.strict_cfl = config.strict_cfl;
    rc.reproducible = config.reproducible;
    rc.capture.snapshot_every = Some(config.snapshot_every.max(1));
    let history = Solver::new(space.clone(), Arc::new(Cavity::new(config.nu)?), rc)?.run()?;
    let window_max = history
        .snapshots
        .iter()
        .map(|s| (s.n, window_max_speed(&space, &s.velocity)))
        .collect();
    Ok(CavityRun {
        space,
        history,
        window_max,
    })
}

/// Largest velocity magnitude at interior vertices and edge midpoints inside
/// [`CAVITY_WINDOW`]. Lid points are skipped.
pub fn window_max_speed(space: &FESpace, u: &Field) -> f64 {
    super::output::sample_velocity(space, u)
        .into_iter()
        .filter(|(x, _)| in_window(*x) && x[1] < 1.0 - 1e-12)
        .map(|(_, v)| v[0].hypot(v[1]))
        .fold(0.0, f64::max)
}

fn in_window(x: [f64; 2]) -> bool {
    let [lo, hi] = CAVITY_WINDOW;
    x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1]
}

/// Runs the cavity and writes a VTK file and a window sample per snapshot.
pub fn run_cavity_to(config: &CavityConfig, out: &Path) -> Result<CavityRun> {
    let run = run_cavity(config)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for s in &run.history.snapshots {
        export_vtk(&run.space, Some(&s.velocity), Some(&s.pressure), &out.join(format!("cavity_{:06}.vtk", s.n)))?;
        export_subdomain_csv(
            &run.space,
            &s.velocity,
            CAVITY_WINDOW,
            &out.join(format!("window_{:06}.csv", s.n)),
        )?;
    }
    Ok(run)
}

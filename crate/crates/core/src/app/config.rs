//! Flat TOML run files.
//!
//! ```toml
//! problem = "example1"   # or "cavity"
//! nu = 0.01
//! t_final = 1.0
//! dt = 0.00390625
//! scheme = "lgllv"       # or "lgq"
//! pair = "p2p1"          # or "p1bp1"
//! n = 16
//! pattern = "crisscross" # or "right"
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use super::output::{export_vtk, format_sci};
use super::problems::{Cavity, Example1};
use crate::error::{Error, Result};
use crate::fem::{ElementPair, FESpace};
use crate::mesh::{generate_structured_unit_square, load_mesh, Pattern};
use crate::scheme::{Capture, Problem, RunConfig, RunHistory, SchemeKind, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    Example1,
    Cavity,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub problem: ProblemId,
    pub nu: f64,
    pub t_final: f64,
    pub dt: f64,
    pub scheme: SchemeKind,
    #[serde(default = "default_pair")]
    pub pair: ElementPair,
    /// Structured mesh divisions; ignored when `mesh_file` is given.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_pattern")]
    pub pattern: Pattern,
    #[serde(default)]
    pub mesh_file: Option<String>,
    #[serde(default)]
    pub strict_cfl: bool,
    #[serde(default)]
    pub reproducible: bool,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default)]
    pub snapshot_every: Option<usize>,
}

fn default_pair() -> ElementPair {
    ElementPair::TaylorHood
}

fn default_pattern() -> Pattern {
    Pattern::Crisscross
}

fn default_c0() -> f64 {
    1.0
}

impl RunFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let mut rc = RunConfig::new(self.nu, self.t_final, self.dt, self.scheme, self.pair);
        rc.strict_cfl = self.strict_cfl;
        rc.reproducible = self.reproducible;
        rc.c0 = self.c0;
        rc.capture = Capture {
            errors: self.problem == ProblemId::Example1,
            snapshot_every: self.snapshot_every,
        };
        rc.validate()?;
        Ok(rc)
    }

    pub fn build(&self) -> Result<Solver> {
        let rc = self.run_config()?;
        let mesh = match (&self.mesh_file, self.n) {
            (Some(path), _) => load_mesh(Path::new(path))?,
            (None, Some(n)) => generate_structured_unit_square(n, self.pattern)?,
            (None, None) => return Err(Error::invalid("either n or mesh_file must be given")),
        };
        let space = Arc::new(FESpace::new(Arc::new(mesh), self.pair)?);
        let problem: Arc<dyn Problem> = match self.problem {
            ProblemId::Example1 => Arc::new(Example1::new(self.nu)?),
            ProblemId::Cavity => Arc::new(Cavity::new(self.nu)?),
        };
        Solver::new(space, problem, rc)
    }
}

/// Per-step table of a run.
pub fn format_history(history: &RunHistory) -> String {
    let mut s = String::from("n,t,u_L2,u_H1,p_L2,dt_grad_w,jacobian_ok,div_max,residual,wall_time\n");
    for r in &history.records {
        let (g, ok) = r.cfl.map_or((f64::NAN, true), |c| (c.dt_times_grad, c.jacobian_ok));
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            format_sci(r.t),
            format_sci(r.velocity_l2),
            format_sci(r.velocity_h1),
            format_sci(r.pressure_l2),
            format_sci(g),
            ok,
            format_sci(r.divergence),
            format_sci(r.solver_residual),
            format_sci(r.wall_time)
        );
    }
    s
}

/// Runs a file configuration, writing `history.csv` and `final.vtk` into `out`.
pub fn run_file(file: &RunFile, out: &Path) -> Result<RunHistory> {
    let solver = file.build()?;
    let history = solver.run()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let path = out.join("history.csv");
    std::fs::write(&path, format_history(&history)).map_err(|e| Error::io(&path, e))?;
    export_vtk(
        solver.space(),
        Some(&history.final_velocity),
        Some(&history.final_pressure),
        &out.join("final.vtk"),
    )?;
    for s in &history.snapshots {
        export_vtk(solver.space(), Some(&s.velocity), Some(&s.pressure), &out.join(format!("snapshot_{:06}.vtk", s.n)))?;
    }
    Ok(history)
}

//! Time stepping for the two Lagrange–Galerkin schemes.
//!
//! Each step solves
//!
//! ```text
//! (u^n/dt, v) + a(u^n, v) + b(v, p^n) = (u^{n-1} ∘ X₁/dt, v) + (f^n, v)
//! b(u^n, q) = 0
//! ```
//!
//! with the matrix of the left-hand side constant in time; it is factored
//! once when the solver is built.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{field_norm, NormKind, StepErrors};
use crate::error::{Error, Result};
use crate::fem::quadrature::HMS7;
use crate::fem::{ElementPair, FESpace, Field, Role};
use crate::mesh::Point;
use crate::system::{
    assemble_divergence, assemble_load, assemble_mass, assemble_stiffness, pressure_mean_row, ProjectionSource,
    SaddleSystem, StokesProjector,
};
use crate::transport::{assemble_composite_exact, assemble_composite_quadrature, check_admissibility, CflReport};

/// `‖B u‖_∞ ≤ INCOMPRESSIBILITY_TOL · ‖u‖₂ + DIVERGENCE_FLOOR` is checked
/// after every step.
pub const INCOMPRESSIBILITY_TOL: f64 = 1e-10;

/// Absolute slack for velocities that vanish up to roundoff.
pub const DIVERGENCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Exact transport integration with the vertex-linearized velocity.
    #[serde(rename = "lgllv")]
    LgLlv,
    /// Transport by the seven-point degree-5 rule with the full velocity.
    #[serde(rename = "lgq")]
    LgQuadrature,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::LgLlv => "lgllv",
            SchemeKind::LgQuadrature => "lgq",
        })
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lgllv" | "lg-llv" => Ok(SchemeKind::LgLlv),
            "lgq" | "lg'" | "lgprime" => Ok(SchemeKind::LgQuadrature),
            _ => Err(Error::invalid(format!("unknown scheme '{s}' (expected lgllv or lgq)"))),
        }
    }
}

/// Data of an initial-boundary value problem on the mesh domain.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;
    fn force(&self, x: Point, t: f64) -> [f64; 2];
    fn boundary_velocity(&self, x: Point, t: f64) -> [f64; 2];
    fn initial_velocity(&self, x: Point) -> [f64; 2];
    /// `[c][d] = ∂_d u0_c`.
    fn initial_velocity_grad(&self, x: Point) -> [[f64; 2]; 2];
    fn exact(&self) -> Option<&dyn ExactSolution> {
        None
    }
}

pub trait ExactSolution: Send + Sync {
    fn velocity(&self, x: Point, t: f64) -> [f64; 2];
    fn pressure(&self, x: Point, t: f64) -> f64;
}

/// What to keep while running.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Capture {
    /// Per-step norms of `Π_h φ − φ_h` against the exact solution.
    pub errors: bool,
    /// Store fields every `k` steps (the final step is always stored when set).
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub nu: f64,
    pub t_final: f64,
    pub dt: f64,
    pub scheme: SchemeKind,
    pub pair: ElementPair,
    /// Reject steps with `dt·|Π¹w|_{1,∞} > 1/4` instead of only reporting.
    pub strict_cfl: bool,
    /// Constant in the informational ratio `dt / (c0 √h)`.
    pub c0: f64,
    pub capture: Capture,
    /// Record zero wall times so that histories compare bit for bit.
    pub reproducible: bool,
}

impl RunConfig {
    pub fn new(nu: f64, t_final: f64, dt: f64, scheme: SchemeKind, pair: ElementPair) -> Self {
        RunConfig {
            nu,
            t_final,
            dt,
            scheme,
            pair,
            strict_cfl: false,
            c0: 1.0,
            capture: Capture::default(),
            reproducible: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid(format!("final time must be positive, got {}", self.t_final)));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::invalid(format!("c0 must be positive, got {}", self.c0)));
        }
        if self.capture.snapshot_every == Some(0) {
            return Err(Error::invalid("snapshot interval must be at least 1"));
        }
        if self.num_steps() < 1 {
            return Err(Error::invalid(format!(
                "final time {} is shorter than one step of {}",
                self.t_final, self.dt
            )));
        }
        Ok(())
    }

    /// `N_T = ⌊T/dt⌋`, with a relative guard against rounding in `T/dt`.
    pub fn num_steps(&self) -> usize {
        let r = self.t_final / self.dt;
        (r * (1.0 + 1e-12)).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    pub velocity_l2: f64,
    pub velocity_h1: f64,
    pub pressure_l2: f64,
    /// `None` for the initial state.
    pub cfl: Option<CflReport>,
    /// `‖B u‖_∞` of the discrete solution.
    pub divergence: f64,
    pub solver_residual: f64,
    pub wall_time: f64,
    pub errors: Option<StepErrors>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    pub velocity: Field,
    pub pressure: Field,
}

#[derive(Debug)]
pub struct StepFailure {
    pub step: usize,
    pub error: Error,
}

/// Records for `n = 0..` up to the last completed step.
#[derive(Debug)]
pub struct RunHistory {
    pub dt: f64,
    pub num_steps: usize,
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<Snapshot>,
    pub final_velocity: Field,
    pub final_pressure: Field,
    /// Set when the run stopped before `num_steps`.
    pub failure: Option<StepFailure>,
}

impl RunHistory {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_result(self) -> Result<RunHistory> {
        match self.failure {
            None => Ok(self),
            Some(StepFailure { step, error }) => Err(Error::AtStep {
                step,
                source: Box::new(error),
            }),
        }
    }
}

pub struct StepOutput {
    pub velocity: Field,
    pub pressure: Field,
    pub cfl: CflReport,
    pub divergence: f64,
    pub solver_residual: f64,
}

pub struct Solver {
    space: Arc<FESpace>,
    problem: Arc<dyn Problem>,
    config: RunConfig,
    mass: crate::system::SparseMatrix,
    system: SaddleSystem,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("problem", &self.problem.name())
            .field("config", &self.config)
            .field("system", &self.system)
            .finish()
    }
}

impl Solver {
    pub fn new(space: Arc<FESpace>, problem: Arc<dyn Problem>, config: RunConfig) -> Result<Self> {
        config.validate()?;
        if space.pair() != config.pair {
            return Err(Error::invalid(format!(
                "space uses {} but the configuration asks for {}",
                space.pair(),
                config.pair
            )));
        }
        let mass = assemble_mass(&space);
        let a = assemble_stiffness(&space, config.nu)?;
        let k = mass.scaled(1.0 / config.dt).add(&a);
        let system = SaddleSystem::new(k, assemble_divergence(&space), pressure_mean_row(&space), space.dirichlet_mask())?;
        Ok(Solver {
            space,
            problem,
            config,
            mass,
            system,
        })
    }

    pub fn space(&self) -> &Arc<FESpace> {
        &self.space
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn system(&self) -> &SaddleSystem {
        &self.system
    }

    /// `u_h^0`: velocity part of the Stokes projection of `(u0, 0)`.
    pub fn initialize(&self) -> Result<(Field, Field)> {
        let projector = StokesProjector::new(self.space.clone(), self.config.nu)?;
        let p = self.problem.clone();
        let q = self.problem.clone();
        let velocity = move |x: Point| p.initial_velocity(x);
        let grad = move |x: Point| q.initial_velocity_grad(x);
        let zero = |_: Point| 0.0;
        let (u, p) = projector.project(&ProjectionSource::Analytic {
            velocity: &velocity,
            velocity_grad: &grad,
            pressure: &zero,
        })?;
        Ok((u.at_time(0.0), p.at_time(0.0)))
    }

    /// Advances `u_prev = u_h^{n-1}` to time level `n`.
    pub fn step(&self, u_prev: &Field, n: usize) -> Result<StepOutput> {
        let space = &*self.space;
        space.check_field(u_prev)?;
        let dt = self.config.dt;
        let t = n as f64 * dt;
        let w = space.p1_linearize(u_prev);
        let cfl = check_admissibility(space, &w, dt, space.mesh().h_param(), self.config.c0);

        let transport = match self.config.scheme {
            SchemeKind::LgLlv => {
                if self.config.strict_cfl && !cfl.jacobian_ok {
                    return Err(Error::StepRejected { step: n, report: cfl });
                }
                assemble_composite_exact(space, u_prev, &w, dt)?
            }
            SchemeKind::LgQuadrature => assemble_composite_quadrature(space, u_prev, u_prev, dt, &HMS7)?,
        };
        let load = assemble_load(space, |x, s| self.problem.force(x, s), t);
        let f: Vec<f64> = transport.iter().zip(&load).map(|(a, b)| a / dt + b).collect();
        let g = vec![0.0; space.n_pressure()];
        let boundary = space.interpolate_velocity(|x| self.problem.boundary_velocity(x, t)).coeffs;

        let sol = self.system.solve(&f, &g, &boundary)?;
        let divergence = self.divergence_of(&sol.velocity);
        let scale = sol.velocity.iter().map(|v| v * v).sum::<f64>().sqrt();
        if divergence > INCOMPRESSIBILITY_TOL * scale + DIVERGENCE_FLOOR {
            return Err(Error::Incompressibility { step: n, divergence });
        }
        Ok(StepOutput {
            velocity: Field::new(Role::Velocity, sol.velocity).at_time(t),
            pressure: Field::new(Role::Pressure, sol.pressure).at_time(t),
            cfl,
            divergence,
            solver_residual: sol.relative_residual,
        })
    }

    pub fn divergence_of(&self, velocity: &[f64]) -> f64 {
        self.system
            .divergence()
            .mul_vec(velocity)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Velocity mass matrix.
    pub fn mass(&self) -> &crate::system::SparseMatrix {
        &self.mass
    }

    /// Runs all `N_T` steps. A failing step ends the run; the history up to
    /// the last completed step is returned with the failure attached.
    pub fn run(&self) -> Result<RunHistory> {
        let n_steps = self.config.num_steps();
        let start = Instant::now();
        let (mut u, p0) = self.initialize()?;
        let mut records = vec![self.record(0, &u, &p0, None, self.divergence_of(&u.coeffs), 0.0, start)];
        let mut snapshots = Vec::new();
        self.maybe_snapshot(&mut snapshots, 0, n_steps, &u, &p0);
        let mut p = p0;
        let mut failure = None;

        for n in 1..=n_steps {
            let t0 = Instant::now();
            match self.step(&u, n) {
                Ok(out) => {
                    log::debug!(
                        "step {n}/{n_steps}: dt|w|_1,inf = {:.3e}, div = {:.2e}",
                        out.cfl.dt_times_grad,
                        out.divergence
                    );
                    records.push(self.record(
                        n,
                        &out.velocity,
                        &out.pressure,
                        Some(out.cfl),
                        out.divergence,
                        out.solver_residual,
                        t0,
                    ));
                    u = out.velocity;
                    p = out.pressure;
                    self.maybe_snapshot(&mut snapshots, n, n_steps, &u, &p);
                }
                Err(error) => {
                    log::warn!("run stopped at step {n}: {error}");
                    failure = Some(StepFailure { step: n, error });
                    break;
                }
            }
        }
        Ok(RunHistory {
            dt: self.config.dt,
            num_steps: n_steps,
            records,
            snapshots,
            final_velocity: u,
            final_pressure: p,
            failure,
        })
    }

    fn maybe_snapshot(&self, out: &mut Vec<Snapshot>, n: usize, n_steps: usize, u: &Field, p: &Field) {
        if let Some(k) = self.config.capture.snapshot_every {
            if n.is_multiple_of(k) || n == n_steps {
                out.push(Snapshot {
                    n,
                    t: n as f64 * self.config.dt,
                    velocity: u.clone(),
                    pressure: p.clone(),
                });
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        n: usize,
        u: &Field,
        p: &Field,
        cfl: Option<CflReport>,
        divergence: f64,
        solver_residual: f64,
        started: Instant,
    ) -> StepRecord {
        let space = &*self.space;
        let t = n as f64 * self.config.dt;
        let errors = match (self.config.capture.errors, self.problem.exact()) {
            (true, Some(exact)) => Some(step_errors(space, exact, u, p, t)),
            _ => None,
        };
        StepRecord {
            n,
            t,
            velocity_l2: field_norm(space, u, NormKind::L2),
            velocity_h1: field_norm(space, u, NormKind::H1Semi),
            pressure_l2: field_norm(space, p, NormKind::L2),
            cfl,
            divergence,
            solver_residual,
            wall_time: if self.config.reproducible {
                0.0
            } else {
                started.elapsed().as_secs_f64()
            },
            errors,
        }
    }
}

/// Norms of `Π_h u(t) − u` and `Π_h p(t) − p`, the pressure interpolant
/// shifted to zero mean.
pub fn step_errors(space: &FESpace, exact: &dyn ExactSolution, u: &Field, p: &Field, t: f64) -> StepErrors {
    let iu = space.interpolate_velocity(|x| exact.velocity(x, t));
    let ip = space.interpolate_pressure(|x| exact.pressure(x, t), true);
    let du = Field::new(Role::Velocity, iu.coeffs.iter().zip(&u.coeffs).map(|(a, b)| a - b).collect());
    let dp = Field::new(Role::Pressure, ip.coeffs.iter().zip(&p.coeffs).map(|(a, b)| a - b).collect());
    StepErrors {
        velocity_h1_diff: field_norm(space, &du, NormKind::H1Semi),
        velocity_h1_ref: field_norm(space, &iu, NormKind::H1Semi),
        velocity_l2_diff: field_norm(space, &du, NormKind::L2),
        velocity_l2_ref: field_norm(space, &iu, NormKind::L2),
        pressure_l2_diff: field_norm(space, &dp, NormKind::L2),
        pressure_l2_ref: field_norm(space, &ip, NormKind::L2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_unit_square, Pattern};

    struct Rest;

    impl Problem for Rest {
        fn name(&self) -> &str {
            "rest"
        }
        fn force(&self, _: Point, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn boundary_velocity(&self, _: Point, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn initial_velocity(&self, _: Point) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn initial_velocity_grad(&self, _: Point) -> [[f64; 2]; 2] {
            [[0.0; 2]; 2]
        }
    }

    fn solver(scheme: SchemeKind, t_final: f64, dt: f64) -> Solver {
        let mesh = Arc::new(generate_structured_unit_square(4, Pattern::Crisscross).unwrap());
        let space = Arc::new(FESpace::new(mesh, ElementPair::Mini).unwrap());
        Solver::new(space, Arc::new(Rest), RunConfig::new(1.0, t_final, dt, scheme, ElementPair::Mini)).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [SchemeKind::LgLlv, SchemeKind::LgQuadrature] {
            assert_eq!(s.to_string().parse::<SchemeKind>().unwrap(), s);
        }
        assert!("euler".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn step_count_and_validation() {
        let c = RunConfig::new(1.0, 1.0, 1.0 / 64.0, SchemeKind::LgLlv, ElementPair::TaylorHood);
        assert_eq!(c.num_steps(), 64);
        let c = RunConfig::new(1.0, 1.0, 1.0 / 1728.0, SchemeKind::LgLlv, ElementPair::TaylorHood);
        assert_eq!(c.num_steps(), 1728);
        let c = RunConfig::new(1.0, 0.5, 0.3, SchemeKind::LgLlv, ElementPair::TaylorHood);
        assert_eq!(c.num_steps(), 1);
        assert!(RunConfig::new(1.0, 0.1, 0.3, SchemeKind::LgLlv, ElementPair::Mini).validate().is_err());
        assert!(RunConfig::new(0.0, 1.0, 0.1, SchemeKind::LgLlv, ElementPair::Mini).validate().is_err());
        assert!(RunConfig::new(1.0, 1.0, -0.1, SchemeKind::LgLlv, ElementPair::Mini).validate().is_err());
    }

    #[test]
    fn fluid_at_rest_stays_at_rest() {
        for scheme in [SchemeKind::LgLlv, SchemeKind::LgQuadrature] {
            let h = solver(scheme, 0.3, 0.1).run().unwrap();
            assert!(h.completed());
            assert_eq!(h.records.len(), 4);
            assert!(h.final_velocity.coeffs.iter().all(|v| v.abs() < 1e-14));
            assert!(h.final_pressure.coeffs.iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn pair_mismatch_rejected() {
        let mesh = Arc::new(generate_structured_unit_square(2, Pattern::Right).unwrap());
        let space = Arc::new(FESpace::new(mesh, ElementPair::Mini).unwrap());
        let cfg = RunConfig::new(1.0, 1.0, 0.5, SchemeKind::LgLlv, ElementPair::TaylorHood);
        assert!(Solver::new(space, Arc::new(Rest), cfg).is_err());
    }
}

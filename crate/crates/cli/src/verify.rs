//! Verification suites. Each writes one CSV row per instance:
//! `instance,measured,reference,ratio,pass`.

use std::fmt::Write as _;

use lindsim::channel::{dissipator_to_stochastic, truncation_majorant};
use lindsim::engine::{gadget_superoperator, run_density_matrix, run_trajectories, Mode, PlanOptions, TrajectoryConfig};
use lindsim::linalg::{trace_distance, DensityMatrix, PauliString, UnitaryOp};
use lindsim::model::{
    diamond_bounds, dissipator_superoperator, exact_propagate, exact_propagator, hamiltonian_superoperator,
    HamiltonianSpec, JumpSpec, LindbladSpec,
};
use lindsim::timedep::{ode_propagate, ode_propagator, theorem3_bound, Profile, TimeDepDissipator};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Model, ModelConfig};
use crate::error::CliError;
use crate::fmt_float;
use crate::simulate::build_plan;

pub const VERIFY_HEADER: &str = "instance,measured,reference,ratio,pass";

/// Single-step errors below this are oracle noise when the bound is zero.
const COMMUTING_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Converge,
    Bounds,
    Thm3,
    Taylor,
    Modes,
}

impl std::str::FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "converge" => Ok(Suite::Converge),
            "bounds" => Ok(Suite::Bounds),
            "thm3" => Ok(Suite::Thm3),
            "taylor" => Ok(Suite::Taylor),
            "modes" => Ok(Suite::Modes),
            other => Err(CliError::Invalid(format!(
                "unknown suite {other:?}; expected converge, bounds, thm3, taylor or modes"
            ))),
        }
    }
}

impl Suite {
    /// Model used when no config is given.
    pub fn default_config(self) -> &'static str {
        match self {
            Suite::Converge => include_str!("../configs/dephasing_x.json"),
            Suite::Thm3 => include_str!("../configs/timedep_dephasing.json"),
            Suite::Taylor | Suite::Bounds => include_str!("../configs/depolarizing.json"),
            Suite::Modes => include_str!("../configs/depolarizing_driven.json"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub time: f64,
    pub epsilon: f64,
    pub c0: f64,
    pub seed: u64,
    pub n_traj: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub instance: String,
    pub measured: f64,
    pub reference: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl Row {
    fn new(instance: String, measured: f64, reference: f64, pass: bool) -> Self {
        Self { instance, measured, reference, ratio: measured / reference, pass }
    }
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = format!("{VERIFY_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.instance,
            fmt_float(r.measured),
            fmt_float(r.reference),
            fmt_float(r.ratio),
            r.pass
        )
        .expect("writing to a String");
    }
    out
}

pub fn run_suite(suite: Suite, cfg: &ModelConfig, opts: &VerifyOptions) -> Result<Vec<Row>, CliError> {
    match suite {
        Suite::Converge => converge(cfg, opts),
        Suite::Bounds => bounds(opts),
        Suite::Thm3 => thm3(cfg),
        Suite::Taylor => taylor(cfg),
        Suite::Modes => modes(cfg, opts),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn reference_state(model: &Model, plan_spec: &LindbladSpec, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix, CliError> {
    Ok(match model {
        Model::TimeDep { hamiltonian, dissipator, .. } => ode_propagate(dissipator, hamiltonian, rho0, 0.0, t, 10_000)?,
        _ => exact_propagate(plan_spec, rho0, t)?,
    })
}

fn converge(cfg: &ModelConfig, opts: &VerifyOptions) -> Result<Vec<Row>, CliError> {
    let model = cfg.model()?;
    let rho0 = cfg.initial_ensemble()?.density_matrix().clone();
    let (mut dts, mut errs, mut rows) = (Vec::new(), Vec::new(), Vec::new());
    let mut reference = None;
    for r in (2..=8).map(|k| 1u64 << k) {
        let options = PlanOptions { steps: Some(r), taylor_order: Some(20), ..Default::default() };
        let plan = build_plan(&model, opts.time, opts.epsilon, opts.c0, options)?;
        if reference.is_none() {
            reference = Some(reference_state(&model, plan.spec(), &rho0, opts.time)?);
        }
        let err = trace_distance(&run_density_matrix(&plan, &rho0)?, reference.as_ref().expect("set above"))?;
        let dt = plan.dt();
        rows.push(Row::new(format!("r={r}"), err, dt * dt, true));
        dts.push(dt);
        errs.push(err);
    }
    let slope = loglog_slope(&dts, &errs);
    rows.push(Row::new("slope".into(), slope, 2.0, (slope - 2.0).abs() <= 0.2));
    Ok(rows)
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let s: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        let p: PauliString = s.parse().expect("letters are valid");
        if !p.is_identity() {
            return p;
        }
    }
}

/// Two-qubit spec with three signed Pauli terms and two unitary Pauli jumps.
pub fn random_bounds_spec(rng: &mut ChaCha8Rng) -> Result<LindbladSpec, CliError> {
    let labels: Vec<(f64, String)> =
        (0..3).map(|_| (2.0 * rng.random::<f64>() - 1.0, random_pauli(2, rng).to_string())).collect();
    let borrowed: Vec<(f64, &str)> = labels.iter().map(|(c, s)| (*c, s.as_str())).collect();
    let h = HamiltonianSpec::from_signed(2, &borrowed)?;
    let jumps = (0..2)
        .map(|_| {
            let alpha = Complex64::new(0.05 + 0.95 * rng.random::<f64>(), 0.0);
            JumpSpec::unitary(alpha, UnitaryOp::Pauli(random_pauli(2, rng)))
        })
        .collect::<lindsim::Result<Vec<_>>>()?;
    Ok(LindbladSpec::new(h, jumps)?)
}

fn bounds(opts: &VerifyOptions) -> Result<Vec<Row>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..10)
        .map(|i| {
            let spec = random_bounds_spec(&mut rng)?;
            let model = Model::Lindblad(spec.clone());
            let plan = build_plan(&model, opts.time, opts.epsilon, opts.c0, PlanOptions::default())?;
            let sim = gadget_superoperator(&plan, 0)?.pow(plan.steps());
            let exact = exact_propagator(&spec, opts.time)?;
            let measured = diamond_bounds(&exact.sub(&sim)?)?.lower;
            let bound = plan.error_bound().expect("budgeted plan");
            Ok(Row::new(format!("spec{i}"), measured, bound, measured <= bound))
        })
        .collect()
}

/// The model's dissipator as a profile-driven one.
fn timedep_parts(model: &Model) -> Result<(HamiltonianSpec, TimeDepDissipator), CliError> {
    match model {
        Model::TimeDep { hamiltonian, dissipator, .. } => Ok((hamiltonian.clone(), dissipator.clone())),
        Model::Lindblad(spec) => {
            let jumps = spec
                .unitary_jumps()
                .ok_or_else(|| CliError::Invalid("thm3 needs unitary jump operators".into()))?
                .into_iter()
                .map(|(a, u)| (Profile::Constant(a.norm_sqr()), u))
                .collect();
            Ok((spec.hamiltonian().clone(), TimeDepDissipator::new(spec.n_qubits(), jumps)?))
        }
        Model::Reset { .. } => Err(CliError::Invalid("thm3 does not support reset dissipators".into())),
    }
}

/// Lower bound on `‖𝒯e^{∫L} − e^{wH/2} 𝒯e^{∫D} e^{wH/2}‖◇` over `[s, s + w]`.
pub fn single_step_error(h: &HamiltonianSpec, d: &TimeDepDissipator, s: f64, w: f64) -> Result<f64, CliError> {
    let exact = ode_propagator(d, h, s, s + w, 64)?;
    let diss = ode_propagator(d, &HamiltonianSpec::zero(d.n_qubits()), s, s + w, 64)?;
    let k = hamiltonian_superoperator(h)?.exp(w / 2.0)?;
    let split = k.compose(&diss)?.compose(&k)?;
    Ok(diamond_bounds(&exact.sub(&split)?)?.lower)
}

fn thm3(cfg: &ModelConfig) -> Result<Vec<Row>, CliError> {
    let model = cfg.model()?;
    let (h, d) = timedep_parts(&model)?;
    let grid = match &model {
        Model::TimeDep { grid_points, .. } => *grid_points,
        _ => 1,
    };
    (1..=20)
        .map(|i| {
            let w = 0.01 * i as f64;
            let measured = single_step_error(&h, &d, 0.0, w)?;
            let bound = theorem3_bound(&h, &d, 0.0, w, grid)?;
            let pass = measured <= bound || (bound == 0.0 && measured <= COMMUTING_FLOOR);
            Ok(Row::new(format!("width={w:.2}"), measured, bound, pass))
        })
        .collect()
}

fn taylor(cfg: &ModelConfig) -> Result<Vec<Row>, CliError> {
    let Model::Lindblad(spec) = cfg.model()? else {
        return Err(CliError::Invalid("taylor needs a time-independent unitary-jump dissipator".into()));
    };
    let jumps = spec.unitary_jumps().ok_or_else(|| CliError::Invalid("taylor needs unitary jump operators".into()))?;
    let a: f64 = jumps.iter().map(|(al, _)| al.norm_sqr()).sum();
    if a <= 0.0 {
        return Err(CliError::Invalid("taylor needs a nonzero jump rate".into()));
    }
    let generator = dissipator_superoperator(spec.n_qubits(), spec.jumps())?;
    let mut rows = Vec::new();
    for x in [0.05, 0.2, 0.5] {
        for k in [2usize, 4, 8] {
            let dt = x / a;
            let (ch, _) = dissipator_to_stochastic(spec.n_qubits(), &jumps, dt, k)?;
            let exact = generator.exp(dt)?;
            let measured = diamond_bounds(&exact.sub(&ch.superoperator()?)?)?.upper;
            let majorant = truncation_majorant(x, k);
            rows.push(Row::new(format!("x={x}/K={k}"), measured, majorant, measured <= majorant));
        }
    }
    Ok(rows)
}

fn modes(cfg: &ModelConfig, opts: &VerifyOptions) -> Result<Vec<Row>, CliError> {
    let model = cfg.model()?;
    let observable = cfg.observable()?;
    let initial = cfg.initial_ensemble()?;
    let dm_plan = build_plan(&model, opts.time, opts.epsilon, opts.c0, PlanOptions::default())?;
    let dm = observable.expectation(&run_density_matrix(&dm_plan, initial.density_matrix())?);
    let mode = Mode::Trajectories(TrajectoryConfig { n_traj: opts.n_traj, seed: opts.seed, observable });
    let traj_plan = build_plan(&model, opts.time, opts.epsilon, opts.c0, PlanOptions { mode, ..Default::default() })?;
    let res = run_trajectories(&traj_plan, &initial)?;
    let gap = (res.estimate - dm).abs();
    Ok(vec![Row::new("traj_vs_dm".into(), gap, 4.0 * res.std_error, gap <= 4.0 * res.std_error)])
}

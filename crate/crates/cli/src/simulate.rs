use std::fmt::Write as _;

use lindsim::engine::{
    run_density_matrix, run_trajectories, Mode, PlanOptions, SimulationPlan, TrajectoryConfig,
};
use lindsim::linalg::DensityMatrix;
use lindsim::timedep::timedep_plan;
use serde::Serialize;

use crate::config::{Model, ModelConfig};
use crate::error::CliError;
use crate::fmt_float;

/// Largest register evolved as a dense density matrix.
pub const DENSITY_QUBIT_CAP: usize = 10;
/// Largest register evolved as a state vector.
pub const STATE_QUBIT_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    DensityMatrix,
    Trajectories,
}

#[derive(Clone, Debug)]
pub struct SimulateOptions {
    pub time: f64,
    pub epsilon: f64,
    pub c0: f64,
    pub mode: RunMode,
    pub n_traj: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationRecord {
    pub mode: &'static str,
    pub n_qubits: usize,
    pub time: f64,
    pub epsilon: f64,
    pub c0: f64,
    pub r: u64,
    pub dt: f64,
    pub taylor_k: usize,
    pub eps_h_budget: f64,
    pub hamiltonian_queries: u64,
    pub dissipator_queries: u64,
    pub error_bound: Option<f64>,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub n_traj: Option<usize>,
    pub seed: Option<u64>,
}

pub const SIMULATE_HEADER: &str = "mode,n_qubits,time,epsilon,c0,r,dt,taylor_k,eps_h_budget,hamiltonian_queries,dissipator_queries,error_bound,estimate,std_error,n_traj,seed";

impl SimulationRecord {
    pub fn to_csv(&self) -> String {
        let opt_f = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
        let opt_u = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{SIMULATE_HEADER}\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.mode,
            self.n_qubits,
            fmt_float(self.time),
            fmt_float(self.epsilon),
            fmt_float(self.c0),
            self.r,
            fmt_float(self.dt),
            self.taylor_k,
            fmt_float(self.eps_h_budget),
            self.hamiltonian_queries,
            self.dissipator_queries,
            opt_f(self.error_bound),
            fmt_float(self.estimate),
            opt_f(self.std_error),
            opt_u(self.n_traj.map(|n| n as u64)),
            opt_u(self.seed),
        )
    }
}

/// Budgeted plan for any configured model.
pub fn build_plan(model: &Model, time: f64, epsilon: f64, c0: f64, options: PlanOptions) -> Result<SimulationPlan, CliError> {
    Ok(match model {
        Model::Lindblad(spec) => SimulationPlan::new(spec.clone(), time, epsilon, c0, options)?,
        Model::Reset { hamiltonian, rate, ensemble } => {
            SimulationPlan::with_reset(hamiltonian.clone(), *rate, ensemble.clone(), time, epsilon, c0, options)?
        }
        Model::TimeDep { hamiltonian, dissipator, grid_points } => {
            timedep_plan(hamiltonian, dissipator, time, epsilon, c0, options, *grid_points)?
        }
    })
}

/// Runs the full pipeline and returns the record plus the final state in
/// density-matrix mode.
pub fn simulate(cfg: &ModelConfig, opts: &SimulateOptions) -> Result<(SimulationRecord, Option<DensityMatrix>), CliError> {
    let model = cfg.model()?;
    let n = model.n_qubits();
    let cap = match opts.mode {
        RunMode::DensityMatrix => DENSITY_QUBIT_CAP,
        RunMode::Trajectories => STATE_QUBIT_CAP,
    };
    if n > cap {
        return Err(CliError::Cap(format!("{n} qubits exceed the cap of {cap} for this mode")));
    }
    let observable = cfg.observable()?;
    let initial = cfg.initial_ensemble()?;
    let mode = match opts.mode {
        RunMode::DensityMatrix => Mode::DensityMatrix,
        RunMode::Trajectories => {
            Mode::Trajectories(TrajectoryConfig { n_traj: opts.n_traj, seed: opts.seed, observable: observable.clone() })
        }
    };
    let plan = build_plan(&model, opts.time, opts.epsilon, opts.c0, PlanOptions { mode, ..Default::default() })?;
    let (hq, dq) = plan.oracle_calls();
    let mut record = SimulationRecord {
        mode: "dm",
        n_qubits: n,
        time: opts.time,
        epsilon: opts.epsilon,
        c0: opts.c0,
        r: plan.steps(),
        dt: plan.dt(),
        taylor_k: plan.taylor_order(),
        eps_h_budget: plan.eps_h_budget(),
        hamiltonian_queries: hq,
        dissipator_queries: dq,
        error_bound: plan.error_bound(),
        estimate: 0.0,
        std_error: None,
        n_traj: None,
        seed: None,
    };
    match opts.mode {
        RunMode::DensityMatrix => {
            let rho = run_density_matrix(&plan, initial.density_matrix())?;
            record.estimate = observable.expectation(&rho);
            Ok((record, Some(rho)))
        }
        RunMode::Trajectories => {
            let res = run_trajectories(&plan, &initial)?;
            record.mode = "traj";
            record.estimate = res.estimate;
            record.std_error = Some(res.std_error);
            record.n_traj = Some(res.n_traj);
            record.seed = Some(opts.seed);
            Ok((record, None))
        }
    }
}

/// `row,col,re,im` for every entry.
pub fn state_csv(rho: &DensityMatrix) -> String {
    let mut out = String::from("row,col,re,im\n");
    let m = rho.matrix();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            writeln!(out, "{i},{j},{},{}", fmt_float(z.re), fmt_float(z.im)).expect("writing to a String");
        }
    }
    out
}

//! JSON model files.
//!
//! ```json
//! {
//!   "n_qubits": 1,
//!   "hamiltonian": [{ "coeff": 0.7, "pauli": "X" }],
//!   "dissipator": { "type": "dephasing", "gamma": 1.0 },
//!   "initial_state": { "basis": "0" },
//!   "observable": [{ "coeff": 1.0, "pauli": "Z" }]
//! }
//! ```
//!
//! Pauli strings are letter strings such as `"XZI"` (qubit 0 first) with an
//! optional `phase` in `{"+1", "-1", "+i", "-i"}`.

use std::fmt;
use std::path::Path;

use lindsim::channel::{make_example_channel, Ensemble, ExampleKind};
use lindsim::engine::Observable;
use lindsim::linalg::pauli::parse_phase;
use lindsim::linalg::{Pauli, PauliString, StateVector, UnitaryOp};
use lindsim::model::{HamiltonianSpec, JumpSpec, LindbladSpec};
use lindsim::timedep::{Profile, TimeDepDissipator, DEFAULT_GRID_POINTS};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Letters-only Pauli text, checked while parsing so errors carry a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliText(String);

impl TryFrom<String> for PauliText {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        if s.is_empty() {
            return Err("empty Pauli string".into());
        }
        if let Some((i, c)) = s.char_indices().find(|(_, c)| Pauli::from_char(*c).is_none()) {
            return Err(format!("bad Pauli letter {c:?} at position {i} in {s:?}; expected I, X, Y or Z"));
        }
        Ok(Self(s))
    }
}

impl From<PauliText> for String {
    fn from(p: PauliText) -> String {
        p.0
    }
}

impl fmt::Display for PauliText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One of `+1`, `-1`, `+i`, `-i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PhaseText(String);

impl TryFrom<String> for PhaseText {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        parse_phase(&s).map_err(|e| e.to_string())?;
        Ok(Self(s))
    }
}

impl From<PhaseText> for String {
    fn from(p: PhaseText) -> String {
        p.0
    }
}

impl PhaseText {
    fn value(&self) -> Complex64 {
        parse_phase(&self.0).expect("validated on parse")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliTerm {
    pub coeff: f64,
    pub pauli: PauliText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseText>,
}

impl PauliTerm {
    /// `coeff · phase · P` as a positive weight times a phased string.
    fn to_weighted(&self, n: usize, what: &str) -> Result<Option<(f64, PauliString)>, CliError> {
        let letters: PauliString = self.pauli.0.parse().map_err(CliError::from)?;
        if letters.n_qubits() != n {
            return Err(CliError::Invalid(format!(
                "{what} term {:?} acts on {} qubits, model has {n}",
                self.pauli.0,
                letters.n_qubits()
            )));
        }
        if !self.coeff.is_finite() {
            return Err(CliError::Invalid(format!("{what} coefficient {} is not finite", self.coeff)));
        }
        if self.coeff == 0.0 {
            return Ok(None);
        }
        let mut phase = self.phase.as_ref().map_or(Complex64::new(1.0, 0.0), PhaseText::value);
        if self.coeff < 0.0 {
            phase = -phase;
        }
        Ok(Some((self.coeff.abs(), letters.with_phase(phase)?)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilityTerm {
    pub p: f64,
    pub pauli: PauliText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub terms: Vec<PauliTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant { rate: f64 },
    Sinusoid { c0: f64, amp: f64, omega: f64 },
    PiecewiseLinear { knots: Vec<[f64; 2]> },
}

impl ProfileConfig {
    fn to_profile(&self) -> Profile {
        match self {
            ProfileConfig::Constant { rate } => Profile::Constant(*rate),
            ProfileConfig::Sinusoid { c0, amp, omega } => Profile::Sinusoid { c0: *c0, amp: *amp, omega: *omega },
            ProfileConfig::PiecewiseLinear { knots } => Profile::PiecewiseLinear(knots.iter().map(|k| (k[0], k[1])).collect()),
        }
    }
}

/// Jump `√γ(t) · U` with `U` a Pauli string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeDepJump {
    pub profile: ProfileConfig,
    pub pauli: PauliText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleMember {
    pub weight: f64,
    /// `[re, im]` pairs, basis index `0…01` second.
    pub amplitudes: Vec<[f64; 2]>,
}

fn default_dt() -> f64 {
    1.0
}

fn default_grid() -> usize {
    DEFAULT_GRID_POINTS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DissipatorConfig {
    /// `γ (I/2^n − ρ)`.
    Depolarizing { gamma: f64 },
    /// `√(Γ/2) Z` on every qubit.
    Dephasing {
        #[serde(alias = "Gamma")]
        gamma: f64,
    },
    /// The Pauli channel `Σ p_P P ρ P` over a time `dt`, simulated through
    /// its generator.
    Pauli {
        probs: Vec<ProbabilityTerm>,
        #[serde(default = "default_dt")]
        dt: f64,
    },
    /// Reset towards `ensemble` with survival probability `q` per unit time.
    Reset { q: f64, ensemble: Vec<EnsembleMember> },
    Custom { jumps: Vec<JumpConfig> },
    Timedep {
        jumps: Vec<TimeDepJump>,
        #[serde(default = "default_grid")]
        grid_points: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Computational basis label, qubit 0 first.
    Basis(String),
    Ensemble(Vec<EnsembleMember>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n_qubits: usize,
    #[serde(default)]
    pub hamiltonian: Vec<PauliTerm>,
    pub dissipator: DissipatorConfig,
    pub initial_state: InitialState,
    pub observable: Vec<PauliTerm>,
}

/// A validated model ready to plan.
#[derive(Clone, Debug)]
pub enum Model {
    Lindblad(LindbladSpec),
    Reset { hamiltonian: HamiltonianSpec, rate: f64, ensemble: Ensemble },
    TimeDep { hamiltonian: HamiltonianSpec, dissipator: TimeDepDissipator, grid_points: usize },
}

impl Model {
    pub fn n_qubits(&self) -> usize {
        match self {
            Model::Lindblad(s) => s.n_qubits(),
            Model::Reset { hamiltonian, .. } | Model::TimeDep { hamiltonian, .. } => hamiltonian.n_qubits(),
        }
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        match self {
            Model::Lindblad(s) => s.hamiltonian(),
            Model::Reset { hamiltonian, .. } | Model::TimeDep { hamiltonian, .. } => hamiltonian,
        }
    }
}

fn ensemble(n: usize, members: &[EnsembleMember]) -> Result<Ensemble, CliError> {
    let parts = members
        .iter()
        .map(|m| {
            if m.amplitudes.len() != 1 << n {
                return Err(CliError::Invalid(format!(
                    "ensemble state has {} amplitudes, expected {}",
                    m.amplitudes.len(),
                    1usize << n
                )));
            }
            let amps = m.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            Ok((m.weight, StateVector::new(amps)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Ensemble::new(parts)?)
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse(format!("line {}, column {}, field `{path}`: {inner}", inner.line(), inner.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn hamiltonian_spec(&self) -> Result<HamiltonianSpec, CliError> {
        let terms = self
            .hamiltonian
            .iter()
            .filter_map(|t| t.to_weighted(self.n_qubits, "hamiltonian").transpose())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HamiltonianSpec::new(self.n_qubits, terms)?)
    }

    pub fn model(&self) -> Result<Model, CliError> {
        let n = self.n_qubits;
        if n == 0 {
            return Err(CliError::Invalid("n_qubits must be positive".into()));
        }
        let h = self.hamiltonian_spec()?;
        let with_h = |spec: LindbladSpec| -> Result<Model, CliError> { Ok(Model::Lindblad(spec.with_hamiltonian(h.clone())?)) };
        match &self.dissipator {
            DissipatorConfig::Depolarizing { gamma } => {
                with_h(example_spec(&ExampleKind::Depolarizing { n, gamma: *gamma, dt: 1.0 })?)
            }
            DissipatorConfig::Dephasing { gamma } => with_h(example_spec(&ExampleKind::Dephasing { n, gamma: *gamma, dt: 1.0 })?),
            DissipatorConfig::Pauli { probs, dt } => {
                let probs = probs
                    .iter()
                    .map(|t| {
                        let p: PauliString = t.pauli.0.parse()?;
                        if p.n_qubits() != n {
                            return Err(CliError::Invalid(format!("Pauli channel term {:?} has the wrong width", t.pauli.0)));
                        }
                        Ok((t.p, p))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                with_h(example_spec(&ExampleKind::Pauli { probs, dt: *dt })?)
            }
            DissipatorConfig::Reset { q, ensemble: members } => {
                if !(*q > 0.0 && *q <= 1.0) {
                    return Err(CliError::Invalid(format!("reset survival probability {q} outside (0, 1]")));
                }
                Ok(Model::Reset { hamiltonian: h, rate: -q.ln(), ensemble: ensemble(n, members)? })
            }
            DissipatorConfig::Custom { jumps } => {
                let specs = jumps
                    .iter()
                    .map(|j| {
                        let terms = j
                            .terms
                            .iter()
                            .filter_map(|t| t.to_weighted(n, "jump").transpose())
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(JumpSpec::pauli_sum(n, terms)?)
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(Model::Lindblad(LindbladSpec::new(h, specs)?))
            }
            DissipatorConfig::Timedep { jumps, grid_points } => {
                let js = jumps
                    .iter()
                    .map(|j| {
                        let p: PauliString = j.pauli.0.parse()?;
                        Ok((j.profile.to_profile(), UnitaryOp::Pauli(p)))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(Model::TimeDep { hamiltonian: h, dissipator: TimeDepDissipator::new(n, js)?, grid_points: *grid_points })
            }
        }
    }

    pub fn initial_ensemble(&self) -> Result<Ensemble, CliError> {
        match &self.initial_state {
            InitialState::Basis(label) => {
                if label.len() != self.n_qubits {
                    return Err(CliError::Invalid(format!("basis label {label:?} does not have {} qubits", self.n_qubits)));
                }
                Ok(Ensemble::pure(StateVector::from_label(label)?))
            }
            InitialState::Ensemble(members) => ensemble(self.n_qubits, members),
        }
    }

    pub fn observable(&self) -> Result<Observable, CliError> {
        let terms = self
            .observable
            .iter()
            .map(|t| {
                let p: PauliString = t.pauli.0.parse()?;
                if p.n_qubits() != self.n_qubits {
                    return Err(CliError::Invalid(format!("observable term {:?} has the wrong width", t.pauli.0)));
                }
                let phase = t.phase.as_ref().map_or(Complex64::new(1.0, 0.0), PhaseText::value);
                Ok((t.coeff, p.with_phase(phase)?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Observable::new(self.n_qubits, terms)?)
    }
}

fn example_spec(kind: &ExampleKind) -> Result<LindbladSpec, CliError> {
    make_example_channel(kind)?
        .spec
        .ok_or_else(|| CliError::Invalid("channel has no finite generator".into()))
}

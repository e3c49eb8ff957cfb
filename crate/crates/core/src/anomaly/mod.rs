//! Controlled anomaly injection.
//!
//! Each of the eight anomaly kinds is an [`Injector`] registered by name in
//! an [`InjectorRegistry`]. An injection draws all its randomness from one
//! ChaCha8 stream seeded by [`AnomalySpec::seed`]. Sites are picked by
//! shuffling every eligible site and taking a prefix, so for a fixed seed
//! the sites hit at a lower severity are a subset of those hit at a higher
//! one.

mod commute;
mod injectors;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;

pub use commute::ops_commute;
pub use injectors::{Deletion, Insertion, QubitSwap, Reorder, Substitution, TrojanInsertion, SUBSTITUTIONS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnomalyError {
    #[error("no eligible site for anomaly `{0}`")]
    Ineligible(AnomalyKind),
    #[error("severity must be in (0, 1], got {0}")]
    InvalidSeverity(f64),
    #[error("unknown anomaly kind `{0}`")]
    UnknownKind(String),
    #[error("injector `{0}` registered twice")]
    DuplicateInjector(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    #[serde(rename = "del_1q")]
    Del1q,
    #[serde(rename = "del_2q")]
    Del2q,
    Insert,
    Substitute,
    Reorder,
    TrojanNot,
    TrojanH,
    QubitSwap,
}

impl AnomalyKind {
    pub const ALL: [AnomalyKind; 8] = [
        AnomalyKind::Del1q,
        AnomalyKind::Del2q,
        AnomalyKind::Insert,
        AnomalyKind::Substitute,
        AnomalyKind::Reorder,
        AnomalyKind::TrojanNot,
        AnomalyKind::TrojanH,
        AnomalyKind::QubitSwap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnomalyKind::Del1q => "del_1q",
            AnomalyKind::Del2q => "del_2q",
            AnomalyKind::Insert => "insert",
            AnomalyKind::Substitute => "substitute",
            AnomalyKind::Reorder => "reorder",
            AnomalyKind::TrojanNot => "trojan_not",
            AnomalyKind::TrojanH => "trojan_h",
            AnomalyKind::QubitSwap => "qubit_swap",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, AnomalyError> {
        AnomalyKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| AnomalyError::UnknownKind(name.to_string()))
    }
}

impl fmt::Display for AnomalyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Mode {
    /// One minimal perturbation.
    Fixed,
    /// `max(1, round(s · eligible_sites))` perturbations.
    Severity(f64),
}

impl Mode {
    pub fn severity(s: f64) -> Result<Mode, AnomalyError> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(AnomalyError::InvalidSeverity(s));
        }
        Ok(Mode::Severity(s))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Mode::Fixed => "fixed",
            Mode::Severity(_) => "severity",
        }
    }

    pub fn severity_value(&self) -> Option<f64> {
        match self {
            Mode::Fixed => None,
            Mode::Severity(s) => Some(*s),
        }
    }

    /// Number of perturbations requested for `eligible` sites.
    pub fn budget(&self, eligible: usize) -> usize {
        match self {
            Mode::Fixed => 1,
            Mode::Severity(s) => ((s * eligible as f64).round() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnomalySpec {
    pub kind: AnomalyKind,
    pub mode: Mode,
    pub seed: u64,
}

impl AnomalySpec {
    pub fn fixed(kind: AnomalyKind, seed: u64) -> Self {
        AnomalySpec {
            kind,
            mode: Mode::Fixed,
            seed,
        }
    }

    pub fn with_severity(kind: AnomalyKind, severity: f64, seed: u64) -> Result<Self, AnomalyError> {
        Ok(AnomalySpec {
            kind,
            mode: Mode::severity(severity)?,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppliedChange {
    pub op_index: usize,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnomalyLog {
    pub kind: AnomalyKind,
    pub applied: Vec<AppliedChange>,
    pub requested_count: usize,
    pub applied_count: usize,
}

impl AnomalyLog {
    pub(crate) fn new(kind: AnomalyKind, requested_count: usize, mut applied: Vec<AppliedChange>) -> Self {
        applied.sort_by_key(|c| c.op_index);
        AnomalyLog {
            kind,
            requested_count,
            applied_count: applied.len(),
            applied,
        }
    }
}

/// One anomaly kind.
pub trait Injector: Send + Sync {
    fn kind(&self) -> AnomalyKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Size of the site population the severity factor scales.
    fn eligible_sites(&self, circuit: &Circuit) -> usize;

    /// Applies `count` perturbations (at least 1). Fails with
    /// [`AnomalyError::Ineligible`] when nothing can be perturbed.
    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError>;
}

pub struct InjectorRegistry {
    injectors: BTreeMap<&'static str, Box<dyn Injector>>,
}

impl InjectorRegistry {
    pub fn empty() -> Self {
        InjectorRegistry {
            injectors: BTreeMap::new(),
        }
    }

    /// All eight built-in kinds.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        let all: [Box<dyn Injector>; 8] = [
            Box::new(Deletion::single_qubit()),
            Box::new(Deletion::multi_qubit()),
            Box::new(Insertion),
            Box::new(Substitution),
            Box::new(Reorder),
            Box::new(TrojanInsertion::not()),
            Box::new(TrojanInsertion::hadamard()),
            Box::new(QubitSwap),
        ];
        for inj in all {
            r.register(inj).expect("built-in names are unique");
        }
        r
    }

    pub fn register(&mut self, injector: Box<dyn Injector>) -> Result<(), AnomalyError> {
        let name = injector.name();
        if self.injectors.contains_key(name) {
            return Err(AnomalyError::DuplicateInjector(name));
        }
        self.injectors.insert(name, injector);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Injector> {
        self.injectors.get(name).map(|b| b.as_ref())
    }

    pub fn for_kind(&self, kind: AnomalyKind) -> Option<&dyn Injector> {
        self.get(kind.name())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.injectors.keys().copied()
    }

    pub fn inject(&self, circuit: &Circuit, spec: &AnomalySpec) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        let injector = self
            .for_kind(spec.kind)
            .ok_or_else(|| AnomalyError::UnknownKind(spec.kind.name().to_string()))?;
        let eligible = injector.eligible_sites(circuit);
        if eligible == 0 {
            return Err(AnomalyError::Ineligible(spec.kind));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        injector.apply(circuit, spec.mode.budget(eligible), &mut rng)
    }
}

fn builtin_registry() -> &'static InjectorRegistry {
    static REGISTRY: OnceLock<InjectorRegistry> = OnceLock::new();
    REGISTRY.get_or_init(InjectorRegistry::builtin)
}

/// Injects one anomaly with the built-in injector for `spec.kind`.
pub fn inject(circuit: &Circuit, spec: &AnomalySpec) -> Result<(Circuit, AnomalyLog), AnomalyError> {
    builtin_registry().inject(circuit, spec)
}

pub fn eligible_sites(circuit: &Circuit, kind: AnomalyKind) -> usize {
    builtin_registry()
        .for_kind(kind)
        .map_or(0, |inj| inj.eligible_sites(circuit))
}

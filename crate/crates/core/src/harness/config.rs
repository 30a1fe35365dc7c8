use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::complex_serde;
use crate::ensembles::{EntryLaw, LawKind};
use crate::observables::{default_resolvent_grid, Contour, TestFunction, DEFAULT_KAPPA};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("replicates must be at least 2 (got {0})")]
    TooFewReplicates(usize),
    #[error("n_values must be non-empty")]
    NoDimensions,
    #[error("every dimension must be at least 2 (got {0})")]
    DimensionTooSmall(usize),
    #[error("z_grid point {0} violates the constraint |z| > 1")]
    GridPointInsideDisk(Complex64),
    #[error("functions must be non-empty")]
    NoFunctions,
    #[error("function {0} is constant; its centered statistic is identically zero")]
    TrivialFunction(usize),
    #[error("kappa must exceed 2 (got {0})")]
    Kappa(f64),
    #[error("invalid contour: {0}")]
    Contour(String),
}

/// Everything needed to reproduce one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub law: LawKind,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    #[serde(serialize_with = "serialize_seed", deserialize_with = "deserialize_seed")]
    pub master_seed: u64,
    pub functions: Vec<TestFunction>,
    #[serde(with = "complex_serde::vec")]
    pub z_grid: Vec<Complex64>,
    pub contour: Contour,
    pub kappa: f64,
    pub outputs: PathBuf,
}

impl ExperimentConfig {
    /// Defaults: `f ∈ {z, z²}`, the two-circle resolvent grid, ρ = 5 with 512
    /// nodes and κ = 2.5.
    pub fn with_defaults(law: LawKind, n_values: Vec<usize>, replicates: usize, master_seed: u64) -> Self {
        Self {
            law,
            n_values,
            replicates,
            master_seed,
            functions: vec![TestFunction::monomial(1), TestFunction::monomial(2)],
            z_grid: default_resolvent_grid(),
            contour: Contour::default(),
            kappa: DEFAULT_KAPPA,
            outputs: PathBuf::from("out"),
        }
    }

    pub fn entry_law(&self) -> EntryLaw {
        EntryLaw::new(self.law)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replicates < 2 {
            return Err(ConfigError::TooFewReplicates(self.replicates));
        }
        if self.n_values.is_empty() {
            return Err(ConfigError::NoDimensions);
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(ConfigError::DimensionTooSmall(n));
        }
        if let Some(z) = self.z_grid.iter().find(|z| !(z.norm() > 1.0)) {
            return Err(ConfigError::GridPointInsideDisk(*z));
        }
        if self.functions.is_empty() {
            return Err(ConfigError::NoFunctions);
        }
        if let Some(i) = self.functions.iter().position(|f| f.degree() == 0) {
            return Err(ConfigError::TrivialFunction(i));
        }
        if !(self.kappa > 2.0) {
            return Err(ConfigError::Kappa(self.kappa));
        }
        self.contour
            .validate()
            .map_err(|e| ConfigError::Contour(e.to_string()))?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Copy with `outputs` set to `.`, as written next to the records.
    pub fn echo(&self) -> Self {
        Self {
            outputs: PathBuf::from("."),
            ..self.clone()
        }
    }

    /// SHA-256 of the canonical TOML with the output location blanked, so
    /// that the same experiment hashes identically wherever it is written.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().to_toml_string().as_bytes()))
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_toml_string())
    }
}

// TOML integers are signed 64-bit, so large seeds are written as strings.
fn serialize_seed<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(*seed) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.serialize_str(&seed.to_string()),
    }
}

fn deserialize_seed<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Seed {
        Int(i64),
        Text(String),
    }
    match Seed::deserialize(d)? {
        Seed::Int(v) => u64::try_from(v).map_err(serde::de::Error::custom),
        Seed::Text(t) => t.parse().map_err(serde::de::Error::custom),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::with_defaults(LawKind::ComplexGaussian, vec![8, 16], 10, 42)
    }

    #[test]
    fn defaults_validate() {
        base().validate().unwrap();
    }

    #[test]
    fn rejects_grid_inside_disk() {
        let mut cfg = base();
        cfg.z_grid.push(Complex64::new(0.5, 0.0));
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("|z| > 1"), "{err}");
    }

    #[test]
    fn rejects_bad_fields() {
        let mut cfg = base();
        cfg.replicates = 1;
        assert!(matches!(cfg.validate(), Err(ConfigError::TooFewReplicates(1))));
        let mut cfg = base();
        cfg.n_values = vec![1];
        assert!(matches!(cfg.validate(), Err(ConfigError::DimensionTooSmall(1))));
        let mut cfg = base();
        cfg.kappa = 2.0;
        assert!(matches!(cfg.validate(), Err(ConfigError::Kappa(_))));
        let mut cfg = base();
        cfg.functions.push(TestFunction::from_real(&[3.0]).unwrap());
        assert!(matches!(cfg.validate(), Err(ConfigError::TrivialFunction(2))));
        let mut cfg = base();
        cfg.contour.node_count = 10;
        assert!(matches!(cfg.validate(), Err(ConfigError::Contour(_))));
    }

    #[test]
    fn parses_handwritten_config() {
        let text = r#"
law = "unit-circle"
n_values = [4, 8]
replicates = 3
master_seed = 7
z_grid = [[2.0, 0.0], [0.0, -1.5]]
kappa = 2.5
outputs = "runs/a"
functions = [
  { coefficients = [[0.0, 0.0], [1.0, 0.0]] },
  { coefficients = [[1.0, 0.0], [0.0, 0.0], [0.5, -0.5]] },
]

[contour]
radius = 3.0
node_count = 128
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.law, LawKind::UnitCircle);
        assert_eq!(cfg.functions[1].coefficients()[2], Complex64::new(0.5, -0.5));
        assert_eq!(cfg.contour.node_count, 128);
        assert!(ExperimentConfig::from_toml_str(&text.replace("law =", "lawz =")).is_err());
    }

    #[test]
    fn huge_seed_round_trips() {
        let mut cfg = base();
        cfg.master_seed = u64::MAX - 3;
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back.master_seed, u64::MAX - 3);
    }

    #[test]
    fn hash_ignores_output_location() {
        let mut a = base();
        let mut b = base();
        a.outputs = "x".into();
        b.outputs = "y/z".into();
        assert_eq!(a.config_hash(), b.config_hash());
        b.master_seed += 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    proptest! {
        #[test]
        fn parse_serialize_parse_is_identity(
            seed in any::<u64>(),
            reps in 2usize..5000,
            ns in proptest::collection::vec(2usize..2048, 1..5),
            coeffs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..6),
            grid in proptest::collection::vec((1.01f64..20.0, 0.0f64..std::f64::consts::TAU), 1..6),
            kappa in 2.01f64..5.0,
        ) {
            let mut cfg = base();
            cfg.master_seed = seed;
            cfg.replicates = reps;
            cfg.n_values = ns;
            let mut c: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            *c.last_mut().unwrap() = Complex64::new(1.0, 0.0);
            cfg.functions.push(TestFunction::new(c).unwrap());
            cfg.z_grid = grid.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
            cfg.kappa = kappa;
            let once = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            prop_assert_eq!(&once, &cfg);
            let twice = ExperimentConfig::from_toml_str(&once.to_toml_string()).unwrap();
            prop_assert_eq!(twice, once);
        }
    }
}

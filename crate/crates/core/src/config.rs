//! Experiment configuration: TOML sections of typed `key = value` pairs.
//!
//! ```toml
//! [lattice]
//! L = 40
//!
//! [particles]
//! N = 2
//!
//! [model]
//! U = 2.0
//! F = 0.1
//!
//! [initial]
//! type = "adjacent"   # gaussian | adjacent | same_site | separated
//! k0 = 0
//!
//! [grid]
//! t_max = 20.0
//! dt = 0.1
//!
//! [ensemble]          # optional; omit for a single run at model.phi
//! n_realizations = 100
//! seed = 7
//! ```
//!
//! Unknown keys are rejected. Every omitted key takes the default shown by
//! [`ExperimentConfig::default`], so a parsed config serializes back to a
//! complete, self-describing file.

use serde::{Deserialize, Serialize};

use crate::dynamics::{TimeGrid, DEFAULT_DT};
use crate::ensemble::{EnsembleSpec, Experiment, InitialCondition};
use crate::error::{Error, Result};
use crate::fock::{Lattice, DEFAULT_DIMENSION_CAP, MAX_PARTICLES};
use crate::hamiltonian::{golden_tau, ModelParams};
use crate::observables::{LeakMonitor, ObservableRequest, DEFAULT_LEAK_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub lattice: LatticeSection,
    pub particles: ParticlesSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub initial: InitialSection,
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
    #[serde(default)]
    pub observables: ObservablesSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(rename = "L")]
    pub half_length: usize,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticlesSection {
    #[serde(rename = "N")]
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub tau: f64,
    pub phi: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            j: p.tunneling,
            u: p.interaction,
            f: p.tilt,
            v: p.long_range,
            alpha: p.long_range_exponent,
            lambda: p.disorder,
            tau: golden_tau(),
            phi: p.phase,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            tunneling: self.j,
            interaction: self.u,
            tilt: self.f,
            long_range: self.v,
            long_range_exponent: self.alpha,
            disorder: self.lambda,
            incommensuration: self.tau,
            phase: self.phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Gaussian,
    Adjacent,
    SameSite,
    Separated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(rename = "type")]
    pub kind: InitialKind,
    #[serde(default)]
    pub k0: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            kind: InitialKind::SameSite,
            k0: 0,
            sigma2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_max: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_realizations: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservablesSection {
    pub density: bool,
    pub components: bool,
    pub entropy: bool,
    /// Last site of subsystem A.
    pub cut: i64,
    pub statistics: bool,
    pub leak_threshold: f64,
    pub halt_on_leak: bool,
}

impl Default for ObservablesSection {
    fn default() -> Self {
        Self {
            density: true,
            components: true,
            entropy: false,
            cut: 0,
            statistics: true,
            leak_threshold: DEFAULT_LEAK_THRESHOLD,
            halt_on_leak: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: None,
            formats: vec!["tsv".into()],
        }
    }
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

/// Scalar keys accepted by [`ExperimentConfig::set_scalar`].
pub const SWEEPABLE: &[&str] = &[
    "L", "J", "U", "F", "V", "alpha", "lambda", "tau", "phi", "sigma2", "t_max", "dt",
];

/// Config resolved into the objects the pipeline consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub experiment: Experiment,
    pub ensemble: Option<EnsembleSpec>,
    /// Phase used when no ensemble is requested.
    pub phase: f64,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every value against the preconditions of the pipeline. The
    /// dimension cap is checked later, when the basis is built.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        let l = self.lattice.half_length;
        if l == 0 {
            return bad("lattice.L", "must be at least 1".into());
        }
        let n = self.particles.count;
        if !(1..=MAX_PARTICLES).contains(&n) {
            return bad(
                "particles.N",
                format!("must be 1..={MAX_PARTICLES}, got {n}"),
            );
        }
        if let Err(Error::Parameter(msg)) = self.model.params().validate() {
            return bad("model", msg);
        }

        let lattice = Lattice::new(l)?;
        match self.initial.kind {
            InitialKind::Gaussian => match self.initial.sigma2 {
                Some(s) if s >= 0.0 && s.is_finite() => {}
                Some(s) => return bad("initial.sigma2", format!("must be >= 0, got {s}")),
                None => return bad("initial.sigma2", "required for a gaussian state".into()),
            },
            _ if self.initial.sigma2.is_some() => {
                return bad(
                    "initial.sigma2",
                    "only meaningful for type = \"gaussian\"".into(),
                )
            }
            _ => {}
        }
        if lattice.index(self.initial.k0).is_none() {
            return bad(
                "initial.k0",
                format!("site {} is outside -{l}..={l}", self.initial.k0),
            );
        }
        if let Some(sites) = self.initial_condition().sites(n) {
            if let Some(s) = sites.iter().find(|&&s| lattice.index(s).is_none()) {
                return bad(
                    "initial",
                    format!("places a particle on site {s}, outside -{l}..={l}"),
                );
            }
        }

        if let Err(Error::Grid(msg)) = TimeGrid::new(self.grid.t_max, self.grid.dt) {
            return bad("grid", msg);
        }
        if let Some(e) = &self.ensemble {
            if e.n_realizations == 0 {
                return bad("ensemble.n_realizations", "must be positive".into());
            }
        }
        let obs = &self.observables;
        if obs.entropy && !(-(l as i64)..l as i64).contains(&obs.cut) {
            return bad(
                "observables.cut",
                format!("must lie in -{l}..={}, got {}", l as i64 - 1, obs.cut),
            );
        }
        if !(obs.leak_threshold > 0.0 && obs.leak_threshold.is_finite()) {
            return bad(
                "observables.leak_threshold",
                format!("must be positive, got {}", obs.leak_threshold),
            );
        }
        if self.output.formats.is_empty() {
            return bad("output.formats", "at least one format is required".into());
        }
        if let Some(f) = self.output.formats.iter().find(|f| f.as_str() != "tsv") {
            return bad(
                "output.formats",
                format!("unsupported format {f:?} (only \"tsv\")"),
            );
        }
        Ok(())
    }

    pub fn initial_condition(&self) -> InitialCondition {
        let k0 = self.initial.k0;
        match self.initial.kind {
            InitialKind::Gaussian => InitialCondition::Gaussian {
                k0,
                sigma2: self.initial.sigma2.unwrap_or(0.0),
            },
            InitialKind::Adjacent => InitialCondition::Adjacent { k0 },
            InitialKind::SameSite => InitialCondition::SameSite { k0 },
            InitialKind::Separated => InitialCondition::Separated { k0 },
        }
    }

    pub fn resolve(&self) -> Result<ResolvedRun> {
        self.validate()?;
        let obs = &self.observables;
        let request = ObservableRequest {
            density: obs.density,
            components: obs.components,
            entropy_cut: obs.entropy.then_some(obs.cut),
            statistics: obs.statistics,
            leak: LeakMonitor {
                threshold: obs.leak_threshold,
                halt: obs.halt_on_leak,
            },
        };
        let experiment = Experiment {
            half_length: self.lattice.half_length,
            particles: self.particles.count,
            params: self.model.params(),
            initial: self.initial_condition(),
            grid: TimeGrid::new(self.grid.t_max, self.grid.dt)?,
            request,
            dimension_cap: self.lattice.dimension_cap,
        };
        Ok(ResolvedRun {
            experiment,
            ensemble: self.ensemble.as_ref().map(|e| EnsembleSpec {
                realizations: e.n_realizations,
                seed: e.seed,
            }),
            phase: self.model.phi,
        })
    }

    /// Overwrites one scalar parameter; `model.U` and `U` are equivalent.
    pub fn set_scalar(&mut self, key: &str, value: f64) -> Result<()> {
        let name = key.rsplit('.').next().unwrap_or(key);
        match name {
            "L" => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "L must be a positive integer, got {value}"
                    )));
                }
                self.lattice.half_length = value as usize;
            }
            "J" => self.model.j = value,
            "U" => self.model.u = value,
            "F" => self.model.f = value,
            "V" => self.model.v = value,
            "alpha" => self.model.alpha = value,
            "lambda" => self.model.lambda = value,
            "tau" => self.model.tau = value,
            "phi" => self.model.phi = value,
            "sigma2" => self.initial.sigma2 = Some(value),
            "t_max" => self.grid.t_max = value,
            "dt" => self.grid.dt = value,
            _ => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter {key:?}; expected one of {}",
                    SWEEPABLE.join(", ")
                )))
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[lattice]
L = 5
[particles]
N = 2
[grid]
t_max = 2.0
"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.model.j, 1.0);
        assert_eq!(c.model.tau, golden_tau());
        assert_eq!(c.grid.dt, 0.1);
        assert_eq!(c.initial.kind, InitialKind::SameSite);
        assert!(c.ensemble.is_none());
        let r = c.resolve().unwrap();
        assert_eq!(r.experiment.grid.len(), 21);
        assert_eq!(r.experiment.request.entropy_cut, None);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = format!("{MINIMAL}\n[model]\nUU = 1.0\n");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("UU"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_values_name_their_key() {
        let cases = [
            (
                MINIMAL.replace("t_max = 2.0", "t_max = 2.0\ndt = -0.1"),
                "grid",
            ),
            (MINIMAL.replace("N = 2", "N = 4"), "particles.N"),
            (MINIMAL.replace("L = 5", "L = 0"), "lattice.L"),
            (
                format!("{MINIMAL}[initial]\ntype = \"adjacent\"\nk0 = 5\n"),
                "initial",
            ),
            (
                format!("{MINIMAL}[initial]\ntype = \"gaussian\"\n"),
                "initial.sigma2",
            ),
            (format!("{MINIMAL}[model]\nJ = 0.0\n"), "model"),
            (
                format!("{MINIMAL}[ensemble]\nn_realizations = 0\n"),
                "ensemble",
            ),
            (
                format!("{MINIMAL}[observables]\nentropy = true\ncut = 5\n"),
                "observables.cut",
            ),
            (
                format!("{MINIMAL}[output]\nformats = [\"csv\"]\n"),
                "output.formats",
            ),
        ];
        for (text, key) in cases {
            let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
            assert!(err.to_string().contains(key), "{key}: {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn round_trip_is_stable() {
        let text = format!(
            "{MINIMAL}[model]\nU = 2.5\nlambda = 1.0\n[initial]\ntype = \"gaussian\"\nsigma2 = 25.0\n[ensemble]\nn_realizations = 3\nseed = 9\n[observables]\nentropy = true\n"
        );
        let a = ExperimentConfig::from_toml_str(&text).unwrap();
        let b = ExperimentConfig::from_toml_str(&a.to_toml_string().unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.resolve().unwrap(), b.resolve().unwrap());
    }

    #[test]
    fn sweep_keys() {
        let mut c = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        c.set_scalar("U", 3.0).unwrap();
        c.set_scalar("model.lambda", 0.5).unwrap();
        c.set_scalar("L", 7.0).unwrap();
        assert_eq!(
            (c.model.u, c.model.lambda, c.lattice.half_length),
            (3.0, 0.5, 7)
        );
        assert!(c.set_scalar("L", 2.5).is_err());
        assert!(c.set_scalar("bogus", 1.0).is_err());
    }
}

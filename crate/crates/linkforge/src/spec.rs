//! The resolved description of one run, built from flags or read from JSON.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use linkforge_core::{PotentialKind, QuadConvention};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    QuadCritical,
    QuadStabilize,
    QuadNavigate,
    OvalTrace,
    PentagonStabilize,
    PentagonVerify,
    PentagonProbe,
    ReproduceExample1,
    Census,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Potential law as written on the command line: `coulomb`, `log` or `alpha:<a>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KindArg(pub PotentialKind);

impl FromStr for KindArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coulomb" => Ok(KindArg(PotentialKind::Coulomb)),
            "log" => Ok(KindArg(PotentialKind::Log)),
            _ => {
                let alpha = s
                    .strip_prefix("alpha:")
                    .ok_or_else(|| format!("unknown potential `{s}` (coulomb, log or alpha:<a>)"))?;
                let a: f64 = alpha.parse().map_err(|_| format!("bad exponent `{alpha}`"))?;
                PotentialKind::power(a).map(KindArg).map_err(|e| e.to_string())
            }
        }
    }
}

impl fmt::Display for KindArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ConventionArg {
    Eq3,
    Example1,
}

impl From<ConventionArg> for QuadConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Eq3 => QuadConvention::Eq3,
            ConventionArg::Example1 => QuadConvention::Example1,
        }
    }
}

/// Everything a run depends on. Identical specs (seed included) give
/// byte-identical numeric output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Diagonals `(x, y)` of a quad target, or a pentagon chart point `(x13, x35)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<QuadConvention>,
    #[serde(default)]
    pub kind: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Probe seeds, random navigation runs or census trials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_range: Option<[f64; 2]>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-7;

impl RunSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            sides: None,
            t: None,
            s: None,
            target: None,
            start: None,
            vertices: None,
            convention: None,
            kind: PotentialKind::Coulomb,
            samples: None,
            tolerance: None,
            count: None,
            side_range: None,
            charge_range: None,
            format: Format::Json,
            output: None,
            seed: None,
        }
    }

    /// Fill every option the command uses with its default, so the run spec
    /// embedded in the output is complete.
    pub fn resolve(mut self, env_seed: Option<u64>) -> Self {
        use linkforge_core::quad_control::DEFAULT_SAMPLES;
        self.seed = self.seed.or(env_seed).or(Some(0));
        match self.command {
            Command::QuadCritical | Command::QuadStabilize | Command::QuadNavigate => {
                self.convention.get_or_insert(QuadConvention::Eq3);
                self.samples.get_or_insert(DEFAULT_SAMPLES);
                if self.command != Command::QuadCritical {
                    self.tolerance.get_or_insert(DEFAULT_TOLERANCE);
                }
                if self.command == Command::QuadNavigate && self.start.is_none() && self.target.is_none() {
                    self.count.get_or_insert(20);
                }
            }
            Command::OvalTrace => {
                self.samples.get_or_insert(512);
            }
            Command::PentagonProbe => {
                self.count.get_or_insert(64);
            }
            Command::ReproduceExample1 => {
                self.convention.get_or_insert(QuadConvention::Example1);
                self.samples.get_or_insert(DEFAULT_SAMPLES);
            }
            Command::Census => {
                self.convention.get_or_insert(QuadConvention::Eq3);
                self.samples.get_or_insert(DEFAULT_SAMPLES);
                self.count.get_or_insert(1000);
                self.side_range.get_or_insert([1.0, 10.0]);
                self.charge_range.get_or_insert([0.0, 10.0]);
            }
            Command::PentagonStabilize | Command::PentagonVerify => {}
        }
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing() {
        assert_eq!("coulomb".parse::<KindArg>().unwrap().0, PotentialKind::Coulomb);
        assert_eq!("alpha:2".parse::<KindArg>().unwrap().0, PotentialKind::Power(2.0));
        assert!("alpha:-1".parse::<KindArg>().is_err());
        assert!("yukawa".parse::<KindArg>().is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let mut spec = RunSpec::new(Command::QuadCritical);
        spec.sides = Some(vec![6.0, 6.5, 6.2, 5.8]);
        spec.t = Some(2.0);
        spec.kind = PotentialKind::Power(0.5);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<RunSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn explicit_seed_beats_environment() {
        let mut spec = RunSpec::new(Command::Census);
        spec.seed = Some(3);
        assert_eq!(spec.resolve(Some(9)).seed, Some(3));
        let spec = RunSpec::new(Command::ReproduceExample1).resolve(None);
        assert_eq!((spec.seed, spec.convention), (Some(0), Some(QuadConvention::Example1)));
    }

    #[test]
    fn minimal_spec_file() {
        let spec: RunSpec = serde_json::from_str(r#"{"command": "quad-critical", "sides": [3, 4, 5, 6.5]}"#).unwrap();
        assert_eq!(spec.command, Command::QuadCritical);
        assert_eq!(spec.convention, None);
        let resolved = spec.resolve(Some(9));
        assert_eq!(resolved.convention, Some(QuadConvention::Eq3));
        assert_eq!((resolved.samples, resolved.seed), (Some(4096), Some(9)));
        assert!(serde_json::from_str::<RunSpec>(r#"{"command": "oval-trace", "bogus": 1}"#).is_err());
    }
}

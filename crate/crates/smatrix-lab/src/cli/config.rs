//! Flat key-value experiment configuration.
//!
//! The on-disk format is one `key = value` pair per line, `#` comments,
//! nested structure flattened with dotted keys. Unknown keys are rejected
//! so that typos surface as config errors instead of silently applying
//! defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::circleop::min_theta_samples;
use crate::potentials::{Potential, TrigPoly};
use crate::quad::QuadSpec;

use super::CliError;

/// The experiments the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    #[value(name = "phase-table")]
    PhaseTable,
    #[value(name = "build-smatrix")]
    BuildSmatrix,
    #[value(name = "spectrum")]
    Spectrum,
    #[value(name = "arc-coverage")]
    ArcCoverage,
    #[value(name = "gap-stats")]
    GapStats,
    #[value(name = "quasimode")]
    Quasimode,
    #[value(name = "mourre")]
    Mourre,
    #[value(name = "appendix-suite")]
    AppendixSuite,
    #[value(name = "verify-assumptions")]
    VerifyAssumptions,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PhaseTable => "phase-table",
            Experiment::BuildSmatrix => "build-smatrix",
            Experiment::Spectrum => "spectrum",
            Experiment::ArcCoverage => "arc-coverage",
            Experiment::GapStats => "gap-stats",
            Experiment::Quasimode => "quasimode",
            Experiment::Mourre => "mourre",
            Experiment::AppendixSuite => "appendix-suite",
            Experiment::VerifyAssumptions => "verify-assumptions",
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phase-table" => Ok(Experiment::PhaseTable),
            "build-smatrix" => Ok(Experiment::BuildSmatrix),
            "spectrum" => Ok(Experiment::Spectrum),
            "arc-coverage" => Ok(Experiment::ArcCoverage),
            "gap-stats" => Ok(Experiment::GapStats),
            "quasimode" => Ok(Experiment::Quasimode),
            "mourre" => Ok(Experiment::Mourre),
            "appendix-suite" => Ok(Experiment::AppendixSuite),
            "verify-assumptions" => Ok(Experiment::VerifyAssumptions),
            other => Err(CliError::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Potential selection as it appears on the config surface. Custom
/// potentials are code-level only and have no config representation.
#[derive(Debug, Clone)]
pub enum PotentialConfig {
    RadialPowerLog {
        strength: f64,
    },
    Dipole {
        amplitude: f64,
    },
    AngularOverR {
        constant: f64,
        cos_coeffs: Vec<f64>,
        sin_coeffs: Vec<f64>,
        patch_radius: f64,
    },
}

impl PotentialConfig {
    pub fn build(&self) -> Potential {
        match self {
            PotentialConfig::RadialPowerLog { strength } => {
                Potential::radial_power_log(*strength)
            }
            PotentialConfig::Dipole { amplitude } => Potential::dipole(*amplitude),
            PotentialConfig::AngularOverR {
                constant,
                cos_coeffs,
                sin_coeffs,
                patch_radius,
            } => Potential::angular_over_r(
                TrigPoly::new(*constant, cos_coeffs.clone(), sin_coeffs.clone()),
                *patch_radius,
            ),
        }
    }

    /// Stable textual form used in cache keys.
    pub fn canonical(&self) -> String {
        match self {
            PotentialConfig::RadialPowerLog { strength } => {
                format!("radial-power-log;c={strength:e}")
            }
            PotentialConfig::Dipole { amplitude } => format!("dipole;a={amplitude:e}"),
            PotentialConfig::AngularOverR {
                constant,
                cos_coeffs,
                sin_coeffs,
                patch_radius,
            } => {
                let cos: Vec<String> = cos_coeffs.iter().map(|c| format!("{c:e}")).collect();
                let sin: Vec<String> = sin_coeffs.iter().map(|c| format!("{c:e}")).collect();
                format!(
                    "angular-over-r;f0={constant:e};fcos={};fsin={};R={patch_radius:e}",
                    cos.join(","),
                    sin.join(",")
                )
            }
        }
    }

    pub fn dipole_amplitude(&self) -> Option<f64> {
        match self {
            PotentialConfig::Dipole { amplitude } => Some(*amplitude),
            _ => None,
        }
    }

    pub fn radial_strength(&self) -> Option<f64> {
        match self {
            PotentialConfig::RadialPowerLog { strength } => Some(*strength),
            _ => None,
        }
    }
}

/// Fully parsed experiment configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub potential: Option<PotentialConfig>,
    pub lambda: f64,
    pub mode_cutoff: usize,
    pub ntheta: Option<usize>,
    pub quad: QuadSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub arc_epsilon: f64,
    pub quasimode_theta0: f64,
    pub quasimode_ns: Vec<f64>,
    pub gap_cutoffs: Vec<usize>,
    pub mourre_arc_half_width: f64,
    pub mourre_inner_margin: f64,
    pub mourre_sigma: f64,
    pub mourre_kmax: usize,
    pub mourre_endpoint_margin: f64,
    pub mourre_pad: usize,
    pub phase_table_thetas: usize,
    pub phase_table_omegas: usize,
    pub phase_table_omega_max: f64,
    pub appendix_pairs: usize,
    /// Raw key-value pairs, echoed verbatim into reports.
    pub raw: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            potential: None,
            lambda: 0.5,
            mode_cutoff: 64,
            ntheta: None,
            quad: QuadSpec::default(),
            seed: 0,
            output_dir: PathBuf::from("out"),
            arc_epsilon: 0.05,
            quasimode_theta0: 1.0,
            quasimode_ns: vec![8.0, 32.0, 128.0],
            gap_cutoffs: vec![64, 128, 256],
            mourre_arc_half_width: std::f64::consts::FRAC_PI_4,
            mourre_inner_margin: 0.3,
            mourre_sigma: 0.05,
            mourre_kmax: 128,
            mourre_endpoint_margin: 0.05,
            mourre_pad: 32,
            phase_table_thetas: 5,
            phase_table_omegas: 5,
            phase_table_omega_max: 3.0,
            appendix_pairs: 10,
            raw: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn n_theta(&self) -> usize {
        self.ntheta
            .unwrap_or_else(|| min_theta_samples(self.mode_cutoff))
    }

    pub fn require_potential(&self) -> Result<&PotentialConfig, CliError> {
        self.potential
            .as_ref()
            .ok_or_else(|| CliError::Config("this experiment requires potential.* keys".into()))
    }

    /// Parse the flat key-value text format.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if raw.insert(key.clone(), value).is_some() {
                return Err(CliError::Config(format!("duplicate key '{key}'")));
            }
        }
        Self::from_raw(raw)
    }

    fn from_raw(raw: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig {
            raw: raw.clone(),
            ..ExperimentConfig::default()
        };

        let mut family: Option<String> = None;
        let mut amplitude = 1.0f64;
        let mut strength = 1.0f64;
        let mut constant = 2.0f64;
        let mut patch_radius = 5.0f64;
        let mut cos_coeffs: BTreeMap<usize, f64> = BTreeMap::new();
        let mut sin_coeffs: BTreeMap<usize, f64> = BTreeMap::new();

        for (key, value) in &raw {
            let parse_f64 = || -> Result<f64, CliError> {
                value
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("key '{key}': bad number '{value}'")))
            };
            let parse_usize = || -> Result<usize, CliError> {
                value
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("key '{key}': bad integer '{value}'")))
            };
            match key.as_str() {
                "experiment" => cfg.experiment = Some(value.parse()?),
                "potential.family" => family = Some(value.clone()),
                "potential.a" => amplitude = parse_f64()?,
                "potential.c" => strength = parse_f64()?,
                "potential.f0" => constant = parse_f64()?,
                "potential.patch_radius" => patch_radius = parse_f64()?,
                "lambda" => cfg.lambda = parse_f64()?,
                "mode_cutoff" => cfg.mode_cutoff = parse_usize()?,
                "ntheta" => cfg.ntheta = Some(parse_usize()?),
                "quadrature.tol" => cfg.quad.tol = parse_f64()?,
                "quadrature.max_depth" => {
                    cfg.quad.max_depth = parse_usize()? as u32;
                }
                "seed" => {
                    cfg.seed = value.parse::<u64>().map_err(|_| {
                        CliError::Config(format!("key 'seed': bad integer '{value}'"))
                    })?;
                }
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "arc.epsilon" => cfg.arc_epsilon = parse_f64()?,
                "quasimode.theta0" => cfg.quasimode_theta0 = parse_f64()?,
                "quasimode.ns" => {
                    cfg.quasimode_ns = parse_list(value)
                        .map_err(|e| CliError::Config(format!("key '{key}': {e}")))?;
                }
                "gap_stats.cutoffs" => {
                    let floats: Vec<f64> = parse_list(value)
                        .map_err(|e| CliError::Config(format!("key '{key}': {e}")))?;
                    cfg.gap_cutoffs = floats.iter().map(|&f| f as usize).collect();
                }
                "mourre.arc_half_width" => cfg.mourre_arc_half_width = parse_f64()?,
                "mourre.inner_margin" => cfg.mourre_inner_margin = parse_f64()?,
                "mourre.sigma" => cfg.mourre_sigma = parse_f64()?,
                "mourre.kmax" => cfg.mourre_kmax = parse_usize()?,
                "mourre.endpoint_margin" => cfg.mourre_endpoint_margin = parse_f64()?,
                "mourre.pad" => cfg.mourre_pad = parse_usize()?,
                "phase_table.thetas" => cfg.phase_table_thetas = parse_usize()?,
                "phase_table.omegas" => cfg.phase_table_omegas = parse_usize()?,
                "phase_table.omega_max" => cfg.phase_table_omega_max = parse_f64()?,
                "appendix.pairs" => cfg.appendix_pairs = parse_usize()?,
                other if other.starts_with("potential.fcos") => {
                    let idx: usize = other["potential.fcos".len()..].parse().map_err(|_| {
                        CliError::Config(format!("bad harmonic index in '{other}'"))
                    })?;
                    if idx == 0 {
                        return Err(CliError::Config(
                            "harmonic indices start at 1 (use potential.f0 for the constant)"
                                .into(),
                        ));
                    }
                    cos_coeffs.insert(idx, parse_f64()?);
                }
                other if other.starts_with("potential.fsin") => {
                    let idx: usize = other["potential.fsin".len()..].parse().map_err(|_| {
                        CliError::Config(format!("bad harmonic index in '{other}'"))
                    })?;
                    if idx == 0 {
                        return Err(CliError::Config("harmonic indices start at 1".into()));
                    }
                    sin_coeffs.insert(idx, parse_f64()?);
                }
                other => {
                    return Err(CliError::Config(format!("unknown key '{other}'")));
                }
            }
        }

        if let Some(f) = family {
            cfg.potential = Some(match f.as_str() {
                "radial-power-log" => PotentialConfig::RadialPowerLog { strength },
                "dipole" => PotentialConfig::Dipole { amplitude },
                "angular-over-r" => {
                    let max_cos = cos_coeffs.keys().max().copied().unwrap_or(0);
                    let max_sin = sin_coeffs.keys().max().copied().unwrap_or(0);
                    let mut cos = vec![0.0; max_cos];
                    let mut sin = vec![0.0; max_sin];
                    for (i, v) in cos_coeffs {
                        cos[i - 1] = v;
                    }
                    for (i, v) in sin_coeffs {
                        sin[i - 1] = v;
                    }
                    PotentialConfig::AngularOverR {
                        constant,
                        cos_coeffs: cos,
                        sin_coeffs: sin,
                        patch_radius,
                    }
                }
                other => {
                    return Err(CliError::Config(format!(
                        "unknown potential family '{other}'"
                    )));
                }
            });
        }

        if cfg.lambda <= 0.0 {
            return Err(CliError::Config(format!(
                "lambda must be positive, got {}",
                cfg.lambda
            )));
        }
        if cfg.mode_cutoff == 0 {
            return Err(CliError::Config("mode_cutoff must be >= 1".into()));
        }
        let n = cfg.n_theta();
        if n < 4 * cfg.mode_cutoff + 4 || !n.is_power_of_two() {
            return Err(CliError::Config(format!(
                "ntheta = {n} must be a power of two >= {}",
                4 * cfg.mode_cutoff + 4
            )));
        }
        Ok(cfg)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad list entry '{p}'"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::parse(
            "experiment = arc-coverage\n\
             potential.family = dipole\n\
             potential.a = 0.5\n\
             lambda = 0.5\n\
             mode_cutoff = 128\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Some(Experiment::ArcCoverage));
        assert_eq!(cfg.mode_cutoff, 128);
        let p = cfg.potential.unwrap();
        assert_eq!(p.dipole_amplitude(), Some(0.5));
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = ExperimentConfig::parse("potental.family = dipole\n").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::parse("lambda = frog\n").is_err());
        assert!(ExperimentConfig::parse("lambda = -1\n").is_err());
        assert!(ExperimentConfig::parse("mode_cutoff = 0\n").is_err());
        assert!(ExperimentConfig::parse("ntheta = 100\n").is_err());
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = ExperimentConfig::parse(
            "# a comment\n\
             \n\
             lambda = 2.0 # trailing comment\n",
        )
        .unwrap();
        assert_eq!(cfg.lambda, 2.0);
    }

    #[test]
    fn angular_family_harmonics() {
        let cfg = ExperimentConfig::parse(
            "potential.family = angular-over-r\n\
             potential.f0 = 2.0\n\
             potential.fcos1 = 0.5\n\
             potential.patch_radius = 5.0\n",
        )
        .unwrap();
        match cfg.potential.unwrap() {
            PotentialConfig::AngularOverR {
                constant,
                cos_coeffs,
                patch_radius,
                ..
            } => {
                assert_eq!(constant, 2.0);
                assert_eq!(cos_coeffs, vec![0.5]);
                assert_eq!(patch_radius, 5.0);
            }
            other => panic!("wrong family {other:?}"),
        }
    }
}

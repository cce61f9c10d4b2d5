//! Flag definitions and the JSON config file that mirrors them.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use localize::spectrum::QuantumSection;
use localize::Kind;
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "localize", version, about = "Numerical checks of exact phase-space integrals on CP^N and CQ^N")]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Emit JSON even on a terminal
    #[arg(long, global = true)]
    pub json: bool,
    /// Emit CSV rows
    #[arg(long, global = true, conflicts_with = "json")]
    pub csv: bool,
    /// Record wall time in the report
    #[arg(long, global = true)]
    pub timing: bool,
    /// JSON file with defaults for any flag (flags win)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical partition function by every applicable method
    Partition(PartitionArgs),
    /// Projector, metric, volume and closedness checks at random chart points
    Geometry(GeometryArgs),
    /// Truncated Fock traces, coherent states and the Fourier/Poisson identities
    Quantum(QuantumArgs),
    /// The l² tensor tower of the unit ball
    Embed(EmbedArgs),
    /// Full acceptance battery at pinned parameters
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub kind: Option<Kind>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo samples
    #[arg(long)]
    pub samples: Option<u64>,
    /// Relative quadrature tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Absolute tolerance of the truncated λ-integral
    #[arg(long)]
    pub contour_tol: Option<f64>,
    #[arg(long)]
    pub lambda_cutoff: Option<f64>,
    #[arg(long)]
    pub max_evals: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeometryArgs {
    #[arg(long)]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explicit chart point, e.g. `1+0i,0.5-0.2i`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Option<Vec<String>>,
    /// Finite-difference step
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuantumArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Couplings c_1..c_{N+1}
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    /// Complex time as `re,im`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    #[arg(long)]
    pub mmax: Option<u64>,
    /// Run the Fourier-series check instead of the trace battery
    #[arg(long)]
    pub fourier: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of ±n pairs in the Fourier partial sum
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Chart point in the unit ball, e.g. `0.5` or `0.3+0.1i,-0.2i`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<String>>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// CQ spectrum (decreasing); defaults to N+1, …, 1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SuiteArgs {
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Config-file schema: every flag under its snake_case name, plus the
/// `quantum` section of a parameter file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<Kind>,
    pub theta: Option<Vec<f64>>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub tol: Option<f64>,
    pub contour_tol: Option<f64>,
    pub lambda_cutoff: Option<f64>,
    pub max_evals: Option<u64>,
    pub n: Option<usize>,
    pub points: Option<usize>,
    pub at: Option<Vec<String>>,
    pub h: Option<f64>,
    pub k: Option<u64>,
    pub c: Option<Vec<f64>>,
    pub t: Option<[f64; 2]>,
    pub mmax: Option<u64>,
    pub phi: Option<f64>,
    pub eps: Option<f64>,
    pub m: Option<u64>,
    pub xi: Option<Vec<String>>,
    pub nmax: Option<usize>,
    pub quantum: Option<QuantumSection>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Parses `a+bi`, `a-bi`, `bi` or `a`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    Complex64::from_str(s.trim()).map_err(|_| CliError::Input(format!("cannot parse complex number {s:?}")))
}

pub fn parse_complex_list(items: &[String]) -> Result<Vec<Complex64>, CliError> {
    items.iter().map(|s| parse_complex(s)).collect()
}

/// `re,im` pair for the time argument.
pub fn parse_time(parts: &[f64]) -> Result<Complex64, CliError> {
    match parts {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(CliError::Input(format!("--t expects re,im, got {} numbers", parts.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1+0i").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-0.3-0.2i").unwrap(), Complex64::new(-0.3, -0.2));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["localize", "quantum", "--n", "1", "--k", "2", "--c", "1,0", "--t", "0,-1", "--mmax", "40"])
            .unwrap();
        match cli.command {
            Command::Quantum(q) => {
                assert_eq!(q.t, Some(vec![0.0, -1.0]));
                assert_eq!(q.c, Some(vec![1.0, 0.0]));
            }
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["localize", "partition", "--kind", "cq", "--theta", "3,2,1", "--rho", "1", "--json"]).unwrap();
        assert!(cli.output.json);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<ConfigFile>(r#"{"kind":"cp","theta":[1,2],"rho":1}"#).is_ok());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"thetas":[1,2]}"#).is_err());
    }
}

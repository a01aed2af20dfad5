//! Argument parsing and command dispatch. Every command is a thin wrapper
//! over `combsim_core`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use combsim_core::hankel::DEFAULT_HANKEL_TOL;
use combsim_core::reduction::verify_cube_reduction_with;
use combsim_core::verify::validate_schedule;
use combsim_core::*;
use serde::Serialize;

use crate::config::{parse_label, CombConfig};
use crate::io::{fmt_f64, matrix_rows, read_matrix, to_json, write_matrix_csv, InputError};
use crate::report::{report_csv, report_text, ReportJson};

/// Environment variable overriding the pass tolerances: either a bare
/// exponent tolerance (`1e-4`) or `exponent=1e-4,variance_ratio=0.3`.
pub const TOL_ENV: &str = "COMBSIM_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "combsim", version, about = "Optical-comb cluster states: couplings, evolution, verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Where a coupling matrix comes from. Exactly one must be given.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MatrixSource {
    /// Hankel shorthand, e.g. "[0,0,0/1/0,1,0]".
    #[arg(long)]
    pub hankel: Option<String>,
    /// JSON (array of rows) or .csv matrix file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Builtin matrix: eq10, eq10-displayed, square, cube, balanced, balanced-hgraph, g1, g2, g3.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Comb and pump configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse Hankel shorthand and print it back normalized.
    Parse {
        shorthand: String,
        #[arg(long)]
        to_matrix: bool,
    },
    /// Build the coupling matrix of a comb and pump configuration.
    Build {
        #[arg(long)]
        config: PathBuf,
    },
    /// Eigenvalues of G and the squeezed joint quadratures.
    Spectrum {
        #[command(flatten)]
        source: MatrixSource,
    },
    /// Covariance of the vacuum evolved under G.
    Evolve {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long)]
        r: f64,
        /// Modes to measure in Q after evolving.
        #[arg(long, value_delimiter = ',')]
        measure: Vec<usize>,
    },
    /// Check that G generates a cluster state.
    Verify {
        #[command(flatten)]
        source: MatrixSource,
        /// Builtin name or matrix file.
        #[arg(long)]
        cluster: String,
        /// Modes to rotate, e.g. 3,4; `auto` searches all subsets (n ≤ 8).
        #[arg(long, default_value = "")]
        rotate: String,
        #[arg(long, default_value = "0.5,1,2")]
        schedule: String,
    },
    /// Check that a multi-copy generator splits into N verified clusters.
    VerifyCopies {
        /// square, cube, or a matrix file.
        #[arg(long)]
        block: String,
        #[arg(long)]
        n: usize,
        /// Generator to check; defaults to the block's multi-copy generator.
        #[arg(long)]
        hankel: Option<String>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value = "0.5,1,2")]
        schedule: String,
    },
    /// Measure two adjacent cube vertices and verify the 2x3 grid.
    ReduceCube {
        #[arg(long, default_value = "0.5,1,2")]
        schedule: String,
        #[arg(long, default_value = "1,5", value_delimiter = ',', num_args = 1)]
        pair: Vec<usize>,
    },
    /// Couplings from a pump configuration that leave the target mode set.
    Spurious {
        #[arg(long)]
        config: PathBuf,
        /// Target mode labels, e.g. 1,2,3,4 or 1H,1V.
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Build { .. } => "build",
            Command::Spectrum { .. } => "spectrum",
            Command::Evolve { .. } => "evolve",
            Command::Verify { .. } => "verify",
            Command::VerifyCopies { .. } => "verify-copies",
            Command::ReduceCube { .. } => "reduce-cube",
            Command::Spurious { .. } => "spurious",
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    /// False for failed verifications (exit status 1).
    pub pass: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, pass: true }
    }
}

pub fn parse_schedule(s: &str, min_points: usize) -> Result<Vec<f64>, InputError> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| InputError::Invalid(format!("bad schedule value '{}'", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    validate_schedule(&values, min_points)?;
    Ok(values)
}

pub fn parse_tolerances(s: Option<&str>) -> Result<Tolerances, InputError> {
    let mut tol = Tolerances::default();
    let Some(s) = s.map(str::trim).filter(|s| !s.is_empty()) else {
        return Ok(tol);
    };
    let bad = || InputError::Invalid(format!("{TOL_ENV}: cannot read '{s}'"));
    for part in s.split(',') {
        let (key, value) = match part.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => ("exponent", part.trim()),
        };
        let value: f64 = value.parse().map_err(|_| bad())?;
        if !(value.is_finite() && value > 0.0) {
            return Err(bad());
        }
        match key {
            "exponent" => tol.exponent = value,
            "variance_ratio" => tol.variance_ratio = value,
            _ => return Err(bad()),
        }
    }
    Ok(tol)
}

/// 1-based `"3,4"` to 0-based indices; empty means none.
fn parse_modes(s: &str, n: usize) -> Result<BTreeSet<usize>, InputError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let k: usize = t
                .parse()
                .map_err(|_| InputError::Invalid(format!("bad mode number '{t}'")))?;
            if k == 0 || k > n {
                return Err(InputError::Invalid(format!("mode {k} outside 1..={n}")));
            }
            Ok(k - 1)
        })
        .collect()
}

fn load_source(src: &MatrixSource) -> Result<Matrix, InputError> {
    if let Some(h) = &src.hankel {
        return Ok(parse_hankel_shorthand(h)?.to_matrix());
    }
    if let Some(path) = &src.matrix {
        return read_matrix(path);
    }
    if let Some(name) = &src.builtin {
        return builtin(name);
    }
    if let Some(path) = &src.config {
        let cfg = CombConfig::load(path)?;
        return Ok(build_coupling_from_pumps(&cfg.comb()?, &cfg.pumps()?)?.into_entries());
    }
    Err(InputError::Invalid("no matrix given".into()))
}

fn builtin(name: &str) -> Result<Matrix, InputError> {
    catalog::named_matrix(name).ok_or_else(|| {
        InputError::Invalid(format!("unknown builtin '{name}' (known: {})", catalog::NAMES.join(", ")))
    })
}

fn builtin_or_file(spec: &str) -> Result<Matrix, InputError> {
    match catalog::named_matrix(spec) {
        Some(m) => Ok(m),
        None if std::path::Path::new(spec).exists() => read_matrix(spec.as_ref()),
        None => builtin(spec),
    }
}

fn matrix_output(m: &Matrix, format: Format) -> String {
    match format {
        Format::Json => to_json(&matrix_rows(m)),
        Format::Csv => write_matrix_csv(m),
        Format::Text => {
            let mut s = String::new();
            for row in matrix_rows(m) {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:>10.6}")).collect();
                let _ = writeln!(s, "{}", cells.join(" "));
            }
            s
        }
    }
}

fn report_output(r: &VerificationReport, format: Format) -> Outcome {
    let output = match format {
        Format::Json => to_json(&ReportJson::from(r)),
        Format::Csv => report_csv(r),
        Format::Text => report_text(r),
    };
    Outcome { output, pass: r.pass }
}

#[derive(Serialize)]
struct HankelJson {
    size: usize,
    top: Vec<f64>,
    center: f64,
    right: Vec<f64>,
    shorthand: String,
}

#[derive(Serialize)]
struct BuildJson {
    modes: Vec<String>,
    matrix: Vec<Vec<f64>>,
    shorthand: Option<String>,
}

#[derive(Serialize)]
struct SqueezedJson {
    eigenvalue: f64,
    rate: f64,
    q: Vec<f64>,
    p: Vec<f64>,
}

#[derive(Serialize)]
struct SpectrumJson {
    eigenvalues: Vec<f64>,
    squeezed: Vec<SqueezedJson>,
}

#[derive(Serialize)]
struct StateJson {
    r: f64,
    modes: usize,
    measured: Vec<usize>,
    covariance: Vec<Vec<f64>>,
    determinant: f64,
    min_uncertainty_eigenvalue: f64,
}

#[derive(Serialize)]
struct SpuriousJson {
    lower: String,
    higher: String,
    pump_sum: u32,
    interaction: &'static str,
}

/// Runs one command. Errors are input errors (exit status 2).
pub fn run(cli: &Cli) -> Result<Outcome, InputError> {
    let format = cli.format;
    let tol = parse_tolerances(std::env::var(TOL_ENV).ok().as_deref())?;
    match &cli.command {
        Command::Parse { shorthand, to_matrix } => {
            let v = parse_hankel_shorthand(shorthand)?;
            if *to_matrix {
                return Ok(Outcome::ok(matrix_output(&v.to_matrix(), format)));
            }
            let text = print_hankel_shorthand(&v);
            Ok(Outcome::ok(match format {
                Format::Json => to_json(&HankelJson {
                    size: v.size(),
                    top: v.top().to_vec(),
                    center: v.center(),
                    right: v.right().to_vec(),
                    shorthand: text,
                }),
                Format::Csv => {
                    let cells: Vec<String> = v.entries().iter().map(|x| fmt_f64(*x)).collect();
                    format!("{}\n", cells.join(","))
                }
                Format::Text => format!("{text}\n"),
            }))
        }
        Command::Build { config } => {
            let cfg = CombConfig::load(config)?;
            let g = build_coupling_from_pumps(&cfg.comb()?, &cfg.pumps()?)?;
            let shorthand = matrix_to_hankel(&g, DEFAULT_HANKEL_TOL)
                .ok()
                .map(|v| print_hankel_shorthand(&v));
            let modes: Vec<String> = g.mode_order().iter().map(|m| m.to_string()).collect();
            Ok(Outcome::ok(match format {
                Format::Json => to_json(&BuildJson {
                    modes,
                    matrix: matrix_rows(g.entries()),
                    shorthand,
                }),
                Format::Csv => write_matrix_csv(g.entries()),
                Format::Text => {
                    let mut s = format!("modes: {}\n", modes.join(" "));
                    if let Some(sh) = shorthand {
                        let _ = writeln!(s, "shorthand: {sh}");
                    }
                    s + &matrix_output(g.entries(), Format::Text)
                }
            }))
        }
        Command::Spectrum { source } => {
            let g = load_source(source)?;
            let spec = squeezing_spectrum(&g)?;
            let squeezed: Vec<SqueezedJson> = spec
                .squeezed_combinations()
                .into_iter()
                .map(|c| SqueezedJson {
                    eigenvalue: c.eigenvalue,
                    rate: c.rate,
                    q: c.combination.q_coeffs().to_vec(),
                    p: c.combination.p_coeffs().to_vec(),
                })
                .collect();
            Ok(Outcome::ok(match format {
                Format::Json => to_json(&SpectrumJson {
                    eigenvalues: spec.eigenvalues().to_vec(),
                    squeezed,
                }),
                Format::Csv => {
                    let mut s = String::from("eigenvalue\n");
                    for l in spec.eigenvalues() {
                        let _ = writeln!(s, "{}", fmt_f64(*l));
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for c in &squeezed {
                        let quad = if c.q.iter().any(|x| *x != 0.0) { "Q" } else { "P" };
                        let coeffs = if quad == "Q" { &c.q } else { &c.p };
                        let terms: Vec<String> = coeffs.iter().map(|x| format!("{x:.6}")).collect();
                        let _ = writeln!(s, "{:>10.6}  {quad}·[{}]  e^({:.6} r)", c.eigenvalue, terms.join(", "), c.rate);
                    }
                    s
                }
            }))
        }
        Command::Evolve { source, r, measure } => {
            let g = load_source(source)?;
            let state = evolve_vacuum(&g, *r)?;
            let modes = parse_modes(
                &measure.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
                state.modes(),
            )?;
            let state = measure_positions(&state, &modes.iter().copied().collect::<Vec<_>>())?;
            let out = StateJson {
                r: *r,
                modes: state.modes(),
                measured: modes.iter().map(|m| m + 1).collect(),
                covariance: matrix_rows(state.cov()),
                determinant: state.determinant(),
                min_uncertainty_eigenvalue: state.min_uncertainty_eigenvalue(),
            };
            Ok(Outcome::ok(match format {
                Format::Json => to_json(&out),
                Format::Csv => write_matrix_csv(state.cov()),
                Format::Text => format!(
                    "det {:.12}\nmin uncertainty eigenvalue {:.3e}\n{}",
                    out.determinant,
                    out.min_uncertainty_eigenvalue,
                    matrix_output(state.cov(), Format::Text)
                ),
            }))
        }
        Command::Verify {
            source,
            cluster,
            rotate,
            schedule,
        } => {
            let g = load_source(source)?;
            let a = AdjacencyMatrix::cluster(builtin_or_file(cluster)?)?;
            let schedule = parse_schedule(schedule, 3)?;
            let rotations = if rotate.trim() == "auto" {
                search_rotations(&g, &a, &schedule, &tol)?.into_iter().next().unwrap_or_default()
            } else {
                parse_modes(rotate, a.size())?
            };
            let report = verify_cluster(&g, &a, &rotations, &schedule, &tol)?;
            Ok(report_output(&report, format))
        }
        Command::VerifyCopies {
            block,
            n,
            hankel,
            matrix,
            schedule,
        } => {
            let block = match catalog::block(block) {
                Some(b) => b,
                None => BipartiteBlock::new(read_matrix(block.as_ref())?)?,
            };
            let schedule = parse_schedule(schedule, 3)?;
            let g = match (hankel, matrix) {
                (Some(_), Some(_)) => return Err(InputError::Invalid("give --hankel or --matrix, not both".into())),
                (Some(h), None) => parse_hankel_shorthand(h)?.to_matrix(),
                (None, Some(p)) => read_matrix(p)?,
                (None, None) => multi_copy_generator(&block, *n).into_entries(),
            };
            let report = verify_copies(&g, &block, *n, &schedule, &tol)?;
            Ok(report_output(&report, format))
        }
        Command::ReduceCube { schedule, pair } => {
            let schedule = parse_schedule(schedule, 2)?;
            let modes = parse_modes(&pair.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","), 8)?;
            if modes.len() != 2 {
                return Err(InputError::Invalid("--pair needs two distinct cube vertices".into()));
            }
            let v: Vec<usize> = modes.into_iter().collect();
            let report = verify_cube_reduction_with(&schedule, (v[0], v[1]), &tol)?;
            Ok(report_output(&report, format))
        }
        Command::Spurious { config, target } => {
            let cfg = CombConfig::load(config)?;
            let target = if target.is_empty() {
                cfg.target()?
            } else {
                target.iter().map(|s| parse_label(s)).collect::<Result<_, _>>()?
            };
            let found = spurious_couplings(&cfg.comb()?, &cfg.pumps()?, &target);
            let rows: Vec<SpuriousJson> = found
                .iter()
                .map(|s| SpuriousJson {
                    lower: s.lower.to_string(),
                    higher: s.higher.to_string(),
                    pump_sum: s.pump.freq_sum,
                    interaction: s.pump.interaction.name(),
                })
                .collect();
            let output = match format {
                Format::Json => to_json(&rows),
                Format::Csv => {
                    let mut s = String::from("lower,higher,pump_sum,interaction\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{},{},{}", r.lower, r.higher, r.pump_sum, r.interaction);
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for r in &rows {
                        let _ = writeln!(s, "{} - {} (pump sum {}, {})", r.lower, r.higher, r.pump_sum, r.interaction);
                    }
                    if rows.is_empty() {
                        s.push_str("no spurious couplings\n");
                    }
                    s
                }
            };
            Ok(Outcome {
                output,
                pass: rows.is_empty(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_parsing() {
        assert_eq!(parse_schedule("0.5, 1,2", 3).unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_schedule("1,0.5,2", 3).is_err());
        assert!(parse_schedule("1,x,2", 3).is_err());
        assert!(parse_schedule("1,2", 3).is_err());
    }

    #[test]
    fn tolerance_env_forms() {
        assert_eq!(parse_tolerances(None).unwrap(), Tolerances::default());
        assert_eq!(parse_tolerances(Some("1e-4")).unwrap().exponent, 1e-4);
        let t = parse_tolerances(Some("exponent=0.01, variance_ratio=0.2")).unwrap();
        assert_eq!((t.exponent, t.variance_ratio), (0.01, 0.2));
        assert!(parse_tolerances(Some("speed=1")).is_err());
        assert!(parse_tolerances(Some("-1")).is_err());
    }

    #[test]
    fn mode_lists_are_one_based() {
        assert_eq!(parse_modes("3,4", 4).unwrap(), [2, 3].into_iter().collect());
        assert!(parse_modes("0", 4).is_err());
        assert!(parse_modes("5", 4).is_err());
        assert!(parse_modes("", 4).unwrap().is_empty());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

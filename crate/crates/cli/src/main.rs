//! `sublat`: lattice inspection, probability tables, verification
//! sweeps, measurement simulation, and classical evidence queries.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
//! mathematical property check fails. Machine formats (JSON/CSV) are
//! byte-stable for fixed inputs and seed.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sublat_core::dempster::{parse_set_spec, Evidence, EvidenceError};
use sublat_core::lattice::{DivisorLattice, LatticeError};
use sublat_core::measures::{MeasureError, Probabilities, ProbabilityReport};
use sublat_core::quantum::{DensityMatrix, QuantumError, UNITARY_TOL};
use sublat_core::sampling::{MeasurementRecord, SamplingError, RNG_ALGORITHM};
use sublat_core::verify;

/// Largest dimension at which the Fourier operator is checked during
/// `check`; the dense product is cubic in the dimension.
const FOURIER_CHECK_MAX: u64 = 64;

#[derive(Parser)]
#[command(
    name = "sublat",
    version,
    about = "Lower and upper probabilities on divisor lattices"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the divisor lattice of a modulus.
    Lattice {
        /// Modulus whose divisors form the lattice.
        n: u64,
    },
    /// Lower/upper probability report for a state.
    Probabilities {
        /// Dimension; defaults to the state file's dimension. Without
        /// --rho, the maximally mixed state of this dimension is used.
        #[arg(long)]
        n: Option<u64>,
        /// Density matrix JSON file.
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Simulate the measurement and report frequency estimates.
    Sample {
        /// Dimension; defaults to the state file's dimension. Without
        /// --rho, the maximally mixed state of this dimension is used.
        #[arg(long)]
        n: Option<u64>,
        /// Density matrix JSON file.
        #[arg(long)]
        rho: Option<PathBuf>,
        /// Number of shots.
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Stream seed.
        #[arg(long, env = "SUBLAT_SEED", default_value_t = 0)]
        seed: u64,
        /// Divisor whose probabilities are estimated.
        #[arg(long)]
        m: u64,
        /// Optional intermediate divisor (m | k | not-not-m).
        #[arg(long)]
        k: Option<u64>,
    },
    /// Query classical evidence for belief and plausibility.
    Ds {
        /// Evidence JSON file.
        #[arg(long)]
        evidence: PathBuf,
        /// Query set, "lo..hi" or a comma list; repeatable.
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
    },
    /// Run the exhaustive law checks and the randomized sweep.
    Check {
        /// Largest modulus checked.
        #[arg(long, default_value_t = 60)]
        n_max: u64,
        /// Random states per modulus.
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Base seed for the sweep.
        #[arg(long, env = "SUBLAT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// Bad arguments, unreadable files, malformed inputs. Mathematical check
/// failures are not errors; they ride on [`CommandOutput`] so the payload
/// still prints.
#[derive(Debug)]
enum Failure {
    Invalid(String),
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure::Invalid(e.to_string())
    }
}

macro_rules! invalid_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::invalid(e)
            }
        }
    )*};
}
invalid_from!(
    LatticeError,
    QuantumError,
    MeasureError,
    SamplingError,
    EvidenceError,
    std::io::Error
);

/// What a successful dispatch hands back to `main`.
struct CommandOutput {
    /// Payload for stdout.
    payload: String,
    /// Set when the payload reports failed property checks.
    check_failure: Option<String>,
}

impl CommandOutput {
    fn clean(payload: String) -> Self {
        Self {
            payload,
            check_failure: None,
        }
    }
}

fn exit_code(result: &Result<CommandOutput, Failure>) -> i32 {
    match result {
        Ok(out) if out.check_failure.is_none() => 0,
        Ok(_) => 2,
        Err(Failure::Invalid(_)) => 1,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            // Usage errors (including a missing subcommand) are validation
            // failures, so they take exit code 1 rather than clap's 2.
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    };
    let result = dispatch(cli);
    let code = exit_code(&result);
    match result {
        Ok(out) => {
            print!("{}", out.payload);
            if let Some(message) = out.check_failure {
                eprintln!("check failure: {message}");
            }
        }
        Err(Failure::Invalid(message)) => eprintln!("error: {message}"),
    }
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<CommandOutput, Failure> {
    match cli.command {
        Command::Lattice { n } => cmd_lattice(n, cli.format),
        Command::Probabilities { n, rho } => cmd_probabilities(n, rho, cli.format),
        Command::Sample {
            n,
            rho,
            shots,
            seed,
            m,
            k,
        } => cmd_sample(n, rho, shots, seed, m, k, cli.format),
        Command::Ds { evidence, sets } => cmd_ds(&evidence, &sets, cli.format),
        Command::Check {
            n_max,
            trials,
            seed,
        } => cmd_check(n_max, trials, seed, cli.format),
    }
}

/// Load the state: from a file, from a dimension (maximally mixed), or
/// both (the dimensions must agree).
fn load_state(n: Option<u64>, rho: Option<&PathBuf>) -> Result<DensityMatrix, Failure> {
    match (n, rho) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            let state = DensityMatrix::from_json(&text)?;
            if let Some(n) = n {
                if state.dim() as u64 != n {
                    return Err(Failure::Invalid(format!(
                        "--n {n} disagrees with the state file's dimension {}",
                        state.dim()
                    )));
                }
            }
            Ok(state)
        }
        (Some(n), None) => Ok(DensityMatrix::maximally_mixed(n as usize)?),
        (None, None) => Err(Failure::Invalid(
            "provide --rho FILE, --n N, or both".into(),
        )),
    }
}

#[derive(Serialize)]
struct DivisorRow {
    m: u64,
    negation: u64,
    double_negation: u64,
    complemented: bool,
}

#[derive(Serialize)]
struct LatticeReport {
    n: u64,
    divisors: Vec<u64>,
    rows: Vec<DivisorRow>,
    complemented_sublattice: Vec<u64>,
    covering_pairs: Vec<(u64, u64)>,
    maximal_chains: Vec<Vec<u64>>,
}

fn cmd_lattice(n: u64, format: Format) -> Result<CommandOutput, Failure> {
    let lat = DivisorLattice::new(n)?;
    let rows = lat
        .divisors()
        .iter()
        .map(|&m| -> Result<DivisorRow, Failure> {
            Ok(DivisorRow {
                m,
                negation: lat.negation(m)?,
                double_negation: lat.double_negation(m)?,
                complemented: lat.is_hall(m)?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = LatticeReport {
        n,
        divisors: lat.divisors().to_vec(),
        rows,
        complemented_sublattice: lat.hall_divisors(),
        covering_pairs: lat.covering_pairs(),
        maximal_chains: lat.maximal_chains(),
    };
    let payload = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from("m,negation,double_negation,complemented\n");
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.m, row.negation, row.double_negation, row.complemented
                );
            }
            out
        }
        Format::Table => {
            let mut out = format!("divisor lattice of {n}\n");
            let _ = writeln!(out, "{:>8} {:>8} {:>8}  complemented", "m", "neg", "negneg");
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{:>8} {:>8} {:>8}  {}",
                    row.m,
                    row.negation,
                    row.double_negation,
                    if row.complemented { "yes" } else { "no" }
                );
            }
            let _ = writeln!(
                out,
                "complemented sublattice: {:?}",
                report.complemented_sublattice
            );
            let _ = writeln!(out, "covering pairs: {:?}", report.covering_pairs);
            let _ = writeln!(out, "maximal chains:");
            for chain in &report.maximal_chains {
                let _ = writeln!(out, "  {chain:?}");
            }
            out
        }
    };
    Ok(CommandOutput::clean(payload))
}

fn cmd_probabilities(
    n: Option<u64>,
    rho: Option<PathBuf>,
    format: Format,
) -> Result<CommandOutput, Failure> {
    let state = load_state(n, rho.as_ref())?;
    let report = ProbabilityReport::compute(&state)?;
    let payload = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
        Format::Table => {
            let mut out = format!("probability report, n = {}\n", report.n);
            let _ = writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}",
                "m", "l", "lt", "u", "ut", "d"
            );
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{:>6} {:>12.9} {:>12.9} {:>12.9} {:>12.9} {:>12.9}",
                    row.m, row.l, row.lt, row.u, row.ut, row.d
                );
            }
            let _ = writeln!(out, "pairwise defect table (ascending divisors):");
            for line in &report.sigma {
                let cells: Vec<String> = line.iter().map(|v| format!("{v:>12.9}")).collect();
                let _ = writeln!(out, "  {}", cells.join(" "));
            }
            let _ = writeln!(out, "checks:");
            for (name, check) in &report.checks {
                let _ = writeln!(
                    out,
                    "  {:<26} {}  worst slack {:+.3e}",
                    name,
                    if check.pass { "pass" } else { "FAIL" },
                    check.worst_slack
                );
            }
            out
        }
    };
    let check_failure = (!report.all_checks_pass()).then(|| {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(name, _)| name.as_str())
            .collect();
        format!("failed checks: {}", failed.join(", "))
    });
    Ok(CommandOutput {
        payload,
        check_failure,
    })
}

#[derive(Serialize)]
struct SampleReport {
    n: u64,
    shots: u64,
    seed: u64,
    algorithm: &'static str,
    m: u64,
    lower_estimate: f64,
    upper_estimate: f64,
    gap_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intermediate_estimate: Option<f64>,
    lower_exact: f64,
    upper_exact: f64,
    counts: Vec<u64>,
}

fn cmd_sample(
    n: Option<u64>,
    rho: Option<PathBuf>,
    shots: u64,
    seed: u64,
    m: u64,
    k: Option<u64>,
    format: Format,
) -> Result<CommandOutput, Failure> {
    let state = load_state(n, rho.as_ref())?;
    let p = Probabilities::new(&state)?;
    let record = MeasurementRecord::simulate(&state, shots, seed)?;
    let intermediate = k.map(|k| record.estimate_intermediate(m, k)).transpose()?;
    let report = SampleReport {
        n: state.dim() as u64,
        shots,
        seed,
        algorithm: RNG_ALGORITHM,
        m,
        lower_estimate: record.estimate_lower(m)?,
        upper_estimate: record.estimate_upper(m)?,
        gap_estimate: record.estimate_dont_know(m)?,
        k,
        intermediate_estimate: intermediate,
        lower_exact: p.lower(m)?,
        upper_exact: p.upper(m)?,
        counts: record.counts().to_vec(),
    };
    let payload = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out =
                String::from("m,k,lower_estimate,upper_estimate,gap_estimate,intermediate_estimate,lower_exact,upper_exact\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                report.m,
                report.k.map(|k| k.to_string()).unwrap_or_default(),
                report.lower_estimate,
                report.upper_estimate,
                report.gap_estimate,
                report
                    .intermediate_estimate
                    .map(|q| q.to_string())
                    .unwrap_or_default(),
                report.lower_exact,
                report.upper_exact
            );
            out
        }
        Format::Table => {
            let mut out = format!(
                "measurement record: n = {}, shots = {}, seed = {}, stream = {}\n",
                report.n, report.shots, report.seed, report.algorithm
            );
            let _ = writeln!(
                out,
                "lower({m})  estimate {:>12.9}   exact {:>12.9}",
                report.lower_estimate, report.lower_exact
            );
            let _ = writeln!(
                out,
                "upper({m})  estimate {:>12.9}   exact {:>12.9}",
                report.upper_estimate, report.upper_exact
            );
            let _ = writeln!(out, "gap({m})    estimate {:>12.9}", report.gap_estimate);
            if let (Some(k), Some(q)) = (report.k, report.intermediate_estimate) {
                let _ = writeln!(out, "q({m},{k})   estimate {q:>12.9}");
            }
            out
        }
    };
    Ok(CommandOutput::clean(payload))
}

#[derive(Serialize)]
struct DsRow {
    set: String,
    elements: usize,
    belief: String,
    plausibility: String,
    inside: usize,
    straddling: usize,
    outside: usize,
}

fn cmd_ds(evidence: &PathBuf, sets: &[String], format: Format) -> Result<CommandOutput, Failure> {
    let text = std::fs::read_to_string(evidence)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", evidence.display())))?;
    let evidence = Evidence::from_json(&text)?;
    let mut rows = Vec::new();
    for spec in sets {
        let set: BTreeSet<i64> = parse_set_spec(spec, evidence.frame())?;
        let (inside, straddling, outside) = evidence.categorize(&set)?;
        rows.push(DsRow {
            set: spec.clone(),
            elements: set.len(),
            belief: evidence.belief(&set)?.to_string(),
            plausibility: evidence.plausibility(&set)?.to_string(),
            inside,
            straddling,
            outside,
        });
    }
    let payload = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out =
                String::from("set,elements,belief,plausibility,inside,straddling,outside\n");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    row.set,
                    row.elements,
                    row.belief,
                    row.plausibility,
                    row.inside,
                    row.straddling,
                    row.outside
                );
            }
            out
        }
        Format::Table => {
            let mut out = format!("evidence: {} sources\n", evidence.source_count());
            let _ = writeln!(
                out,
                "{:<12} {:>9} {:>9} {:>13} {:>7} {:>11} {:>8}",
                "set", "elements", "belief", "plausibility", "inside", "straddling", "outside"
            );
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{:<12} {:>9} {:>9} {:>13} {:>7} {:>11} {:>8}",
                    row.set,
                    row.elements,
                    row.belief,
                    row.plausibility,
                    row.inside,
                    row.straddling,
                    row.outside
                );
            }
            out
        }
    };
    Ok(CommandOutput::clean(payload))
}

#[derive(Serialize)]
struct CheckReport {
    n_max: u64,
    trials: u32,
    seed: u64,
    law_assertions: u64,
    law_failures: Vec<String>,
    fourier_worst_defect: f64,
    sweep: verify::SweepSummary,
    pass: bool,
}

fn cmd_check(
    n_max: u64,
    trials: u32,
    seed: u64,
    format: Format,
) -> Result<CommandOutput, Failure> {
    if n_max < 2 {
        return Err(Failure::Invalid("--n-max must be at least 2".into()));
    }
    if trials < 1 {
        return Err(Failure::Invalid("--trials must be at least 1".into()));
    }
    let mut law_assertions = 0;
    let mut law_failures = Vec::new();
    let mut fourier_worst = 0.0f64;
    for n in 1..=n_max {
        let laws = verify::lattice_laws(n)?;
        law_assertions += laws.checked;
        law_failures.extend(laws.failures);
        let projectors = verify::projector_identities(n)?;
        law_assertions += projectors.checked;
        law_failures.extend(projectors.failures);
        if n <= FOURIER_CHECK_MAX {
            law_assertions += 1;
            let defect = verify::fourier_unitarity(n)?;
            fourier_worst = fourier_worst.max(defect);
            if defect > UNITARY_TOL {
                law_failures.push(format!("fourier unitarity defect {defect:e} at n={n}"));
            }
        }
    }
    let sweep = verify::sweep(n_max, trials, seed)?;
    let pass = law_failures.is_empty() && sweep.pass();
    let report = CheckReport {
        n_max,
        trials,
        seed,
        law_assertions,
        law_failures,
        fourier_worst_defect: fourier_worst,
        sweep,
        pass,
    };
    let payload = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from("check,pass,worst_slack\n");
            let _ = writeln!(
                out,
                "laws,{},{}",
                report.law_failures.is_empty(),
                report.law_assertions
            );
            let _ = writeln!(
                out,
                "fourier_unitarity,{},{}",
                report.fourier_worst_defect <= UNITARY_TOL,
                report.fourier_worst_defect
            );
            for (name, check) in &report.sweep.worst {
                let _ = writeln!(out, "{},{},{}", name, check.pass, check.worst_slack);
            }
            out
        }
        Format::Table => {
            let mut out = format!(
                "checked moduli up to {}, {} random states each (seed {})\n",
                report.n_max, report.trials, report.seed
            );
            let _ = writeln!(
                out,
                "law assertions: {} ({} failed)",
                report.law_assertions,
                report.law_failures.len()
            );
            for failure in &report.law_failures {
                let _ = writeln!(out, "  law failure: {failure}");
            }
            let _ = writeln!(
                out,
                "fourier worst defect: {:.3e} (dimensions up to {})",
                report.fourier_worst_defect,
                FOURIER_CHECK_MAX.min(report.n_max)
            );
            let _ = writeln!(out, "sweep over {} cells, worst slacks:", report.sweep.cells);
            for (name, check) in &report.sweep.worst {
                let _ = writeln!(
                    out,
                    "  {:<26} {}  worst slack {:+.3e}",
                    name,
                    if check.pass { "pass" } else { "FAIL" },
                    check.worst_slack
                );
            }
            for failure in &report.sweep.failures {
                let _ = writeln!(out, "  sweep failure: {failure}");
            }
            let _ = writeln!(out, "verdict: {}", if report.pass { "pass" } else { "FAIL" });
            out
        }
    };
    let check_failure = (!report.pass).then(|| {
        format!(
            "{} law failures, sweep pass = {}",
            report.law_failures.len(),
            report.sweep.pass()
        )
    });
    Ok(CommandOutput {
        payload,
        check_failure,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

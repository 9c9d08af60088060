//! Command-line front end. Every number printed here comes from a library call.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::{DensityOperator, QuantumOperation};
use crate::entfid::{fano_check, unitary_correction, FidelityReport, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::formats::{self, matrix_to_json, ChannelSpec, CodeSpec, MatrixJson, StateSpec};
use crate::linalg::c64;
use crate::reversal::{
    canonical_decomposition, check_algebraic_reversibility, reversal_operation, verify_reversal,
};
use crate::shorcode::{
    classical_repetition, correct_decay_demo, shor_monte_carlo, table1, table1_tsv, LogicalQubit,
    MonteCarloStats, RepetitionStats,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Tolerance for the trace-preservation verdict and Kraus canonicalization.
const ANALYSIS_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "qops",
    version,
    about = "Analyze quantum operations, reversals and the nine-qubit code"
)]
pub struct Cli {
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity, entropy exchange and Fano-type bounds of a channel.
    Analyze {
        channel: PathBuf,
        /// Input state; defaults to the maximally mixed state.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Reversibility of a channel on a code subspace.
    Revcheck {
        channel: PathBuf,
        code: PathBuf,
        /// Where to write the reversal channel when one exists.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Nine-qubit code tools.
    Shor {
        #[command(subcommand)]
        action: ShorCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ShorCommand {
    /// Encoded state under every single-qubit error, as TSV.
    Table(LogicalArgs),
    /// Decay on one qubit followed by syndrome measurement and correction.
    Demo {
        #[command(flatten)]
        logical: LogicalArgs,
        #[arg(long, default_value_t = 1)]
        qubit: usize,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo logical error rates under independent Pauli noise.
    Mc {
        #[arg(long = "p", default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Logical amplitudes; they are normalized before use.
#[derive(Debug, Clone, Args)]
pub struct LogicalArgs {
    #[arg(
        long = "alpha-re",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub alpha_re: f64,
    #[arg(
        long = "alpha-im",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub alpha_im: f64,
    #[arg(long = "beta-re", default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_re: f64,
    #[arg(long = "beta-im", default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_im: f64,
}

impl LogicalArgs {
    pub fn logical(&self) -> Result<LogicalQubit> {
        LogicalQubit::normalized(
            c64(self.alpha_re, self.alpha_im),
            c64(self.beta_re, self.beta_im),
        )
    }
}

/// One Fano-family inequality evaluated on an input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: String,
    pub bound: f64,
    /// Distance to the bound, positive when the inequality holds.
    pub margin: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(name: &str, value: f64, relation: &str, bound: f64) -> Self {
        let margin = if relation == "<=" {
            bound - value
        } else {
            value - bound
        };
        BoundCheck {
            name: name.into(),
            value,
            relation: relation.into(),
            bound,
            margin,
            holds: margin >= -BOUND_SLACK,
        }
    }
}

/// Machine-readable result of `analyze` and `revcheck`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub command: String,
    /// SHA-256 over the input files, in argument order.
    pub input_digest: String,
    pub dim: usize,
    pub kraus_count: usize,
    pub canonical_kraus_count: usize,
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub reversible: Option<bool>,
    pub mu_squared: Option<f64>,
    pub m_matrix: Option<MatrixJson>,
    /// Eigenvalues of `𝒜_ρ` for `analyze`; canonical weights for `revcheck`.
    pub lambdas: Vec<f64>,
    pub fidelity: Option<FidelityReport>,
    /// Entanglement fidelity after the best single unitary correction.
    pub corrected_fidelity: Option<f64>,
    pub bounds: Vec<BoundCheck>,
    pub reversibility_violation: Option<f64>,
    pub reversal_residual: Option<f64>,
    pub reversal_path: Option<String>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    fn empty(command: &str, digest: String, op: &QuantumOperation) -> Result<Self> {
        let superop = op.superoperator();
        Ok(AnalysisReport {
            command: command.into(),
            input_digest: digest,
            dim: op.dim(),
            kraus_count: op.kraus().len(),
            canonical_kraus_count: superop.kraus(ANALYSIS_TOL)?.len(),
            completely_positive: superop.is_completely_positive(ANALYSIS_TOL),
            trace_preserving: op.is_trace_preserving(ANALYSIS_TOL),
            reversible: None,
            mu_squared: None,
            m_matrix: None,
            lambdas: vec![],
            fidelity: None,
            corrected_fidelity: None,
            bounds: vec![],
            reversibility_violation: None,
            reversal_residual: None,
            reversal_path: None,
            violations: vec![],
            notes: vec![],
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "input sha256: {}", self.input_digest);
        let _ = writeln!(s, "dimension: {}", self.dim);
        let _ = writeln!(
            s,
            "operators: {} given, {} after canonicalization",
            self.kraus_count, self.canonical_kraus_count
        );
        let _ = writeln!(
            s,
            "completely positive: {}",
            yes_no(self.completely_positive)
        );
        let _ = writeln!(s, "trace preserving: {}", yes_no(self.trace_preserving));
        if let Some(f) = &self.fidelity {
            let _ = writeln!(s, "entanglement fidelity: {:.12}", f.entanglement_fidelity);
            let _ = writeln!(
                s,
                "entropy exchange (bits): {:.12}",
                f.entropy_exchange_bits
            );
            let _ = writeln!(s, "quadratic entropy: {:.12}", f.quadratic_entropy);
            let _ = writeln!(s, "largest eigenvalue: {:.12}", f.lambda1);
        }
        if let Some(fc) = self.corrected_fidelity {
            let _ = writeln!(s, "fidelity after unitary correction: {:.12}", fc);
        }
        if let Some(r) = self.reversible {
            let _ = writeln!(s, "reversible: {}", yes_no(r));
        }
        if let Some(mu) = self.mu_squared {
            let _ = writeln!(s, "mu^2: {:.12}", mu);
        }
        if let Some(v) = self.reversibility_violation {
            let _ = writeln!(s, "reversibility violation: {:.6e}", v);
        }
        if let Some(m) = &self.m_matrix {
            let _ = writeln!(s, "m matrix:");
            for row in m {
                let cells: Vec<String> = row
                    .iter()
                    .map(|[re, im]| format!("{re:+.9}{im:+.9}i"))
                    .collect();
                let _ = writeln!(s, "  {}", cells.join("  "));
            }
        }
        if !self.lambdas.is_empty() {
            let cells: Vec<String> = self.lambdas.iter().map(|l| format!("{l:.12}")).collect();
            let _ = writeln!(s, "lambdas: {}", cells.join(" "));
        }
        for b in &self.bounds {
            let _ = writeln!(
                s,
                "bound {}: {:.12} {} {:.12} (margin {:+.6e}) {}",
                b.name,
                b.value,
                b.relation,
                b.bound,
                b.margin,
                if b.holds { "holds" } else { "VIOLATED" }
            );
        }
        if let Some(r) = self.reversal_residual {
            let _ = writeln!(s, "reversal residual: {:.6e}", r);
        }
        if let Some(p) = &self.reversal_path {
            let _ = writeln!(s, "reversal written to: {p}");
        }
        for v in &self.violations {
            let _ = writeln!(s, "violation: {v}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Exit status for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Io(_) => EXIT_PARSE,
        Error::NoConvergence | Error::NonFinite(..) => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

struct Input {
    text: String,
    source: String,
}

fn read_inputs(paths: &[&Path]) -> Result<(Vec<Input>, String)> {
    let mut hasher = Sha256::new();
    let mut inputs = Vec::new();
    for path in paths {
        let bytes = std::fs::read(path)?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
        let source = path.display().to_string();
        let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
            path: source.clone(),
            message: format!("not UTF-8: {e}"),
        })?;
        inputs.push(Input { text, source });
    }
    let digest = hasher.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    Ok((inputs, digest))
}

pub fn cmd_analyze(channel: &Path, state: Option<&Path>) -> Result<AnalysisReport> {
    let mut paths = vec![channel];
    paths.extend(state);
    let (inputs, digest) = read_inputs(&paths)?;
    let op = formats::parse::<ChannelSpec>(&inputs[0].text, &inputs[0].source)?.to_operation()?;
    let rho = match inputs.get(1) {
        Some(input) => formats::parse::<StateSpec>(&input.text, &input.source)?.to_state()?,
        None => DensityOperator::maximally_mixed(op.dim()),
    };
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {}, channel {}",
            rho.dim(),
            op.dim()
        )));
    }
    let mut report = AnalysisReport::empty("analyze", digest, &op)?;
    let fid = fano_check(&op, &rho)?;
    report.lambdas = op.a_rho_spectrum(&rho)?;
    report.bounds.push(BoundCheck::new(
        "quantum Fano",
        fid.entropy_exchange_bits,
        "<=",
        fid.fano_bound,
    ));
    report.bounds.push(BoundCheck::new(
        "quadratic Fano",
        fid.quadratic_entropy,
        ">=",
        fid.quad_fano_bound,
    ));
    if report.trace_preserving {
        let corrected = unitary_correction(&op, &rho)?.report;
        let fc = corrected.entanglement_fidelity;
        report.corrected_fidelity = Some(fc);
        report.bounds.push(BoundCheck::new(
            "anti-Fano",
            fc,
            ">=",
            fid.anti_fano_entropy_bound,
        ));
        report.bounds.push(BoundCheck::new(
            "quadratic anti-Fano",
            fc,
            ">=",
            fid.anti_fano_quad_bound,
        ));
    } else {
        report
            .notes
            .push("anti-Fano bounds need a trace-preserving operation".into());
    }
    report.fidelity = Some(fid);
    report.violations = report
        .bounds
        .iter()
        .filter(|b| !b.holds)
        .map(|b| format!("{} bound", b.name))
        .collect();
    Ok(report)
}

pub fn cmd_revcheck(
    channel: &Path,
    code: &Path,
    out: Option<&Path>,
    tol: f64,
) -> Result<AnalysisReport> {
    let (inputs, digest) = read_inputs(&[channel, code])?;
    let op = formats::parse::<ChannelSpec>(&inputs[0].text, &inputs[0].source)?.to_operation()?;
    let code = formats::parse::<CodeSpec>(&inputs[1].text, &inputs[1].source)?.to_code()?;
    let mut report = AnalysisReport::empty("revcheck", digest, &op)?;
    let check = check_algebraic_reversibility(&op, &code, tol)?;
    report.reversible = Some(check.reversible);
    report.mu_squared = Some(check.mu_squared);
    report.m_matrix = Some(matrix_to_json(&check.m_matrix));
    report.reversibility_violation = Some(check.max_violation);
    if !check.reversible {
        report.violations.push(format!(
            "not reversible on the code (violation {:.6e})",
            check.max_violation
        ));
        return Ok(report);
    }
    let canon = canonical_decomposition(&op, &code, tol)?;
    let reversal = reversal_operation(&canon);
    report.lambdas = canon.lambdas.clone();
    report.reversal_residual = Some(verify_reversal(&reversal, &op, &code)?.max_deviation());
    if let Some(path) = out {
        std::fs::write(
            path,
            formats::to_json_pretty(&ChannelSpec::from_operation(&reversal)) + "\n",
        )?;
        report.reversal_path = Some(path.display().to_string());
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableRowJson {
    error: String,
    operator: String,
    state: String,
    /// Nonzero amplitudes as `(index, re, im)`.
    amplitudes: Vec<(usize, f64, f64)>,
}

/// Shor-code and repetition-code Monte Carlo with 95% Wilson intervals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub shor: MonteCarloStats,
    pub shor_interval: [f64; 2],
    pub classical: RepetitionStats,
    pub classical_interval: [f64; 2],
}

/// Wilson score interval at 95% confidence for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if k as f64 == n {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    [lo, hi]
}

fn shor(action: &ShorCommand, json: bool) -> Result<String> {
    match action {
        ShorCommand::Table(args) => {
            let rows = table1(&args.logical()?);
            if !json {
                return Ok(table1_tsv(&rows));
            }
            let rows: Vec<TableRowJson> = rows
                .iter()
                .map(|r| TableRowJson {
                    error: r.error_label.clone(),
                    operator: r.operator_label.clone(),
                    state: r.state_label.clone(),
                    amplitudes: r
                        .state
                        .amplitudes()
                        .iter()
                        .enumerate()
                        .filter(|(_, z)| z.norm() > 1e-15)
                        .map(|(i, z)| (i, z.re + 0.0, z.im + 0.0))
                        .collect(),
                })
                .collect();
            Ok(formats::to_json_pretty(&rows) + "\n")
        }
        ShorCommand::Demo {
            logical,
            qubit,
            gamma,
            seed,
        } => {
            let demo = correct_decay_demo(&logical.logical()?, *qubit, *gamma, *seed)?;
            if json {
                return Ok(formats::to_json_pretty(&demo) + "\n");
            }
            let mut s = String::new();
            let amp = |q: &LogicalQubit| {
                format!(
                    "alpha = {:+.12}{:+.12}i, beta = {:+.12}{:+.12}i",
                    q.alpha().re,
                    q.alpha().im,
                    q.beta().re,
                    q.beta().im
                )
            };
            let _ = writeln!(s, "input: {}", amp(&demo.input));
            let _ = writeln!(s, "gamma: {}, seed: {}", demo.gamma, seed);
            for line in &demo.transcript {
                let _ = writeln!(s, "{line}");
            }
            let _ = writeln!(s, "output: {}", amp(&demo.output));
            Ok(s)
        }
        ShorCommand::Mc { p, trials, seed } => {
            let shor = shor_monte_carlo(*p, *trials, *seed)?;
            let classical = classical_repetition(*p, *trials, *seed)?;
            let report = McReport {
                shor_interval: wilson_interval(shor.failures, shor.trials),
                classical_interval: wilson_interval(classical.failures, classical.trials),
                shor,
                classical,
            };
            if json {
                return Ok(formats::to_json_pretty(&report) + "\n");
            }
            Ok(mc_text(&report))
        }
    }
}

fn mc_text(r: &McReport) -> String {
    let mut s = String::new();
    let (q, c) = (&r.shor, &r.classical);
    let _ = writeln!(
        s,
        "nine-qubit code: p = {}, trials = {}, seed = {}",
        q.p, q.trials, q.seed
    );
    let _ = writeln!(s, "  mean logical fidelity: {:.9}", q.mean_fidelity);
    let _ = writeln!(
        s,
        "  failure rate: {:.6} (95% CI [{:.6}, {:.6}]), {} failures",
        q.failure_rate, r.shor_interval[0], r.shor_interval[1], q.failures
    );
    let _ = writeln!(
        s,
        "  failures with at most one error: {}",
        q.failures_by_error_count[0] + q.failures_by_error_count[1]
    );
    let _ = writeln!(
        s,
        "  outcomes outside every syndrome subspace: {}",
        q.escapes
    );
    let counts: Vec<String> = q
        .trials_by_error_count
        .iter()
        .zip(&q.failures_by_error_count)
        .enumerate()
        .filter(|(_, (n, _))| **n > 0)
        .map(|(k, (n, f))| format!("{k}:{n}/{f}"))
        .collect();
    let _ = writeln!(s, "  trials/failures by error count: {}", counts.join(" "));
    let _ = writeln!(
        s,
        "three-bit repetition code: p = {}, trials = {}, seed = {}",
        c.p, c.trials, c.seed
    );
    let _ = writeln!(
        s,
        "  empirical failure rate: {:.6} (95% CI [{:.6}, {:.6}]), {} failures",
        c.empirical_rate, r.classical_interval[0], r.classical_interval[1], c.failures
    );
    let _ = writeln!(s, "  exact 3p^2 - 2p^3: {:.6}", c.exact_rate);
    let _ = writeln!(s, "  leading order 3p^2: {:.6}", c.leading_order);
    let _ = writeln!(s, "  deviation: {:.3} sigma", c.z_score());
    s
}

fn dispatch(cli: &Cli) -> Result<String> {
    let render = |report: AnalysisReport| {
        if cli.json {
            formats::to_json_pretty(&report) + "\n"
        } else {
            report.to_text()
        }
    };
    match &cli.command {
        Command::Analyze { channel, state } => Ok(render(cmd_analyze(channel, state.as_deref())?)),
        Command::Revcheck {
            channel,
            code,
            out,
            tol,
        } => Ok(render(cmd_revcheck(channel, code, out.as_deref(), *tol)?)),
        Command::Shor { action } => shor(action, cli.json),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let [lo, hi] = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.005);
        let [lo, hi] = wilson_interval(280, 10_000);
        assert!(lo < 0.028 && 0.028 < hi);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::Parse {
                path: "x".into(),
                message: "m".into()
            }),
            EXIT_PARSE
        );
        assert_eq!(
            exit_code(&Error::DimensionMismatch("d".into())),
            EXIT_VALIDATION
        );
        assert_eq!(exit_code(&Error::NoConvergence), EXIT_NUMERIC);
    }

    #[test]
    fn bound_margins() {
        let b = BoundCheck::new("x", 1.0, "<=", 1.5);
        assert!(b.holds && (b.margin - 0.5).abs() < 1e-15);
        let b = BoundCheck::new("y", 1.0, ">=", 1.5);
        assert!(!b.holds);
    }

    #[test]
    fn flag_errors_exit_with_validation_status() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run(["qops", "shor", "mc", "--p", "2"], &mut out, &mut err),
            EXIT_VALIDATION
        );
        assert_eq!(
            run(["qops", "shor", "bogus"], &mut out, &mut err),
            EXIT_VALIDATION
        );
        assert_eq!(
            run(["qops", "shor", "table"], &mut out, &mut err),
            EXIT_VALIDATION
        );
        assert_eq!(
            run(
                ["qops", "shor", "demo", "--alpha-re", "1", "--qubit", "10"],
                &mut out,
                &mut err
            ),
            EXIT_VALIDATION
        );
    }
}

//! `rsp`: run, analyze and tabulate the Bell-channel remote state preparation
//! protocol from the command line.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rsp_core::analysis::sampled_trial;
use rsp_core::report;
use rsp_core::{
    canonicalize_target_with, emit_comparison_table, exact_analyze, monte_carlo,
    monte_carlo_with_workers, run_trial, ComparisonRow, ExactAnalysis, MonteCarloStats, Outcome,
    OutcomeSelector, ProtocolError, TargetSpec, Tolerance, TrialRecord,
};

/// Decimal flags carry about eight significant digits; 1/√2 typed as
/// 0.70710678 is off by ~2e-9.
const FLAG_TOL: f64 = 1e-7;

#[derive(Parser, Debug)]
#[command(
    name = "rsp",
    version,
    about = "Remote preparation of α|0…0⟩+β|1…1⟩ over one Bell pair"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single trial and print its trace.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Force Alice's measurement outcome instead of sampling it.
        #[arg(long, value_enum)]
        force_outcome: Option<ForcedOutcome>,
    },
    /// Enumerate both measurement branches exactly.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Seeded Monte Carlo estimate of success rate and mean classical cost.
    Montecarlo {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        trials: u64,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Comparison against earlier protocols for the same state family.
    Table {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta_re: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta_im: f64,
    /// Number of qubits in the prepared state.
    #[arg(long = "m")]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Rescale (α, β) to unit norm instead of rejecting unnormalized input.
    #[arg(long)]
    normalize: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ForcedOutcome {
    Psi,
    Psiperp,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Usage errors exit 2, internal failures exit 1.
enum Failure {
    Usage(String),
    Internal(String),
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

impl CommonArgs {
    fn target(&self) -> Result<TargetSpec, Failure> {
        let values = [self.alpha, self.beta_re, self.beta_im];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Failure::Usage("coefficients must be finite".into()));
        }
        let mut alpha = Complex64::new(self.alpha, 0.0);
        let mut beta = Complex64::new(self.beta_re, self.beta_im);
        if self.normalize {
            let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
            if norm == 0.0 {
                return Err(Failure::Usage("cannot normalize a zero vector".into()));
            }
            alpha /= norm;
            beta /= norm;
        }
        let tol = Tolerance {
            normalization: FLAG_TOL,
            case: FLAG_TOL,
        };
        canonicalize_target_with(alpha, beta, self.m, tol).map_err(|e| match e {
            ProtocolError::NonNormalized(_) if !self.normalize => {
                Failure::Usage(format!("{e}; pass --normalize to rescale"))
            }
            e => Failure::Usage(e.to_string()),
        })
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn describe_target(t: &TargetSpec) -> String {
    format!(
        "alpha={} beta={}{:+}i m={} case={}",
        t.alpha(),
        t.beta().re,
        t.beta().im,
        t.m(),
        t.case_tag()
    )
}

fn trial_text(t: &TargetSpec, r: &TrialRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "target     {}", describe_target(t));
    let _ = writeln!(s, "outcome    {} (p={})", r.outcome, r.probability);
    let _ = writeln!(s, "message    {}", r.message);
    let _ = writeln!(s, "bits_sent  {}", r.bits_sent);
    let _ = writeln!(s, "fidelity   {}", r.fidelity);
    let _ = writeln!(s, "success    {}", r.success);
    match &r.bob_state {
        Some(state) => {
            let _ = writeln!(s, "bob_state  {state}");
        }
        None => {
            let _ = writeln!(s, "bob_state  absent");
        }
    }
    s
}

fn analysis_text(t: &TargetSpec, a: &ExactAnalysis) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "target         {}", describe_target(t));
    let _ = writeln!(
        s,
        "{:<10} {:>12} {:>5} {:>12}",
        "outcome", "probability", "bits", "fidelity"
    );
    for b in &a.per_branch {
        let _ = writeln!(
            s,
            "{:<10} {:>12.10} {:>5} {:>12.10}",
            b.outcome.to_string(),
            b.probability,
            b.bits,
            b.fidelity
        );
    }
    let _ = writeln!(s, "p_success      {}", a.p_success);
    let _ = writeln!(s, "expected_bits  {}", a.expected_bits);
    s
}

fn stats_text(t: &TargetSpec, st: &MonteCarloStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "target        {}", describe_target(t));
    let _ = writeln!(s, "trials        {}", st.trials);
    let _ = writeln!(s, "seed          {}", st.seed);
    let _ = writeln!(s, "successes     {}", st.successes);
    let _ = writeln!(s, "total_bits    {}", st.total_bits);
    let _ = writeln!(s, "success_rate  {}", st.success_rate);
    let _ = writeln!(s, "mean_bits     {}", st.mean_bits);
    s
}

fn table_text(rows: &[ComparisonRow]) -> String {
    let header = [
        "protocol",
        "target",
        "channel",
        "bits",
        "identification",
        "source",
    ];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.protocol_name.clone(),
                r.target_family.clone(),
                r.channel.clone(),
                format!("{}", (r.classical_bits * 1e9).round() / 1e9),
                r.identification.clone(),
                format!("{:?}", r.source),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..6)
        .map(|i| {
            cells
                .iter()
                .map(|c| c[i].chars().count())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    let line = |s: &mut String, cols: &[&str]| {
        let joined: Vec<String> = cols
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(s, "{}", joined.join("  ").trim_end());
    };
    line(&mut s, &header);
    for c in &cells {
        line(&mut s, &c.iter().map(String::as_str).collect::<Vec<_>>());
    }
    for r in rows.iter().filter(|r| r.annotation.is_some()) {
        let _ = writeln!(
            s,
            "{}: {}",
            r.protocol_name,
            r.annotation.as_deref().unwrap_or("")
        );
    }
    s
}

fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Run {
            common,
            force_outcome,
        } => {
            let target = common.target()?;
            let record = match force_outcome {
                Some(o) => {
                    let outcome = match o {
                        ForcedOutcome::Psi => Outcome::Psi,
                        ForcedOutcome::Psiperp => Outcome::PsiPerp,
                    };
                    run_trial(&target, OutcomeSelector::Forced(outcome)).map_err(internal)?
                }
                None => sampled_trial(&target, common.seed, 0).map_err(internal)?,
            };
            match common.format {
                Format::Json => json(&record),
                Format::Csv => report::trial_csv(&record).map_err(internal),
                Format::Text => Ok(trial_text(&target, &record)),
            }
        }
        Command::Analyze { common } => {
            let target = common.target()?;
            let analysis = exact_analyze(&target).map_err(internal)?;
            match common.format {
                Format::Json => json(&analysis),
                Format::Csv => report::exact_csv(&analysis).map_err(internal),
                Format::Text => Ok(analysis_text(&target, &analysis)),
            }
        }
        Command::Montecarlo {
            common,
            trials,
            workers,
        } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials must be at least 1".into()));
            }
            if workers == Some(0) {
                return Err(Failure::Usage("--workers must be at least 1".into()));
            }
            let target = common.target()?;
            let stats = match workers {
                Some(w) => monte_carlo_with_workers(&target, trials, common.seed, w),
                None => monte_carlo(&target, trials, common.seed),
            }
            .map_err(internal)?;
            match common.format {
                Format::Json => json(&stats),
                Format::Csv => report::stats_csv(&stats).map_err(internal),
                Format::Text => Ok(stats_text(&target, &stats)),
            }
        }
        Command::Table { common } => {
            let target = common.target()?;
            let rows = emit_comparison_table(&target).map_err(internal)?;
            match common.format {
                Format::Json => json(&rows),
                Format::Csv => report::table_csv(&rows).map_err(internal),
                Format::Text => Ok(table_text(&rows)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!(
                "{}",
                rendered
                    .lines()
                    .next()
                    .unwrap_or("error: invalid arguments")
            );
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

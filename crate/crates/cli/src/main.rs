//! Command line front end for the election rules and experiments.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::{fs, io};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use varwin_core::experiments::{run_experiment, sweep, to_csv, ExperimentConfig, SweepRow, SweepVariable};
use varwin_core::model::{read_election, Format, ParsedElection};
use varwin_core::rules::evaluate;
use varwin_core::scoring::parse_frac;
use varwin_core::{Error, Objective, RuleSpec, ScoreValue};

#[derive(Parser)]
#[command(
    name = "varwin",
    version,
    about = "Winner determination for approval elections with a variable number of winners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Determine the winning committees of one election.
    Compute(ComputeArgs),
    /// Estimate winner sizes over random elections.
    Experiment(ExperimentArgs),
    /// Run experiments over a parameter grid.
    Sweep(SweepArgs),
    /// Describe the election file formats and rule strings.
    Formats,
}

#[derive(Args)]
struct RuleArgs {
    /// Rule string, e.g. av, nav, mv:2/3, qcsa:1/2, gnav:linear:1,1,
    /// threshold:maj. See `varwin formats` for the full list.
    #[arg(long)]
    rule: String,

    /// Which tied winners to report: smallest, largest, any, or all.
    #[arg(long, default_value = "smallest")]
    objective: String,

    /// Maximum committees kept with --objective all.
    #[arg(long, default_value_t = 1000)]
    cap: usize,

    /// Size exponent for qcsa/qncsa when the rule string carries none.
    #[arg(long)]
    q: Option<String>,

    /// Quota for mv when the rule string carries none.
    #[arg(long)]
    alpha: Option<String>,
}

impl RuleArgs {
    fn parse(&self) -> Result<(RuleSpec, Objective), Error> {
        let q = self.q.as_deref().map(parse_frac).transpose()?;
        let alpha = self.alpha.as_deref().map(parse_frac).transpose()?;
        let rule = RuleSpec::parse(&self.rule, q, alpha)?;
        let objective = match Objective::parse(&self.objective)? {
            Objective::All { .. } => Objective::All { cap: self.cap },
            other => other,
        };
        Ok((rule, objective))
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    rule: RuleArgs,

    /// Election file; read from stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Input format: plain or json.
    #[arg(long, default_value = "plain")]
    format: String,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    rule: RuleArgs,

    /// Number of candidates.
    #[arg(long, default_value_t = 20)]
    m: usize,

    /// Number of voters.
    #[arg(long, default_value_t = 20)]
    n: usize,

    /// Approval probability, a rational or decimal such as 1/2 or 0.3.
    #[arg(long, default_value = "1/2")]
    p: String,

    #[arg(long, default_value_t = 10_000)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,

    /// Grid variable: p (approval probability) or q (size exponent).
    #[arg(long)]
    var: String,

    /// First grid value.
    #[arg(long)]
    from: String,

    /// Last grid value (inclusive).
    #[arg(long)]
    to: String,

    /// Grid step, e.g. 1/20.
    #[arg(long)]
    step: String,
}

enum AppError {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Core(e)
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Core(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse { .. } | Error::InvalidElection(_) => 2,
                Error::Capacity(_) => 3,
                Error::InvalidSpec(_) => 4,
                _ => 1,
            };
            ExitCode::from(code)
        }
        Err(AppError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Compute(args) => compute(args),
        Command::Experiment(args) => experiment(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Formats => {
            print!("{FORMATS_HELP}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ComputeOutput {
    rule: String,
    objective: String,
    score: serde_json::Value,
    size: usize,
    canonical: Vec<usize>,
    co_winners: Vec<Vec<usize>>,
    tie_truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical_names: Option<Vec<String>>,
}

fn compute(args: ComputeArgs) -> Result<(), AppError> {
    let (rule, objective) = args.rule.parse()?;
    let raw = match &args.input {
        Some(path) => fs::read_to_string(path)?,
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let format = Format::parse(&args.format)?;
    let ParsedElection { election, names } = read_election(&raw, format)?;
    let result = evaluate(&election, &rule, objective)?;

    let canonical = result.canonical.to_indices();
    let canonical_names =
        names.map(|ns| canonical.iter().map(|&c| ns[c].clone()).collect());
    let output = ComputeOutput {
        rule: rule.to_string(),
        objective: objective.to_string(),
        score: match result.score {
            ScoreValue::Int(v) => serde_json::Value::from(v),
            ScoreValue::Real(v) => serde_json::Value::from(v),
        },
        size: canonical.len(),
        canonical,
        co_winners: result.committees.iter().map(|c| c.to_indices()).collect(),
        tie_truncated: result.tie_truncated,
        canonical_names,
    };
    println!("{}", serde_json::to_string(&output).expect("plain data"));
    Ok(())
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let (rule, objective) = args.rule.parse()?;
    let mut cfg = ExperimentConfig::new(rule, objective);
    cfg.num_candidates = args.m;
    cfg.num_voters = args.n;
    cfg.approval_prob = parse_frac(&args.p)?;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    Ok(cfg)
}

fn write_csv(out: &Option<PathBuf>, csv: &str) -> Result<(), AppError> {
    match out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), AppError> {
    let config = experiment_config(&args)?;
    let stats = run_experiment(&config)?;
    let csv = to_csv(&[SweepRow { config, stats }]);
    write_csv(&args.out, &csv)
}

fn run_sweep(args: SweepArgs) -> Result<(), AppError> {
    let base = experiment_config(&args.experiment)?;
    let var = SweepVariable::parse(&args.var)?;
    let from = parse_frac(&args.from)?;
    let to = parse_frac(&args.to)?;
    let step = parse_frac(&args.step)?;
    let rows = sweep(&base, var, from, to, step)?;
    write_csv(&args.experiment.out, &to_csv(&rows))
}

const FORMATS_HELP: &str = "\
Election files

  plain                   first line: `m n` (candidates, voters); then one
                          line per voter listing approved candidate indices
                          separated by spaces; a blank line is an empty
                          ballot; indices are 0-based and below m.

                              3 3
                              0
                              0 1
                              1

  json                    {\"m\": 3, \"voters\": [[0], [0, 1], [1]],
                           \"names\": [\"ann\", \"bob\", \"cy\"]}
                          `names` is optional; when present, compute output
                          also lists the canonical winners by name.

Rules

  av                      candidates with the highest approval score
  nav                     best net approval (approved minus disapproved
                          members, summed over voters)
  mv:ALPHA                candidates approved by at least ALPHA*n voters
  gnav:linear:A,B         net approval with slopes A for approved and B
                          for disapproved members
  gnav:unit-zero          number of voters with an approved member
  gnav:zero-unit          minus the number of voters with a disapproved
                          member
  gnav:x3c                the step pair {1+: 4} / {1: 1, 2+: 2}
  gnav:step:JSON          custom step pair, e.g.
                          gnav:step:{\"f\":[[1,4]],\"g\":[[1,1],[2,2]]}
  mrc                     smallest committees covering every nonempty
                          ballot
  greedy-mrc              greedy cover (highest coverage first, lowest
                          index on ties)
  uv                      candidates approved by every voter
  qcsa:Q                  total member approvals divided by size^Q
  qncsa:Q                 net approval divided by size^Q
  first-majority          approval-ordered prefix holding a strict
                          majority of all approvals
  threshold:KIND          most voters satisfied; KIND is unit, maj, full,
                          or linear:ALPHA (satisfied when the approved
                          share of the committee reaches the threshold)

  Rational parameters accept fractions (2/3) and decimals (0.3).

Objectives

  smallest | largest      tied winners of the extremal size
  any                     the whole tie family (default cap 1000)
  all                     the whole tie family, capped by --cap

Exit codes

  0  success
  2  input could not be parsed or is not a valid election
  3  instance too large for the exhaustive search
  4  invalid rule, objective, or parameter
";

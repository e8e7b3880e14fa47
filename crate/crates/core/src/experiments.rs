//! Monte Carlo experiments: sample elections with independent approvals
//! and measure how large the winning committees get.
//!
//! Results are reproducible bit for bit: every trial derives its own
//! stream seed from the master seed and the trial index, trials are
//! collected in index order no matter how rayon schedules them, and the
//! aggregation sums integers before touching floating point, so the
//! worker count cannot change any reported digit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CandidateSet, Election};
use crate::rules::{winner_size, Objective, RuleSpec};
use crate::scoring::{frac_to_f64, frac_to_string, Frac};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub rule: RuleSpec,
    pub objective: Objective,
    pub num_candidates: usize,
    pub num_voters: usize,
    /// Probability that a voter approves a candidate.
    pub approval_prob: Frac,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(rule: RuleSpec, objective: Objective) -> Self {
        ExperimentConfig {
            rule,
            objective,
            num_candidates: 20,
            num_voters: 20,
            approval_prob: Frac::new(1, 2),
            trials: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentStats {
    pub trials: usize,
    pub mean_size: f64,
    pub std_size: f64,
}

/// Election with each approval drawn independently with probability `p`.
/// Ballot bits consume one generator draw each, voter by voter and
/// candidate by candidate, and the comparison is exact in the rational
/// `p`, so a (m, n, p, seed) quadruple pins down the election.
pub fn random_election(m: usize, n: usize, p: Frac, seed: u64) -> Result<Election> {
    if p < Frac::new(0, 1) || p > Frac::new(1, 1) {
        return Err(Error::InvalidSpec(format!(
            "approval probability must lie in [0, 1], got {}",
            frac_to_string(p)
        )));
    }
    let num = *p.numer() as u128;
    let den = *p.denom() as u128;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ballots = Vec::with_capacity(n);
    for _ in 0..n {
        let mut ballot = CandidateSet::empty(m);
        for c in 0..m {
            let x = rng.next_u64();
            if (x as u128) * den < num << 64 {
                ballot.insert(c);
            }
        }
        ballots.push(ballot);
    }
    Election::new(m, ballots)
}

/// Independent per-trial seed, mixed from the master seed and the trial
/// index with the splitmix64 finalizer.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stats_from_sizes(sizes: &[usize]) -> ExperimentStats {
    let t = sizes.len();
    let sum: u128 = sizes.iter().map(|&s| s as u128).sum();
    let sum_sq: u128 = sizes.iter().map(|&s| (s as u128) * (s as u128)).sum();
    let mean_size = if t == 0 { 0.0 } else { sum as f64 / t as f64 };
    let std_size = if t < 2 {
        0.0
    } else {
        let spread = (t as u128 * sum_sq - sum * sum) as f64;
        (spread / (t as f64 * (t as f64 - 1.0))).sqrt()
    };
    ExperimentStats { trials: t, mean_size, std_size }
}

/// Samples `trials` elections and reports the mean and sample standard
/// deviation of the canonical winner size.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentStats> {
    let sizes: Vec<usize> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let e = random_election(
                cfg.num_candidates,
                cfg.num_voters,
                cfg.approval_prob,
                trial_seed(cfg.seed, i as u64),
            )?;
            winner_size(&e, &cfg.rule, cfg.objective)
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(stats_from_sizes(&sizes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    /// Vary the approval probability.
    ApprovalProb,
    /// Vary the size exponent of the penalized rules.
    QExponent,
}

impl SweepVariable {
    pub fn parse(s: &str) -> Result<SweepVariable> {
        match s {
            "p" => Ok(SweepVariable::ApprovalProb),
            "q" => Ok(SweepVariable::QExponent),
            _ => Err(Error::InvalidSpec(format!("unknown sweep variable '{s}', expected p or q"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub stats: ExperimentStats,
}

fn with_q(rule: &RuleSpec, q: Frac) -> Result<RuleSpec> {
    match rule {
        RuleSpec::Qcsa(_) => Ok(RuleSpec::Qcsa(q)),
        RuleSpec::Qncsa(_) => Ok(RuleSpec::Qncsa(q)),
        other => {
            Err(Error::InvalidSpec(format!("rule {other} has no q parameter to sweep over")))
        }
    }
}

/// Runs one experiment per grid point `from, from + step, ..` up to and
/// including `to`. The grid is generated in exact rational arithmetic.
pub fn sweep(
    base: &ExperimentConfig,
    var: SweepVariable,
    from: Frac,
    to: Frac,
    step: Frac,
) -> Result<Vec<SweepRow>> {
    if step <= Frac::new(0, 1) {
        return Err(Error::InvalidSpec("sweep step must be positive".into()));
    }
    if from > to {
        return Err(Error::InvalidSpec("empty sweep range".into()));
    }
    let mut rows = Vec::new();
    let mut value = from;
    while value <= to {
        let mut config = base.clone();
        match var {
            SweepVariable::ApprovalProb => config.approval_prob = value,
            SweepVariable::QExponent => config.rule = with_q(&base.rule, value)?,
        }
        let stats = run_experiment(&config)?;
        rows.push(SweepRow { config, stats });
        value += step;
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "rule,objective,m,n,p,q,trials,seed,mean_size,std_size";

/// The rule column carries the family name; a swept q lands in its own
/// column so grid rows group naturally.
fn rule_label(rule: &RuleSpec) -> String {
    match rule {
        RuleSpec::Qcsa(_) => "qcsa".to_string(),
        RuleSpec::Qncsa(_) => "qncsa".to_string(),
        other => other.to_string(),
    }
}

pub fn csv_row(row: &SweepRow) -> String {
    let cfg = &row.config;
    let q = cfg.rule.q_param().map(|q| frac_to_f64(q).to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{:.6},{:.6}",
        rule_label(&cfg.rule),
        cfg.objective,
        cfg.num_candidates,
        cfg.num_voters,
        frac_to_f64(cfg.approval_prob),
        q,
        cfg.trials,
        cfg.seed,
        row.stats.mean_size,
        row.stats.std_size,
    )
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row));
        out.push('\n');
    }
    out
}

//! The committee selection rules.
//!
//! Each rule scores every committee of an election and elects the ones
//! with the best score; committees of all sizes compete, so a rule also
//! settles how many candidates get seats. [`evaluate`] dispatches on a
//! parsed [`RuleSpec`], and [`winner_size`] answers just the committee
//! size along dedicated fast paths (most rules admit a closed form or a
//! greedy procedure that skips enumerating the tie family).

mod engine;

use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{CandidateSet, Election, VoterSet};
use crate::scoring::{
    frac_to_string, parse_frac, size_power, Frac, GnavSpec, StepFunction, ThresholdSpec,
};
use crate::solvers;

/// Committees kept in a tie family when no explicit cap is given.
pub const DEFAULT_TIE_CAP: usize = 1000;

/// Absolute tolerance for ties between real-valued committee scores.
pub const REAL_TIE_EPS: f64 = 1e-9;

/// Which of the tied winning committees to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Winners of the smallest winning size only.
    Smallest,
    /// Winners of the largest winning size only.
    Largest,
    /// The whole tie family under the default cap.
    Any,
    /// The whole tie family, keeping at most `cap` committees.
    All { cap: usize },
}

impl Objective {
    pub fn parse(s: &str) -> Result<Objective> {
        match s {
            "smallest" => Ok(Objective::Smallest),
            "largest" => Ok(Objective::Largest),
            "any" => Ok(Objective::Any),
            "all" => Ok(Objective::All { cap: DEFAULT_TIE_CAP }),
            _ => Err(Error::InvalidSpec(format!(
                "unknown objective '{s}', expected smallest, largest, any, or all"
            ))),
        }
    }

    pub fn cap(self) -> usize {
        match self {
            Objective::All { cap } => cap.max(1),
            _ => DEFAULT_TIE_CAP,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Smallest => "smallest",
            Objective::Largest => "largest",
            Objective::Any => "any",
            Objective::All { .. } => "all",
        })
    }
}

/// A committee score; which variant a rule produces is fixed per rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreValue {
    Int(i64),
    Real(f64),
}

impl ScoreValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ScoreValue::Int(v) => v as f64,
            ScoreValue::Real(v) => v,
        }
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreValue::Int(v) => write!(f, "{v}"),
            ScoreValue::Real(v) => write!(f, "{v}"),
        }
    }
}

/// The winners of one rule evaluation.
#[derive(Clone, Debug)]
pub struct WinnerResult {
    /// Tied winning committees selected by the objective, ordered by size
    /// then lexicographically. Never empty: a rule electing nobody yields
    /// the one-element family `[{}]`.
    pub committees: Vec<CandidateSet>,
    pub score: ScoreValue,
    /// Whether committees beyond the cap were dropped.
    pub tie_truncated: bool,
    /// Lexicographically smallest winner at the objective's size (the
    /// smallest winning size unless the objective is `Largest`).
    pub canonical: CandidateSet,
}

impl WinnerResult {
    pub(crate) fn single(committee: CandidateSet, score: ScoreValue) -> Self {
        WinnerResult {
            canonical: committee.clone(),
            committees: vec![committee],
            score,
            tie_truncated: false,
        }
    }

    pub fn winner_size(&self) -> usize {
        self.canonical.len()
    }
}

/// A parsed rule with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleSpec {
    Av,
    Nav,
    Mv(Frac),
    Gnav(GnavSpec),
    Mrc,
    GreedyMrc,
    Uv,
    Qcsa(Frac),
    Qncsa(Frac),
    FirstMajority,
    Threshold(ThresholdSpec),
}

#[derive(Deserialize, serde::Serialize)]
struct StepPair {
    f: Vec<(u32, u64)>,
    g: Vec<(u32, u64)>,
}

fn parse_gnav(tail: &str) -> Result<GnavSpec> {
    if let Some(rest) = tail.strip_prefix("linear:") {
        let (a, b) = rest.split_once(',').ok_or_else(|| {
            Error::InvalidSpec(format!("gnav:linear needs two slopes, got '{rest}'"))
        })?;
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidSpec(format!("bad gnav slope '{s}'")))
        };
        return GnavSpec::linear(parse(a)?, parse(b)?);
    }
    if let Some(rest) = tail.strip_prefix("step:") {
        let pair: StepPair = serde_json::from_str(rest)
            .map_err(|e| Error::InvalidSpec(format!("bad gnav step table: {e}")))?;
        return Ok(GnavSpec::step(StepFunction::new(pair.f)?, StepFunction::new(pair.g)?));
    }
    match tail {
        "unit-zero" => Ok(GnavSpec::unit_zero()),
        "zero-unit" => Ok(GnavSpec::zero_unit()),
        "x3c" => Ok(GnavSpec::x3c()),
        _ => Err(Error::InvalidSpec(format!("unknown gnav variant '{tail}'"))),
    }
}

impl RuleSpec {
    /// Parses a rule string such as `av`, `mv:3/4`, `qcsa:1/2`,
    /// `gnav:linear:1,2`, or `threshold:maj`. A trailing `:` argument may
    /// be omitted for `mv`, `qcsa`, and `qncsa` when the corresponding
    /// fallback parameter is supplied.
    pub fn parse(s: &str, q: Option<Frac>, alpha: Option<Frac>) -> Result<RuleSpec> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let frac_arg = |tail: Option<&str>, fallback: Option<Frac>, what: &str| match tail {
            Some(t) => parse_frac(t),
            None => fallback.ok_or_else(|| {
                Error::InvalidSpec(format!("{what} needs a parameter, e.g. {what}:1/2"))
            }),
        };
        match (head, tail) {
            ("av", None) => Ok(RuleSpec::Av),
            ("nav", None) => Ok(RuleSpec::Nav),
            ("mrc", None) => Ok(RuleSpec::Mrc),
            ("greedy-mrc", None) => Ok(RuleSpec::GreedyMrc),
            ("uv", None) => Ok(RuleSpec::Uv),
            ("first-majority", None) => Ok(RuleSpec::FirstMajority),
            ("mv", tail) => Ok(RuleSpec::Mv(frac_arg(tail, alpha, "mv")?)),
            ("qcsa", tail) => Ok(RuleSpec::Qcsa(frac_arg(tail, q, "qcsa")?)),
            ("qncsa", tail) => Ok(RuleSpec::Qncsa(frac_arg(tail, q, "qncsa")?)),
            ("threshold", Some(t)) => Ok(RuleSpec::Threshold(ThresholdSpec::parse(t)?)),
            ("gnav", Some(t)) => Ok(RuleSpec::Gnav(parse_gnav(t)?)),
            _ => Err(Error::InvalidSpec(format!("unknown rule '{s}'"))),
        }
    }

    /// The sweep parameter of the size-penalized rules.
    pub fn q_param(&self) -> Option<Frac> {
        match self {
            RuleSpec::Qcsa(q) | RuleSpec::Qncsa(q) => Some(*q),
            _ => None,
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Av => f.write_str("av"),
            RuleSpec::Nav => f.write_str("nav"),
            RuleSpec::Mv(a) => write!(f, "mv:{}", frac_to_string(*a)),
            RuleSpec::Mrc => f.write_str("mrc"),
            RuleSpec::GreedyMrc => f.write_str("greedy-mrc"),
            RuleSpec::Uv => f.write_str("uv"),
            RuleSpec::Qcsa(q) => write!(f, "qcsa:{}", frac_to_string(*q)),
            RuleSpec::Qncsa(q) => write!(f, "qncsa:{}", frac_to_string(*q)),
            RuleSpec::FirstMajority => f.write_str("first-majority"),
            RuleSpec::Threshold(t) => write!(f, "threshold:{t}"),
            RuleSpec::Gnav(g) => match g {
                GnavSpec::Linear { f_slope, g_slope } => {
                    write!(f, "gnav:linear:{f_slope},{g_slope}")
                }
                _ if *g == GnavSpec::unit_zero() => f.write_str("gnav:unit-zero"),
                _ if *g == GnavSpec::zero_unit() => f.write_str("gnav:zero-unit"),
                _ if *g == GnavSpec::x3c() => f.write_str("gnav:x3c"),
                GnavSpec::Step { f: sf, g: sg } => {
                    let pair = StepPair { f: sf.steps().to_vec(), g: sg.steps().to_vec() };
                    write!(f, "gnav:step:{}", serde_json::to_string(&pair).expect("plain data"))
                }
            },
        }
    }
}

/// Runs `spec` on the election and reports the winners under `objective`.
pub fn evaluate(e: &Election, spec: &RuleSpec, objective: Objective) -> Result<WinnerResult> {
    match spec {
        RuleSpec::Av => Ok(av(e)),
        RuleSpec::Nav => Ok(nav(e, objective)),
        RuleSpec::Mv(alpha) => mv(e, *alpha),
        RuleSpec::Gnav(g) => gnav(e, g, objective),
        RuleSpec::Mrc => Ok(mrc(e, objective)),
        RuleSpec::GreedyMrc => Ok(greedy_mrc(e, objective)),
        RuleSpec::Uv => Ok(uv(e)),
        RuleSpec::Qcsa(q) => qcsa(e, *q, objective),
        RuleSpec::Qncsa(q) => qncsa(e, *q, objective),
        RuleSpec::FirstMajority => Ok(first_majority(e, objective)),
        RuleSpec::Threshold(t) => threshold(e, t, objective),
    }
}

// ---------------------------------------------------------------------------
// Candidate-separable rules.

fn linear_weights(e: &Election, a: i64, b: i64) -> Vec<i64> {
    let n = e.num_voters() as i64;
    e.approval_scores().iter().map(|&s| a * s as i64 - b * (n - s as i64)).collect()
}

/// The base plus every subset of `free`, by size then lexicographically.
fn subset_family(base: &CandidateSet, free: &[usize], cap: usize) -> (Vec<CandidateSet>, bool) {
    let mut out = Vec::new();
    let mut truncated = false;
    for t in 0..=free.len() {
        let complete = engine::for_each_combination(free, t, &mut |combo| {
            if out.len() == cap {
                truncated = true;
                return false;
            }
            let mut s = base.clone();
            for &c in combo {
                s.insert(c);
            }
            out.push(s);
            true
        });
        if !complete {
            break;
        }
    }
    (out, truncated)
}

/// Winners when the score is a sum of per-candidate weights: candidates
/// with positive weight are mandatory, zero-weight candidates are free,
/// negative ones never help.
fn separable_result(e: &Election, weights: &[i64], objective: Objective) -> WinnerResult {
    let m = e.num_candidates();
    let mut base = CandidateSet::empty(m);
    let mut zeros: Vec<usize> = Vec::new();
    let mut best = 0i64;
    for (c, &w) in weights.iter().enumerate() {
        if w > 0 {
            base.insert(c);
            best += w;
        } else if w == 0 {
            zeros.push(c);
        }
    }
    let score = ScoreValue::Int(best);
    match objective {
        Objective::Smallest => WinnerResult::single(base, score),
        Objective::Largest => {
            let mut full = base;
            for &c in &zeros {
                full.insert(c);
            }
            WinnerResult::single(full, score)
        }
        Objective::Any | Objective::All { .. } => {
            let (committees, tie_truncated) = subset_family(&base, &zeros, objective.cap());
            WinnerResult { committees, score, tie_truncated, canonical: base }
        }
    }
}

/// The candidates with the highest approval score, or nobody when no
/// candidate is approved at all. The score is that maximum.
pub fn av(e: &Election) -> WinnerResult {
    let m = e.num_candidates();
    let scores = e.approval_scores();
    let max = scores.iter().copied().max().unwrap_or(0);
    let committee = if max == 0 {
        CandidateSet::empty(m)
    } else {
        let winners = scores.iter().enumerate().filter(|&(_, &s)| s == max).map(|(c, _)| c);
        CandidateSet::from_indices(m, winners).expect("indices below m")
    };
    WinnerResult::single(committee, ScoreValue::Int(max as i64))
}

/// Net approval winners. Every voter scores a committee by approved
/// members minus disapproved members; candidates approved by more than
/// half the voters are mandatory and exact-half candidates are free.
pub fn nav(e: &Election, objective: Objective) -> WinnerResult {
    separable_result(e, &linear_weights(e, 1, 1), objective)
}

/// Majority-threshold voting: everyone whose approval score reaches
/// `alpha * n` is seated. Scored as the matching weighted net approval.
pub fn mv(e: &Election, alpha: Frac) -> Result<WinnerResult> {
    validate_unit_range(alpha, "mv quota")?;
    let (p, q) = (*alpha.numer(), *alpha.denom());
    Ok(separable_result(e, &linear_weights(e, q - p, p), Objective::Largest))
}

/// Step-scored net approval. Linear step pairs separate per candidate
/// and work at any scale; general step pairs are searched exhaustively.
pub fn gnav(e: &Election, spec: &GnavSpec, objective: Objective) -> Result<WinnerResult> {
    if let Some((a, b)) = spec.as_linear() {
        return Ok(separable_result(e, &linear_weights(e, a, b), objective));
    }
    solvers::check_mask_capacity(e.num_candidates())?;
    let words = e.ballot_words().expect("within the mask limit");
    let scorer = |mask: u64, k: u32| {
        let mut total = 0i64;
        for &ballot in &words {
            let approved = (ballot & mask).count_ones();
            total += spec.f_value(approved) - spec.g_value(k - approved);
        }
        total
    };
    Ok(engine_result(e.num_candidates(), true, objective, scorer))
}

/// The candidates everyone approves. Scored 0: these are exactly the
/// committees no voter objects to under a unit penalty for outsiders.
pub fn uv(e: &Election) -> WinnerResult {
    let m = e.num_candidates();
    let n = e.num_voters() as u32;
    let scores = e.approval_scores();
    let unanimous = scores.iter().enumerate().filter(|&(_, &s)| s == n).map(|(c, _)| c);
    let committee = CandidateSet::from_indices(m, unanimous).expect("indices below m");
    WinnerResult::single(committee, ScoreValue::Int(0))
}

// ---------------------------------------------------------------------------
// Cover rules.

fn nonempty_ballots(e: &Election) -> usize {
    e.ballots().iter().filter(|b| !b.is_empty()).count()
}

/// Minimum representation: the smallest committees containing an approved
/// candidate of every voter with a nonempty ballot. Scored by the number
/// of represented voters, which such committees always meet in full.
pub fn mrc(e: &Election, objective: Objective) -> WinnerResult {
    let m = e.num_candidates();
    let cap = objective.cap();
    let family = solvers::exact_min_cover(e.ballots(), m, cap);
    let canonical = if family.truncated {
        solvers::lex_min_cover(e.ballots(), m, family.size)
    } else {
        family.covers[0].clone()
    };
    let mut committees = family.covers;
    if family.truncated && committees.first() != Some(&canonical) {
        committees.pop();
        committees.push(canonical.clone());
        committees.sort();
    }
    WinnerResult {
        committees,
        score: ScoreValue::Int(nonempty_ballots(e) as i64),
        tie_truncated: family.truncated,
        canonical,
    }
}

/// One deterministic greedy pass: repeatedly seat the candidate covering
/// the most still-unrepresented voters, lowest index on ties.
fn greedy_cover(e: &Election) -> CandidateSet {
    let m = e.num_candidates();
    let approvers = e.approver_sets();
    let mut uncovered = VoterSet::empty(e.num_voters());
    for (v, ballot) in e.ballots().iter().enumerate() {
        if !ballot.is_empty() {
            uncovered.insert(v);
        }
    }
    let mut chosen = CandidateSet::empty(m);
    while !uncovered.is_empty() {
        let mut best_c = 0;
        let mut best_gain = 0;
        for (c, a) in approvers.iter().enumerate() {
            let gain = a.intersection_len(&uncovered);
            if gain > best_gain {
                best_gain = gain;
                best_c = c;
            }
        }
        chosen.insert(best_c);
        uncovered.difference_assign(&approvers[best_c]);
    }
    chosen
}

/// Every committee some greedy tie-breaking order can produce.
fn greedy_outcomes(e: &Election, cap: usize) -> (Vec<CandidateSet>, bool) {
    let approvers = e.approver_sets();
    let mut uncovered = VoterSet::empty(e.num_voters());
    for (v, ballot) in e.ballots().iter().enumerate() {
        if !ballot.is_empty() {
            uncovered.insert(v);
        }
    }
    let mut out: BTreeSet<CandidateSet> = BTreeSet::new();
    let limit = cap.saturating_add(1);

    fn rec(
        approvers: &[VoterSet],
        uncovered: &VoterSet,
        chosen: &mut CandidateSet,
        out: &mut BTreeSet<CandidateSet>,
        limit: usize,
    ) -> bool {
        if uncovered.is_empty() {
            out.insert(chosen.clone());
            return out.len() >= limit;
        }
        let best_gain =
            approvers.iter().map(|a| a.intersection_len(uncovered)).max().unwrap_or(0);
        for (c, a) in approvers.iter().enumerate() {
            if a.intersection_len(uncovered) != best_gain {
                continue;
            }
            let next = uncovered.difference(a);
            chosen.insert(c);
            let full = rec(approvers, &next, chosen, out, limit);
            chosen.remove(c);
            if full {
                return true;
            }
        }
        false
    }

    let mut chosen = CandidateSet::empty(e.num_candidates());
    rec(&approvers, &uncovered, &mut chosen, &mut out, limit);
    let mut committees: Vec<CandidateSet> = out.into_iter().collect();
    committees.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let truncated = committees.len() > cap;
    committees.truncate(cap);
    (committees, truncated)
}

/// Greedy variant of the minimum representation rule. The committee is
/// the one the deterministic greedy pass builds; under the `All`
/// objective the family lists every outcome an alternative tie-breaking
/// order could produce.
pub fn greedy_mrc(e: &Election, objective: Objective) -> WinnerResult {
    let canonical = greedy_cover(e);
    let score = ScoreValue::Int(nonempty_ballots(e) as i64);
    let (mut committees, tie_truncated) = match objective {
        Objective::All { .. } => greedy_outcomes(e, objective.cap()),
        _ => (vec![canonical.clone()], false),
    };
    if tie_truncated && !committees.contains(&canonical) {
        committees.pop();
        committees.push(canonical.clone());
        committees.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    }
    WinnerResult { committees, score, tie_truncated, canonical }
}

// ---------------------------------------------------------------------------
// Prefix rules: the score of a size-k committee is maximized by taking
// the k highest-scoring candidates, so winners are "above the bar plus
// some of the tied band" and only the best sizes need to be found.

fn sorted_by_score(e: &Election) -> Vec<(u32, usize)> {
    let mut v: Vec<(u32, usize)> =
        e.approval_scores().into_iter().enumerate().map(|(c, s)| (s, c)).collect();
    v.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    v
}

fn prefix_sums(sorted: &[(u32, usize)], f: impl Fn(u32) -> i64) -> Vec<i64> {
    let mut p = vec![0i64; sorted.len() + 1];
    for (i, &(s, _)) in sorted.iter().enumerate() {
        p[i + 1] = p[i] + f(s);
    }
    p
}

/// Sizes whose top-k value ties the optimum, in ascending order.
fn best_prefix_sizes(prefix: &[i64], q: Frac) -> (f64, Vec<usize>) {
    let m = prefix.len() - 1;
    let vals: Vec<f64> = (1..=m).map(|k| prefix[k] as f64 / size_power(k, q)).collect();
    let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sizes = (1..=m).filter(|&k| vals[k - 1] >= best - REAL_TIE_EPS).collect();
    (best, sizes)
}

/// Appends all size-`k` top-score committees; true means the cap stopped
/// the enumeration early.
fn prefix_committees_at(
    e: &Election,
    sorted: &[(u32, usize)],
    k: usize,
    cap: usize,
    out: &mut Vec<CandidateSet>,
) -> bool {
    let m = e.num_candidates();
    let bar = sorted[k - 1].0;
    let above: Vec<usize> =
        sorted.iter().take_while(|&&(s, _)| s > bar).map(|&(_, c)| c).collect();
    // Sorting is score-major, index-minor, so the band is index-ascending.
    let band: Vec<usize> =
        sorted.iter().filter(|&&(s, _)| s == bar).map(|&(_, c)| c).collect();
    let base = CandidateSet::from_indices(m, above.iter().copied()).expect("indices below m");
    let need = k - above.len();
    !engine::for_each_combination(&band, need, &mut |combo| {
        if out.len() == cap {
            return false;
        }
        let mut s = base.clone();
        for &c in combo {
            s.insert(c);
        }
        out.push(s);
        true
    })
}

fn prefix_canonical(e: &Election, sorted: &[(u32, usize)], k: usize) -> CandidateSet {
    let m = e.num_candidates();
    let bar = sorted[k - 1].0;
    let above = sorted.iter().take_while(|&&(s, _)| s > bar).map(|&(_, c)| c);
    let mut band: Vec<usize> =
        sorted.iter().filter(|&&(s, _)| s == bar).map(|&(_, c)| c).collect();
    band.truncate(k - sorted.iter().take_while(|&&(s, _)| s > bar).count());
    CandidateSet::from_indices(m, above.chain(band)).expect("indices below m")
}

fn prefix_result(
    e: &Election,
    sorted: &[(u32, usize)],
    score: ScoreValue,
    sizes: &[usize],
    objective: Objective,
) -> WinnerResult {
    let family_sizes: &[usize] = match objective {
        Objective::Smallest => &sizes[..1],
        Objective::Largest => &sizes[sizes.len() - 1..],
        Objective::Any | Objective::All { .. } => sizes,
    };
    let cap = objective.cap();
    let mut committees = Vec::new();
    let mut tie_truncated = false;
    for &k in family_sizes {
        if prefix_committees_at(e, sorted, k, cap, &mut committees) {
            tie_truncated = true;
            break;
        }
    }
    let canon_k = match objective {
        Objective::Largest => *sizes.last().expect("at least one size"),
        _ => sizes[0],
    };
    let canonical = prefix_canonical(e, sorted, canon_k);
    WinnerResult { committees, score, tie_truncated, canonical }
}

fn validate_unit_range(x: Frac, what: &str) -> Result<()> {
    if x < Frac::new(0, 1) || x > Frac::new(1, 1) {
        return Err(Error::InvalidSpec(format!(
            "{what} must lie in [0, 1], got {}",
            frac_to_string(x)
        )));
    }
    Ok(())
}

/// Size-penalized approval: total member approvals divided by `|S|^q`.
/// Winners are nonempty; ties across sizes are resolved by the objective.
pub fn qcsa(e: &Election, q: Frac, objective: Objective) -> Result<WinnerResult> {
    validate_unit_range(q, "qcsa exponent")?;
    let sorted = sorted_by_score(e);
    let prefix = prefix_sums(&sorted, |s| s as i64);
    let (best, sizes) = best_prefix_sizes(&prefix, q);
    Ok(prefix_result(e, &sorted, ScoreValue::Real(best), &sizes, objective))
}

/// Size-penalized net approval: the net approval score divided by
/// `|S|^q`. Winners are nonempty.
pub fn qncsa(e: &Election, q: Frac, objective: Objective) -> Result<WinnerResult> {
    validate_unit_range(q, "qncsa exponent")?;
    let n = e.num_voters() as i64;
    let sorted = sorted_by_score(e);
    let prefix = prefix_sums(&sorted, |s| 2 * s as i64 - n);
    let (best, sizes) = best_prefix_sizes(&prefix, q);
    Ok(prefix_result(e, &sorted, ScoreValue::Real(best), &sizes, objective))
}

/// Seats candidates in approval order until the seated candidates hold a
/// strict majority of all approvals. Scored by the seated approvals; if
/// there are no approvals at all, nobody is seated.
pub fn first_majority(e: &Election, objective: Objective) -> WinnerResult {
    let m = e.num_candidates();
    let sorted = sorted_by_score(e);
    let prefix = prefix_sums(&sorted, |s| s as i64);
    let total = prefix[m];
    if total == 0 {
        return WinnerResult::single(CandidateSet::empty(m), ScoreValue::Int(0));
    }
    let j = (1..=m).find(|&k| 2 * prefix[k] > total).expect("the full prefix is the total");
    prefix_result(e, &sorted, ScoreValue::Int(prefix[j]), &[j], objective)
}

// ---------------------------------------------------------------------------
// Threshold rules.

/// Elects the nonempty committees satisfying the most voters, where a
/// voter is satisfied when their approved share of the committee reaches
/// the threshold. Small candidate sets are searched exhaustively; larger
/// ones fall back to the counting program over candidate types, which
/// reports a single canonical witness instead of the tie family.
pub fn threshold(e: &Election, t: &ThresholdSpec, objective: Objective) -> Result<WinnerResult> {
    let m = e.num_candidates();
    if m > solvers::EXHAUSTIVE_MASK_LIMIT {
        return solvers::threshold_best_n(e, t, objective);
    }
    let counts = engine::SatisfactionCounts::new(e, t);
    Ok(engine_result(m, false, objective, |mask, k| counts.satisfied(mask, k)))
}

fn engine_result(
    m: usize,
    include_empty: bool,
    objective: Objective,
    mut scorer: impl FnMut(u64, u32) -> i64,
) -> WinnerResult {
    let opt = engine::search_masks(m, include_empty, &mut scorer);
    let (masks, tie_truncated) =
        engine::collect_optima(m, include_empty, &opt, objective, objective.cap(), &mut scorer);
    let committees = masks.iter().map(|&w| CandidateSet::from_word(m, w)).collect();
    let canon = match objective {
        Objective::Largest => opt.canon_max,
        _ => opt.canon_min,
    };
    WinnerResult {
        committees,
        score: ScoreValue::Int(opt.best),
        tie_truncated,
        canonical: CandidateSet::from_word(m, canon),
    }
}

// ---------------------------------------------------------------------------
// Winner sizes without the tie family.

fn separable_size(weights: &[i64], objective: Objective) -> usize {
    let positive = weights.iter().filter(|&&w| w > 0).count();
    match objective {
        Objective::Largest => positive + weights.iter().filter(|&&w| w == 0).count(),
        _ => positive,
    }
}

fn extremal_size(min_size: u32, max_size: u32, objective: Objective) -> usize {
    match objective {
        Objective::Largest => max_size as usize,
        _ => min_size as usize,
    }
}

/// Size of the canonical winner under `objective`, along fast paths:
/// equals `evaluate(..)?.canonical.len()` without building the family.
pub fn winner_size(e: &Election, spec: &RuleSpec, objective: Objective) -> Result<usize> {
    match spec {
        RuleSpec::Av => {
            let scores = e.approval_scores();
            let max = scores.iter().copied().max().unwrap_or(0);
            Ok(if max == 0 { 0 } else { scores.iter().filter(|&&s| s == max).count() })
        }
        RuleSpec::Nav => Ok(separable_size(&linear_weights(e, 1, 1), objective)),
        RuleSpec::Mv(alpha) => {
            validate_unit_range(*alpha, "mv quota")?;
            let (p, q) = (*alpha.numer(), *alpha.denom());
            Ok(separable_size(&linear_weights(e, q - p, p), Objective::Largest))
        }
        RuleSpec::Gnav(g) => match g.as_linear() {
            Some((a, b)) => Ok(separable_size(&linear_weights(e, a, b), objective)),
            None => {
                solvers::check_mask_capacity(e.num_candidates())?;
                let words = e.ballot_words().expect("within the mask limit");
                let opt = engine::search_masks(e.num_candidates(), true, |mask, k| {
                    let mut total = 0i64;
                    for &ballot in &words {
                        let approved = (ballot & mask).count_ones();
                        total += g.f_value(approved) - g.g_value(k - approved);
                    }
                    total
                });
                Ok(extremal_size(opt.min_size, opt.max_size, objective))
            }
        },
        RuleSpec::Mrc => Ok(solvers::min_cover_size(e.ballots(), e.num_candidates())),
        RuleSpec::GreedyMrc => Ok(greedy_cover(e).len()),
        RuleSpec::Uv => {
            let n = e.num_voters() as u32;
            Ok(e.approval_scores().iter().filter(|&&s| s == n).count())
        }
        RuleSpec::Qcsa(q) => {
            validate_unit_range(*q, "qcsa exponent")?;
            let sorted = sorted_by_score(e);
            let prefix = prefix_sums(&sorted, |s| s as i64);
            let (_, sizes) = best_prefix_sizes(&prefix, *q);
            Ok(extremal_size(sizes[0] as u32, *sizes.last().unwrap() as u32, objective))
        }
        RuleSpec::Qncsa(q) => {
            validate_unit_range(*q, "qncsa exponent")?;
            let n = e.num_voters() as i64;
            let sorted = sorted_by_score(e);
            let prefix = prefix_sums(&sorted, |s| 2 * s as i64 - n);
            let (_, sizes) = best_prefix_sizes(&prefix, *q);
            Ok(extremal_size(sizes[0] as u32, *sizes.last().unwrap() as u32, objective))
        }
        RuleSpec::FirstMajority => {
            let sorted = sorted_by_score(e);
            let prefix = prefix_sums(&sorted, |s| s as i64);
            let total = prefix[e.num_candidates()];
            if total == 0 {
                return Ok(0);
            }
            Ok((1..=e.num_candidates()).find(|&k| 2 * prefix[k] > total).expect("reaches total"))
        }
        RuleSpec::Threshold(t) => {
            let m = e.num_candidates();
            if m > solvers::EXHAUSTIVE_MASK_LIMIT {
                return Ok(solvers::threshold_best_n(e, t, objective)?.canonical.len());
            }
            let counts = engine::SatisfactionCounts::new(e, t);
            let opt = engine::search_masks(m, false, |mask, k| counts.satisfied(mask, k));
            Ok(extremal_size(opt.min_size, opt.max_size, objective))
        }
    }
}

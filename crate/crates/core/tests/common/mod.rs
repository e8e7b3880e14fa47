//! Reference implementations used to check the library: every rule is
//! recomputed here straight from its definition, over hash-set ballots
//! and explicitly enumerated committees, sharing none of the library's
//! search machinery.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use varwin_core::rules::{evaluate, winner_size, Objective, RuleSpec, ScoreValue, WinnerResult};
use varwin_core::solvers::{
    exact_min_cover, threshold_program_solve, SizeObjective, ThresholdProgram,
};
use varwin_core::scoring::ThresholdSpec;
use varwin_core::Election;

pub type Ballot = HashSet<usize>;

pub fn ballots_of(e: &Election) -> Vec<Ballot> {
    e.ballots().iter().map(|b| b.to_indices().into_iter().collect()).collect()
}

/// Every subset of `0..m`, each sorted ascending, built by doubling.
pub fn all_committees(m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for c in 0..m {
        let with_c: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.push(c);
                t
            })
            .collect();
        out.extend(with_c);
    }
    out
}

pub fn sort_family(v: &mut [Vec<usize>]) {
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

pub fn approval_counts(ballots: &[Ballot], m: usize) -> Vec<usize> {
    (0..m).map(|c| ballots.iter().filter(|b| b.contains(&c)).count()).collect()
}

#[derive(Clone, Debug)]
pub enum OScore {
    Int(i64),
    Real(f64),
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub score: OScore,
    /// All tied winners, sorted by size then lexicographically.
    pub winners: Vec<Vec<usize>>,
}

fn int_outcome(
    committees: impl IntoIterator<Item = Vec<usize>>,
    value: impl Fn(&[usize]) -> i64,
) -> OracleOutcome {
    let committees: Vec<Vec<usize>> = committees.into_iter().collect();
    let best = committees.iter().map(|c| value(c)).max().expect("at least one committee");
    let mut winners: Vec<Vec<usize>> =
        committees.into_iter().filter(|c| value(c) == best).collect();
    sort_family(&mut winners);
    OracleOutcome { score: OScore::Int(best), winners }
}

fn real_outcome(
    committees: impl IntoIterator<Item = Vec<usize>>,
    value: impl Fn(&[usize]) -> f64,
) -> OracleOutcome {
    let committees: Vec<Vec<usize>> = committees.into_iter().collect();
    let best = committees.iter().map(|c| value(c)).fold(f64::NEG_INFINITY, f64::max);
    let mut winners: Vec<Vec<usize>> =
        committees.into_iter().filter(|c| value(c) >= best - 1e-9).collect();
    sort_family(&mut winners);
    OracleOutcome { score: OScore::Real(best), winners }
}

// ---------------------------------------------------------------------------
// Scores from the definitions.

pub fn nav_value(ballots: &[Ballot], committee: &[usize]) -> i64 {
    let k = committee.len() as i64;
    ballots
        .iter()
        .map(|b| {
            let approved = committee.iter().filter(|c| b.contains(c)).count() as i64;
            2 * approved - k
        })
        .sum()
}

pub fn gnav_value(
    ballots: &[Ballot],
    committee: &[usize],
    f: &dyn Fn(usize) -> i64,
    g: &dyn Fn(usize) -> i64,
) -> i64 {
    ballots
        .iter()
        .map(|b| {
            let approved = committee.iter().filter(|c| b.contains(c)).count();
            f(approved) - g(committee.len() - approved)
        })
        .sum()
}

pub fn satisfied_count(
    ballots: &[Ballot],
    committee: &[usize],
    accepts: &dyn Fn(usize, usize) -> bool,
) -> usize {
    ballots
        .iter()
        .filter(|b| {
            let approved = committee.iter().filter(|c| b.contains(c)).count();
            accepts(approved, committee.len())
        })
        .count()
}

fn covers_all(ballots: &[Ballot], committee: &[usize]) -> bool {
    ballots
        .iter()
        .filter(|b| !b.is_empty())
        .all(|b| committee.iter().any(|c| b.contains(c)))
}

// ---------------------------------------------------------------------------
// Rule oracles.

pub fn o_av(ballots: &[Ballot], m: usize) -> OracleOutcome {
    let s = approval_counts(ballots, m);
    let max = *s.iter().max().expect("m >= 1");
    let committee: Vec<usize> =
        if max == 0 { Vec::new() } else { (0..m).filter(|&c| s[c] == max).collect() };
    OracleOutcome { score: OScore::Int(max as i64), winners: vec![committee] }
}

pub fn o_nav(ballots: &[Ballot], m: usize) -> OracleOutcome {
    int_outcome(all_committees(m), |c| nav_value(ballots, c))
}

pub fn o_gnav(
    ballots: &[Ballot],
    m: usize,
    f: &dyn Fn(usize) -> i64,
    g: &dyn Fn(usize) -> i64,
) -> OracleOutcome {
    int_outcome(all_committees(m), |c| gnav_value(ballots, c, f, g))
}

/// Candidates approved by at least `num/den` of the voters, scored by
/// the matching weighted net approval value.
pub fn o_mv(ballots: &[Ballot], m: usize, num: i64, den: i64) -> OracleOutcome {
    let n = ballots.len() as i64;
    let s = approval_counts(ballots, m);
    let committee: Vec<usize> = (0..m).filter(|&c| s[c] as i64 * den >= num * n).collect();
    let score = gnav_value(
        ballots,
        &committee,
        &|a| (den - num) * a as i64,
        &|d| num * d as i64,
    );
    OracleOutcome { score: OScore::Int(score), winners: vec![committee] }
}

pub fn o_uv(ballots: &[Ballot], m: usize) -> OracleOutcome {
    let n = ballots.len();
    let s = approval_counts(ballots, m);
    let committee: Vec<usize> = (0..m).filter(|&c| s[c] == n).collect();
    OracleOutcome { score: OScore::Int(0), winners: vec![committee] }
}

pub fn o_mrc(ballots: &[Ballot], m: usize) -> OracleOutcome {
    let covers: Vec<Vec<usize>> =
        all_committees(m).into_iter().filter(|c| covers_all(ballots, c)).collect();
    let k = covers.iter().map(Vec::len).min().expect("the full set covers");
    let mut winners: Vec<Vec<usize>> = covers.into_iter().filter(|c| c.len() == k).collect();
    sort_family(&mut winners);
    let represented = ballots.iter().filter(|b| !b.is_empty()).count() as i64;
    OracleOutcome { score: OScore::Int(represented), winners }
}

/// The greedy cover with ties broken toward the lowest candidate index.
pub fn o_greedy(ballots: &[Ballot], m: usize) -> Vec<usize> {
    let mut uncovered: Vec<usize> =
        (0..ballots.len()).filter(|&v| !ballots[v].is_empty()).collect();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let gain =
            |c: usize| uncovered.iter().filter(|&&v| ballots[v].contains(&c)).count();
        let best = (0..m).max_by_key(|&c| (gain(c), m - c)).expect("m >= 1");
        chosen.push(best);
        uncovered.retain(|&v| !ballots[v].contains(&best));
    }
    chosen.sort_unstable();
    chosen
}

/// Every committee reachable by some greedy tie-breaking order.
pub fn o_greedy_all(ballots: &[Ballot], m: usize) -> Vec<Vec<usize>> {
    fn rec(
        ballots: &[Ballot],
        m: usize,
        uncovered: &[usize],
        chosen: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if uncovered.is_empty() {
            let mut c = chosen.clone();
            c.sort_unstable();
            out.insert(c);
            return;
        }
        let gain =
            |c: usize| uncovered.iter().filter(|&&v| ballots[v].contains(&c)).count();
        let best = (0..m).map(gain).max().unwrap();
        for c in 0..m {
            if gain(c) != best {
                continue;
            }
            let rest: Vec<usize> =
                uncovered.iter().copied().filter(|&v| !ballots[v].contains(&c)).collect();
            chosen.push(c);
            rec(ballots, m, &rest, chosen, out);
            chosen.pop();
        }
    }
    let uncovered: Vec<usize> =
        (0..ballots.len()).filter(|&v| !ballots[v].is_empty()).collect();
    let mut out = BTreeSet::new();
    rec(ballots, m, &uncovered, &mut Vec::new(), &mut out);
    let mut family: Vec<Vec<usize>> = out.into_iter().collect();
    sort_family(&mut family);
    family
}

pub fn o_qcsa(ballots: &[Ballot], m: usize, q_num: i64, q_den: i64) -> OracleOutcome {
    let s = approval_counts(ballots, m);
    let q = q_num as f64 / q_den as f64;
    let nonempty = all_committees(m).into_iter().filter(|c| !c.is_empty());
    real_outcome(nonempty, |c| {
        let total: usize = c.iter().map(|&x| s[x]).sum();
        total as f64 / (c.len() as f64).powf(q)
    })
}

pub fn o_qncsa(ballots: &[Ballot], m: usize, q_num: i64, q_den: i64) -> OracleOutcome {
    let q = q_num as f64 / q_den as f64;
    let nonempty = all_committees(m).into_iter().filter(|c| !c.is_empty());
    real_outcome(nonempty, |c| nav_value(ballots, c) as f64 / (c.len() as f64).powf(q))
}

pub fn o_first_majority(ballots: &[Ballot], m: usize) -> OracleOutcome {
    let s = approval_counts(ballots, m);
    let total: i64 = s.iter().map(|&x| x as i64).sum();
    if total == 0 {
        return OracleOutcome { score: OScore::Int(0), winners: vec![Vec::new()] };
    }
    let mut desc: Vec<i64> = s.iter().map(|&x| x as i64).collect();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let mut run = 0;
    let mut j = 0;
    for (i, &v) in desc.iter().enumerate() {
        run += v;
        if 2 * run > total {
            j = i + 1;
            break;
        }
    }
    let prefix: i64 = desc[..j].iter().sum();
    // Any size-j committee whose members all score at least every
    // outsider is a prefix of some approval-descending order.
    let mut winners: Vec<Vec<usize>> = all_committees(m)
        .into_iter()
        .filter(|c| {
            if c.len() != j {
                return false;
            }
            let lowest_in = c.iter().map(|&x| s[x]).min().unwrap();
            (0..m).filter(|x| !c.contains(x)).all(|x| s[x] <= lowest_in)
        })
        .collect();
    sort_family(&mut winners);
    OracleOutcome { score: OScore::Int(prefix), winners }
}

pub fn o_threshold(
    ballots: &[Ballot],
    m: usize,
    accepts: &dyn Fn(usize, usize) -> bool,
) -> OracleOutcome {
    let nonempty = all_committees(m).into_iter().filter(|c| !c.is_empty());
    int_outcome(nonempty, |c| satisfied_count(ballots, c, accepts) as i64)
}

/// Minimum cover size over the nonempty ballots plus all covers of that
/// size; `(0, [[]])` when every ballot is empty.
pub fn o_min_cover_family(ballots: &[Ballot], m: usize) -> (usize, Vec<Vec<usize>>) {
    let covers: Vec<Vec<usize>> =
        all_committees(m).into_iter().filter(|c| covers_all(ballots, c)).collect();
    let k = covers.iter().map(Vec::len).min().expect("the full set covers");
    let mut family: Vec<Vec<usize>> = covers.into_iter().filter(|c| c.len() == k).collect();
    sort_family(&mut family);
    (k, family)
}

/// Extremal-size nonempty committee satisfying at least `required`
/// voters, with the lexicographically smallest witness, or None.
pub fn o_program(
    ballots: &[Ballot],
    m: usize,
    accepts: &dyn Fn(usize, usize) -> bool,
    required: usize,
    maximize: bool,
) -> Option<(usize, Vec<usize>)> {
    let mut feasible: Vec<Vec<usize>> = all_committees(m)
        .into_iter()
        .filter(|c| !c.is_empty() && satisfied_count(ballots, c, accepts) >= required)
        .collect();
    sort_family(&mut feasible);
    if feasible.is_empty() {
        return None;
    }
    let target = if maximize {
        feasible.iter().map(Vec::len).max().unwrap()
    } else {
        feasible.iter().map(Vec::len).min().unwrap()
    };
    let witness = feasible.into_iter().find(|c| c.len() == target).unwrap();
    Some((target, witness))
}

// ---------------------------------------------------------------------------
// Comparisons against the library.

pub fn family_indices(r: &WinnerResult) -> Vec<Vec<usize>> {
    r.committees.iter().map(|c| c.to_indices()).collect()
}

fn assert_score(got: ScoreValue, want: &OScore, ctx: &str) {
    match (got, want) {
        (ScoreValue::Int(a), OScore::Int(b)) => assert_eq!(a, *b, "{ctx}: score"),
        (ScoreValue::Real(a), OScore::Real(b)) => {
            assert!((a - b).abs() <= 1e-9, "{ctx}: score {a} vs {b}")
        }
        (got, want) => panic!("{ctx}: score kind mismatch: {got:?} vs {want:?}"),
    }
}

/// A rule defined to elect exactly one committee: every objective
/// reports that committee.
pub fn assert_single_committee(e: &Election, spec: &RuleSpec, oracle: &OracleOutcome, ctx: &str) {
    for objective in [Objective::Smallest, Objective::Largest, Objective::Any] {
        let r = evaluate(e, spec, objective).expect(ctx);
        assert_score(r.score, &oracle.score, ctx);
        assert_eq!(family_indices(&r), oracle.winners, "{ctx} under {objective}");
        assert_eq!(r.canonical.to_indices(), oracle.winners[0], "{ctx}: canonical");
        assert!(!r.tie_truncated, "{ctx}: truncation");
        let size = winner_size(e, spec, objective).expect(ctx);
        assert_eq!(size, oracle.winners[0].len(), "{ctx}: winner_size");
    }
}

/// A rule whose winners form a tie family across sizes.
pub fn assert_tie_family(e: &Election, spec: &RuleSpec, oracle: &OracleOutcome, ctx: &str) {
    let all = evaluate(e, spec, Objective::All { cap: 100_000 }).expect(ctx);
    assert_score(all.score, &oracle.score, ctx);
    assert!(!all.tie_truncated, "{ctx}: family exceeds test cap");
    assert_eq!(family_indices(&all), oracle.winners, "{ctx}: full family");
    assert_eq!(all.canonical.to_indices(), oracle.winners[0], "{ctx}: canonical of all");

    let any = evaluate(e, spec, Objective::Any).expect(ctx);
    assert_eq!(family_indices(&any), oracle.winners, "{ctx}: any equals all");

    let min_len = oracle.winners[0].len();
    let max_len = oracle.winners.last().unwrap().len();

    let smallest = evaluate(e, spec, Objective::Smallest).expect(ctx);
    let want: Vec<Vec<usize>> =
        oracle.winners.iter().filter(|c| c.len() == min_len).cloned().collect();
    assert_score(smallest.score, &oracle.score, ctx);
    assert_eq!(family_indices(&smallest), want, "{ctx}: smallest family");
    assert_eq!(smallest.canonical.to_indices(), want[0], "{ctx}: smallest canonical");

    let largest = evaluate(e, spec, Objective::Largest).expect(ctx);
    let want: Vec<Vec<usize>> =
        oracle.winners.iter().filter(|c| c.len() == max_len).cloned().collect();
    assert_eq!(family_indices(&largest), want, "{ctx}: largest family");
    assert_eq!(largest.canonical.to_indices(), want[0], "{ctx}: largest canonical");

    assert_eq!(winner_size(e, spec, Objective::Smallest).expect(ctx), min_len, "{ctx}");
    assert_eq!(winner_size(e, spec, Objective::Largest).expect(ctx), max_len, "{ctx}");
    assert_eq!(winner_size(e, spec, Objective::Any).expect(ctx), min_len, "{ctx}");
}

pub fn assert_greedy_matches(e: &Election, ctx: &str) {
    let ballots = ballots_of(e);
    let m = e.num_candidates();
    let canonical = o_greedy(&ballots, m);
    let represented = ballots.iter().filter(|b| !b.is_empty()).count() as i64;
    for objective in [Objective::Smallest, Objective::Largest, Objective::Any] {
        let r = evaluate(e, &RuleSpec::GreedyMrc, objective).expect(ctx);
        assert_eq!(r.canonical.to_indices(), canonical, "{ctx}: greedy canonical");
        assert_eq!(family_indices(&r), vec![canonical.clone()], "{ctx}: greedy family");
        assert_score(r.score, &OScore::Int(represented), ctx);
        assert_eq!(
            winner_size(e, &RuleSpec::GreedyMrc, objective).expect(ctx),
            canonical.len(),
            "{ctx}: greedy size"
        );
    }
    let closure = o_greedy_all(&ballots, m);
    let all = evaluate(e, &RuleSpec::GreedyMrc, Objective::All { cap: 100_000 }).expect(ctx);
    assert_eq!(family_indices(&all), closure, "{ctx}: greedy closure");
    assert_eq!(all.canonical.to_indices(), canonical, "{ctx}: closure canonical");
}

fn threshold_cases() -> Vec<(ThresholdSpec, Box<dyn Fn(usize, usize) -> bool>)> {
    use varwin_core::scoring::Frac;
    vec![
        (ThresholdSpec::Unit, Box::new(|a, _| a >= 1)),
        (ThresholdSpec::Majority, Box::new(|a, k| 2 * a >= k)),
        (ThresholdSpec::Full, Box::new(|a, k| a == k)),
        (ThresholdSpec::linear(Frac::new(0, 1)).unwrap(), Box::new(|_, _| true)),
        (ThresholdSpec::linear(Frac::new(1, 3)).unwrap(), Box::new(|a, k| 3 * a >= k)),
        (ThresholdSpec::linear(Frac::new(2, 3)).unwrap(), Box::new(|a, k| 3 * a >= 2 * k)),
        (ThresholdSpec::linear(Frac::new(1, 1)).unwrap(), Box::new(|a, k| a >= k)),
    ]
}

/// Checks every rule family and solver against the oracles.
pub fn check_all_rules(e: &Election, ctx: &str) {
    use varwin_core::scoring::{Frac, GnavSpec, StepFunction};

    let ballots = ballots_of(e);
    let m = e.num_candidates();

    assert_single_committee(e, &RuleSpec::Av, &o_av(&ballots, m), &format!("{ctx} av"));
    assert_tie_family(e, &RuleSpec::Nav, &o_nav(&ballots, m), &format!("{ctx} nav"));
    assert_single_committee(e, &RuleSpec::Uv, &o_uv(&ballots, m), &format!("{ctx} uv"));

    for (num, den) in [(0, 1), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)] {
        let spec = RuleSpec::Mv(Frac::new(num, den));
        let oracle = o_mv(&ballots, m, num, den);
        assert_single_committee(e, &spec, &oracle, &format!("{ctx} mv:{num}/{den}"));
    }

    let unit = |x: usize| i64::from(x >= 1);
    let gnav_cases: Vec<(GnavSpec, Box<dyn Fn(usize) -> i64>, Box<dyn Fn(usize) -> i64>)> = vec![
        (GnavSpec::linear(1, 1).unwrap(), Box::new(|a| a as i64), Box::new(|d| d as i64)),
        (
            GnavSpec::linear(2, 1).unwrap(),
            Box::new(|a| 2 * a as i64),
            Box::new(|d| d as i64),
        ),
        (GnavSpec::linear(0, 1).unwrap(), Box::new(|_| 0), Box::new(|d| d as i64)),
        (GnavSpec::unit_zero(), Box::new(unit), Box::new(|_| 0)),
        (GnavSpec::zero_unit(), Box::new(|_| 0), Box::new(unit)),
        (
            GnavSpec::x3c(),
            Box::new(|a| if a >= 1 { 4 } else { 0 }),
            Box::new(|d| match d {
                0 => 0,
                1 => 1,
                _ => 2,
            }),
        ),
        (
            GnavSpec::step(
                StepFunction::new(vec![(1, 2), (3, 5)]).unwrap(),
                StepFunction::new(vec![(2, 3)]).unwrap(),
            ),
            Box::new(|a| if a >= 3 { 5 } else if a >= 1 { 2 } else { 0 }),
            Box::new(|d| if d >= 2 { 3 } else { 0 }),
        ),
    ];
    for (spec, f, g) in &gnav_cases {
        let oracle = o_gnav(&ballots, m, f, g);
        let label = format!("{ctx} {}", RuleSpec::Gnav(spec.clone()));
        assert_tie_family(e, &RuleSpec::Gnav(spec.clone()), &oracle, &label);
    }

    assert_tie_family(e, &RuleSpec::Mrc, &o_mrc(&ballots, m), &format!("{ctx} mrc"));
    assert_greedy_matches(e, ctx);

    for (num, den) in [(0, 1), (1, 2), (9, 10), (1, 1)] {
        let spec = RuleSpec::Qcsa(Frac::new(num, den));
        let oracle = o_qcsa(&ballots, m, num, den);
        assert_tie_family(e, &spec, &oracle, &format!("{ctx} qcsa:{num}/{den}"));
        let spec = RuleSpec::Qncsa(Frac::new(num, den));
        let oracle = o_qncsa(&ballots, m, num, den);
        assert_tie_family(e, &spec, &oracle, &format!("{ctx} qncsa:{num}/{den}"));
    }

    assert_tie_family(
        e,
        &RuleSpec::FirstMajority,
        &o_first_majority(&ballots, m),
        &format!("{ctx} first-majority"),
    );

    for (spec, accepts) in &threshold_cases() {
        let oracle = o_threshold(&ballots, m, accepts);
        let label = format!("{ctx} threshold:{spec}");
        assert_tie_family(e, &RuleSpec::Threshold(spec.clone()), &oracle, &label);
    }

    check_solvers(e, ctx);
}

/// The cover and counting solvers against brute force, on their own so
/// instances beyond the full-rule budget can still exercise them.
pub fn check_solvers(e: &Election, ctx: &str) {
    let ballots = ballots_of(e);
    let m = e.num_candidates();
    let n = e.num_voters();

    let (k, family) = o_min_cover_family(&ballots, m);
    let got = exact_min_cover(e.ballots(), m, 100_000);
    assert_eq!(got.size, k, "{ctx}: min cover size");
    assert!(!got.truncated, "{ctx}: cover cap");
    let got_family: Vec<Vec<usize>> = got.covers.iter().map(|c| c.to_indices()).collect();
    assert_eq!(got_family, family, "{ctx}: min cover family");

    for (spec, accepts) in &threshold_cases() {
        for required in 0..=n {
            for (maximize, size_objective) in
                [(false, SizeObjective::Minimize), (true, SizeObjective::Maximize)]
            {
                let program =
                    ThresholdProgram::for_election(e, spec.clone(), required, size_objective);
                let got = threshold_program_solve(&program);
                let want = o_program(&ballots, m, accepts, required, maximize);
                let label = format!("{ctx} program threshold:{spec} required={required}");
                match (got, want) {
                    (Ok(sol), Some((total, witness))) => {
                        assert_eq!(sol.total, total, "{label}: total");
                        assert_eq!(sol.witness.to_indices(), witness, "{label}: witness");
                    }
                    (Err(err), None) => {
                        assert!(
                            matches!(err, varwin_core::Error::Infeasible),
                            "{label}: expected infeasible, got {err:?}"
                        );
                    }
                    (got, want) => panic!("{label}: {got:?} vs {want:?}"),
                }
            }
        }
    }
}

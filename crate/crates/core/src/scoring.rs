//! Committee score functions.
//!
//! Scores that admit exact arithmetic (approval counts, step-function
//! sums, threshold satisfaction) are computed in integers or rationals;
//! only the size-penalized families return floating point values.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CandidateSet, Election};

/// Exact rational parameter (thresholds, exponents, probabilities).
pub type Frac = Ratio<i64>;

/// Parses `"3/4"`, `"0.75"`, or `"3"` into an exact rational.
pub fn parse_frac(s: &str) -> Result<Frac> {
    let bad = || Error::InvalidSpec(format!("invalid rational '{s}'"));
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Frac::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int_part: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: i64 = frac.parse().map_err(|_| bad())?;
        let scale = 10i64.pow(frac.len() as u32);
        let negative = int.starts_with('-');
        let whole = Frac::from_integer(int_part);
        let part = Frac::new(digits, scale);
        return Ok(if negative { whole - part } else { whole + part });
    }
    let n: i64 = s.parse().map_err(|_| bad())?;
    Ok(Frac::from_integer(n))
}

pub fn frac_to_f64(q: Frac) -> f64 {
    q.to_f64().expect("rational fits f64")
}

/// Renders a rational as `p/q`, or just `p` for integers.
pub fn frac_to_string(q: Frac) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `|S|^q` with the exact endpoints: `q = 0` gives 1, `q = 1` gives `|S|`.
pub(crate) fn size_power(k: usize, q: Frac) -> f64 {
    if q == Frac::from_integer(0) {
        1.0
    } else if q == Frac::from_integer(1) {
        k as f64
    } else {
        (k as f64).powf(frac_to_f64(q))
    }
}

/// A non-decreasing step function on non-negative integers with value 0
/// at 0. Stored as `(threshold, value)` pairs: `f(x)` is the value of the
/// largest threshold that is at most `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, u64)>", into = "Vec<(u32, u64)>")]
pub struct StepFunction {
    steps: Vec<(u32, u64)>,
}

impl StepFunction {
    pub fn new(mut steps: Vec<(u32, u64)>) -> Result<Self> {
        steps.retain(|&(t, v)| !(t == 0 && v == 0));
        let mut prev_threshold = 0u32;
        let mut prev_value = 0u64;
        for &(t, v) in &steps {
            if t <= prev_threshold && !(prev_threshold == 0 && prev_value == 0 && t == 0) {
                return Err(Error::InvalidSpec(
                    "step thresholds must be strictly increasing".into(),
                ));
            }
            if t == 0 {
                return Err(Error::InvalidSpec("value at 0 must be 0".into()));
            }
            if v < prev_value {
                return Err(Error::InvalidSpec("step values must be non-decreasing".into()));
            }
            prev_threshold = t;
            prev_value = v;
        }
        Ok(StepFunction { steps })
    }

    /// The constant-zero function.
    pub fn zero() -> Self {
        StepFunction { steps: vec![] }
    }

    /// 0 at 0, and 1 from 1 on.
    pub fn unit() -> Self {
        StepFunction { steps: vec![(1, 1)] }
    }

    pub fn value(&self, x: u32) -> u64 {
        let mut v = 0;
        for &(t, val) in &self.steps {
            if t <= x {
                v = val;
            } else {
                break;
            }
        }
        v
    }

    pub fn steps(&self) -> &[(u32, u64)] {
        &self.steps
    }
}

impl TryFrom<Vec<(u32, u64)>> for StepFunction {
    type Error = Error;

    fn try_from(steps: Vec<(u32, u64)>) -> Result<Self> {
        StepFunction::new(steps)
    }
}

impl From<StepFunction> for Vec<(u32, u64)> {
    fn from(f: StepFunction) -> Self {
        f.steps
    }
}

/// A pair of functions scoring a committee as
/// `sum over voters of f(approved members) - g(disapproved members)`.
///
/// The linear variant keeps its slopes symbolic so optimizers can use the
/// per-candidate decomposition; step pairs are evaluated pointwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GnavSpec {
    Linear { f_slope: i64, g_slope: i64 },
    Step { f: StepFunction, g: StepFunction },
}

impl GnavSpec {
    /// `f(x) = a*x`, `g(x) = b*x`. Slopes must be non-negative.
    pub fn linear(a: i64, b: i64) -> Result<Self> {
        if a < 0 || b < 0 {
            return Err(Error::InvalidSpec("linear slopes must be non-negative".into()));
        }
        Ok(GnavSpec::Linear { f_slope: a, g_slope: b })
    }

    pub fn step(f: StepFunction, g: StepFunction) -> Self {
        GnavSpec::Step { f, g }
    }

    /// Counts voters with at least one approved committee member.
    pub fn unit_zero() -> Self {
        GnavSpec::Step { f: StepFunction::unit(), g: StepFunction::zero() }
    }

    /// Penalizes voters with at least one disapproved committee member.
    pub fn zero_unit() -> Self {
        GnavSpec::Step { f: StepFunction::zero(), g: StepFunction::unit() }
    }

    /// Rewards any coverage with 4 and charges disapprovals capped at 2,
    /// so a committee covering every voter exactly once is optimal. This
    /// is the pair that encodes exact-cover instances.
    pub fn x3c() -> Self {
        GnavSpec::Step {
            f: StepFunction::new(vec![(1, 4)]).unwrap(),
            g: StepFunction::new(vec![(1, 1), (2, 2)]).unwrap(),
        }
    }

    pub fn f_value(&self, x: u32) -> i64 {
        match self {
            GnavSpec::Linear { f_slope, .. } => f_slope * x as i64,
            GnavSpec::Step { f, .. } => f.value(x) as i64,
        }
    }

    pub fn g_value(&self, x: u32) -> i64 {
        match self {
            GnavSpec::Linear { g_slope, .. } => g_slope * x as i64,
            GnavSpec::Step { g, .. } => g.value(x) as i64,
        }
    }

    pub fn as_linear(&self) -> Option<(i64, i64)> {
        match *self {
            GnavSpec::Linear { f_slope, g_slope } => Some((f_slope, g_slope)),
            GnavSpec::Step { .. } => None,
        }
    }
}

/// How many approved members a voter needs before a committee of size `k`
/// counts them as satisfied.
#[derive(Clone, Debug, PartialEq)]
pub enum ThresholdSpec {
    /// At least one approved member.
    Unit,
    /// At least half: `2 * approved >= k`, compared in integers.
    Majority,
    /// Every member approved.
    Full,
    /// At least an `alpha` fraction, compared in exact rationals.
    Linear(Frac),
}

impl ThresholdSpec {
    pub fn linear(alpha: Frac) -> Result<Self> {
        if alpha < Frac::from_integer(0) || alpha > Frac::from_integer(1) {
            return Err(Error::InvalidSpec("threshold fraction must be in [0, 1]".into()));
        }
        Ok(ThresholdSpec::Linear(alpha))
    }

    /// Does a voter with `approved` approved members accept a committee of
    /// size `k`?
    pub fn accepts(&self, approved: usize, k: usize) -> bool {
        match self {
            ThresholdSpec::Unit => approved >= 1 || k == 0,
            ThresholdSpec::Majority => 2 * approved >= k,
            ThresholdSpec::Full => approved == k,
            ThresholdSpec::Linear(alpha) => {
                // approved >= alpha * k, cross-multiplied to stay exact
                approved as i128 * *alpha.denom() as i128
                    >= *alpha.numer() as i128 * k as i128
            }
        }
    }

    /// Smallest approved count that satisfies a voter for size `k`.
    pub fn min_required(&self, k: usize) -> usize {
        match self {
            ThresholdSpec::Unit => usize::from(k > 0),
            ThresholdSpec::Majority => k.div_ceil(2),
            ThresholdSpec::Full => k,
            ThresholdSpec::Linear(alpha) => {
                // A negative alpha asks for nothing, like alpha = 0.
                let num = (*alpha.numer()).max(0) as u128 * k as u128;
                let den = *alpha.denom() as u128;
                num.div_ceil(den) as usize
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(ThresholdSpec::Unit),
            "maj" | "majority" => Ok(ThresholdSpec::Majority),
            "full" => Ok(ThresholdSpec::Full),
            other => match other.strip_prefix("linear:") {
                Some(alpha) => ThresholdSpec::linear(parse_frac(alpha)?),
                None => Err(Error::InvalidSpec(format!("unknown threshold kind '{other}'"))),
            },
        }
    }
}

impl std::fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdSpec::Unit => write!(f, "unit"),
            ThresholdSpec::Majority => write!(f, "maj"),
            ThresholdSpec::Full => write!(f, "full"),
            ThresholdSpec::Linear(alpha) => write!(f, "linear:{}", frac_to_string(*alpha)),
        }
    }
}

impl Serialize for ThresholdSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ThresholdSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ThresholdSpec::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Net approval score: each voter contributes the number of committee
/// members they approve minus the number they disapprove. The empty
/// committee scores 0.
pub fn nav_score(e: &Election, committee: &CandidateSet) -> i64 {
    let k = committee.len() as i64;
    let mut score = 0i64;
    for ballot in e.ballots() {
        let approved = committee.intersection_len(ballot) as i64;
        score += 2 * approved - k;
    }
    score
}

/// Step-function generalization of the net approval score.
pub fn gnav_score(e: &Election, spec: &GnavSpec, committee: &CandidateSet) -> i64 {
    let k = committee.len() as u32;
    let mut score = 0i64;
    for ballot in e.ballots() {
        let approved = committee.intersection_len(ballot) as u32;
        score += spec.f_value(approved) - spec.g_value(k - approved);
    }
    score
}

/// Size-penalized total approval: `(sum of member scores) / |S|^q`.
pub fn qcsa_score(e: &Election, q: Frac, committee: &CandidateSet) -> Result<f64> {
    if committee.is_empty() {
        return Err(Error::EmptyCommittee);
    }
    let total: i64 = e
        .ballots()
        .iter()
        .map(|ballot| committee.intersection_len(ballot) as i64)
        .sum();
    Ok(total as f64 / size_power(committee.len(), q))
}

/// Size-penalized net approval: `nav_score / |S|^q`.
pub fn qncsa_score(e: &Election, q: Frac, committee: &CandidateSet) -> Result<f64> {
    if committee.is_empty() {
        return Err(Error::EmptyCommittee);
    }
    Ok(nav_score(e, committee) as f64 / size_power(committee.len(), q))
}

pub fn threshold_satisfies(
    ballot: &CandidateSet,
    committee: &CandidateSet,
    t: &ThresholdSpec,
) -> bool {
    t.accepts(committee.intersection_len(ballot), committee.len())
}

/// Number of voters the committee satisfies under threshold `t`.
pub fn threshold_score(e: &Election, committee: &CandidateSet, t: &ThresholdSpec) -> usize {
    e.ballots().iter().filter(|b| threshold_satisfies(b, committee, t)).count()
}

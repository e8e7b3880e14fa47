//! Exact search machinery behind the rules: committee enumeration,
//! minimum set cover over ballots, and a bounded solver for the
//! candidate-type counting program used by threshold committees.

use std::collections::BTreeSet;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{CandidateSet, CandidateType, Election};
use crate::rules::{Objective, ScoreValue, WinnerResult};
use crate::scoring::ThresholdSpec;

/// Largest `m` the exhaustive committee searches accept.
pub const EXHAUSTIVE_MASK_LIMIT: usize = 24;

pub(crate) fn check_mask_capacity(m: usize) -> Result<()> {
    if m > EXHAUSTIVE_MASK_LIMIT {
        return Err(Error::Capacity(format!(
            "{m} candidates exceed the exhaustive search limit of {EXHAUSTIVE_MASK_LIMIT}"
        )));
    }
    Ok(())
}

/// All `2^m` committee masks in ascending numeric order.
pub fn all_committee_masks(m: usize) -> Result<impl Iterator<Item = u64>> {
    check_mask_capacity(m)?;
    Ok(0..1u64 << m)
}

/// Committee masks of size at most `max_size`, grouped by increasing size;
/// within one size masks ascend numerically.
pub fn committee_masks_up_to_size(
    m: usize,
    max_size: usize,
) -> Result<impl Iterator<Item = u64>> {
    check_mask_capacity(m)?;
    Ok(SizeOrderedMasks { m, max_size: max_size.min(m), size: 0, current: Some(0) })
}

struct SizeOrderedMasks {
    m: usize,
    max_size: usize,
    size: usize,
    current: Option<u64>,
}

impl Iterator for SizeOrderedMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let out = self.current?;
        self.current = match next_same_popcount(out) {
            Some(next) if next < (1u64 << self.m) => Some(next),
            _ => {
                self.size += 1;
                if self.size > self.max_size {
                    None
                } else {
                    Some((1u64 << self.size) - 1)
                }
            }
        };
        Some(out)
    }
}

/// Gosper's hack: the next-larger word with the same population count.
fn next_same_popcount(v: u64) -> Option<u64> {
    if v == 0 {
        return None;
    }
    let c = v & v.wrapping_neg();
    let r = v.checked_add(c)?;
    Some((((r ^ v) >> 2) / c) | r)
}

// ---------------------------------------------------------------------------
// Minimum cover of the nonempty ballots.

/// All minimum-cardinality committees covering every nonempty ballot.
#[derive(Clone, Debug)]
pub struct CoverFamily {
    pub size: usize,
    /// Lexicographically ascending; truncated to the cap.
    pub covers: Vec<CandidateSet>,
    pub truncated: bool,
}

struct CoverInstance {
    num_candidates: usize,
    elements: usize,
    /// Per type: which nonempty ballots it covers, and its candidates.
    type_sets: Vec<BitSet>,
    type_members: Vec<Vec<usize>>,
    /// Per element: the types covering it.
    covers_of: Vec<Vec<usize>>,
}

impl CoverInstance {
    fn build(ballots: &[CandidateSet], m: usize) -> Self {
        let nonempty: Vec<&CandidateSet> = ballots.iter().filter(|b| !b.is_empty()).collect();
        let elements = nonempty.len();
        let mut coverage: Vec<BitSet> = vec![BitSet::empty(elements.max(1)); m];
        for (el, ballot) in nonempty.iter().enumerate() {
            for c in ballot.iter() {
                coverage[c].insert(el);
            }
        }
        let mut type_sets: Vec<BitSet> = Vec::new();
        let mut type_members: Vec<Vec<usize>> = Vec::new();
        for (c, cov) in coverage.into_iter().enumerate() {
            if cov.is_empty() {
                continue;
            }
            match type_sets.iter().position(|t| *t == cov) {
                Some(i) => type_members[i].push(c),
                None => {
                    type_sets.push(cov);
                    type_members.push(vec![c]);
                }
            }
        }
        let mut covers_of = vec![Vec::new(); elements];
        for (t, set) in type_sets.iter().enumerate() {
            for el in set.iter() {
                covers_of[el].push(t);
            }
        }
        CoverInstance { num_candidates: m, elements, type_sets, type_members, covers_of }
    }

    fn all_elements(&self) -> BitSet {
        let mut s = BitSet::empty(self.elements.max(1));
        for el in 0..self.elements {
            s.insert(el);
        }
        s
    }

    /// ceil(|uncovered| / best single-type coverage); 0 means unreachable.
    fn lower_bound(&self, uncovered: &BitSet) -> Option<usize> {
        let remaining = uncovered.len();
        if remaining == 0 {
            return Some(0);
        }
        let best = self
            .type_sets
            .iter()
            .map(|t| t.intersection_len(uncovered))
            .max()
            .unwrap_or(0);
        if best == 0 {
            None
        } else {
            Some(remaining.div_ceil(best))
        }
    }

    /// Uncovered element with the fewest covering types.
    fn pick_element(&self, uncovered: &BitSet) -> usize {
        uncovered
            .iter()
            .min_by_key(|&el| self.covers_of[el].len())
            .expect("uncovered is nonempty")
    }

    fn exists(&self, uncovered: &BitSet, budget: usize) -> bool {
        let Some(lb) = self.lower_bound(uncovered) else { return false };
        if lb == 0 {
            return true;
        }
        if lb > budget {
            return false;
        }
        let el = self.pick_element(uncovered);
        for &t in &self.covers_of[el] {
            let mut next = uncovered.clone();
            next.difference_assign(&self.type_sets[t]);
            if self.exists(&next, budget - 1) {
                return true;
            }
        }
        false
    }

    fn min_size(&self) -> usize {
        if self.elements == 0 {
            return 0;
        }
        let all = self.all_elements();
        let start = self.lower_bound(&all).expect("every nonempty ballot covers itself");
        for budget in start..=self.type_sets.len() {
            if self.exists(&all, budget) {
                return budget;
            }
        }
        unreachable!("selecting every type covers everything")
    }

    /// Collects all type covers of exactly `target` types, as sorted type
    /// id lists. Stops once `limit` distinct covers were seen.
    fn collect(
        &self,
        uncovered: &BitSet,
        budget: usize,
        chosen: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
        limit: usize,
    ) -> bool {
        if uncovered.is_empty() {
            let mut cover = chosen.clone();
            cover.sort_unstable();
            out.insert(cover);
            return out.len() >= limit;
        }
        match self.lower_bound(uncovered) {
            Some(lb) if lb <= budget => {}
            _ => return false,
        }
        let el = self.pick_element(uncovered);
        for &t in &self.covers_of[el] {
            if chosen.contains(&t) {
                continue;
            }
            let mut next = uncovered.clone();
            next.difference_assign(&self.type_sets[t]);
            chosen.push(t);
            let full = self.collect(&next, budget - 1, chosen, out, limit);
            chosen.pop();
            if full {
                return true;
            }
        }
        false
    }

    /// Expands type covers into candidate committees, one member choice per
    /// type, in lexicographic candidate order. Appends into `out`.
    fn realize(&self, cover: &[usize], out: &mut Vec<CandidateSet>, limit: usize) -> bool {
        let mut picks = vec![0usize; cover.len()];
        loop {
            let indices = cover.iter().zip(&picks).map(|(&t, &p)| self.type_members[t][p]);
            out.push(
                CandidateSet::from_indices(self.num_candidates, indices)
                    .expect("members are in range"),
            );
            if out.len() >= limit {
                return true;
            }
            // Odometer over the member choices, last type fastest.
            let mut pos = cover.len();
            loop {
                if pos == 0 {
                    return false;
                }
                pos -= 1;
                picks[pos] += 1;
                if picks[pos] < self.type_members[cover[pos]].len() {
                    break;
                }
                picks[pos] = 0;
            }
        }
    }
}

/// Minimum size of a committee covering every nonempty ballot, together
/// with every cover of that size (up to `cap`). With no nonempty ballots
/// the unique cover is the empty committee.
pub fn exact_min_cover(ballots: &[CandidateSet], m: usize, cap: usize) -> CoverFamily {
    let inst = CoverInstance::build(ballots, m);
    if inst.elements == 0 {
        return CoverFamily { size: 0, covers: vec![CandidateSet::empty(m)], truncated: false };
    }
    let size = inst.min_size();
    let mut type_covers = BTreeSet::new();
    let type_limit = cap.saturating_add(1);
    let all = inst.all_elements();
    inst.collect(&all, size, &mut Vec::new(), &mut type_covers, type_limit);

    let mut covers: Vec<CandidateSet> = Vec::new();
    let mut truncated = false;
    let limit = cap.saturating_add(1);
    for cover in &type_covers {
        if inst.realize(cover, &mut covers, limit) {
            break;
        }
    }
    covers.sort();
    if covers.len() > cap {
        truncated = true;
        covers.truncate(cap);
    }
    CoverFamily { size, covers, truncated }
}

pub fn min_cover_size(ballots: &[CandidateSet], m: usize) -> usize {
    CoverInstance::build(ballots, m).min_size()
}

/// Can `k` candidates cover every nonempty ballot?
pub fn cover_exists_within(ballots: &[CandidateSet], m: usize, k: usize) -> bool {
    let inst = CoverInstance::build(ballots, m);
    if inst.elements == 0 {
        return true;
    }
    inst.exists(&inst.all_elements(), k.min(inst.type_sets.len()))
}

/// The lexicographically smallest cover of exactly `size` candidates,
/// found by fixing members in ascending order and checking feasibility
/// of each extension. `size` must be achievable.
pub(crate) fn lex_min_cover(ballots: &[CandidateSet], m: usize, size: usize) -> CandidateSet {
    let nonempty: Vec<&CandidateSet> = ballots.iter().filter(|b| !b.is_empty()).collect();
    let elements = nonempty.len();
    let mut coverage: Vec<BitSet> = vec![BitSet::empty(elements.max(1)); m];
    for (el, ballot) in nonempty.iter().enumerate() {
        for c in ballot.iter() {
            coverage[c].insert(el);
        }
    }
    let mut uncovered = BitSet::empty(elements.max(1));
    for el in 0..elements {
        uncovered.insert(el);
    }

    fn feasible(
        coverage: &[BitSet],
        uncovered: &BitSet,
        budget: usize,
        min_cand: usize,
    ) -> bool {
        if uncovered.is_empty() {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let el = uncovered
            .iter()
            .min_by_key(|&el| (min_cand..coverage.len()).filter(|&c| coverage[c].contains(el)).count())
            .unwrap();
        for c in min_cand..coverage.len() {
            if !coverage[c].contains(el) {
                continue;
            }
            let mut next = uncovered.clone();
            next.difference_assign(&coverage[c]);
            if feasible(coverage, &next, budget - 1, c + 1) {
                return true;
            }
        }
        false
    }

    let mut chosen = CandidateSet::empty(m);
    let mut min_cand = 0;
    for pos in 0..size {
        let budget = size - pos - 1;
        for c in min_cand..m {
            let mut next = uncovered.clone();
            next.difference_assign(&coverage[c]);
            if feasible(&coverage, &next, budget, c + 1) {
                chosen.insert(c);
                uncovered = next;
                min_cand = c + 1;
                break;
            }
        }
    }
    debug_assert_eq!(chosen.len(), size, "no cover of the requested size");
    chosen
}

// ---------------------------------------------------------------------------
// Candidate-type counting program for threshold committees.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeObjective {
    Minimize,
    Maximize,
}

/// Choose how many candidates of each type to seat (bounded by the type
/// multiplicities) so that at least `required` voters accept the committee
/// under `threshold`, while minimizing or maximizing the committee size.
/// The committee must be nonempty.
#[derive(Clone, Debug)]
pub struct ThresholdProgram {
    pub types: Vec<CandidateType>,
    pub num_voters: usize,
    pub threshold: ThresholdSpec,
    pub required: usize,
    pub objective: SizeObjective,
}

impl ThresholdProgram {
    pub fn for_election(
        e: &Election,
        threshold: ThresholdSpec,
        required: usize,
        objective: SizeObjective,
    ) -> Self {
        ThresholdProgram {
            types: e.candidate_types(),
            num_voters: e.num_voters(),
            threshold,
            required,
            objective,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProgramSolution {
    /// Seats taken from each type, aligned with the program's type list.
    pub counts: Vec<usize>,
    pub total: usize,
    /// Lexicographically smallest committee among the optimal ones.
    pub witness: CandidateSet,
}

const PROGRAM_LEAF_LIMIT: u128 = 1 << 22;

/// Bounded exhaustive search over type count vectors. Errors with
/// `Infeasible` when no nonempty committee satisfies `required` voters,
/// and with `Capacity` when the count space is too large to enumerate.
pub fn threshold_program_solve(p: &ThresholdProgram) -> Result<ProgramSolution> {
    let leaves: u128 = p
        .types
        .iter()
        .map(|t| t.multiplicity() as u128 + 1)
        .try_fold(1u128, |acc, x| acc.checked_mul(x))
        .unwrap_or(u128::MAX);
    if leaves > PROGRAM_LEAF_LIMIT {
        return Err(Error::Capacity(format!(
            "{leaves} type count vectors exceed the program search limit"
        )));
    }

    let voters_of_type: Vec<Vec<usize>> =
        p.types.iter().map(|t| t.approvers.to_indices()).collect();
    let suffix_capacity: Vec<usize> = {
        let mut suffix = vec![0usize; p.types.len() + 1];
        for i in (0..p.types.len()).rev() {
            suffix[i] = suffix[i + 1] + p.types[i].multiplicity();
        }
        suffix
    };
    let width = p.types.iter().flat_map(|t| &t.members).max().map_or(1, |&c| c + 1);

    // Members within a type are interchangeable, so the lexicographically
    // smallest committee with given counts takes each type's first members.
    let realize = |types: &[CandidateType], counts: &[usize]| {
        let mut witness = CandidateSet::empty(width);
        for (t, &x) in types.iter().zip(counts) {
            for &c in t.members.iter().take(x) {
                witness.insert(c);
            }
        }
        witness
    };

    struct Search<'a> {
        p: &'a ThresholdProgram,
        voters_of_type: &'a [Vec<usize>],
        suffix_capacity: &'a [usize],
        approved: Vec<usize>,
        counts: Vec<usize>,
        best: Option<(usize, Vec<usize>, CandidateSet)>,
        realize: &'a dyn Fn(&[CandidateType], &[usize]) -> CandidateSet,
    }

    impl Search<'_> {
        fn run(&mut self, depth: usize, total: usize) {
            match (self.p.objective, &self.best) {
                (SizeObjective::Minimize, Some((b, ..))) if total > *b => return,
                (SizeObjective::Maximize, Some((b, ..)))
                    if total + self.suffix_capacity[depth] < *b =>
                {
                    return
                }
                _ => {}
            }
            if depth == self.p.types.len() {
                if total == 0 {
                    return;
                }
                let satisfied = self
                    .approved
                    .iter()
                    .filter(|&&a| self.p.threshold.accepts(a, total))
                    .count();
                if satisfied < self.p.required {
                    return;
                }
                let witness = (self.realize)(&self.p.types, &self.counts);
                let better = match &self.best {
                    None => true,
                    Some((b, _, w)) => match total.cmp(b) {
                        std::cmp::Ordering::Equal => witness < *w,
                        std::cmp::Ordering::Less => self.p.objective == SizeObjective::Minimize,
                        std::cmp::Ordering::Greater => self.p.objective == SizeObjective::Maximize,
                    },
                };
                if better {
                    self.best = Some((total, self.counts.clone(), witness));
                }
                return;
            }
            let multiplicity = self.p.types[depth].multiplicity();
            let order: Vec<usize> = match self.p.objective {
                SizeObjective::Minimize => (0..=multiplicity).collect(),
                SizeObjective::Maximize => (0..=multiplicity).rev().collect(),
            };
            for x in order {
                self.counts[depth] = x;
                for &v in &self.voters_of_type[depth] {
                    self.approved[v] += x;
                }
                self.run(depth + 1, total + x);
                for &v in &self.voters_of_type[depth] {
                    self.approved[v] -= x;
                }
            }
            self.counts[depth] = 0;
        }
    }

    let mut search = Search {
        p,
        voters_of_type: &voters_of_type,
        suffix_capacity: &suffix_capacity,
        approved: vec![0; p.num_voters],
        counts: vec![0; p.types.len()],
        best: None,
        realize: &realize,
    };
    search.run(0, 0);

    let (total, counts, witness) = search.best.ok_or(Error::Infeasible)?;
    Ok(ProgramSolution { counts, total, witness })
}

/// Best achievable threshold score, found by scanning the required voter
/// count downward until the counting program becomes feasible. The first
/// feasible count is the optimum; the returned committee witnesses it.
pub fn threshold_best_n(
    e: &Election,
    t: &ThresholdSpec,
    objective: Objective,
) -> Result<WinnerResult> {
    let size_objective = match objective {
        Objective::Largest => SizeObjective::Maximize,
        _ => SizeObjective::Minimize,
    };
    let make_witness_result = |score: usize, witness: CandidateSet| {
        // Widths from the program follow the highest seated candidate.
        let mut committee = CandidateSet::empty(e.num_candidates());
        for c in witness.iter() {
            committee.insert(c);
        }
        WinnerResult {
            committees: vec![committee.clone()],
            score: ScoreValue::Int(score as i64),
            tie_truncated: false,
            canonical: committee,
        }
    };
    for required in (1..=e.num_voters()).rev() {
        let program = ThresholdProgram::for_election(e, t.clone(), required, size_objective);
        match threshold_program_solve(&program) {
            Ok(sol) => return Ok(make_witness_result(required, sol.witness)),
            Err(Error::Infeasible) => continue,
            Err(other) => return Err(other),
        }
    }
    // No nonempty committee satisfies anyone; any committee scores 0.
    let program = ThresholdProgram::for_election(e, t.clone(), 0, size_objective);
    let sol = threshold_program_solve(&program)?;
    Ok(make_witness_result(0, sol.witness))
}

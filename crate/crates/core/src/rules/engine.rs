//! Exhaustive committee search shared by the step-scoring and threshold
//! rules, plus small enumeration helpers for tie families.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::model::Election;
use crate::rules::Objective;
use crate::scoring::ThresholdSpec;

/// Outcome of a full scan over committee masks: the best score, the
/// extremal winner sizes, and the lexicographically smallest winner at
/// each extremal size.
pub(crate) struct MaskOptima {
    pub best: i64,
    pub min_size: u32,
    pub max_size: u32,
    pub canon_min: u64,
    pub canon_max: u64,
}

/// Committees compare by their sorted index sequences, so {0,3} precedes
/// {1,2} even though its mask value is larger.
pub(crate) fn lex_cmp_masks(a: u64, b: u64) -> Ordering {
    let (mut x, mut y) = (a, b);
    while x != 0 && y != 0 {
        let (i, j) = (x.trailing_zeros(), y.trailing_zeros());
        if i != j {
            return i.cmp(&j);
        }
        x &= x - 1;
        y &= y - 1;
    }
    (x != 0).cmp(&(y != 0))
}

pub(crate) fn size_lex_cmp(a: u64, b: u64) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| lex_cmp_masks(a, b))
}

pub(crate) fn search_masks(
    m: usize,
    include_empty: bool,
    mut score: impl FnMut(u64, u32) -> i64,
) -> MaskOptima {
    let start: u64 = if include_empty { 0 } else { 1 };
    let mut opt = MaskOptima {
        best: i64::MIN,
        min_size: 0,
        max_size: 0,
        canon_min: 0,
        canon_max: 0,
    };
    for mask in start..1u64 << m {
        let k = mask.count_ones();
        let s = score(mask, k);
        if s > opt.best {
            opt = MaskOptima { best: s, min_size: k, max_size: k, canon_min: mask, canon_max: mask };
        } else if s == opt.best {
            if k < opt.min_size {
                opt.min_size = k;
                opt.canon_min = mask;
            } else if k == opt.min_size && lex_cmp_masks(mask, opt.canon_min) == Ordering::Less {
                opt.canon_min = mask;
            }
            if k > opt.max_size {
                opt.max_size = k;
                opt.canon_max = mask;
            } else if k == opt.max_size && lex_cmp_masks(mask, opt.canon_max) == Ordering::Less {
                opt.canon_max = mask;
            }
        }
    }
    opt
}

struct SizeLex(u64);

impl PartialEq for SizeLex {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for SizeLex {}
impl PartialOrd for SizeLex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SizeLex {
    fn cmp(&self, other: &Self) -> Ordering {
        size_lex_cmp(self.0, other.0)
    }
}

/// Second pass over the masks: the tied winners selected by `objective`,
/// as the first `cap` masks in (size, lex) order plus a truncation flag.
pub(crate) fn collect_optima(
    m: usize,
    include_empty: bool,
    opt: &MaskOptima,
    objective: Objective,
    cap: usize,
    mut score: impl FnMut(u64, u32) -> i64,
) -> (Vec<u64>, bool) {
    let start: u64 = if include_empty { 0 } else { 1 };
    let mut heap: BinaryHeap<SizeLex> = BinaryHeap::new();
    let mut truncated = false;
    for mask in start..1u64 << m {
        let k = mask.count_ones();
        let keep = match objective {
            Objective::Smallest => k == opt.min_size,
            Objective::Largest => k == opt.max_size,
            Objective::Any | Objective::All { .. } => true,
        };
        if !keep || score(mask, k) != opt.best {
            continue;
        }
        heap.push(SizeLex(mask));
        if heap.len() > cap {
            heap.pop();
            truncated = true;
        }
    }
    let mut masks: Vec<u64> = heap.into_iter().map(|s| s.0).collect();
    masks.sort_by(|a, b| size_lex_cmp(*a, *b));
    (masks, truncated)
}

/// Calls `f` with every `k`-subset of `items` in lexicographic order
/// until `f` returns false; the return value is false when iteration
/// stopped early.
pub(crate) fn for_each_combination<T: Copy>(
    items: &[T],
    k: usize,
    f: &mut impl FnMut(&[T]) -> bool,
) -> bool {
    let n = items.len();
    if k > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        if !f(&buf) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..k {
            buf[j] = items[idx[j]];
        }
    }
}

/// Byte-packed satisfaction counter: voters occupy one byte lane each,
/// eight per word, and per-committee approval counts come from two
/// precomputed half-mask tables. A voter is satisfied when their count
/// reaches the threshold for the committee size, checked for all lanes
/// at once by adding a bias that carries satisfied lanes into bit 7.
pub(crate) struct SatisfactionCounts {
    words: usize,
    num_voters: usize,
    lo_bits: u32,
    lo_mask: u64,
    lo_table: Vec<u64>,
    hi_table: Vec<u64>,
    /// Approvals a voter needs at each committee size.
    theta: Vec<usize>,
}

const LANE_LSB: u64 = 0x0101_0101_0101_0101;
const LANE_MSB: u64 = 0x8080_8080_8080_8080;

impl SatisfactionCounts {
    /// `m` must not exceed the exhaustive search limit.
    pub(crate) fn new(e: &Election, t: &ThresholdSpec) -> Self {
        let m = e.num_candidates();
        let n = e.num_voters();
        let words = n.div_ceil(8);
        let adds: Vec<Vec<u64>> = e
            .approver_sets()
            .iter()
            .map(|approvers| {
                let mut w = vec![0u64; words];
                for v in approvers.iter() {
                    w[v / 8] += 1u64 << (8 * (v % 8));
                }
                w
            })
            .collect();
        let lo_bits = (m / 2) as u32;
        let hi_bits = m - lo_bits as usize;
        let build = |base: usize, bits: usize| {
            let mut table = vec![0u64; (1usize << bits) * words];
            for mask in 1usize..1 << bits {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                for w in 0..words {
                    // Lane values stay below 128, so byte sums never carry.
                    let v = table[rest * words + w] + adds[base + low][w];
                    table[mask * words + w] = v;
                }
            }
            table
        };
        SatisfactionCounts {
            words,
            num_voters: n,
            lo_bits,
            lo_mask: (1u64 << lo_bits) - 1,
            lo_table: build(0, lo_bits as usize),
            hi_table: build(lo_bits as usize, hi_bits),
            theta: (0..=m).map(|k| t.min_required(k)).collect(),
        }
    }

    pub(crate) fn satisfied(&self, mask: u64, k: u32) -> i64 {
        let theta = self.theta[k as usize];
        if theta == 0 {
            return self.num_voters as i64;
        }
        // theta >= 1 keeps the zero-count padding lanes unsatisfied.
        let bias = (0x80 - theta as u64) * LANE_LSB;
        let lo = (mask & self.lo_mask) as usize * self.words;
        let hi = (mask >> self.lo_bits) as usize * self.words;
        let mut count = 0;
        for w in 0..self.words {
            let sum = self.lo_table[lo + w] + self.hi_table[hi + w] + bias;
            count += (sum & LANE_MSB).count_ones();
        }
        count as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::samples;
    use crate::scoring::threshold_score;
    use crate::CandidateSet;

    #[test]
    fn lex_order_follows_index_sequences() {
        // {0,3} = 0b1001 sorts before {1,2} = 0b0110.
        assert_eq!(lex_cmp_masks(0b1001, 0b0110), Ordering::Less);
        assert_eq!(lex_cmp_masks(0b1, 0b11), Ordering::Less);
        assert_eq!(lex_cmp_masks(0b11, 0b1), Ordering::Greater);
        assert_eq!(lex_cmp_masks(0b101, 0b101), Ordering::Equal);
        assert_eq!(lex_cmp_masks(0, 0b1), Ordering::Less);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(&[2usize, 5, 7], 2, &mut |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![2, 5], vec![2, 7], vec![5, 7]]);
        let mut count = 0;
        for_each_combination(&[0usize; 6], 3, &mut |_| {
            count += 1;
            true
        });
        assert_eq!(count, 20);
        let mut calls = 0;
        for_each_combination(&[1usize, 2, 3], 0, &mut |c| {
            assert!(c.is_empty());
            calls += 1;
            true
        });
        assert_eq!(calls, 1);
    }

    #[test]
    fn packed_counts_match_direct_scoring() {
        for e in [samples::e1(), samples::e2(), samples::e3()] {
            let m = e.num_candidates();
            for t in [
                ThresholdSpec::Unit,
                ThresholdSpec::Majority,
                ThresholdSpec::Full,
                ThresholdSpec::linear(crate::scoring::Frac::new(1, 3)).unwrap(),
            ] {
                let counts = SatisfactionCounts::new(&e, &t);
                for mask in 1..1u64 << m {
                    let committee = CandidateSet::from_word(m, mask);
                    let direct = threshold_score(&e, &committee, &t) as i64;
                    assert_eq!(counts.satisfied(mask, mask.count_ones()), direct);
                }
            }
        }
    }

    #[test]
    fn packed_counts_handle_many_voters() {
        // 19 voters spill into three words with five padding lanes.
        let ballots: Vec<Vec<usize>> =
            (0..19).map(|v| (0..5).filter(|c| (v + c) % 3 != 0).collect()).collect();
        let e = crate::model::Election::from_ballot_indices(5, &ballots).unwrap();
        let t = ThresholdSpec::Majority;
        let counts = SatisfactionCounts::new(&e, &t);
        for mask in 1..1u64 << 5 {
            let committee = CandidateSet::from_word(5, mask);
            let direct = threshold_score(&e, &committee, &t) as i64;
            assert_eq!(counts.satisfied(mask, mask.count_ones()), direct);
        }
    }
}

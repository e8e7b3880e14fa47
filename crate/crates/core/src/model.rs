//! Election data model: approval ballots over a fixed candidate range,
//! candidate types (groups of candidates with identical approver sets),
//! and the plain-text and JSON election file formats.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Committee or ballot: a bit set over candidate indices `0..m`.
pub type CandidateSet = BitSet;
/// A bit set over voter indices `0..n`.
pub type VoterSet = BitSet;

/// An approval election: `n` voters each approve a subset of `m` candidates.
/// Both counts are at least one; ballots may be empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Election {
    num_candidates: usize,
    ballots: Vec<CandidateSet>,
}

impl Election {
    pub fn new(num_candidates: usize, ballots: Vec<CandidateSet>) -> Result<Self> {
        if num_candidates == 0 {
            return Err(Error::InvalidElection("need at least one candidate".into()));
        }
        if ballots.is_empty() {
            return Err(Error::InvalidElection("need at least one voter".into()));
        }
        for (i, b) in ballots.iter().enumerate() {
            if b.width() != num_candidates {
                return Err(Error::InvalidElection(format!(
                    "ballot {} has width {}, expected {}",
                    i,
                    b.width(),
                    num_candidates
                )));
            }
        }
        Ok(Election { num_candidates, ballots })
    }

    pub fn from_ballot_indices(num_candidates: usize, ballots: &[Vec<usize>]) -> Result<Self> {
        let sets = ballots
            .iter()
            .map(|b| CandidateSet::from_indices(num_candidates, b.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Election::new(num_candidates, sets)
    }

    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    pub fn num_voters(&self) -> usize {
        self.ballots.len()
    }

    pub fn ballots(&self) -> &[CandidateSet] {
        &self.ballots
    }

    pub fn ballot(&self, voter: usize) -> &CandidateSet {
        &self.ballots[voter]
    }

    /// Number of approvals each candidate received, indexed by candidate.
    pub fn approval_scores(&self) -> Vec<u32> {
        let mut scores = vec![0u32; self.num_candidates];
        for ballot in &self.ballots {
            for c in ballot.iter() {
                scores[c] += 1;
            }
        }
        scores
    }

    /// The set of voters approving each candidate, indexed by candidate.
    pub fn approver_sets(&self) -> Vec<VoterSet> {
        let n = self.num_voters();
        let mut sets = vec![VoterSet::empty(n); self.num_candidates];
        for (i, ballot) in self.ballots.iter().enumerate() {
            for c in ballot.iter() {
                sets[c].insert(i);
            }
        }
        sets
    }

    /// Groups candidates by their exact approver set. Types are returned in
    /// ascending order of their smallest member; members are ascending.
    /// There are at most `min(m, 2^n)` types.
    pub fn candidate_types(&self) -> Vec<CandidateType> {
        let sets = self.approver_sets();
        let mut types: Vec<CandidateType> = Vec::new();
        for (c, approvers) in sets.into_iter().enumerate() {
            match types.iter_mut().find(|t| t.approvers == approvers) {
                Some(t) => t.members.push(c),
                None => types.push(CandidateType { approvers, members: vec![c] }),
            }
        }
        // Scanning candidates in order already yields ascending representatives.
        debug_assert!(types.windows(2).all(|w| w[0].members[0] < w[1].members[0]));
        types
    }

    /// Ballots as single-word masks when `m` fits in one word.
    pub(crate) fn ballot_words(&self) -> Option<Vec<u64>> {
        if self.num_candidates > 64 {
            return None;
        }
        Some(self.ballots.iter().map(|b| b.as_word()).collect())
    }
}

/// A maximal group of candidates approved by exactly the same voters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateType {
    pub approvers: VoterSet,
    /// Ascending candidate indices; never empty.
    pub members: Vec<usize>,
}

impl CandidateType {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    pub fn representative(&self) -> usize {
        self.members[0]
    }
}

/// Election file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Header line `m n`, then one line per voter listing approved
    /// candidate indices separated by spaces; an empty line is an empty
    /// ballot.
    Plain,
    /// `{"m": .., "voters": [[..], ..]}` with an optional `names` array.
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "plain" => Ok(Format::Plain),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidSpec(format!("unknown format '{other}'"))),
        }
    }
}

/// Parse result: the election plus the candidate names a JSON input may carry.
#[derive(Clone, Debug)]
pub struct ParsedElection {
    pub election: Election,
    pub names: Option<Vec<String>>,
}

pub fn read_election(input: &str, format: Format) -> Result<ParsedElection> {
    match format {
        Format::Plain => Ok(ParsedElection { election: parse_plain(input)?, names: None }),
        Format::Json => parse_json(input),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_plain(input: &str) -> Result<Election> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "missing header line"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(parse_err(1, "header must be two integers: <candidates> <voters>"));
    }
    let m: usize = tokens[0]
        .parse()
        .map_err(|_| parse_err(1, format!("invalid candidate count '{}'", tokens[0])))?;
    let n: usize = tokens[1]
        .parse()
        .map_err(|_| parse_err(1, format!("invalid voter count '{}'", tokens[1])))?;
    if m == 0 || n == 0 {
        return Err(parse_err(1, "candidate and voter counts must be positive"));
    }

    let mut ballots = Vec::with_capacity(n);
    for voter in 0..n {
        let line_no = voter + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(line_no, format!("missing ballot line for voter {voter}")))?;
        let mut ballot = CandidateSet::empty(m);
        for token in line.split_whitespace() {
            let c: usize = token
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid candidate index '{token}'")))?;
            if c >= m {
                return Err(parse_err(
                    line_no,
                    format!("candidate index {c} out of range (m = {m})"),
                ));
            }
            ballot.insert(c);
        }
        ballots.push(ballot);
    }
    if lines.next().is_some() {
        return Err(parse_err(n + 2, format!("unexpected content after {n} ballot lines")));
    }
    Election::new(m, ballots)
}

pub fn serialize_plain(e: &Election) -> String {
    let mut out = format!("{} {}\n", e.num_candidates(), e.num_voters());
    for ballot in e.ballots() {
        let line: Vec<String> = ballot.iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ElectionFile {
    m: usize,
    voters: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

pub fn parse_json(input: &str) -> Result<ParsedElection> {
    let file: ElectionFile = serde_json::from_str(input)
        .map_err(|e| parse_err(e.line().max(1), e.to_string()))?;
    let election = Election::from_ballot_indices(file.m, &file.voters)?;
    if let Some(names) = &file.names {
        if names.len() != file.m {
            return Err(Error::InvalidElection(format!(
                "names array has {} entries but m = {}",
                names.len(),
                file.m
            )));
        }
    }
    Ok(ParsedElection { election, names: file.names })
}

pub fn serialize_json(e: &Election, names: Option<&[String]>) -> String {
    let file = ElectionFile {
        m: e.num_candidates(),
        voters: e.ballots().iter().map(|b| b.to_indices()).collect(),
        names: names.map(|n| n.to_vec()),
    };
    serde_json::to_string(&file).expect("election serialization cannot fail")
}

/// Tiny worked elections reused across the test suites.
pub mod samples {
    use super::Election;

    /// Three voters over three candidates: `{0}`, `{0, 1}`, `{1}`.
    /// Candidate scores are `[2, 2, 0]`.
    pub fn e1() -> Election {
        Election::from_ballot_indices(3, &[vec![0], vec![0, 1], vec![1]]).unwrap()
    }

    /// Two voters over two candidates: `{0}`, `{0, 1}`. Scores `[2, 1]`.
    pub fn e2() -> Election {
        Election::from_ballot_indices(2, &[vec![0], vec![0, 1]]).unwrap()
    }

    /// Four voters over four candidates: `{}`, `{2, 3}`, `{2}`, `{3}`.
    /// Scores `[0, 0, 2, 2]`; the first ballot is empty.
    pub fn e3() -> Election {
        Election::from_ballot_indices(4, &[vec![], vec![2, 3], vec![2], vec![3]]).unwrap()
    }
}

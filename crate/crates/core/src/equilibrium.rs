//! Stackelberg-equilibrium analysis for deterministic strategies.
//!
//! The sender commits to a signalling map, the receiver best-responds by
//! decoding each signal to some element of its preimage, and the solution
//! concept evaluates the sender against the *worst* best response. The key
//! structural facts used here:
//!
//! * best responses factor per signal — any decode into the dilemma block is
//!   optimal for the receiver, so the sender's guaranteed utility at source
//!   `x` is the block minimum of column `x`;
//! * a sender strategy is an equilibrium exactly when every dilemma block is
//!   a clique of the strong sender graph, which reduces equilibrium
//!   enumeration to clique-partition enumeration;
//! * the informativeness of a utility matrix is the minimum number of blocks
//!   over such partitions, i.e. the clique cover number of the strong graph.
//!
//! [`is_equilibrium`] uses that characterization; [`BruteForceAnalysis`]
//! re-derives equilibria from the definition alone (full enumeration of both
//! players' strategy spaces) and exists to keep the characterization honest.

use std::collections::BTreeMap;
use std::fmt;

use crate::cliques::clique_cover_number;
use crate::error::{GameError, Result};
use crate::game::{
    receiver_dilemma_set, PartitionCover, ReceiverStrategy, SenderStrategy, UtilityMatrix,
};
use crate::graphs::strong_sender_graph;
use crate::rational::Rat;

/// Vertex limit for equilibrium-partition enumeration.
pub const MAX_PARTITION_ENUM_Q: usize = 12;
/// Alphabet limit for the brute-force oracle (enumerates q^q strategies for
/// both players).
pub const MAX_BRUTEFORCE_Q: usize = 5;
/// Cap on explicitly materialized best-response sets.
const MAX_LISTED_RESPONSES: u128 = 1_000_000;

/// The receiver's best responses to a sender strategy, factored per signal.
///
/// A receiver map is a best response iff it decodes every used signal to an
/// element of that signal's dilemma block, so the whole set is the product of
/// the per-signal candidate sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponseSet {
    q: usize,
    candidates: BTreeMap<usize, Vec<usize>>,
    recovered: usize,
}

impl BestResponseSet {
    /// Signal → admissible decodes (the dilemma block sent to that signal).
    pub fn candidates(&self) -> &BTreeMap<usize, Vec<usize>> {
        &self.candidates
    }

    /// Number of sources every best response recovers exactly (one per
    /// dilemma block).
    pub fn recovered(&self) -> usize {
        self.recovered
    }

    /// Number of best responses: the product of the candidate-set sizes.
    pub fn count(&self) -> u128 {
        self.candidates.values().map(|c| c.len() as u128).product()
    }

    /// Materializes the full best-response set in lexicographic order of the
    /// decode choices.
    pub fn strategies(&self) -> Result<Vec<ReceiverStrategy>> {
        let count = self.count();
        if count > MAX_LISTED_RESPONSES {
            return Err(GameError::SizeLimit(format!(
                "best-response set has {count} elements, refusing to list more than {MAX_LISTED_RESPONSES}"
            )));
        }
        let signals: Vec<usize> = self.candidates.keys().copied().collect();
        let mut picks = vec![0usize; signals.len()];
        let mut out = Vec::with_capacity(count as usize);
        loop {
            let pairs: Vec<(usize, usize)> = signals
                .iter()
                .zip(&picks)
                .map(|(&sig, &i)| (sig, self.candidates[&sig][i]))
                .collect();
            out.push(ReceiverStrategy::from_pairs(self.q, &pairs)?);
            // Odometer increment over the candidate lists.
            let mut pos = signals.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                picks[pos] += 1;
                if picks[pos] < self.candidates[&signals[pos]].len() {
                    break;
                }
                picks[pos] = 0;
            }
        }
    }
}

/// Computes the receiver's best-response structure for `s`: each used signal
/// may be decoded to any element of its dilemma block, and every best
/// response recovers exactly one source per block.
pub fn best_response_set(s: &SenderStrategy) -> BestResponseSet {
    let partition = receiver_dilemma_set(s);
    let mut candidates = BTreeMap::new();
    for block in partition.blocks() {
        let signal = s.signal(block[0]);
        debug_assert!(block.iter().all(|&x| s.signal(x) == signal));
        candidates.insert(signal, block.clone());
    }
    BestResponseSet { q: s.q(), candidates, recovered: partition.blocks().len() }
}

/// The sender's guaranteed utility per source: the minimum of column `x`
/// over the dilemma block containing `x`.
pub fn worst_case_utility(s: &SenderStrategy, u: &UtilityMatrix) -> Vec<Rat> {
    assert_eq!(s.q(), u.q(), "strategy and matrix alphabet sizes differ");
    let partition = receiver_dilemma_set(s);
    (0..u.q())
        .map(|x| {
            let block = partition.block_of(x);
            block.iter().map(|&xh| u.at(xh, x).clone()).min().expect("blocks are non-empty")
        })
        .collect()
}

/// Equilibrium test via the clique characterization: `s` is an equilibrium
/// iff within every dilemma block `P`, `U(x,x) ≤ U(x̂,x)` for all `x, x̂ ∈ P`
/// — equivalently, every block is a clique of the strong sender graph.
pub fn is_equilibrium(s: &SenderStrategy, u: &UtilityMatrix) -> bool {
    assert_eq!(s.q(), u.q(), "strategy and matrix alphabet sizes differ");
    let partition = receiver_dilemma_set(s);
    partition.blocks().iter().all(|block| {
        block
            .iter()
            .all(|&x| block.iter().all(|&xh| u.at(x, x) <= u.at(xh, x)))
    })
}

/// Definition-level equilibrium analysis by full enumeration: for every
/// sender strategy the receiver's best responses are recomputed from the
/// recovery objective alone, and the sender's guaranteed utility profile is
/// compared pointwise against every alternative.
///
/// Building one of these costs `O(q^(2q+1))` time; it exists as an
/// independent oracle for [`is_equilibrium`], not for production use.
#[derive(Debug, Clone)]
pub struct BruteForceAnalysis {
    u: UtilityMatrix,
    /// `best[x]` = the largest guaranteed utility at source `x` over all
    /// sender strategies.
    best: Vec<Rat>,
}

impl BruteForceAnalysis {
    pub fn new(u: &UtilityMatrix) -> Result<Self> {
        let q = u.q();
        if q > MAX_BRUTEFORCE_Q {
            return Err(GameError::SizeLimit(format!(
                "brute-force analysis supports q ≤ {MAX_BRUTEFORCE_Q}, got {q}"
            )));
        }
        let mut best: Option<Vec<Rat>> = None;
        for s in SenderStrategy::all(q) {
            let guaranteed = min_best_response_utility(u, &s);
            best = Some(match best {
                None => guaranteed,
                Some(acc) => acc
                    .into_iter()
                    .zip(guaranteed)
                    .map(|(a, b)| if b > a { b } else { a })
                    .collect(),
            });
        }
        Ok(Self { u: u.clone(), best: best.expect("strategy space is non-empty") })
    }

    /// The pointwise-maximal guaranteed utility profile.
    pub fn best_guarantees(&self) -> &[Rat] {
        &self.best
    }

    /// True iff `s` achieves the maximal guaranteed utility at every source.
    pub fn is_equilibrium(&self, s: &SenderStrategy) -> bool {
        assert_eq!(s.q(), self.u.q(), "strategy and matrix alphabet sizes differ");
        min_best_response_utility(&self.u, s) == self.best
    }
}

/// `x ↦ min over receiver best responses of U(g(s(x)), x)`, where the best
/// responses are found by scanning all `q^q` total receiver maps for the
/// maximal number of correctly recovered sources.
fn min_best_response_utility(u: &UtilityMatrix, s: &SenderStrategy) -> Vec<Rat> {
    let q = u.q();
    let recovered = |g: &[usize]| (0..q).filter(|&x| g[s.signal(x)] == x).count();

    let mut g = vec![0usize; q];
    let mut max_recovered = 0;
    loop {
        max_recovered = max_recovered.max(recovered(&g));
        if !advance(&mut g, q) {
            break;
        }
    }

    let mut mins: Vec<Option<Rat>> = vec![None; q];
    let mut g = vec![0usize; q];
    loop {
        if recovered(&g) == max_recovered {
            for x in 0..q {
                let v = u.at(g[s.signal(x)], x);
                if mins[x].as_ref().is_none_or(|m| v < m) {
                    mins[x] = Some(v.clone());
                }
            }
        }
        if !advance(&mut g, q) {
            break;
        }
    }
    mins.into_iter().map(|m| m.expect("at least one best response exists")).collect()
}

/// Advances a base-`q` odometer; false once it wraps around.
fn advance(digits: &mut [usize], q: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// One-shot form of [`BruteForceAnalysis::is_equilibrium`].
pub fn is_equilibrium_bruteforce(s: &SenderStrategy, u: &UtilityMatrix) -> Result<bool> {
    Ok(BruteForceAnalysis::new(u)?.is_equilibrium(s))
}

/// All dilemma-set partitions arising from equilibrium strategies: exactly
/// the partitions of the source set whose every block is a clique of the
/// strong sender graph, in canonical order. Strategies with the same dilemma
/// set are payoff-equivalent, so partitions are the natural quotient;
/// [`PartitionCover::witness_strategy`] recovers a concrete strategy.
pub fn enumerate_equilibrium_partitions(u: &UtilityMatrix) -> Result<Vec<PartitionCover>> {
    let q = u.q();
    if q > MAX_PARTITION_ENUM_Q {
        return Err(GameError::SizeLimit(format!(
            "equilibrium-partition enumeration supports q ≤ {MAX_PARTITION_ENUM_Q}, got {q}"
        )));
    }
    let adj = strong_sender_graph(u).bitset_rows()?;
    let full = (1u64 << q) - 1;
    let mut out = Vec::new();
    let mut acc: Vec<Vec<usize>> = Vec::new();
    partition_dfs(&adj, q, full, &mut acc, &mut out);
    Ok(out)
}

/// Emits clique partitions in canonical order: the block containing the
/// lowest unassigned vertex is grown depth-first in lexicographic order.
fn partition_dfs(
    adj: &[u64],
    q: usize,
    unassigned: u64,
    acc: &mut Vec<Vec<usize>>,
    out: &mut Vec<PartitionCover>,
) {
    if unassigned == 0 {
        out.push(
            PartitionCover::new(q, acc.clone()).expect("generated blocks partition the sources"),
        );
        return;
    }
    let v0 = unassigned.trailing_zeros() as usize;
    let mut block = vec![v0];
    grow_block(adj, q, unassigned, 1u64 << v0, &mut block, acc, out);
}

fn grow_block(
    adj: &[u64],
    q: usize,
    unassigned: u64,
    block_mask: u64,
    block: &mut Vec<usize>,
    acc: &mut Vec<Vec<usize>>,
    out: &mut Vec<PartitionCover>,
) {
    acc.push(block.clone());
    partition_dfs(adj, q, unassigned & !block_mask, acc, out);
    acc.pop();
    let last = *block.last().expect("blocks are grown from a seed vertex");
    for v in last + 1..q {
        let bit = 1u64 << v;
        // v must be unassigned and adjacent to the whole block so far.
        if unassigned & bit != 0 && block_mask & !adj[v] == 0 {
            block.push(v);
            grow_block(adj, q, unassigned, block_mask | bit, block, acc, out);
            block.pop();
        }
    }
}

/// The informativeness of a utility matrix: the number of blocks in the
/// coarsest equilibrium partition, computed as the clique cover number of
/// the strong sender graph.
pub fn informativeness(u: &UtilityMatrix) -> Result<usize> {
    clique_cover_number(&strong_sender_graph(u)).map(|(theta, _)| theta)
}

/// Equilibrium classes for deterministic sender strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumClass {
    /// One-to-one: the receiver recovers every source.
    Separating,
    /// Constant: the signal carries no information.
    Pooling,
    /// Neither one-to-one nor constant.
    SemiSeparating,
}

impl fmt::Display for EquilibriumClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumClass::Separating => "separating",
            EquilibriumClass::Pooling => "pooling",
            EquilibriumClass::SemiSeparating => "semi-separating",
        })
    }
}

/// Classifies a sender strategy. Callers are expected to pass equilibrium
/// strategies; the label itself depends only on the map. For q = 1 the unique
/// strategy is both one-to-one and constant and is reported as separating.
pub fn classify(s: &SenderStrategy) -> EquilibriumClass {
    if s.is_injective() {
        EquilibriumClass::Separating
    } else if s.is_constant() {
        EquilibriumClass::Pooling
    } else {
        EquilibriumClass::SemiSeparating
    }
}

/// Which equilibrium classes a utility matrix admits. A separating
/// equilibrium always exists, so only the other three facts are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassExistence {
    /// Every equilibrium is separating (informativeness = q).
    pub separating_only: bool,
    /// Some constant strategy is an equilibrium (informativeness = 1).
    pub pooling_exists: bool,
    /// Some strategy that is neither one-to-one nor constant is an
    /// equilibrium.
    pub semi_separating_exists: bool,
}

/// Computes the class-existence flags from the informativeness alone.
///
/// A semi-separating equilibrium needs a clique partition with strictly
/// between 1 and q blocks; that exists iff informativeness < q and q ≥ 3
/// (with only two sources every strategy is one-to-one or constant). For
/// q ≤ 5 the flags are re-derived from the full partition enumeration as a
/// self-check.
pub fn class_existence(u: &UtilityMatrix) -> Result<ClassExistence> {
    let q = u.q();
    let i = informativeness(u)?;
    let flags = ClassExistence {
        separating_only: i == q,
        pooling_exists: i == 1,
        semi_separating_exists: i < q && q >= 3,
    };
    if q <= 5 {
        let partitions = enumerate_equilibrium_partitions(u)?;
        let derived = ClassExistence {
            separating_only: partitions.iter().all(|p| p.blocks().len() == q),
            pooling_exists: partitions.iter().any(|p| p.blocks().len() == 1),
            semi_separating_exists: partitions
                .iter()
                .any(|p| (2..q).contains(&p.blocks().len())),
        };
        debug_assert_eq!(flags, derived, "class flags disagree with enumeration");
    }
    Ok(flags)
}

/// Summary of the deterministic equilibrium structure of a game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    /// Number of blocks in the coarsest equilibrium partition.
    pub informativeness: usize,
    /// Sources recovered in the finest equilibrium — always q, since every
    /// one-to-one strategy is an equilibrium.
    pub max_recovered: usize,
    /// All equilibrium partitions, canonical order.
    pub equilibrium_partitions: Vec<PartitionCover>,
    pub class_existence: ClassExistence,
}

pub fn equilibrium_report(u: &UtilityMatrix) -> Result<EquilibriumReport> {
    let informativeness = informativeness(u)?;
    let equilibrium_partitions = enumerate_equilibrium_partitions(u)?;
    let class_existence = class_existence(u)?;
    debug_assert_eq!(
        equilibrium_partitions.iter().map(|p| p.blocks().len()).min(),
        Some(informativeness),
    );
    Ok(EquilibriumReport {
        informativeness,
        max_recovered: u.q(),
        equilibrium_partitions,
        class_existence,
    })
}

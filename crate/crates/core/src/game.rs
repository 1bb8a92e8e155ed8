//! Core objects of the signalling game.
//!
//! A sender privately observes a source symbol `x` from the alphabet
//! `X = {0..q-1}` and transmits a signal `y = s(x)`; the receiver maps the
//! signal back to a recovered symbol `x̂ = g(y)`. The signal alphabet is
//! fixed to `X` itself (which loses no generality for this model). Utilities
//! accrue to the sender as `U(x̂, x)`; the receiver cares only about exact
//! recovery, which makes the preimage partition of a sender strategy — its
//! *receiver dilemma set* — the object everything downstream is built on.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{GameError, Result};
use crate::rational::{format_rational, int, parse_rational, Rat};

/// The source (and signal) alphabet `{0..q-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    q: usize,
}

impl Alphabet {
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(GameError::Domain("alphabet must have at least one symbol".into()));
        }
        Ok(Alphabet { q })
    }

    pub fn size(&self) -> usize {
        self.q
    }

    /// Iterates the symbols `0..q`.
    pub fn symbols(&self) -> std::ops::Range<usize> {
        0..self.q
    }
}

/// Sender utility matrix: entry `(i, j)` is `U(i, j)` where `i` is the
/// recovered symbol and `j` the source symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityMatrix {
    q: usize,
    rows: Vec<Vec<Rat>>,
}

impl UtilityMatrix {
    /// Validates that `rows` is a non-empty square matrix.
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let q = rows.len();
        if q == 0 {
            return Err(GameError::Dimension("utility matrix must be non-empty".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(GameError::Dimension(format!(
                    "utility matrix is not square: row {i} has {} entries, expected {q}",
                    row.len()
                )));
            }
        }
        Ok(UtilityMatrix { q, rows })
    }

    /// Convenience constructor for integer matrices (tests, generators).
    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&n| int(n)).collect()).collect())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet { q: self.q }
    }

    /// `U(recovered, source)`.
    pub fn at(&self, recovered: usize, source: usize) -> &Rat {
        &self.rows[recovered][source]
    }

    /// The diagonal `x ↦ U(x,x)` — the sender's utility for correct recovery.
    pub fn diag(&self) -> Vec<Rat> {
        (0..self.q).map(|x| self.rows[x][x].clone()).collect()
    }

    /// True iff `U(x,y) = U(y,x)` for all pairs.
    pub fn is_symmetric(&self) -> bool {
        (0..self.q).all(|x| (0..x).all(|y| self.rows[x][y] == self.rows[y][x]))
    }

    /// Rows rendered as canonical rational strings (for reports and files).
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(format_rational).collect()).collect()
    }
}

impl fmt::Display for UtilityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Parses a rectangular table of rational literals into a [`UtilityMatrix`].
///
/// Accepts `p/q`, integer, and exact decimal literals per entry.
pub fn parse_utility<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<UtilityMatrix> {
    let mut parsed = Vec::with_capacity(rows.len());
    for row in rows {
        parsed.push(row.iter().map(|cell| parse_rational(cell.as_ref())).collect::<Result<Vec<_>>>()?);
    }
    UtilityMatrix::new(parsed)
}

/// A pure sender strategy: a total map from source symbols to signals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenderStrategy {
    map: Vec<usize>,
}

impl SenderStrategy {
    pub fn new(q: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != q {
            return Err(GameError::Dimension(format!(
                "sender strategy defines {} symbols, expected {q}",
                map.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= q) {
            return Err(GameError::Domain(format!("signal {bad} outside alphabet of size {q}")));
        }
        Ok(SenderStrategy { map })
    }

    pub fn identity(q: usize) -> Self {
        SenderStrategy { map: (0..q).collect() }
    }

    pub fn constant(q: usize, signal: usize) -> Result<Self> {
        Self::new(q, vec![signal; q])
    }

    pub fn q(&self) -> usize {
        self.map.len()
    }

    /// The signal sent for source symbol `x`.
    pub fn signal(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Signals actually used, sorted ascending.
    pub fn range_signals(&self) -> Vec<usize> {
        let mut used: Vec<usize> = self.map.clone();
        used.sort_unstable();
        used.dedup();
        used
    }

    pub fn is_injective(&self) -> bool {
        self.range_signals().len() == self.map.len()
    }

    pub fn is_constant(&self) -> bool {
        self.map.windows(2).all(|w| w[0] == w[1])
    }

    /// Enumerates all `q^q` sender strategies in lexicographic order of their
    /// signal vectors. Intended for the small-`q` brute-force oracles.
    pub fn all(q: usize) -> impl Iterator<Item = SenderStrategy> {
        OdometerIter::new(q).map(|map| SenderStrategy { map })
    }
}

impl fmt::Display for SenderStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.map.iter().map(|y| y.to_string()).collect();
        write!(f, "[{}]", cells.join(", "))
    }
}

/// A receiver strategy: a partial map from signals to recovered symbols.
///
/// Only the signals in `range(s)` of the paired sender strategy ever matter,
/// so the map is stored partially rather than padded with arbitrary values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverStrategy {
    q: usize,
    map: BTreeMap<usize, usize>,
}

impl ReceiverStrategy {
    pub fn new(q: usize, map: BTreeMap<usize, usize>) -> Result<Self> {
        if let Some((&k, &v)) = map.iter().find(|&(&k, &v)| k >= q || v >= q) {
            return Err(GameError::Domain(format!(
                "receiver entry {k} -> {v} outside alphabet of size {q}"
            )));
        }
        Ok(ReceiverStrategy { q, map })
    }

    pub fn from_pairs(q: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(q, pairs.iter().copied().collect())
    }

    /// Total receiver map given as a dense vector (`signal ↦ symbol`).
    pub fn from_total(q: usize, decode: &[usize]) -> Result<Self> {
        if decode.len() != q {
            return Err(GameError::Dimension(format!(
                "receiver map defines {} signals, expected {q}",
                decode.len()
            )));
        }
        Self::new(q, decode.iter().copied().enumerate().collect())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The recovered symbol for `signal`, if the strategy defines one.
    pub fn decode(&self, signal: usize) -> Option<usize> {
        self.map.get(&signal).copied()
    }

    /// Enumerates all `q^q` total receiver maps (for brute-force oracles).
    pub fn all_total(q: usize) -> impl Iterator<Item = ReceiverStrategy> {
        OdometerIter::new(q).map(move |decode| ReceiverStrategy {
            q,
            map: decode.into_iter().enumerate().collect(),
        })
    }
}

/// Iterator over all vectors in `{0..q-1}^q`, lexicographic.
struct OdometerIter {
    q: usize,
    next: Option<Vec<usize>>,
}

impl OdometerIter {
    fn new(q: usize) -> Self {
        OdometerIter { q, next: Some(vec![0; q]) }
    }
}

impl Iterator for OdometerIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Increment as a base-q odometer, most significant digit first.
        for i in (0..self.q).rev() {
            if succ[i] + 1 < self.q {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// A partition of the alphabet into disjoint non-empty blocks, stored
/// canonically: each block sorted ascending, blocks ordered by minimum
/// element. The derived ordering is the canonical (lexicographic) order
/// used for witness tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionCover {
    q: usize,
    blocks: Vec<Vec<usize>>,
}

impl PartitionCover {
    pub fn new(q: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; q];
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(GameError::Domain("partition contains an empty block".into()));
            }
            let mut block = block;
            block.sort_unstable();
            block.dedup();
            for &x in &block {
                if x >= q {
                    return Err(GameError::Domain(format!("symbol {x} outside alphabet of size {q}")));
                }
                if seen[x] {
                    return Err(GameError::Domain(format!("symbol {x} appears in two blocks")));
                }
                seen[x] = true;
            }
            canonical.push(block);
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(GameError::Domain(format!("symbol {missing} missing from partition")));
        }
        canonical.sort();
        Ok(PartitionCover { q, blocks: canonical })
    }

    /// The all-singletons partition.
    pub fn singletons(q: usize) -> Self {
        PartitionCover { q, blocks: (0..q).map(|x| vec![x]).collect() }
    }

    /// The one-block partition.
    pub fn single_block(q: usize) -> Self {
        PartitionCover { q, blocks: vec![(0..q).collect()] }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block containing symbol `x`.
    pub fn block_of(&self, x: usize) -> &[usize] {
        self.blocks
            .iter()
            .find(|b| b.binary_search(&x).is_ok())
            .expect("partition covers every symbol")
    }

    /// The canonical sender strategy inducing this partition: every block
    /// signals its minimum element.
    pub fn witness_strategy(&self) -> SenderStrategy {
        let mut map = vec![0; self.q];
        for block in &self.blocks {
            let signal = block[0];
            for &x in block {
                map[x] = signal;
            }
        }
        SenderStrategy { map }
    }
}

impl fmt::Display for PartitionCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let cells: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", cells.join(","))
            })
            .collect();
        write!(f, "{{{}}}", blocks.join(", "))
    }
}

/// The receiver dilemma set of `s`: the partition of the alphabet into
/// preimage sets `P_i(s) = {x : s(x) = i}` over the signals `i` in use.
pub fn receiver_dilemma_set(s: &SenderStrategy) -> PartitionCover {
    let q = s.q();
    let mut by_signal: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..q {
        by_signal.entry(s.signal(x)).or_default().push(x);
    }
    let mut blocks: Vec<Vec<usize>> = by_signal.into_values().collect();
    blocks.sort();
    PartitionCover { q, blocks }
}

/// The set of perfectly recovered symbols `D(g,s) = {x : g(s(x)) = x}`.
///
/// Errors if `g` is undefined on some signal the sender actually uses.
pub fn recovered_set(g: &ReceiverStrategy, s: &SenderStrategy) -> Result<Vec<usize>> {
    let mut recovered = Vec::new();
    for x in 0..s.q() {
        let y = s.signal(x);
        let decoded = g
            .decode(y)
            .ok_or_else(|| GameError::Domain(format!("receiver strategy undefined on signal {y}")))?;
        if decoded == x {
            recovered.push(x);
        }
    }
    Ok(recovered)
}

/// The diagonal `x ↦ U(x,x)` as a standalone operation.
pub fn diag_utility(u: &UtilityMatrix) -> Vec<Rat> {
    u.diag()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strategy(map: &[usize]) -> SenderStrategy {
        SenderStrategy::new(map.len(), map.to_vec()).unwrap()
    }

    #[test]
    fn parse_utility_accepts_square_rational_tables() {
        let u = parse_utility(&[vec!["0", "1", "1"], vec!["1", "0", "1"], vec!["1", "1", "0"]]).unwrap();
        assert_eq!(u.q(), 3);
        assert_eq!(u.at(0, 1), &int(1));
        assert_eq!(u.at(0, 0), &int(0));

        let one = parse_utility(&[vec!["0"]]).unwrap();
        assert_eq!(one.q(), 1);
    }

    #[test]
    fn parse_utility_rejects_ragged_and_bad_entries() {
        let ragged = parse_utility(&[vec!["0", "1"], vec!["1", "0", "0"]]);
        assert!(matches!(ragged, Err(GameError::Dimension(_))));

        let bad = parse_utility(&[vec!["0", "x"], vec!["1", "0"]]);
        assert!(matches!(bad, Err(GameError::Parse(_))));

        let empty: Vec<Vec<&str>> = vec![];
        assert!(matches!(parse_utility(&empty), Err(GameError::Dimension(_))));
    }

    #[test]
    fn dilemma_set_is_the_preimage_partition() {
        let identity = SenderStrategy::identity(3);
        assert_eq!(receiver_dilemma_set(&identity), PartitionCover::singletons(3));

        let pooled_pair = strategy(&[0, 0, 2]);
        let p = receiver_dilemma_set(&pooled_pair);
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);

        let constant = SenderStrategy::constant(3, 0).unwrap();
        assert_eq!(receiver_dilemma_set(&constant), PartitionCover::single_block(3));
    }

    #[test]
    fn dilemma_set_has_one_block_per_used_signal() {
        for s in SenderStrategy::all(3) {
            let p = receiver_dilemma_set(&s);
            assert_eq!(p.len(), s.range_signals().len());
            assert_eq!(p.blocks().iter().map(|b| b.len()).sum::<usize>(), 3);
        }
    }

    #[test]
    fn recovered_set_evaluates_g_after_s() {
        let identity = SenderStrategy::identity(3);
        let g_id = ReceiverStrategy::from_total(3, &[0, 1, 2]).unwrap();
        assert_eq!(recovered_set(&g_id, &identity).unwrap(), vec![0, 1, 2]);

        let s = strategy(&[0, 0, 2]);
        let g = ReceiverStrategy::from_pairs(3, &[(0, 0), (2, 2)]).unwrap();
        assert_eq!(recovered_set(&g, &s).unwrap(), vec![0, 2]);

        let constant = SenderStrategy::constant(3, 0).unwrap();
        let g1 = ReceiverStrategy::from_pairs(3, &[(0, 1)]).unwrap();
        assert_eq!(recovered_set(&g1, &constant).unwrap(), vec![1]);
    }

    #[test]
    fn recovered_set_requires_g_defined_on_used_signals() {
        let s = strategy(&[0, 0, 2]);
        let g = ReceiverStrategy::from_pairs(3, &[(0, 0)]).unwrap();
        assert!(matches!(recovered_set(&g, &s), Err(GameError::Domain(_))));
    }

    #[test]
    fn inverse_recovers_everything_for_injective_senders() {
        let s = strategy(&[2, 0, 1]);
        let inverse = ReceiverStrategy::from_pairs(3, &[(2, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(recovered_set(&inverse, &s).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn diag_utility_reads_the_diagonal() {
        let u = parse_utility(&[vec!["5"]]).unwrap();
        assert_eq!(diag_utility(&u), vec![int(5)]);

        let u3 = UtilityMatrix::from_integers(&[vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]).unwrap();
        assert_eq!(diag_utility(&u3), vec![int(0), int(0), int(0)]);
    }

    #[test]
    fn partitions_validate_and_canonicalize() {
        let p = PartitionCover::new(3, vec![vec![2], vec![1, 0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(p.block_of(1), &[0, 1]);

        assert!(PartitionCover::new(3, vec![vec![0, 1]]).is_err()); // missing 2
        assert!(PartitionCover::new(3, vec![vec![0, 1], vec![1, 2]]).is_err()); // overlap
        assert!(PartitionCover::new(3, vec![vec![0, 1, 2], vec![]]).is_err()); // empty block
        assert!(PartitionCover::new(2, vec![vec![0, 5]]).is_err()); // out of range
    }

    #[test]
    fn witness_strategy_signals_block_minima() {
        let p = PartitionCover::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let s = p.witness_strategy();
        assert_eq!(s.map(), &[0, 1, 0, 1]);
        assert_eq!(receiver_dilemma_set(&s), p);
    }

    #[test]
    fn strategy_classification_helpers() {
        assert!(SenderStrategy::identity(3).is_injective());
        assert!(!SenderStrategy::identity(3).is_constant());
        assert!(SenderStrategy::constant(3, 1).unwrap().is_constant());
        assert!(strategy(&[0]).is_injective());
        assert!(strategy(&[0]).is_constant()); // q = 1: both at once

        assert_eq!(SenderStrategy::all(3).count(), 27);
        assert_eq!(ReceiverStrategy::all_total(2).count(), 4);
    }

    #[test]
    fn alphabet_rejects_zero() {
        assert!(Alphabet::new(0).is_err());
        assert_eq!(Alphabet::new(4).unwrap().symbols().count(), 4);
    }
}

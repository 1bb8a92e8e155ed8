//! Mixed (behavioral) sender strategies.
//!
//! A behavioral sender draws its signal from a distribution `pi(y|x)` per
//! source symbol instead of committing to a map. The receiver best-responds
//! by maximizing the number of symbols it recovers *with probability one*:
//! symbol `x` is surely recovered exactly when `sigma(x|y) = 1` on every
//! signal in the support `E_x = {y : pi(y|x) > 0}`, which forces the supports
//! of surely-recovered symbols to be pairwise disjoint. The receiver's best
//! responses are therefore: pick a maximum-cardinality family of symbols with
//! pairwise disjoint supports, decode those supports deterministically, and
//! behave arbitrarily on the remaining used signals.
//!
//! That structure makes the leader's inner minimization exactly computable
//! even though the best-response set is infinite: the expected utility is
//! linear in each per-signal column of `sigma`, so free signals minimize at a
//! deterministic vertex, and the minimum ranges over the finitely many
//! maximum recovery families. [`min_best_response_utility`] implements that
//! reduction; [`grid_search_sup`] sweeps it over every strategy with
//! denominator-`N` rational rows and demonstrates — exactly, with no
//! floating point — that the leader's supremum need not be attained, i.e.
//! that an equilibrium in behavioral strategies can fail to exist.

use std::collections::BTreeMap;
use std::fmt;
use std::thread;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{GameError, Result};
use crate::game::{ReceiverStrategy, SenderStrategy, UtilityMatrix};
use crate::rational::{format_rational, Rat};

/// Largest grid denominator [`grid_search_sup`] accepts. The sweep visits
/// `((N+1)(N+2)/2)^3` strategies; `N = 50` is about `2.3 * 10^9` points and
/// already takes on the order of a minute of integer arithmetic.
pub const MAX_GRID_DENOM: usize = 50;

/// Largest alphabet for which recovery families are searched exhaustively.
pub const MAX_RECOVERY_Q: usize = 20;

/// A behavioral sender strategy: a row-stochastic `q x q` matrix of exact
/// rationals, `pi(y|x)` indexed by source symbol `x` (row) and signal `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehavioralStrategy {
    q: usize,
    rows: Vec<Vec<Rat>>,
}

impl BehavioralStrategy {
    /// Validates that `rows` is square with entries in `[0,1]` and every row
    /// summing to one.
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let q = rows.len();
        if q == 0 {
            return Err(GameError::Dimension(
                "behavioral strategy needs at least one symbol".into(),
            ));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(GameError::Dimension(format!(
                    "row {} has {} entries, expected {}",
                    x,
                    row.len(),
                    q
                )));
            }
            let mut sum = Rat::zero();
            for (y, entry) in row.iter().enumerate() {
                if entry < &Rat::zero() || entry > &Rat::one() {
                    return Err(GameError::Domain(format!(
                        "pi({}|{}) = {} is outside [0, 1]",
                        y,
                        x,
                        format_rational(entry)
                    )));
                }
                sum += entry;
            }
            if sum != Rat::one() {
                return Err(GameError::Domain(format!(
                    "row {} sums to {}, expected 1",
                    x,
                    format_rational(&sum)
                )));
            }
        }
        Ok(BehavioralStrategy { q, rows })
    }

    /// Embeds a deterministic sender strategy as a point-mass kernel.
    pub fn from_deterministic(s: &SenderStrategy) -> Self {
        let q = s.q();
        let rows = (0..q)
            .map(|x| {
                let mut row = vec![Rat::zero(); q];
                row[s.signal(x)] = Rat::one();
                row
            })
            .collect();
        BehavioralStrategy { q, rows }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `pi(y|x)`: the probability that source `x` emits signal `y`.
    pub fn prob(&self, y: usize, x: usize) -> &Rat {
        &self.rows[x][y]
    }

    /// The rows of the kernel, one distribution over signals per source.
    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }
}

impl fmt::Display for BehavioralStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, row) in self.rows.iter().enumerate() {
            if x > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A full-support prior over source symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prior {
    p: Vec<Rat>,
}

impl Prior {
    /// Validates that every entry is strictly positive and the total is one.
    pub fn new(p: Vec<Rat>) -> Result<Self> {
        if p.is_empty() {
            return Err(GameError::Dimension("prior needs at least one symbol".into()));
        }
        let mut sum = Rat::zero();
        for (x, entry) in p.iter().enumerate() {
            if entry <= &Rat::zero() {
                return Err(GameError::Domain(format!(
                    "p({}) = {} must be strictly positive",
                    x,
                    format_rational(entry)
                )));
            }
            sum += entry;
        }
        if sum != Rat::one() {
            return Err(GameError::Domain(format!(
                "prior sums to {}, expected 1",
                format_rational(&sum)
            )));
        }
        Ok(Prior { p })
    }

    /// The uniform prior on `q` symbols.
    pub fn uniform(q: usize) -> Self {
        assert!(q >= 1, "prior needs at least one symbol");
        let cell = Rat::new(BigInt::one(), BigInt::from(q as i64));
        Prior { p: vec![cell; q] }
    }

    pub fn q(&self) -> usize {
        self.p.len()
    }

    pub fn at(&self, x: usize) -> &Rat {
        &self.p[x]
    }

    pub fn values(&self) -> &[Rat] {
        &self.p
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.p.iter().map(format_rational).collect();
        write!(f, "{}", cells.join(" "))
    }
}

/// A behavioral receiver: a column of decode distributions, `sigma(x|y)`
/// indexed by signal `y` (row) and decoded symbol `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverKernel {
    q: usize,
    rows: Vec<Vec<Rat>>,
}

impl ReceiverKernel {
    /// Validates that `rows` is square with each per-signal row a
    /// distribution over decoded symbols.
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let q = rows.len();
        if q == 0 {
            return Err(GameError::Dimension(
                "receiver kernel needs at least one signal".into(),
            ));
        }
        for (y, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(GameError::Dimension(format!(
                    "signal {} has {} entries, expected {}",
                    y,
                    row.len(),
                    q
                )));
            }
            let mut sum = Rat::zero();
            for (x, entry) in row.iter().enumerate() {
                if entry < &Rat::zero() || entry > &Rat::one() {
                    return Err(GameError::Domain(format!(
                        "sigma({}|{}) = {} is outside [0, 1]",
                        x,
                        y,
                        format_rational(entry)
                    )));
                }
                sum += entry;
            }
            if sum != Rat::one() {
                return Err(GameError::Domain(format!(
                    "signal {} decodes with total mass {}, expected 1",
                    y,
                    format_rational(&sum)
                )));
            }
        }
        Ok(ReceiverKernel { q, rows })
    }

    /// The kernel that decodes every signal to the same symbol.
    pub fn constant(q: usize, symbol: usize) -> Result<Self> {
        if symbol >= q {
            return Err(GameError::Domain(format!(
                "decoded symbol {} out of range for q = {}",
                symbol, q
            )));
        }
        let mut row = vec![Rat::zero(); q];
        row[symbol] = Rat::one();
        Ok(ReceiverKernel { q, rows: vec![row; q] })
    }

    /// Embeds a deterministic receiver strategy. Signals the strategy leaves
    /// undecoded get a point mass on symbol 0; they only matter off the
    /// sender's used signals, where the expected utility ignores them.
    pub fn from_strategy(g: &ReceiverStrategy) -> Self {
        let q = g.q();
        let rows = (0..q)
            .map(|y| {
                let mut row = vec![Rat::zero(); q];
                row[g.decode(y).unwrap_or(0)] = Rat::one();
                row
            })
            .collect();
        ReceiverKernel { q, rows }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `sigma(x|y)`: the probability of decoding signal `y` as symbol `x`.
    pub fn prob(&self, x: usize, y: usize) -> &Rat {
        &self.rows[y][x]
    }
}

/// The supports of a behavioral strategy: which signals each source symbol
/// can emit, and which signals are used at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    q: usize,
    supports: Vec<Vec<usize>>,
    used: Vec<usize>,
}

impl SupportProfile {
    pub fn q(&self) -> usize {
        self.q
    }

    /// `E_x`: the signals emitted by source `x` with positive probability.
    pub fn support(&self, x: usize) -> &[usize] {
        &self.supports[x]
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    /// The used signals `Y(pi)`, the union of all supports, ascending.
    pub fn used(&self) -> &[usize] {
        &self.used
    }
}

/// Computes the support profile of `pi`.
pub fn supports(pi: &BehavioralStrategy) -> SupportProfile {
    let q = pi.q();
    let supports: Vec<Vec<usize>> = (0..q)
        .map(|x| (0..q).filter(|&y| pi.prob(y, x) > &Rat::zero()).collect())
        .collect();
    let used: Vec<usize> = (0..q)
        .filter(|&y| supports.iter().any(|e| e.binary_search(&y).is_ok()))
        .collect();
    SupportProfile { q, supports, used }
}

/// Finds every maximum-cardinality set of symbols with pairwise disjoint
/// supports — exactly the sets a best-responding receiver can recover with
/// probability one. Returns the common size and all maximizers in
/// lexicographic order. The search is an exhaustive subset scan, so the
/// alphabet is capped at [`MAX_RECOVERY_Q`].
pub fn max_recovery_sets(pi: &BehavioralStrategy) -> (usize, Vec<Vec<usize>>) {
    let q = pi.q();
    assert!(
        q <= MAX_RECOVERY_Q,
        "recovery search is exhaustive and supports q <= {MAX_RECOVERY_Q}"
    );
    let prof = supports(pi);
    let masks: Vec<u64> = prof
        .supports()
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &y| m | (1 << y)))
        .collect();

    // Include-first depth-first search in ascending symbol order emits the
    // candidate sets in lexicographic order, so no sorting is needed.
    fn dfs(
        sym: usize,
        used: u64,
        masks: &[u64],
        chosen: &mut Vec<usize>,
        best: &mut usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if sym == masks.len() {
            if chosen.len() > *best {
                *best = chosen.len();
                out.clear();
            }
            if chosen.len() == *best {
                out.push(chosen.clone());
            }
            return;
        }
        if masks[sym] & used == 0 {
            chosen.push(sym);
            dfs(sym + 1, used | masks[sym], masks, chosen, best, out);
            chosen.pop();
        }
        dfs(sym + 1, used, masks, chosen, best, out);
    }

    let mut best = 0;
    let mut out = Vec::new();
    dfs(0, 0, &masks, &mut Vec::new(), &mut best, &mut out);
    debug_assert!(best >= 1, "a single symbol is always recoverable");
    (best, out)
}

fn check_dims(pi: &BehavioralStrategy, p: &Prior, u: &UtilityMatrix) -> Result<usize> {
    let q = pi.q();
    if p.q() != q || u.q() != q {
        return Err(GameError::Dimension(format!(
            "mismatched sizes: strategy q = {}, prior q = {}, utility q = {}",
            q,
            p.q(),
            u.q()
        )));
    }
    Ok(q)
}

/// The sender's expected utility
/// `sum_x sum_y sum_x' p(x) pi(y|x) sigma(x'|y) U(x', x)`, exactly.
///
/// Signals outside `Y(pi)` carry zero sender mass, so whatever `sigma` does
/// there never contributes.
pub fn expected_utility(
    pi: &BehavioralStrategy,
    sigma: &ReceiverKernel,
    p: &Prior,
    u: &UtilityMatrix,
) -> Result<Rat> {
    let q = check_dims(pi, p, u)?;
    if sigma.q() != q {
        return Err(GameError::Dimension(format!(
            "mismatched sizes: strategy q = {}, receiver kernel q = {}",
            q,
            sigma.q()
        )));
    }
    let mut total = Rat::zero();
    for x in 0..q {
        for y in 0..q {
            let mass = p.at(x) * pi.prob(y, x);
            if mass.is_zero() {
                continue;
            }
            for xh in 0..q {
                let weight = sigma.prob(xh, y);
                if weight.is_zero() {
                    continue;
                }
                total += &mass * weight * u.at(xh, x);
            }
        }
    }
    Ok(total)
}

/// `S(y, x')`: the contribution of decoding signal `y` as `x'`, namely
/// `sum_x p(x) pi(y|x) U(x', x)`. The expected utility is the sum of one
/// such term per used signal, which is what makes per-signal minimization
/// sound.
fn signal_scores(pi: &BehavioralStrategy, p: &Prior, u: &UtilityMatrix) -> Vec<Vec<Rat>> {
    let q = pi.q();
    (0..q)
        .map(|y| {
            (0..q)
                .map(|xh| {
                    let mut s = Rat::zero();
                    for x in 0..q {
                        let mass = p.at(x) * pi.prob(y, x);
                        if !mass.is_zero() {
                            s += mass * u.at(xh, x);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Minimizes the sender's expected utility over the receiver's best
/// responses, exactly.
///
/// Every best response surely recovers some maximum recovery family `D`:
/// it decodes each support of `D` deterministically and is unconstrained on
/// the remaining used signals. Expected utility is linear in each free
/// per-signal column, so a worst free column is a vertex — decode the signal
/// to a symbol minimizing its score. The minimum therefore ranges over the
/// finitely many families `D`, each completed by per-signal minimization.
///
/// Returns the value together with a deterministic witness defined exactly
/// on the used signals. Ties break to the lexicographically first family and
/// the smallest decoded symbol, so the witness is reproducible.
pub fn min_best_response_utility(
    pi: &BehavioralStrategy,
    p: &Prior,
    u: &UtilityMatrix,
) -> Result<(Rat, ReceiverStrategy)> {
    let q = check_dims(pi, p, u)?;
    let prof = supports(pi);
    let (_, families) = max_recovery_sets(pi);
    let scores = signal_scores(pi, p, u);

    let mut best: Option<(Rat, BTreeMap<usize, usize>)> = None;
    for family in &families {
        let mut decode = BTreeMap::new();
        for &x in family {
            for &y in prof.support(x) {
                decode.insert(y, x);
            }
        }
        let mut total = Rat::zero();
        for &y in prof.used() {
            match decode.get(&y) {
                Some(&xh) => total += &scores[y][xh],
                None => {
                    let mut pick = 0;
                    for xh in 1..q {
                        if scores[y][xh] < scores[y][pick] {
                            pick = xh;
                        }
                    }
                    decode.insert(y, pick);
                    total += &scores[y][pick];
                }
            }
        }
        if best.as_ref().is_none_or(|(v, _)| &total < v) {
            best = Some((total, decode));
        }
    }
    let (value, decode) = best.expect("at least one recovery family exists");
    Ok((value, ReceiverStrategy::new(q, decode)?))
}

/// Everything the recovery structure of a behavioral strategy determines:
/// supports, the maximum number of surely-recoverable symbols, every family
/// attaining it, and the exact minimum over receiver best responses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryAnalysis {
    pub supports: SupportProfile,
    pub max_recovery_size: usize,
    pub recovery_sets: Vec<Vec<usize>>,
    pub min_br_utility: Rat,
    pub witness_sigma: ReceiverStrategy,
}

/// Bundles [`supports`], [`max_recovery_sets`] and
/// [`min_best_response_utility`] into one report.
pub fn recovery_analysis(
    pi: &BehavioralStrategy,
    p: &Prior,
    u: &UtilityMatrix,
) -> Result<RecoveryAnalysis> {
    check_dims(pi, p, u)?;
    let prof = supports(pi);
    let (size, sets) = max_recovery_sets(pi);
    let (value, witness) = min_best_response_utility(pi, p, u)?;
    Ok(RecoveryAnalysis {
        supports: prof,
        max_recovery_size: size,
        recovery_sets: sets,
        min_br_utility: value,
        witness_sigma: witness,
    })
}

/// The support-shape taxonomy of three-symbol behavioral strategies, keyed
/// by how many symbols a best-responding receiver surely recovers and by the
/// shapes of the supports.
///
/// With `i` the symbol common to both recovery families (class `C.(a)`) or
/// `i, j` the unique family and `k` the excluded symbol (class `C.(b)`):
///
/// * `A` — three disjoint supports; everything is surely recovered.
/// * `B` — only one symbol is surely recoverable.
/// * `C.(a)-i` — two used signals; `E_i` alone, the other two share.
/// * `C.(a)-ii` — three used signals; `E_i` is a pair, the others share the
///   remaining signal.
/// * `C.(a)-iii-1` — three used signals; `E_i` a singleton, the other
///   supports have sizes 1 and 2.
/// * `C.(a)-iii-2` — as above with sizes 2 and 2.
/// * `C.(b)-i` — two used signals; `E_i`, `E_j` singletons, `E_k` covers
///   both.
/// * `C.(b)-ii-1` — three used signals; `E_i`, `E_j` singletons, `E_k`
///   covers all three.
/// * `C.(b)-ii-2-alpha` — three used signals; sizes of `E_i`, `E_j` are 1
///   and 2 and `|E_k| = 2`.
/// * `C.(b)-ii-2-beta` — as above with `|E_k| = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiClass {
    A,
    B,
    CaI,
    CaII,
    CaIII1,
    CaIII2,
    CbI,
    CbII1,
    CbII2Alpha,
    CbII2Beta,
}

impl PiClass {
    /// True for every `C.(a)` subcase.
    pub fn is_ca(&self) -> bool {
        matches!(self, PiClass::CaI | PiClass::CaII | PiClass::CaIII1 | PiClass::CaIII2)
    }

    /// True for every `C.(b)` subcase.
    pub fn is_cb(&self) -> bool {
        matches!(
            self,
            PiClass::CbI | PiClass::CbII1 | PiClass::CbII2Alpha | PiClass::CbII2Beta
        )
    }
}

impl fmt::Display for PiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            PiClass::A => "A",
            PiClass::B => "B",
            PiClass::CaI => "C.(a)-i",
            PiClass::CaII => "C.(a)-ii",
            PiClass::CaIII1 => "C.(a)-iii-1",
            PiClass::CaIII2 => "C.(a)-iii-2",
            PiClass::CbI => "C.(b)-i",
            PiClass::CbII1 => "C.(b)-ii-1",
            PiClass::CbII2Alpha => "C.(b)-ii-2-alpha",
            PiClass::CbII2Beta => "C.(b)-ii-2-beta",
        };
        write!(f, "{label}")
    }
}

/// The maximum recovery-family size over three support masks and every
/// family (as a symbol bitmask, ascending) attaining it.
fn mask_families(masks: [u16; 3]) -> (u32, Vec<u16>) {
    let disjoint = |family: u16| -> bool {
        let mut union = 0u16;
        let mut count = 0;
        for (x, &mask) in masks.iter().enumerate() {
            if family & (1 << x) != 0 {
                union |= mask;
                count += mask.count_ones();
            }
        }
        union.count_ones() == count
    };
    let best = (1u16..8)
        .filter(|&fam| disjoint(fam))
        .map(|fam| fam.count_ones())
        .max()
        .expect("singleton families are always disjoint");
    let families = (1u16..8)
        .filter(|&fam| fam.count_ones() == best && disjoint(fam))
        .collect();
    (best, families)
}

/// The taxonomy depends only on which signals each source can emit, so it
/// is computable from the three support masks alone.
fn classify_masks(masks: [u16; 3]) -> PiClass {
    let (size, families) = mask_families(masks);
    let used = (masks[0] | masks[1] | masks[2]).count_ones();
    let support_size = |x: usize| masks[x].count_ones();
    match size {
        3 => PiClass::A,
        1 => PiClass::B,
        2 => {
            if families.len() == 2 {
                // Two recovery pairs always share exactly one symbol.
                let common = (families[0] & families[1]).trailing_zeros() as usize;
                let mut other_sizes: Vec<u32> = (0..3)
                    .filter(|&x| x != common)
                    .map(support_size)
                    .collect();
                other_sizes.sort_unstable();
                if used == 2 {
                    PiClass::CaI
                } else if support_size(common) == 2 {
                    PiClass::CaII
                } else {
                    match (other_sizes[0], other_sizes[1]) {
                        (1, 2) => PiClass::CaIII1,
                        (2, 2) => PiClass::CaIII2,
                        shape => unreachable!(
                            "impossible shared-support shape {:?} with three used signals",
                            shape
                        ),
                    }
                }
            } else {
                debug_assert_eq!(families.len(), 1, "three disjoint pairs would give size 3");
                let excluded = (0..3)
                    .find(|&x| families[0] & (1 << x) == 0)
                    .expect("a recovery pair excludes one symbol");
                let mut in_sizes: Vec<u32> = (0..3)
                    .filter(|&x| x != excluded)
                    .map(support_size)
                    .collect();
                in_sizes.sort_unstable();
                if used == 2 {
                    PiClass::CbI
                } else {
                    match (in_sizes[0], in_sizes[1]) {
                        (1, 1) => PiClass::CbII1,
                        (1, 2) => {
                            if support_size(excluded) == 2 {
                                PiClass::CbII2Alpha
                            } else {
                                PiClass::CbII2Beta
                            }
                        }
                        shape => unreachable!(
                            "impossible recovered-support shape {:?} with three used signals",
                            shape
                        ),
                    }
                }
            }
        }
        other => unreachable!("recovery size {} out of range for q = 3", other),
    }
}

/// Classifies a three-symbol behavioral strategy by its recovery structure.
/// The taxonomy is specific to `q = 3`; other sizes are rejected.
pub fn classify_pi(pi: &BehavioralStrategy) -> Result<PiClass> {
    if pi.q() != 3 {
        return Err(GameError::Domain(format!(
            "the support-shape taxonomy is defined for q = 3, got q = {}",
            pi.q()
        )));
    }
    let prof = supports(pi);
    let mut masks = [0u16; 3];
    for x in 0..3 {
        masks[x] = prof.support(x).iter().fold(0, |m, &y| m | (1 << y));
    }
    Ok(classify_masks(masks))
}

/// All ten class labels in display order.
pub const PI_CLASSES: [PiClass; 10] = [
    PiClass::A,
    PiClass::B,
    PiClass::CaI,
    PiClass::CaII,
    PiClass::CaIII1,
    PiClass::CaIII2,
    PiClass::CbI,
    PiClass::CbII1,
    PiClass::CbII2Alpha,
    PiClass::CbII2Beta,
];

/// How many strategies of the denominator-`n` grid fall into each class.
///
/// The class of a grid point depends only on its three support masks, so
/// the histogram reduces to counting compositions per mask — exact in
/// microseconds even where the full sweep visits billions of points.
pub fn grid_class_histogram(n: usize) -> Result<Vec<(PiClass, u64)>> {
    if n == 0 {
        return Err(GameError::Domain("grid denominator must be positive".into()));
    }
    let mut mask_counts = [0u64; 8];
    for comp in compositions(n) {
        let mask = (0..3)
            .filter(|&y| comp[y] > 0)
            .fold(0usize, |m, y| m | (1 << y));
        mask_counts[mask] += 1;
    }
    let index_of = |class: PiClass| PI_CLASSES.iter().position(|c| *c == class).unwrap();
    let mut histogram = vec![0u64; PI_CLASSES.len()];
    for m0 in 1..8usize {
        for m1 in 1..8usize {
            for m2 in 1..8usize {
                let points = mask_counts[m0] * mask_counts[m1] * mask_counts[m2];
                if points > 0 {
                    let class = classify_masks([m0 as u16, m1 as u16, m2 as u16]);
                    histogram[index_of(class)] += points;
                }
            }
        }
    }
    Ok(PI_CLASSES.iter().copied().zip(histogram).collect())
}

/// The outcome of an exact sweep over all behavioral strategies on a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSearchOutcome {
    /// The largest min-over-best-responses value on the grid.
    pub max_value: Rat,
    /// The first grid point attaining it, in enumeration order.
    pub argmax: BehavioralStrategy,
    /// A deterministic receiver witnessing `max_value` at the argmax.
    pub witness_sigma: ReceiverStrategy,
    /// The value the witness functional reaches when every sender row moves
    /// all its mass to its best supported signal — the limit of the argmax's
    /// family. Always `>= max_value`; equality means the grid maximum is a
    /// true local ceiling rather than the edge of an open family.
    pub sup_estimate: Rat,
    /// Whether `max_value == sup_estimate`.
    pub attained: bool,
    /// Number of grid points evaluated.
    pub points: u64,
}

/// Moves each source row of `pi` to the single supported signal whose
/// decoded utility under `sigma` is largest (ties to the smallest signal).
/// This is the limit point of the family containing `pi` in the direction
/// that the witness functional increases; comparing its exact value with
/// the family's shows whether a maximum survives at the boundary.
pub fn family_limit(
    pi: &BehavioralStrategy,
    sigma: &ReceiverStrategy,
    u: &UtilityMatrix,
) -> BehavioralStrategy {
    let q = pi.q();
    let prof = supports(pi);
    let rows = (0..q)
        .map(|x| {
            let mut pick = prof.support(x)[0];
            for &y in &prof.support(x)[1..] {
                let decoded = sigma.decode(y).expect("witness covers used signals");
                let current = sigma.decode(pick).expect("witness covers used signals");
                if u.at(decoded, x) > u.at(current, x) {
                    pick = y;
                }
            }
            let mut row = vec![Rat::zero(); q];
            row[pick] = Rat::one();
            row
        })
        .collect();
    BehavioralStrategy { q, rows }
}

fn finish_grid(
    u: &UtilityMatrix,
    p: &Prior,
    argmax: BehavioralStrategy,
    max_value: Rat,
    points: u64,
) -> Result<GridSearchOutcome> {
    let (check, witness) = min_best_response_utility(&argmax, p, u)?;
    assert_eq!(
        check, max_value,
        "grid engine disagrees with the exact evaluator at the argmax"
    );
    let limit = family_limit(&argmax, &witness, u);
    let sup_estimate = expected_utility(&limit, &ReceiverKernel::from_strategy(&witness), p, u)?;
    assert!(
        sup_estimate >= max_value,
        "snapping along the witness can only increase the witness functional"
    );
    let attained = sup_estimate == max_value;
    Ok(GridSearchOutcome {
        max_value,
        argmax,
        witness_sigma: witness,
        sup_estimate,
        attained,
        points,
    })
}

/// All ways to split `n` into three ordered non-negative parts, first part
/// descending. The first composition is `[n, 0, 0]`, so the first grid point
/// is the strategy pooling everything on signal 0.
fn compositions(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for k0 in (0..=n).rev() {
        for k1 in (0..=n - k0).rev() {
            out.push([k0, k1, n - k0 - k1]);
        }
    }
    out
}

fn composition_row(comp: &[usize; 3], n: usize) -> Vec<Rat> {
    comp.iter()
        .map(|&k| Rat::new(BigInt::from(k as i64), BigInt::from(n as i64)))
        .collect()
}

fn grid_point(comps: &[[usize; 3]], n: usize, index: u64) -> BehavioralStrategy {
    let m = comps.len() as u64;
    let r0 = (index / (m * m)) as usize;
    let r1 = ((index / m) % m) as usize;
    let r2 = (index % m) as usize;
    let rows = vec![
        composition_row(&comps[r0], n),
        composition_row(&comps[r1], n),
        composition_row(&comps[r2], n),
    ];
    BehavioralStrategy { q: 3, rows }
}

fn validate_grid_args(u: &UtilityMatrix, p: &Prior, n: usize) -> Result<()> {
    if u.q() != 3 {
        return Err(GameError::Domain(format!(
            "grid search is defined for q = 3, got q = {}",
            u.q()
        )));
    }
    if p.q() != u.q() {
        return Err(GameError::Dimension(format!(
            "mismatched sizes: prior q = {}, utility q = {}",
            p.q(),
            u.q()
        )));
    }
    if n == 0 {
        return Err(GameError::Domain("grid denominator must be positive".into()));
    }
    if n > MAX_GRID_DENOM {
        return Err(GameError::SizeLimit(format!(
            "grid denominator {} exceeds the budget of {}",
            n, MAX_GRID_DENOM
        )));
    }
    Ok(())
}

/// Integer weights `w[x'][x] = p(x) * U(x', x)` scaled by the least common
/// denominator, plus that denominator. Everything downstream is plain `i64`
/// arithmetic; the bound check keeps every partial sum far from overflow.
fn scaled_weights(u: &UtilityMatrix, p: &Prior, n: usize) -> Result<([[i64; 3]; 3], i64)> {
    let mut weights = Vec::new();
    let mut denom = BigInt::one();
    for xh in 0..3 {
        for x in 0..3 {
            let w = p.at(x) * u.at(xh, x);
            denom = denom.lcm(w.denom());
            weights.push(w);
        }
    }
    let too_large =
        || GameError::SizeLimit("utility or prior magnitudes too large for the grid engine".into());
    let scale: i64 = denom.clone().try_into().map_err(|_| too_large())?;
    let mut wnum = [[0i64; 3]; 3];
    let mut max_abs: i64 = 0;
    for xh in 0..3 {
        for x in 0..3 {
            let scaled = (&weights[xh * 3 + x] * &denom).to_integer();
            let value: i64 = scaled.try_into().map_err(|_| too_large())?;
            wnum[xh][x] = value;
            max_abs = max_abs.max(value.abs());
        }
    }
    // A grid-point score sums at most nine table entries of magnitude
    // n * max_abs each.
    if max_abs > i64::MAX / (64 * n.max(1) as i64) {
        return Err(too_large());
    }
    Ok((wnum, scale))
}

/// One receiver best response family at a fixed support-shape key:
/// the signal decodings it pins plus the signals it leaves free.
struct Plan {
    /// Indices `y * 3 + x` into the per-point score table.
    pinned: Vec<u8>,
    /// Free used signals, minimized over the decoded symbol.
    free: Vec<u8>,
}

/// Precomputed best-response plans for each of the `8^3` combinations of
/// per-row support masks. A key is `m0 | m1 << 3 | m2 << 6`.
fn build_plans() -> Vec<Vec<Plan>> {
    let mut lut: Vec<Vec<Plan>> = (0..512).map(|_| Vec::new()).collect();
    for m0 in 1u16..8 {
        for m1 in 1u16..8 {
            for m2 in 1u16..8 {
                let masks = [m0, m1, m2];
                let used = m0 | m1 | m2;
                let (_, families) = mask_families(masks);
                let mut plans = Vec::new();
                for family in families {
                    let mut pinned = Vec::new();
                    let mut covered = 0u16;
                    for x in 0..3 {
                        if family & (1 << x) != 0 {
                            for y in 0..3 {
                                if masks[x] & (1 << y) != 0 {
                                    pinned.push((y * 3 + x) as u8);
                                }
                            }
                            covered |= masks[x];
                        }
                    }
                    let free = (0..3)
                        .filter(|&y| used & (1 << y) != 0 && covered & (1 << y) == 0)
                        .map(|y| y as u8)
                        .collect();
                    plans.push(Plan { pinned, free });
                }
                lut[(m0 | m1 << 3 | m2 << 6) as usize] = plans;
            }
        }
    }
    lut
}

#[inline]
fn eval_point(scores: &[i64; 9], plans: &[Plan]) -> i64 {
    debug_assert!(!plans.is_empty(), "every reachable key has a plan");
    let mut best = i64::MAX;
    for plan in plans {
        let mut v = 0i64;
        for &idx in &plan.pinned {
            v += scores[idx as usize];
        }
        for &y in &plan.free {
            let base = y as usize * 3;
            v += scores[base].min(scores[base + 1]).min(scores[base + 2]);
        }
        best = best.min(v);
    }
    best
}

/// Contribution tables: `tables[x][r][y*3 + x']` is what source `x` playing
/// composition `r` adds to the score of decoding signal `y` as `x'`.
fn contribution_tables(comps: &[[usize; 3]], wnum: &[[i64; 3]; 3]) -> [Vec<[i64; 9]>; 3] {
    let build = |x: usize| -> Vec<[i64; 9]> {
        comps
            .iter()
            .map(|comp| {
                let mut t = [0i64; 9];
                for y in 0..3 {
                    let k = comp[y] as i64;
                    if k != 0 {
                        for (xh, w) in wnum.iter().enumerate() {
                            t[y * 3 + xh] = k * w[x];
                        }
                    }
                }
                t
            })
            .collect()
    };
    [build(0), build(1), build(2)]
}

fn support_masks(comps: &[[usize; 3]]) -> Vec<u16> {
    comps
        .iter()
        .map(|comp| {
            (0..3)
                .filter(|&y| comp[y] > 0)
                .fold(0u16, |m, y| m | (1 << y))
        })
        .collect()
}

/// Scans the grid points whose first-row composition index lies in
/// `r0_range`, returning the best scaled value and the smallest linear index
/// attaining it.
#[allow(clippy::too_many_arguments)]
fn scan_chunk(
    r0_range: std::ops::Range<usize>,
    tables: &[Vec<[i64; 9]>; 3],
    masks: &[u16],
    plans: &[Vec<Plan>],
) -> Option<(i64, u64)> {
    let m = masks.len();
    let mut best: Option<(i64, u64)> = None;
    for r0 in r0_range {
        let t0 = &tables[0][r0];
        let key0 = masks[r0];
        for r1 in 0..m {
            let t1 = &tables[1][r1];
            let mut t01 = [0i64; 9];
            for i in 0..9 {
                t01[i] = t0[i] + t1[i];
            }
            let key01 = (key0 | masks[r1] << 3) as usize;
            let base = ((r0 * m + r1) * m) as u64;
            for r2 in 0..m {
                let t2 = &tables[2][r2];
                let mut scores = [0i64; 9];
                for i in 0..9 {
                    scores[i] = t01[i] + t2[i];
                }
                let value = eval_point(&scores, &plans[key01 | (masks[r2] as usize) << 6]);
                if best.as_ref().is_none_or(|&(v, _)| value > v) {
                    best = Some((value, base + r2 as u64));
                }
            }
        }
    }
    best
}

fn grid_search_threaded(
    u: &UtilityMatrix,
    p: &Prior,
    n: usize,
    threads: usize,
) -> Result<GridSearchOutcome> {
    validate_grid_args(u, p, n)?;
    let (wnum, scale) = scaled_weights(u, p, n)?;
    let comps = compositions(n);
    let m = comps.len();
    let tables = contribution_tables(&comps, &wnum);
    let masks = support_masks(&comps);
    let plans = build_plans();

    let threads = threads.clamp(1, m);
    let best = if threads == 1 {
        scan_chunk(0..m, &tables, &masks, &plans)
    } else {
        // Contiguous chunks of the outer row; merging prefers the larger
        // value and then the smaller linear index, which reproduces the
        // sequential first-found argmax at any thread count.
        let chunk = m.div_ceil(threads);
        let results: Vec<Option<(i64, u64)>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(m);
                    let tables = &tables;
                    let masks = &masks;
                    let plans = &plans;
                    scope.spawn(move || scan_chunk(lo..hi, tables, masks, plans))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        results.into_iter().flatten().fold(None, |acc, item| {
            match acc {
                None => Some(item),
                Some(prev) => {
                    if item.0 > prev.0 || (item.0 == prev.0 && item.1 < prev.1) {
                        Some(item)
                    } else {
                        Some(prev)
                    }
                }
            }
        })
    };

    let (scaled, index) = best.expect("the grid is never empty");
    let argmax = grid_point(&comps, n, index);
    let max_value = Rat::new(
        BigInt::from(scaled),
        BigInt::from(n as i64) * BigInt::from(scale),
    );
    finish_grid(u, p, argmax, max_value, (m as u64).pow(3))
}

/// Sweeps every behavioral strategy whose rows are multiples of `1/n` and
/// maximizes [`min_best_response_utility`], exactly.
///
/// Returns the maximum, the first grid point attaining it (rows are
/// enumerated with signal-0-heavy compositions first, so the very first
/// point pools everything on signal 0), a witness receiver, and the
/// `sup_estimate` reached by letting the argmax's family run to its limit.
/// When the estimate strictly exceeds the maximum, the grid shows an
/// unattained supremum: no strategy on the grid — and, when the gap persists
/// as `n` grows, no strategy at all — achieves the leader's least upper
/// bound, i.e. an equilibrium need not exist.
pub fn grid_search_sup(u: &UtilityMatrix, p: &Prior, n: usize) -> Result<GridSearchOutcome> {
    let threads = thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1)
        .min(8);
    grid_search_threaded(u, p, n, threads)
}

/// Like [`grid_search_sup`] but evaluates each point with the exact
/// rational evaluator and hands `(pi, value)` to `observer` in enumeration
/// order. Independent of the integer engine, so it doubles as a
/// cross-check; intended for streaming or small `n`.
pub fn grid_search_scan<F>(
    u: &UtilityMatrix,
    p: &Prior,
    n: usize,
    mut observer: F,
) -> Result<GridSearchOutcome>
where
    F: FnMut(&BehavioralStrategy, &Rat),
{
    validate_grid_args(u, p, n)?;
    let comps = compositions(n);
    let m = comps.len() as u64;
    let mut best: Option<(Rat, u64)> = None;
    for index in 0..m * m * m {
        let pi = grid_point(&comps, n, index);
        let (value, _) = min_best_response_utility(&pi, p, u)?;
        observer(&pi, &value);
        if best.as_ref().is_none_or(|(v, _)| &value > v) {
            best = Some((value, index));
        }
    }
    let (max_value, index) = best.expect("the grid is never empty");
    let argmax = grid_point(&comps, n, index);
    finish_grid(u, p, argmax, max_value, m * m * m)
}

/// The full nonexistence demonstration for the skew three-symbol family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonexistenceReport {
    pub grid: GridSearchOutcome,
    /// Taxonomy class of the grid argmax.
    pub argmax_class: PiClass,
    /// The limit point of the argmax's family.
    pub limit_point: BehavioralStrategy,
    /// The class the limit point falls into — different from the argmax's,
    /// which is exactly why the supremum is not attained.
    pub limit_class: PiClass,
    /// Exact min-over-best-responses at the limit point; it collapses below
    /// the supremum the family approaches.
    pub limit_value: Rat,
    /// True when the grid maximum sits strictly below the family limit.
    pub supremum_unattained: bool,
}

/// Runs the grid search on a skew utility and uniform prior and exhibits the
/// discontinuity at the limit of the maximizing family: the grid maximum
/// increases with `n` toward the value of the open family's endpoint, yet
/// the endpoint itself collapses to a strictly smaller value. For the
/// three-symbol skew matrix this is the exact, machine-checked form of
/// "no equilibrium exists".
///
/// Preconditions (all checked): `q = 3`; uniform prior; `U(x, y) = -U(y, x)`
/// everywhere; for distinct `x, y, z`, `U(x, y) = -U(x, z)`; off-diagonal
/// entries nonzero; and `n >= 3`, the first denominator whose maximizer
/// leaves class `B`.
pub fn nonexistence_demo(u: &UtilityMatrix, p: &Prior, n: usize) -> Result<NonexistenceReport> {
    if u.q() != 3 {
        return Err(GameError::Domain(format!(
            "the nonexistence demonstration is defined for q = 3, got q = {}",
            u.q()
        )));
    }
    if p.q() != u.q() {
        return Err(GameError::Dimension(format!(
            "mismatched sizes: prior q = {}, utility q = {}",
            p.q(),
            u.q()
        )));
    }
    let uniform = Prior::uniform(3);
    if p != &uniform {
        return Err(GameError::Domain(
            "the nonexistence demonstration requires the uniform prior".into(),
        ));
    }
    for x in 0..3 {
        for y in 0..3 {
            if u.at(x, y) != &(-u.at(y, x)) {
                return Err(GameError::Domain(format!(
                    "demonstration requires U({x},{y}) = -U({y},{x})"
                )));
            }
            if x != y && u.at(x, y).is_zero() {
                return Err(GameError::Domain(format!(
                    "demonstration requires U({x},{y}) != 0 off the diagonal"
                )));
            }
        }
        let others: Vec<usize> = (0..3).filter(|&y| y != x).collect();
        if u.at(x, others[0]) != &(-u.at(x, others[1])) {
            return Err(GameError::Domain(format!(
                "demonstration requires U({x},{}) = -U({x},{})",
                others[0], others[1]
            )));
        }
    }
    if n < 3 {
        return Err(GameError::Domain(
            "grid denominator must be at least 3 to separate the maximum from its limit".into(),
        ));
    }

    let grid = grid_search_sup(u, p, n)?;
    let argmax_class = classify_pi(&grid.argmax)?;
    let limit_point = family_limit(&grid.argmax, &grid.witness_sigma, u);
    let limit_class = classify_pi(&limit_point)?;
    let (limit_value, _) = min_best_response_utility(&limit_point, p, u)?;
    let supremum_unattained = grid.max_value < grid.sup_estimate;
    Ok(NonexistenceReport {
        grid,
        argmax_class,
        limit_point,
        limit_class,
        limit_value,
        supremum_unattained,
    })
}

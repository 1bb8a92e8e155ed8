//! Exact clique machinery on small graphs.
//!
//! Everything the equilibrium theory needs from a sender graph is clique
//! combinatorics: maximal cliques (packing constraints), the independence
//! number `α` (extraction capacity), and the minimum vertex clique cover
//! `θ_v` (informativeness). All three problems are NP-hard, and all the
//! claims downstream are exact equalities, so the solvers here are exact
//! exponential algorithms with explicit size limits instead of heuristics:
//!
//! * maximal cliques — recursive enumeration with pivoting,
//! * `α` — branch-and-bound with a greedy lower bound and a greedy
//!   clique-cover upper bound,
//! * `θ_v` — dynamic programming over vertex subsets (cross-checkable as the
//!   chromatic number of the complement).
//!
//! Optimal witnesses are tie-broken to the lexicographically smallest
//! canonical form.

use crate::error::{GameError, Result};
use crate::game::PartitionCover;
use crate::graphs::SenderGraph;

/// Vertex limit for clique enumeration and independence number.
pub const MAX_CLIQUE_ENUM_Q: usize = 20;
/// Vertex limit for the subset-DP clique cover (2^q table).
pub const MAX_COVER_Q: usize = 16;
/// Vertex limit for exhaustive enumeration of all minimum covers.
pub const MAX_ALL_COVERS_Q: usize = 12;

/// A list of cliques of some target graph, each stored as a sorted vertex
/// list; the list itself is kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSet {
    cliques: Vec<Vec<usize>>,
}

impl CliqueSet {
    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<usize>> {
        self.cliques.iter()
    }

    pub fn into_inner(self) -> Vec<Vec<usize>> {
        self.cliques
    }
}

fn check_limit(what: &str, q: usize, limit: usize) -> Result<()> {
    if q > limit {
        return Err(GameError::SizeLimit(format!("{what} supports q ≤ {limit}, got {q}")));
    }
    Ok(())
}

fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        out.push(v);
        mask &= mask - 1;
    }
    out
}

/// All inclusion-maximal cliques, in lexicographic order of their sorted
/// vertex lists. Singleton cliques appear for isolated vertices.
pub fn enumerate_maximal_cliques(g: &SenderGraph) -> Result<CliqueSet> {
    check_limit("maximal clique enumeration", g.q(), MAX_CLIQUE_ENUM_Q)?;
    let adj = g.bitset_rows()?;
    let mut found: Vec<u64> = Vec::new();
    let full = if g.q() == 64 { u64::MAX } else { (1u64 << g.q()) - 1 };
    bron_kerbosch(&adj, 0, full, 0, &mut found);
    let mut cliques: Vec<Vec<usize>> = found.into_iter().map(mask_to_vec).collect();
    cliques.sort();
    Ok(CliqueSet { cliques })
}

/// Bron–Kerbosch with a max-degree pivot: reports every maximal clique
/// exactly once.
fn bron_kerbosch(adj: &[u64], r: u64, p: u64, x: u64, out: &mut Vec<u64>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    // Pivot on the vertex of p ∪ x covering the most of p: only non-neighbors
    // of the pivot need to be branched on.
    let mut pivot = usize::MAX;
    let mut pivot_cover = u32::MAX; // count of p-vertices NOT covered
    let mut scan = p | x;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let uncovered = (p & !adj[u]).count_ones();
        if uncovered < pivot_cover {
            pivot_cover = uncovered;
            pivot = u;
        }
    }
    let mut candidates = p & !adj[pivot];
    let mut p = p;
    let mut x = x;
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        candidates &= candidates - 1;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}

/// Every non-empty clique (not only maximal ones), in lexicographic order.
/// This is the variable set of the covering program in [`crate::duality`].
pub fn all_cliques(g: &SenderGraph) -> Result<CliqueSet> {
    check_limit("clique enumeration", g.q(), MAX_CLIQUE_ENUM_Q)?;
    let adj = g.bitset_rows()?;
    let mut cliques = Vec::new();
    let mut current = Vec::new();
    extend_cliques(&adj, g.q(), 0, 0, &mut current, &mut cliques);
    Ok(CliqueSet { cliques })
}

fn extend_cliques(
    adj: &[u64],
    q: usize,
    from: usize,
    current_mask: u64,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for v in from..q {
        // v must be adjacent to every vertex already in the clique.
        if current_mask & !adj[v] != 0 {
            continue;
        }
        current.push(v);
        out.push(current.clone());
        extend_cliques(adj, q, v + 1, current_mask | (1 << v), current, out);
        current.pop();
    }
}

/// The independence number `α(G)` with a witness: the lexicographically
/// smallest maximum independent set.
pub fn independence_number(g: &SenderGraph) -> Result<(usize, Vec<usize>)> {
    check_limit("independence number", g.q(), MAX_CLIQUE_ENUM_Q)?;
    let adj = g.bitset_rows()?;
    let q = g.q();
    let full = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
    let alpha = alpha_of(&adj, full);

    // Lexicographically smallest witness: extend greedily, keeping a vertex
    // exactly when a maximum independent set through the current prefix and
    // this vertex still exists.
    let mut witness = Vec::with_capacity(alpha);
    let mut allowed = full;
    let mut need = alpha;
    let mut v = 0;
    while need > 0 {
        debug_assert!(v < q, "witness reconstruction ran out of vertices");
        let bit = 1u64 << v;
        if allowed & bit != 0 {
            let low = (bit << 1) - 1; // all bits ≤ v
            let after = allowed & !adj[v] & !low;
            if 1 + alpha_of(&adj, after) == need {
                witness.push(v);
                allowed = after;
                need -= 1;
            } else {
                allowed &= !bit;
            }
        }
        v += 1;
    }
    Ok((alpha, witness))
}

/// Exact maximum independent set size within `mask`, by branch-and-bound.
pub(crate) fn alpha_of(adj: &[u64], mask: u64) -> usize {
    let mut best = greedy_independent(adj, mask);
    alpha_search(adj, mask, 0, &mut best);
    best
}

fn greedy_independent(adj: &[u64], mask: u64) -> usize {
    let mut chosen = 0usize;
    let mut avail = mask;
    while avail != 0 {
        let v = avail.trailing_zeros() as usize;
        chosen += 1;
        avail &= !(adj[v] | (1u64 << v));
    }
    chosen
}

/// Upper bound: the size of a greedy clique partition of `mask` (each clique
/// can contribute at most one vertex to an independent set).
fn greedy_cover_bound(adj: &[u64], mask: u64) -> usize {
    let mut cliques = 0usize;
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        let mut clique_mask = 1u64 << v;
        let mut candidates = rest & adj[v];
        while candidates != 0 {
            let u = candidates.trailing_zeros() as usize;
            clique_mask |= 1u64 << u;
            // Adjacency rows exclude the vertex itself, so this both keeps
            // the candidates adjacent to the whole clique and drops u.
            candidates &= adj[u];
        }
        rest &= !clique_mask;
        cliques += 1;
    }
    cliques
}

fn alpha_search(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + (cand.count_ones() as usize) <= *best {
        return;
    }
    if size + greedy_cover_bound(adj, cand) <= *best {
        return;
    }
    // Branch on the candidate of maximum degree within cand.
    let mut v = usize::MAX;
    let mut best_deg = 0u32;
    let mut scan = cand;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let deg = (adj[u] & cand).count_ones();
        if v == usize::MAX || deg > best_deg {
            v = u;
            best_deg = deg;
        }
    }
    let bit = 1u64 << v;
    alpha_search(adj, cand & !(adj[v] | bit), size + 1, best); // take v
    alpha_search(adj, cand & !bit, size, best); // skip v
}

/// Table of which vertex subsets are cliques, indexed by bitmask.
fn clique_table(adj: &[u64], q: usize) -> Vec<bool> {
    let size = 1usize << q;
    let mut clique = vec![false; size];
    clique[0] = true;
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        // A set is a clique iff its lowest vertex sees all the others and the
        // rest is itself a clique.
        clique[mask] = clique[rest] && (rest as u64 & !adj[low]) == 0;
    }
    clique
}

/// Minimum-cover sizes for every vertex subset: `dp[mask]` = fewest disjoint
/// cliques partitioning `mask`.
fn cover_dp(adj: &[u64], q: usize) -> (Vec<bool>, Vec<u8>) {
    let clique = clique_table(adj, q);
    let size = 1usize << q;
    let mut dp = vec![u8::MAX; size];
    dp[0] = 0;
    for mask in 1..size {
        let low_bit = mask & mask.wrapping_neg();
        let rest = mask ^ low_bit;
        // The block containing the lowest vertex ranges over clique submasks.
        let mut t = rest;
        let mut best = u8::MAX;
        loop {
            let c = t | low_bit;
            if clique[c] {
                let remainder = dp[mask ^ c].saturating_add(1);
                if remainder < best {
                    best = remainder;
                }
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
        dp[mask] = best;
    }
    (clique, dp)
}

/// The vertex clique cover number `θ_v(G)` with a witness partition
/// (lexicographically smallest canonical form among the minimum covers).
pub fn clique_cover_number(g: &SenderGraph) -> Result<(usize, PartitionCover)> {
    check_limit("clique cover", g.q(), MAX_COVER_Q)?;
    let adj = g.bitset_rows()?;
    let q = g.q();
    let (clique, dp) = cover_dp(&adj, q);
    let full = (1usize << q) - 1;
    let theta = dp[full] as usize;

    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(theta);
    let mut mask = full;
    while mask != 0 {
        let low_bit = mask & mask.wrapping_neg();
        let rest = mask ^ low_bit;
        let mut best: Option<(Vec<usize>, usize)> = None;
        let mut t = rest;
        loop {
            let c = t | low_bit;
            if clique[c] && dp[mask ^ c] + 1 == dp[mask] {
                let members = mask_to_vec(c as u64);
                if best.as_ref().is_none_or(|(b, _)| members < *b) {
                    best = Some((members, c));
                }
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
        let (members, c) = best.expect("dp guarantees a completable block");
        blocks.push(members);
        mask ^= c;
    }
    let witness = PartitionCover::new(q, blocks)?;
    Ok((theta, witness))
}

/// Every partition of the vertex set into exactly `θ_v(G)` cliques, in
/// canonical order.
pub fn all_minimum_covers(g: &SenderGraph) -> Result<Vec<PartitionCover>> {
    check_limit("minimum cover enumeration", g.q(), MAX_ALL_COVERS_Q)?;
    let adj = g.bitset_rows()?;
    let q = g.q();
    let (clique, dp) = cover_dp(&adj, q);
    let full = (1usize << q) - 1;
    let theta = dp[full] as usize;

    let mut out = Vec::new();
    let mut acc: Vec<usize> = Vec::with_capacity(theta);
    collect_covers(&clique, &dp, full, theta, &mut acc, &mut out);
    let mut covers: Vec<PartitionCover> = out
        .into_iter()
        .map(|masks| {
            PartitionCover::new(q, masks.into_iter().map(|m| mask_to_vec(m as u64)).collect())
                .expect("generated blocks partition the vertex set")
        })
        .collect();
    covers.sort();
    Ok(covers)
}

fn collect_covers(
    clique: &[bool],
    dp: &[u8],
    mask: usize,
    budget: usize,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if mask == 0 {
        if budget == 0 {
            out.push(acc.clone());
        }
        return;
    }
    if budget == 0 || (dp[mask] as usize) > budget || budget > mask.count_ones() as usize {
        return;
    }
    let low_bit = mask & mask.wrapping_neg();
    let rest = mask ^ low_bit;
    let mut t = rest;
    loop {
        let c = t | low_bit;
        if clique[c] {
            acc.push(c);
            collect_covers(clique, dp, mask ^ c, budget - 1, acc, out);
            acc.pop();
        }
        if t == 0 {
            break;
        }
        t = (t - 1) & rest;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::GraphFlavor;

    fn graph(q: usize, edges: &[(usize, usize)]) -> SenderGraph {
        SenderGraph::from_edges(q, GraphFlavor::Strong, edges).unwrap()
    }

    fn edgeless(q: usize) -> SenderGraph {
        graph(q, &[])
    }

    fn complete(q: usize) -> SenderGraph {
        let mut edges = Vec::new();
        for x in 0..q {
            for y in x + 1..q {
                edges.push((x, y));
            }
        }
        graph(q, &edges)
    }

    fn five_cycle() -> SenderGraph {
        graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    }

    /// Brute-force maximum independent set by scanning all subsets.
    fn brute_alpha(g: &SenderGraph) -> usize {
        let q = g.q();
        (0u64..1 << q)
            .filter(|&m| {
                let members = mask_to_vec(m);
                members
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| members[i + 1..].iter().all(|&y| !g.has_edge(x, y)))
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    /// Brute-force chromatic number by trying k-colorings recursively.
    fn brute_chromatic(g: &SenderGraph) -> usize {
        fn colorable(g: &SenderGraph, k: usize, colors: &mut Vec<usize>, v: usize) -> bool {
            if v == g.q() {
                return true;
            }
            for c in 0..k {
                if (0..v).all(|u| !g.has_edge(u, v) || colors[u] != c) {
                    colors[v] = c;
                    if colorable(g, k, colors, v + 1) {
                        return true;
                    }
                }
            }
            false
        }
        (1..=g.q())
            .find(|&k| colorable(g, k, &mut vec![0; g.q()], 0))
            .expect("every graph is q-colorable")
    }

    #[test]
    fn maximal_cliques_of_basic_graphs() {
        assert_eq!(
            enumerate_maximal_cliques(&edgeless(3)).unwrap().cliques(),
            &[vec![0], vec![1], vec![2]]
        );
        assert_eq!(enumerate_maximal_cliques(&complete(3)).unwrap().cliques(), &[vec![0, 1, 2]]);
        assert_eq!(
            enumerate_maximal_cliques(&graph(3, &[(0, 1)])).unwrap().cliques(),
            &[vec![0, 1], vec![2]]
        );
        // Two triangles sharing vertex 2.
        let bowtie = graph(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(
            enumerate_maximal_cliques(&bowtie).unwrap().cliques(),
            &[vec![0, 1, 2], vec![2, 3, 4]]
        );
    }

    #[test]
    fn maximal_cliques_are_maximal_and_exhaustive() {
        // Cross-check against a subset scan on every graph with q = 4.
        for edge_bits in 0u32..64 {
            let all_pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let edges: Vec<_> = all_pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| edge_bits & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            let g = graph(4, &edges);
            let reported = enumerate_maximal_cliques(&g).unwrap();
            let brute: Vec<Vec<usize>> = (1u64..16)
                .filter(|&m| {
                    let members = mask_to_vec(m);
                    g.is_clique(&members)
                        && (0..4).all(|v| {
                            m & (1 << v) != 0 || {
                                let mut bigger = members.clone();
                                bigger.push(v);
                                bigger.sort_unstable();
                                !g.is_clique(&bigger)
                            }
                        })
                })
                .map(mask_to_vec)
                .collect();
            let mut brute = brute;
            brute.sort();
            assert_eq!(reported.cliques(), &brute[..], "edge set {edges:?}");
        }
    }

    #[test]
    fn all_cliques_counts_and_order() {
        let single_edge = graph(3, &[(0, 1)]);
        assert_eq!(
            all_cliques(&single_edge).unwrap().cliques(),
            &[vec![0], vec![0, 1], vec![1], vec![2]]
        );
        // Complete graph on q vertices has 2^q - 1 non-empty cliques.
        assert_eq!(all_cliques(&complete(4)).unwrap().len(), 15);
        assert_eq!(all_cliques(&edgeless(4)).unwrap().len(), 4);
    }

    #[test]
    fn independence_number_of_basic_graphs() {
        assert_eq!(independence_number(&complete(3)).unwrap(), (1, vec![0]));
        assert_eq!(independence_number(&edgeless(3)).unwrap(), (3, vec![0, 1, 2]));
        assert_eq!(independence_number(&five_cycle()).unwrap(), (2, vec![0, 2]));
        assert_eq!(independence_number(&edgeless(1)).unwrap(), (1, vec![0]));
    }

    #[test]
    fn independence_witness_is_lexicographically_smallest() {
        // Star centered at 0: maximum sets are the leaves; {1,2,3} beats any
        // set containing 0.
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(independence_number(&star).unwrap(), (3, vec![1, 2, 3]));

        let (size, witness) = independence_number(&five_cycle()).unwrap();
        assert_eq!((size, witness), (2, vec![0, 2]));
    }

    #[test]
    fn independence_matches_brute_force_on_all_small_graphs() {
        for q in 1..=4 {
            let pairs: Vec<(usize, usize)> =
                (0..q).flat_map(|x| (x + 1..q).map(move |y| (x, y))).collect();
            for edge_bits in 0u64..1 << pairs.len() {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| edge_bits & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let g = graph(q, &edges);
                let (alpha, witness) = independence_number(&g).unwrap();
                assert_eq!(alpha, brute_alpha(&g), "q={q} edges {edges:?}");
                assert_eq!(witness.len(), alpha);
                assert!(witness
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| witness[i + 1..].iter().all(|&y| !g.has_edge(x, y))));
            }
        }
    }

    #[test]
    fn cover_number_of_basic_graphs() {
        let (theta, witness) = clique_cover_number(&complete(3)).unwrap();
        assert_eq!((theta, witness.blocks()), (1, &[vec![0, 1, 2]][..]));

        let (theta, witness) = clique_cover_number(&graph(3, &[(0, 1)])).unwrap();
        assert_eq!(theta, 2);
        assert_eq!(witness.blocks(), &[vec![0, 1], vec![2]]);

        assert_eq!(clique_cover_number(&edgeless(3)).unwrap().0, 3);
        assert_eq!(clique_cover_number(&five_cycle()).unwrap().0, 3);
    }

    #[test]
    fn cover_witness_is_lexicographically_smallest() {
        // Path 0-1-2: two minimum covers; {{0,1},{2}} is canonically larger
        // than {{0},{1,2}}.
        let path = graph(3, &[(0, 1), (1, 2)]);
        let (theta, witness) = clique_cover_number(&path).unwrap();
        assert_eq!(theta, 2);
        assert_eq!(witness.blocks(), &[vec![0], vec![1, 2]]);

        let c5 = five_cycle();
        let (theta, witness) = clique_cover_number(&c5).unwrap();
        assert_eq!(theta, 3);
        assert_eq!(witness.blocks(), &[vec![0], vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn cover_agrees_with_chromatic_number_of_complement() {
        for q in 1..=4 {
            let pairs: Vec<(usize, usize)> =
                (0..q).flat_map(|x| (x + 1..q).map(move |y| (x, y))).collect();
            for edge_bits in 0u64..1 << pairs.len() {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| edge_bits & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let g = graph(q, &edges);
                let (theta, witness) = clique_cover_number(&g).unwrap();
                assert_eq!(theta, brute_chromatic(&g.complement()), "q={q} edges {edges:?}");
                assert!(witness.blocks().iter().all(|b| g.is_clique(b)));
                assert!(independence_number(&g).unwrap().0 <= theta);
            }
        }
    }

    #[test]
    fn all_minimum_covers_enumerates_exactly() {
        assert_eq!(
            all_minimum_covers(&graph(3, &[(0, 1)])).unwrap(),
            vec![PartitionCover::new(3, vec![vec![0, 1], vec![2]]).unwrap()]
        );
        assert_eq!(
            all_minimum_covers(&complete(2)).unwrap(),
            vec![PartitionCover::single_block(2)]
        );
        assert_eq!(
            all_minimum_covers(&edgeless(2)).unwrap(),
            vec![PartitionCover::singletons(2)]
        );

        let path = graph(3, &[(0, 1), (1, 2)]);
        let covers = all_minimum_covers(&path).unwrap();
        assert_eq!(
            covers,
            vec![
                PartitionCover::new(3, vec![vec![0], vec![1, 2]]).unwrap(),
                PartitionCover::new(3, vec![vec![0, 1], vec![2]]).unwrap(),
            ]
        );
        // The lexicographic witness is the first enumerated cover.
        assert_eq!(clique_cover_number(&path).unwrap().1, covers[0]);
    }

    #[test]
    fn size_limits_are_enforced() {
        let big = edgeless(MAX_COVER_Q + 1);
        assert!(matches!(clique_cover_number(&big), Err(GameError::SizeLimit(_))));
        let bigger = edgeless(MAX_CLIQUE_ENUM_Q + 1);
        assert!(matches!(enumerate_maximal_cliques(&bigger), Err(GameError::SizeLimit(_))));
        assert!(matches!(independence_number(&bigger), Err(GameError::SizeLimit(_))));
        let above_twelve = edgeless(MAX_ALL_COVERS_Q + 1);
        assert!(matches!(all_minimum_covers(&above_twelve), Err(GameError::SizeLimit(_))));
    }
}

//! The packing/covering view of signalling games.
//!
//! The receiver-as-leader value is a maximum independent set of the weak
//! sender graph, the sender-as-leader value a minimum clique cover of the
//! strong one, and on a single graph these are the optima of a pair of 0-1
//! programs that bound each other: packing vertices subject to at most one
//! per clique, and covering vertices by as few cliques as possible. This
//! module builds those programs explicitly, solves them exactly, and bundles
//! the leader/follower comparison into a report.
//!
//! The solver is deliberately small: generic lexicographic enumeration up to
//! 16 variables, a take/skip subset DP for larger pure covering programs,
//! and depth-first branch-and-bound for larger pure packing programs. All
//! witnesses are tie-broken to the lexicographically smallest support.

use crate::cliques::{all_cliques, clique_cover_number, enumerate_maximal_cliques, independence_number};
use crate::error::{GameError, Result};
use crate::game::{PartitionCover, UtilityMatrix};
use crate::graphs::{strong_sender_graph, weak_sender_graph, SenderGraph};

/// Variable limit for the generic exhaustive solver path.
const MAX_EXHAUSTIVE_VARS: usize = 16;
/// Variable limit for the pure-packing branch-and-bound path.
const MAX_PACKING_VARS: usize = 24;
/// Constraint limit for the pure-covering subset DP.
const MAX_COVERING_CONSTRAINTS: usize = 16;
/// Entry cap for the covering DP table ((vars + 1) · 2^constraints).
const MAX_COVERING_TABLE: usize = 1 << 24;

/// Direction of the all-ones objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

/// Constraint sense; the bound is always 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Σ of the subset ≤ 1.
    AtMost,
    /// Σ of the subset ≥ 1.
    AtLeast,
}

/// One constraint: a subset of variables summed against the unit bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    variables: Vec<usize>,
    relation: Relation,
}

impl Constraint {
    pub fn new(mut variables: Vec<usize>, relation: Relation) -> Self {
        variables.sort_unstable();
        variables.dedup();
        Self { variables, relation }
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    /// The right-hand side; unit for every program in this toolkit.
    pub fn bound(&self) -> usize {
        1
    }
}

/// A 0-1 program with an all-ones objective and unit-bound subset
/// constraints — exactly the shape of the packing and covering programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryProgram {
    objective: Objective,
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl BinaryProgram {
    pub fn new(
        objective: Objective,
        variables: Vec<String>,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        for c in &constraints {
            if c.variables.is_empty() {
                return Err(GameError::Domain(
                    "constraint references no variables".to_string(),
                ));
            }
            if let Some(&bad) = c.variables.iter().find(|&&v| v >= variables.len()) {
                return Err(GameError::Domain(format!(
                    "constraint references variable {bad}, but only {} exist",
                    variables.len()
                )));
            }
        }
        Ok(Self { objective, variables, constraints })
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Plain-text rendering for human inspection (not a solver interchange
    /// format).
    pub fn lp_listing(&self) -> String {
        let mut out = String::new();
        let sense = match self.objective {
            Objective::Maximize => "maximize",
            Objective::Minimize => "minimize",
        };
        out.push_str(sense);
        out.push(' ');
        out.push_str(&self.variables.join(" + "));
        out.push_str("\nsubject to\n");
        for c in &self.constraints {
            let terms: Vec<&str> =
                c.variables.iter().map(|&v| self.variables[v].as_str()).collect();
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
            };
            out.push_str(&format!("  {} {} {}\n", terms.join(" + "), rel, c.bound()));
        }
        out.push_str(&format!("binary {}\n", self.variables.join(", ")));
        out
    }
}

/// The vertex-packing program: one binary variable per vertex, maximize the
/// number selected subject to at most one per maximal clique. (Constraining
/// only maximal cliques is enough — every clique sits inside one.)
pub fn build_primal(g: &SenderGraph) -> Result<BinaryProgram> {
    let cliques = enumerate_maximal_cliques(g)?;
    let variables = (0..g.q()).map(|v| format!("x{v}")).collect();
    let constraints = cliques
        .into_inner()
        .into_iter()
        .map(|c| Constraint::new(c, Relation::AtMost))
        .collect();
    BinaryProgram::new(Objective::Maximize, variables, constraints)
}

fn clique_label(members: &[usize]) -> String {
    let inner: Vec<String> = members.iter().map(|v| v.to_string()).collect();
    format!("y{{{}}}", inner.join(","))
}

/// The clique-covering program: one binary variable per clique — all
/// cliques, not only maximal ones, so that disjoint covers stay expressible
/// — minimize the number selected subject to every vertex being covered.
pub fn build_dual(g: &SenderGraph) -> Result<BinaryProgram> {
    let cliques = all_cliques(g)?;
    let variables = cliques.iter().map(|c| clique_label(c)).collect();
    let constraints = (0..g.q())
        .map(|v| {
            let members = cliques
                .iter()
                .enumerate()
                .filter(|(_, c)| c.binary_search(&v).is_ok())
                .map(|(i, _)| i)
                .collect();
            Constraint::new(members, Relation::AtLeast)
        })
        .collect();
    BinaryProgram::new(Objective::Minimize, variables, constraints)
}

/// Solves a program exactly, returning the optimum and the feasible witness
/// whose support is lexicographically smallest among the optimal ones.
pub fn solve_binary(prog: &BinaryProgram) -> Result<(usize, Vec<bool>)> {
    let n = prog.variables.len();
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let pure_covering = prog.objective == Objective::Minimize
        && prog.constraints.iter().all(|c| c.relation == Relation::AtLeast);
    let pure_packing = prog.objective == Objective::Maximize
        && prog.constraints.iter().all(|c| c.relation == Relation::AtMost);
    if n <= MAX_EXHAUSTIVE_VARS {
        solve_exhaustive(prog)
    } else if pure_covering {
        solve_covering_dp(prog)
    } else if pure_packing {
        if n > MAX_PACKING_VARS {
            return Err(GameError::SizeLimit(format!(
                "packing programs support ≤ {MAX_PACKING_VARS} variables, got {n}"
            )));
        }
        Ok(solve_packing_branch_bound(prog))
    } else {
        Err(GameError::SizeLimit(format!(
            "mixed binary programs support ≤ {MAX_EXHAUSTIVE_VARS} variables, got {n}"
        )))
    }
}

fn support_to_assignment(n: usize, support: &[usize]) -> Vec<bool> {
    let mut assignment = vec![false; n];
    for &v in support {
        assignment[v] = true;
    }
    assignment
}

/// Generic path: walks every support in lexicographic order, keeping the
/// first feasible support at each strictly better objective value.
fn solve_exhaustive(prog: &BinaryProgram) -> Result<(usize, Vec<bool>)> {
    let n = prog.variables.len();
    let m = prog.constraints.len();
    // Incremental feasibility: track per-constraint loads and how many
    // constraints are currently violated.
    let mut loads = vec![0usize; m];
    let mut violated = prog
        .constraints
        .iter()
        .filter(|c| c.relation == Relation::AtLeast)
        .count();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in prog.constraints.iter().enumerate() {
        for &v in &c.variables {
            membership[v].push(ci);
        }
    }
    let maximize = prog.objective == Objective::Maximize;
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut support: Vec<usize> = Vec::new();

    // Recursion via an explicit driver to keep the borrow story simple.
    fn toggle(
        constraints: &[Constraint],
        membership: &[Vec<usize>],
        loads: &mut [usize],
        violated: &mut usize,
        v: usize,
        add: bool,
    ) {
        for &ci in &membership[v] {
            let before_ok = match constraints[ci].relation {
                Relation::AtMost => loads[ci] <= 1,
                Relation::AtLeast => loads[ci] >= 1,
            };
            if add {
                loads[ci] += 1;
            } else {
                loads[ci] -= 1;
            }
            let after_ok = match constraints[ci].relation {
                Relation::AtMost => loads[ci] <= 1,
                Relation::AtLeast => loads[ci] >= 1,
            };
            match (before_ok, after_ok) {
                (true, false) => *violated += 1,
                (false, true) => *violated -= 1,
                _ => {}
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn explore(
        prog: &BinaryProgram,
        membership: &[Vec<usize>],
        loads: &mut [usize],
        violated: &mut usize,
        support: &mut Vec<usize>,
        from: usize,
        maximize: bool,
        best: &mut Option<(usize, Vec<usize>)>,
    ) {
        if *violated == 0 {
            let value = support.len();
            let better = match best {
                None => true,
                Some((b, _)) => {
                    if maximize {
                        value > *b
                    } else {
                        value < *b
                    }
                }
            };
            if better {
                *best = Some((value, support.clone()));
            }
        }
        for v in from..prog.variables.len() {
            support.push(v);
            toggle(&prog.constraints, membership, loads, violated, v, true);
            explore(prog, membership, loads, violated, support, v + 1, maximize, best);
            toggle(&prog.constraints, membership, loads, violated, v, false);
            support.pop();
        }
    }

    explore(prog, &membership, &mut loads, &mut violated, &mut support, 0, maximize, &mut best);
    let (value, support) = best.ok_or_else(|| {
        GameError::Domain("binary program is infeasible".to_string())
    })?;
    Ok((value, support_to_assignment(n, &support)))
}

/// Pure covering path: take/skip DP over (variable index, mask of still
/// uncovered constraints), then reconstruct by preferring to take — which
/// yields the lexicographically smallest optimal support.
fn solve_covering_dp(prog: &BinaryProgram) -> Result<(usize, Vec<bool>)> {
    let n = prog.variables.len();
    let m = prog.constraints.len();
    if m > MAX_COVERING_CONSTRAINTS || (n + 1).saturating_mul(1 << m) > MAX_COVERING_TABLE {
        return Err(GameError::SizeLimit(format!(
            "covering program too large for the subset DP ({n} variables, {m} constraints)"
        )));
    }
    let mut coverage = vec![0u32; n];
    for (ci, c) in prog.constraints.iter().enumerate() {
        for &v in &c.variables {
            coverage[v] |= 1 << ci;
        }
    }
    let full = ((1u64 << m) - 1) as u32;
    let masks = 1usize << m;
    const INF: u32 = u32::MAX / 2;
    // dp[v][mask]: fewest variables from {v, …, n−1} covering `mask`.
    let mut dp = vec![INF; (n + 1) * masks];
    dp[n * masks] = 0; // dp[n][0]
    for v in (0..n).rev() {
        for mask in 0..masks {
            let skip = dp[(v + 1) * masks + mask];
            let taken_mask = mask & !(coverage[v] as usize);
            let take = dp[(v + 1) * masks + taken_mask].saturating_add(1);
            dp[v * masks + mask] = skip.min(take);
        }
    }
    let opt = dp[full as usize];
    if opt >= INF {
        return Err(GameError::Domain("covering program is infeasible".to_string()));
    }
    let mut support = Vec::with_capacity(opt as usize);
    let mut mask = full as usize;
    for v in 0..n {
        if mask == 0 {
            break;
        }
        let taken_mask = mask & !(coverage[v] as usize);
        if dp[v * masks + mask] == dp[(v + 1) * masks + taken_mask].saturating_add(1) {
            support.push(v);
            mask = taken_mask;
        }
    }
    debug_assert_eq!(support.len(), opt as usize);
    Ok((opt as usize, support_to_assignment(n, &support)))
}

/// Pure packing path: depth-first search over supports in lexicographic
/// order with violation and cardinality pruning; the first support found at
/// each strictly better value is the lexicographically smallest one.
fn solve_packing_branch_bound(prog: &BinaryProgram) -> (usize, Vec<bool>) {
    let n = prog.variables.len();
    let m = prog.constraints.len();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in prog.constraints.iter().enumerate() {
        for &v in &c.variables {
            membership[v].push(ci);
        }
    }

    fn explore(
        n: usize,
        membership: &[Vec<usize>],
        loads: &mut [usize],
        support: &mut Vec<usize>,
        from: usize,
        best: &mut (usize, Vec<usize>),
    ) {
        if support.len() > best.0 {
            *best = (support.len(), support.clone());
        }
        for v in from..n {
            if support.len() + (n - v) <= best.0 {
                break; // even taking every remaining variable cannot win
            }
            if membership[v].iter().any(|&ci| loads[ci] >= 1) {
                continue; // including v would overload a clique constraint
            }
            for &ci in &membership[v] {
                loads[ci] += 1;
            }
            support.push(v);
            explore(n, membership, loads, support, v + 1, best);
            support.pop();
            for &ci in &membership[v] {
                loads[ci] -= 1;
            }
        }
    }

    let mut best = (0usize, Vec::new()); // the empty support is feasible
    let mut loads = vec![0usize; m];
    let mut support = Vec::new();
    explore(n, &membership, &mut loads, &mut support, 0, &mut best);
    (best.0, support_to_assignment(n, &best.1))
}

/// The number of sources the receiver can extract when moving first: the
/// independence number of the weak sender graph.
pub fn extraction_capacity(u: &UtilityMatrix) -> Result<usize> {
    independence_number(&weak_sender_graph(u)).map(|(alpha, _)| alpha)
}

/// Duality analysis of a game: the two leader values, the packing/covering
/// optima of the strong graph, and their comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    /// Ξ(U): what the receiver extracts as leader (α of the weak graph).
    pub extraction_capacity: usize,
    /// I(U): what the sender reveals as leader (θ_v of the strong graph).
    pub informativeness: usize,
    /// Optimum of the vertex-packing program on the strong graph.
    pub primal_opt: usize,
    /// Optimum of the clique-covering program on the strong graph.
    pub dual_opt: usize,
    /// informativeness − extraction_capacity; never negative.
    pub leader_follower_gap: usize,
    /// Lexicographically smallest maximum independent set of the weak graph.
    pub extraction_witness: Vec<usize>,
    /// Packing witness: selected vertices of the strong graph.
    pub primal_witness: Vec<usize>,
    /// Covering witness, post-processed into disjoint blocks.
    pub dual_cover: PartitionCover,
    /// Whether the utility matrix is symmetric. Symmetry alone does not tie
    /// the program optima to the leader values — see `graphs_coincide`.
    pub symmetric: bool,
    /// Whether the strong and weak graphs have the same edges. When they do,
    /// the packing optimum equals Ξ(U) and the covering optimum equals I(U).
    /// Guaranteed for symmetric matrices with a constant diagonal; symmetry
    /// by itself is not enough (one diagonal entry below a shared
    /// off-diagonal value and the other above splits the two edge rules).
    pub graphs_coincide: bool,
}

pub fn duality_report(u: &UtilityMatrix) -> Result<DualityReport> {
    let strong = strong_sender_graph(u);
    let weak = weak_sender_graph(u);
    let (extraction, extraction_witness) = independence_number(&weak)?;
    let (informativeness, _) = clique_cover_number(&strong)?;

    let primal = build_primal(&strong)?;
    let (primal_opt, primal_assignment) = solve_binary(&primal)?;
    let primal_witness: Vec<usize> =
        primal_assignment.iter().enumerate().filter(|(_, &on)| on).map(|(v, _)| v).collect();

    let dual = build_dual(&strong)?;
    let (dual_opt, dual_assignment) = solve_binary(&dual)?;
    let cliques = all_cliques(&strong)?;
    // Selected cliques may overlap; drop repeated vertices from later
    // cliques (sub-cliques are cliques) to report a disjoint cover. No
    // optimal cover has a fully redundant clique, so no block vanishes.
    let mut seen = vec![false; u.q()];
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(dual_opt);
    for (i, clique) in cliques.iter().enumerate() {
        if !dual_assignment[i] {
            continue;
        }
        let fresh: Vec<usize> = clique.iter().copied().filter(|&v| !seen[v]).collect();
        for &v in &fresh {
            seen[v] = true;
        }
        if !fresh.is_empty() {
            blocks.push(fresh);
        }
    }
    let dual_cover = PartitionCover::new(u.q(), blocks)?;

    assert!(
        extraction <= informativeness,
        "follower value exceeded leader value: Ξ = {extraction}, I = {informativeness}"
    );
    assert_eq!(dual_opt, informativeness, "covering optimum must equal the clique cover number");
    let graphs_coincide = strong.edges() == weak.edges();
    if graphs_coincide {
        assert_eq!(primal_opt, extraction, "coinciding graphs: packing optimum must equal Ξ");
    }

    Ok(DualityReport {
        extraction_capacity: extraction,
        informativeness,
        primal_opt,
        dual_opt,
        leader_follower_gap: informativeness - extraction,
        extraction_witness,
        primal_witness,
        dual_cover,
        symmetric: u.is_symmetric(),
        graphs_coincide,
    })
}

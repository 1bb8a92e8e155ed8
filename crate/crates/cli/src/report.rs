//! Report assembly. Every command renders the same numbers either as
//! human-readable text or as a JSON object; rationals appear as exact
//! `"p/q"` strings in both, so the two formats never disagree.

use serde_json::json;

use signalgames::behavioral::{
    classify_pi, family_limit, grid_class_histogram, min_best_response_utility,
    BehavioralStrategy, GridSearchOutcome, Prior,
};
use signalgames::duality::{build_dual, build_primal, duality_report, solve_binary};
use signalgames::equilibrium::{classify, equilibrium_report, ClassExistence};
use signalgames::{
    format_rational, strong_sender_graph, weak_sender_graph, ReceiverStrategy, SenderGraph,
    UtilityMatrix,
};

use crate::io::CliError;
use crate::Format;

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn matrix_rows(u: &UtilityMatrix) -> Vec<String> {
    u.to_string_rows()
        .iter()
        .map(|row| row.join(" "))
        .collect()
}

fn graph_json(g: &SenderGraph) -> serde_json::Value {
    json!({ "edge_count": g.edge_count(), "edges": g.edges() })
}

fn graph_text(g: &SenderGraph) -> String {
    let edges = g.edges();
    if edges.is_empty() {
        return "no edges".to_string();
    }
    let listed: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let noun = if edges.len() == 1 { "edge" } else { "edges" };
    format!("{} {noun}: {}", edges.len(), listed.join(", "))
}

fn set_text(members: &[usize]) -> String {
    let listed: Vec<String> = members.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", listed.join(", "))
}

fn blocks_text(blocks: &[Vec<usize>]) -> String {
    let listed: Vec<String> = blocks.iter().map(|b| set_text(b)).collect();
    listed.join(" | ")
}

fn class_existence_json(c: &ClassExistence) -> serde_json::Value {
    json!({
        "separating_only": c.separating_only,
        "pooling_exists": c.pooling_exists,
        "semi_separating_exists": c.semi_separating_exists,
    })
}

fn push_class_existence_text(out: &mut String, c: &ClassExistence) {
    out.push_str("separating equilibrium exists = yes (always)\n");
    out.push_str(&format!(
        "pooling equilibrium exists = {}\n",
        yes_no(c.pooling_exists)
    ));
    out.push_str(&format!(
        "semi-separating equilibrium exists = {}\n",
        yes_no(c.semi_separating_exists)
    ));
    out.push_str(&format!(
        "only separating equilibria = {}\n",
        yes_no(c.separating_only)
    ));
}

fn push_matrix_text(out: &mut String, u: &UtilityMatrix) {
    out.push_str(&format!("q = {}\n", u.q()));
    out.push_str("utility matrix:\n");
    for row in matrix_rows(u) {
        out.push_str("  ");
        out.push_str(&row);
        out.push('\n');
    }
}

/// `analyze`: both sender graphs, the two leader values with their gap, the
/// program optima, and the class-existence flags.
pub fn analyze(u: &UtilityMatrix, format: Format) -> Result<String, CliError> {
    let strong = strong_sender_graph(u);
    let weak = weak_sender_graph(u);
    let d = duality_report(u)?;
    let classes = signalgames::equilibrium::class_existence(u)?;
    match format {
        Format::Json => {
            let value = json!({
                "command": "analyze",
                "q": u.q(),
                "u": u.to_string_rows(),
                "strong_graph": graph_json(&strong),
                "weak_graph": graph_json(&weak),
                "informativeness": d.informativeness,
                "extraction_capacity": d.extraction_capacity,
                "leader_follower_gap": d.leader_follower_gap,
                "primal_optimum": d.primal_opt,
                "dual_optimum": d.dual_opt,
                "extraction_witness": d.extraction_witness,
                "primal_witness": d.primal_witness,
                "dual_cover": d.dual_cover.blocks(),
                "symmetric": d.symmetric,
                "graphs_coincide": d.graphs_coincide,
                "class_existence": class_existence_json(&classes),
            });
            Ok(to_pretty(&value))
        }
        Format::Text => {
            let mut out = String::new();
            push_matrix_text(&mut out, u);
            out.push_str(&format!("strong sender graph: {}\n", graph_text(&strong)));
            out.push_str(&format!("weak sender graph: {}\n", graph_text(&weak)));
            out.push_str(&format!("informativeness I(U) = {}\n", d.informativeness));
            out.push_str(&format!(
                "extraction capacity Xi(U) = {}\n",
                d.extraction_capacity
            ));
            out.push_str(&format!(
                "leader/follower gap = {}\n",
                d.leader_follower_gap
            ));
            out.push_str(&format!(
                "primal packing optimum = {}, witness vertices {}\n",
                d.primal_opt,
                set_text(&d.primal_witness)
            ));
            out.push_str(&format!(
                "dual covering optimum = {}, cover {}\n",
                d.dual_opt,
                blocks_text(d.dual_cover.blocks())
            ));
            out.push_str(&format!(
                "extraction witness (weak graph) = {}\n",
                set_text(&d.extraction_witness)
            ));
            out.push_str(&format!("symmetric utility = {}\n", yes_no(d.symmetric)));
            out.push_str(&format!(
                "strong and weak graphs coincide = {}\n",
                yes_no(d.graphs_coincide)
            ));
            push_class_existence_text(&mut out, &classes);
            Ok(out.trim_end().to_string())
        }
    }
}

/// `enumerate`: every equilibrium partition with its recovered count, a
/// witness sender map, and the class label of that witness.
pub fn enumerate(u: &UtilityMatrix, format: Format) -> Result<String, CliError> {
    let r = equilibrium_report(u)?;
    let partitions: Vec<(Vec<Vec<usize>>, usize, Vec<usize>, String)> = r
        .equilibrium_partitions
        .iter()
        .map(|p| {
            let witness = p.witness_strategy();
            let label = classify(&witness).to_string();
            (
                p.blocks().to_vec(),
                p.blocks().len(),
                witness.map().to_vec(),
                label,
            )
        })
        .collect();
    match format {
        Format::Json => {
            let listed: Vec<serde_json::Value> = partitions
                .iter()
                .map(|(blocks, recovered, witness, label)| {
                    json!({
                        "blocks": blocks,
                        "recovered": recovered,
                        "witness": witness,
                        "class": label,
                    })
                })
                .collect();
            let value = json!({
                "command": "enumerate",
                "q": u.q(),
                "u": u.to_string_rows(),
                "informativeness": r.informativeness,
                "max_recovered": r.max_recovered,
                "partition_count": partitions.len(),
                "partitions": listed,
                "class_existence": class_existence_json(&r.class_existence),
            });
            Ok(to_pretty(&value))
        }
        Format::Text => {
            let mut out = String::new();
            push_matrix_text(&mut out, u);
            out.push_str(&format!("informativeness I(U) = {}\n", r.informativeness));
            out.push_str(&format!("max recovered = {}\n", r.max_recovered));
            out.push_str(&format!("equilibrium partitions: {}\n", partitions.len()));
            for (blocks, recovered, witness, label) in &partitions {
                let map: Vec<String> = witness.iter().map(|s| s.to_string()).collect();
                out.push_str(&format!(
                    "  {}  recovered = {recovered}  class = {label}  witness s = [{}]\n",
                    blocks_text(blocks),
                    map.join(", ")
                ));
            }
            push_class_existence_text(&mut out, &r.class_existence);
            Ok(out.trim_end().to_string())
        }
    }
}

/// `duality`: the exact packing and covering programs on the strong graph,
/// their optima and selected variables, and the leader values they certify.
pub fn duality(u: &UtilityMatrix, format: Format) -> Result<String, CliError> {
    let strong = strong_sender_graph(u);
    let d = duality_report(u)?;
    let primal = build_primal(&strong)?;
    let dual = build_dual(&strong)?;
    let (primal_opt, primal_sel) = solve_binary(&primal)?;
    let (dual_opt, dual_sel) = solve_binary(&dual)?;
    debug_assert_eq!(primal_opt, d.primal_opt);
    debug_assert_eq!(dual_opt, d.dual_opt);
    let selected = |prog: &signalgames::duality::BinaryProgram, choice: &[bool]| -> Vec<String> {
        prog.variables()
            .iter()
            .zip(choice)
            .filter(|(_, &on)| on)
            .map(|(name, _)| name.clone())
            .collect()
    };
    let primal_vars = selected(&primal, &primal_sel);
    let dual_vars = selected(&dual, &dual_sel);
    match format {
        Format::Json => {
            let value = json!({
                "command": "duality",
                "q": u.q(),
                "u": u.to_string_rows(),
                "symmetric": d.symmetric,
                "graphs_coincide": d.graphs_coincide,
                "primal": {
                    "listing": primal.lp_listing(),
                    "optimum": primal_opt,
                    "selected": primal_vars,
                },
                "dual": {
                    "listing": dual.lp_listing(),
                    "optimum": dual_opt,
                    "selected": dual_vars,
                },
                "extraction_capacity": d.extraction_capacity,
                "informativeness": d.informativeness,
                "leader_follower_gap": d.leader_follower_gap,
                "extraction_witness": d.extraction_witness,
                "dual_cover": d.dual_cover.blocks(),
            });
            Ok(to_pretty(&value))
        }
        Format::Text => {
            let mut out = String::new();
            push_matrix_text(&mut out, u);
            out.push_str(&format!("symmetric utility = {}\n", yes_no(d.symmetric)));
            out.push_str(&format!(
                "strong and weak graphs coincide = {}\n",
                yes_no(d.graphs_coincide)
            ));
            out.push_str("primal packing program (strong graph):\n");
            out.push_str(&primal.lp_listing());
            out.push_str(&format!(
                "optimum = {primal_opt}, selected {{{}}}\n",
                primal_vars.join(", ")
            ));
            out.push_str("dual covering program (strong graph):\n");
            out.push_str(&dual.lp_listing());
            out.push_str(&format!(
                "optimum = {dual_opt}, selected {{{}}}\n",
                dual_vars.join(", ")
            ));
            out.push_str(&format!(
                "extraction capacity Xi(U) = {} (weak-graph witness {})\n",
                d.extraction_capacity,
                set_text(&d.extraction_witness)
            ));
            out.push_str(&format!("informativeness I(U) = {}\n", d.informativeness));
            out.push_str(&format!(
                "leader/follower gap = {}\n",
                d.leader_follower_gap
            ));
            out.push_str(&format!(
                "dual cover as partition: {}\n",
                blocks_text(d.dual_cover.blocks())
            ));
            Ok(out.trim_end().to_string())
        }
    }
}

fn strategy_rows(pi: &BehavioralStrategy) -> Vec<Vec<String>> {
    pi.rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

fn sigma_pairs(sigma: &ReceiverStrategy) -> Vec<(usize, usize)> {
    (0..sigma.q())
        .filter_map(|y| sigma.decode(y).map(|x| (y, x)))
        .collect()
}

/// `behavioral`: grid-search outcome plus the derived limit point, its
/// class, its exact best-response value, and the class histogram of the
/// whole grid.
pub fn behavioral(
    u: &UtilityMatrix,
    p: &Prior,
    grid: usize,
    outcome: &GridSearchOutcome,
    format: Format,
) -> Result<String, CliError> {
    let argmax_class = classify_pi(&outcome.argmax)?;
    let limit = family_limit(&outcome.argmax, &outcome.witness_sigma, u);
    let limit_class = classify_pi(&limit)?;
    let (limit_value, _) = min_best_response_utility(&limit, p, u)?;
    let histogram = grid_class_histogram(grid)?;
    let total: u64 = histogram.iter().map(|(_, n)| n).sum();
    debug_assert_eq!(total, outcome.points);
    let verdict = if outcome.attained {
        format!(
            "maximum attained on grid; max = {}",
            format_rational(&outcome.max_value)
        )
    } else {
        format!(
            "supremum not attained on grid; max = {} < {}",
            format_rational(&outcome.max_value),
            format_rational(&outcome.sup_estimate)
        )
    };
    let witness = sigma_pairs(&outcome.witness_sigma);
    match format {
        Format::Json => {
            let histogram_json: Vec<serde_json::Value> = histogram
                .iter()
                .map(|(class, n)| json!({ "class": class.to_string(), "count": n }))
                .collect();
            let witness_json: Vec<serde_json::Value> = witness
                .iter()
                .map(|(y, x)| json!({ "signal": y, "symbol": x }))
                .collect();
            let prior_json: Vec<String> = p.values().iter().map(format_rational).collect();
            let value = json!({
                "command": "behavioral",
                "q": u.q(),
                "u": u.to_string_rows(),
                "prior": prior_json,
                "grid_denominator": grid,
                "points": outcome.points,
                "max_value": format_rational(&outcome.max_value),
                "argmax": strategy_rows(&outcome.argmax),
                "argmax_class": argmax_class.to_string(),
                "witness_sigma": witness_json,
                "sup_estimate": format_rational(&outcome.sup_estimate),
                "attained": outcome.attained,
                "limit_point": strategy_rows(&limit),
                "limit_class": limit_class.to_string(),
                "limit_value": format_rational(&limit_value),
                "class_histogram": histogram_json,
                "verdict": verdict,
            });
            Ok(to_pretty(&value))
        }
        Format::Text => {
            let prior_text: Vec<String> = p.values().iter().map(format_rational).collect();
            let mut out = String::new();
            push_matrix_text(&mut out, u);
            out.push_str(&format!("prior = ({})\n", prior_text.join(", ")));
            out.push_str(&format!("grid denominator N = {grid}\n"));
            out.push_str(&format!("grid points = {}\n", outcome.points));
            out.push_str(&format!(
                "max value = {}, attained at:\n",
                format_rational(&outcome.max_value)
            ));
            for row in strategy_rows(&outcome.argmax) {
                out.push_str("  ");
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out.push_str(&format!("argmax class = {argmax_class}\n"));
            let decoded: Vec<String> = witness
                .iter()
                .map(|(y, x)| format!("y{y} -> {x}"))
                .collect();
            out.push_str(&format!(
                "best-response witness: {}\n",
                if decoded.is_empty() {
                    "(no signal used)".to_string()
                } else {
                    decoded.join(", ")
                }
            ));
            out.push_str(&format!(
                "sup estimate = {}\n",
                format_rational(&outcome.sup_estimate)
            ));
            out.push_str("limit point:\n");
            for row in strategy_rows(&limit) {
                out.push_str("  ");
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out.push_str(&format!("limit class = {limit_class}\n"));
            out.push_str(&format!(
                "limit value = {}\n",
                format_rational(&limit_value)
            ));
            out.push_str("class histogram:\n");
            for (class, n) in &histogram {
                out.push_str(&format!("  {:<16} {n}\n", class.to_string()));
            }
            out.push_str(&format!("verdict: {verdict}\n"));
            Ok(out.trim_end().to_string())
        }
    }
}

fn to_pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON reports are always serializable")
}

//! Exact analysis of finite sender–receiver signalling games.
//!
//! A sender observes a source symbol and signals; a receiver decodes. The
//! sender moves first (Stackelberg leader) and is judged by its worst case
//! over the receiver's best responses. From a single utility matrix this
//! crate computes, with exact rational arithmetic throughout:
//!
//! * the strong and weak sender graphs ([`graphs`]),
//! * informativeness `I(U)` — the minimum number of symbols any equilibrium
//!   reveals — as a vertex clique cover number, and the extraction capacity
//!   `Ξ(U)` as an independence number ([`cliques`], [`equilibrium`],
//!   [`duality`]),
//! * the full set of equilibrium partitions with class labels
//!   (separating / pooling / semi-separating) ([`equilibrium`]),
//! * the packing/covering 0-1 programs whose optima realize `Ξ` and `I`
//!   ([`duality`]),
//! * and the behavioral (mixed) sender analysis: probability-one recovery
//!   sets, exact minimization over receiver best responses, and the grid
//!   search demonstrating that a supremum need not be attained — i.e. that
//!   equilibria can fail to exist in behavioral strategies ([`behavioral`]).
//!
//! Everything is exact: utilities are arbitrary-precision rationals, all
//! solvers are exhaustive or exactly-bounded branch-and-bound, and every
//! comparison that the theory states with `≤` is evaluated with `≤`.

pub mod behavioral;
pub mod cliques;
pub mod duality;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod graphs;
pub mod rational;

pub use error::{GameError, Result};
pub use game::{
    diag_utility, parse_utility, receiver_dilemma_set, recovered_set, Alphabet, PartitionCover,
    ReceiverStrategy, SenderStrategy, UtilityMatrix,
};
pub use graphs::{strong_sender_graph, weak_sender_graph, GraphFlavor, SenderGraph};
pub use rational::{format_rational, parse_rational, Rat};

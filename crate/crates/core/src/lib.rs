//! Analytics for dynamic (temporal) networks: NC-LID local intrinsic
//! dimensionality, dynnode2vec-style incremental random-walk embeddings, and
//! graph-reconstruction quality evaluation with rank statistics.
//!
//! A dynamic network enters as an event log of timed interactions
//! (see [`graph::parse_event_log`]). From there it can be sliced into
//! snapshots ([`graph::build_snapshots`]) for the discrete-time pipeline or
//! aggregated into a single time-stamped graph ([`graph::aggregate_graph`])
//! for temporal-distance analysis. The downstream modules are:
//!
//! * [`community`] — natural (seed-grown) communities by greedy fitness
//!   optimization,
//! * [`lid`] — NC-LID scores per node, for snapshots and for temporal
//!   distances on aggregated graphs,
//! * [`centrality`] — degree, betweenness, closeness, eigenvector and shell
//!   index,
//! * [`embedding`] — biased second-order random walks plus an incrementally
//!   updated skip-gram model with negative sampling,
//! * [`evaluation`] — graph reconstruction from embeddings with per-node and
//!   micro-averaged precision/recall/F1, and the hyperparameter sweep,
//! * [`stats`] — Spearman correlation, high/low NC-LID split, Mann-Whitney U
//!   with probabilities of superiority.
//!
//! Numeric kernels are generic over the scalar type through the [`Real`]
//! trait (`f32` or `f64`); temporal latencies are kept as exact `i64`
//! rationals so ordering never depends on float rounding. The aliases at the
//! crate root pick concrete scalars for the common instantiations.

pub mod centrality;
pub mod community;
pub mod embedding;
pub mod evaluation;
pub mod graph;
pub mod lid;
pub mod scalar;
pub mod seeds;
pub mod stats;

pub use scalar::Real;

/// Dense node index, assigned by the event-log parser in first-appearance
/// order and shared by every snapshot of a sequence.
pub type NodeId = u32;

/// Event time in integer time units (e.g. unix seconds).
pub type Timestamp = i64;

// Concrete instantiations. `f64` is what the CLI and the report pipeline
// use throughout; `f32` halves the memory of embedding matrices.
pub type NcLidScore64 = lid::NcLidScore<f64>;
pub type NcLidScore32 = lid::NcLidScore<f32>;
pub type EmbeddingModel64 = embedding::EmbeddingModel<f64>;
pub type EmbeddingModel32 = embedding::EmbeddingModel<f32>;
pub type EmbeddingSeries64 = embedding::EmbeddingSeries<f64>;
pub type EmbeddingSeries32 = embedding::EmbeddingSeries<f32>;
pub type MwuResult64 = stats::MwuResult<f64>;
pub type TuneResult64 = evaluation::TuneResult<f64>;

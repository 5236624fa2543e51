//! Similarity-propagation re-ranking for image retrieval.
//!
//! Pairwise inlier counts between corpus images form a weighted match graph.
//! A query's own inlier counts give its direct relevance to each image; that
//! relevance is spread over a query-centered subgraph by damped power
//! iteration, and the blend of direct and propagated relevance ranks the
//! corpus.

pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod propagation;
pub mod sparse;
pub mod subgraph;
pub mod synth;

pub use error::{Error, Result};
pub use eval::{average_precision, mean_ap, run_sweep, subgraph_recall, EvalTruth, SweepRow, SweepSpec};
pub use graph::{build_graph, match_score, KernelParams, MatchGraph, MatchRecord};
pub use pipeline::{run_query, Query, RankConfig, RankOutcome};
pub use propagation::{
    comprehensive_relevance, direct_relevance, propagate, rank, PropagationParams, QueryContext, RelevanceState,
};
pub use sparse::CsrMatrix;
pub use subgraph::{expand_subgraph, restrict_vectors, select_roots, Subgraph, SubgraphParams};
pub use synth::{gen_synthetic, ChainParams, ClusterParams, SynthModel, SyntheticCorpus};

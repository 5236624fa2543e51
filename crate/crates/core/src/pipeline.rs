//! End-to-end re-ranking of one query: direct relevance, root selection,
//! subgraph expansion, propagation and ranking.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::error::Result;
use crate::graph::MatchGraph;
use crate::propagation::{self, direct_relevance, PropagationParams, RelevanceState};
use crate::subgraph::{expand_subgraph, restrict_vectors, select_roots, Subgraph, SubgraphParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub counts: BTreeMap<String, u64>,
    /// Drop the query's own id from the output ranking.
    pub exclude_self: bool,
}

impl Query {
    pub fn new(id: impl Into<String>, counts: BTreeMap<String, u64>) -> Self {
        Query {
            id: id.into(),
            counts,
            exclude_self: false,
        }
    }

    /// A corpus image used as the query: its stored match row supplies the
    /// counts and it is left out of its own ranking.
    pub fn from_member(graph: &MatchGraph, id: &str) -> Result<Self> {
        Ok(Query {
            id: id.to_owned(),
            counts: graph.counts_for(id)?,
            exclude_self: true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RankConfig {
    /// `None` propagates over the whole graph.
    pub subgraph: Option<SubgraphParams>,
    pub propagation: PropagationParams,
}

#[derive(Debug, Clone)]
pub struct RankOutcome<'g> {
    pub subgraph: Subgraph<'g>,
    /// Vertex id of each entry of the state vectors.
    pub ids: Vec<String>,
    pub state: RelevanceState,
    pub ranking: Vec<(String, f64)>,
    exclude: Option<String>,
}

impl RankOutcome<'_> {
    /// Ranking by direct relevance alone over the same working set.
    pub fn direct_ranking(&self) -> Vec<(String, f64)> {
        let ranked = propagation::rank(&self.state.d, &self.ids).expect("ids match state");
        drop_excluded(ranked, self.exclude.as_deref())
    }
}

fn drop_excluded(mut ranking: Vec<(String, f64)>, exclude: Option<&str>) -> Vec<(String, f64)> {
    if let Some(id) = exclude {
        ranking.retain(|(v, _)| v != id);
    }
    ranking
}

pub fn run_query<'g>(graph: &'g MatchGraph, query: &Query, config: &RankConfig) -> Result<RankOutcome<'g>> {
    config.propagation.validate()?;
    let ctx = direct_relevance(&query.id, &query.counts, graph.vertices(), graph.kernel())?;

    let (subgraph, ids, d, adjacency) = match &config.subgraph {
        Some(params) => {
            let roots = select_roots(&ctx.d, params)?;
            let sub = expand_subgraph(graph, &roots, params.depth)?;
            let restricted = restrict_vectors(&sub, &ctx.d)?;
            // Raw scores normalized over V*: bitwise equal to the full-graph
            // d whenever V* holds every positive vertex.
            let local = direct_relevance(&query.id, &query.counts, &restricted.ids, graph.kernel())?;
            (sub, restricted.ids, local.d, Cow::Owned(restricted.adjacency))
        }
        None => {
            let roots = (0..ctx.d.len()).filter(|&i| ctx.d[i] > 0.0).collect();
            (
                Subgraph::full(graph, roots),
                graph.vertices().to_vec(),
                ctx.d,
                Cow::Borrowed(graph.row_normalized()),
            )
        }
    };

    let state = RelevanceState::compute(&adjacency, d, &config.propagation)?;
    let exclude = query.exclude_self.then(|| query.id.clone());
    let ranking = drop_excluded(propagation::rank(&state.s, &ids)?, exclude.as_deref());
    Ok(RankOutcome {
        subgraph,
        ids,
        state,
        ranking,
        exclude,
    })
}

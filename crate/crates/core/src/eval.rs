//! Retrieval scoring and parameter sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MatchGraph;
use crate::pipeline::{run_query, Query, RankConfig};
use crate::propagation::PropagationParams;
use crate::subgraph::{Subgraph, SubgraphParams};

/// Ground truth for one query. Ids in `ignore` are skipped while scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalTruth {
    #[serde(skip)]
    pub query_id: String,
    pub relevant: BTreeSet<String>,
    #[serde(default)]
    pub ignore: BTreeSet<String>,
}

impl EvalTruth {
    pub fn new<I, J>(query_id: impl Into<String>, relevant: I, ignore: J) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
        J: IntoIterator,
        J::Item: Into<String>,
    {
        let truth = EvalTruth {
            query_id: query_id.into(),
            relevant: relevant.into_iter().map(Into::into).collect(),
            ignore: ignore.into_iter().map(Into::into).collect(),
        };
        truth.validate()?;
        Ok(truth)
    }

    pub fn validate(&self) -> Result<()> {
        if self.relevant.is_empty() {
            return Err(Error::EmptyTruth);
        }
        if let Some(id) = self.relevant.intersection(&self.ignore).next() {
            return Err(Error::bad_params(format!(
                "{id} is both relevant and ignored for query {}",
                self.query_id
            )));
        }
        Ok(())
    }
}

/// Trapezoidal average precision over the precision/recall walk, with
/// precision starting at 1. Relevant ids that never appear in the ranking
/// add no recall, so they lower the score.
pub fn average_precision<S: AsRef<str>>(ranking: &[S], truth: &EvalTruth) -> Result<f64> {
    if truth.relevant.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let total = truth.relevant.len() as f64;
    let mut ap = 0.0;
    let mut hits = 0usize;
    let mut seen = 0usize;
    let mut prev_recall = 0.0;
    let mut prev_precision = 1.0;
    for id in ranking {
        let id = id.as_ref();
        if truth.ignore.contains(id) {
            continue;
        }
        if truth.relevant.contains(id) {
            hits += 1;
        }
        seen += 1;
        let recall = hits as f64 / total;
        let precision = hits as f64 / seen as f64;
        ap += (recall - prev_recall) * (prev_precision + precision) / 2.0;
        prev_recall = recall;
        prev_precision = precision;
    }
    Ok(ap)
}

pub fn mean_ap(per_query: &[f64]) -> Result<f64> {
    if per_query.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(per_query.iter().sum::<f64>() / per_query.len() as f64)
}

/// Fraction of the relevant ids that made it into the subgraph.
pub fn subgraph_recall(sub: &Subgraph<'_>, truth: &EvalTruth) -> Result<f64> {
    if truth.relevant.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let graph = sub.parent();
    let covered = truth
        .relevant
        .iter()
        .filter(|id| graph.index_of(id).is_some_and(|v| sub.contains(v)))
        .count();
    Ok(covered as f64 / truth.relevant.len() as f64)
}

/// Cartesian grid of pipeline parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub root_sizes: Vec<usize>,
    pub depths: Vec<usize>,
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub iters: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let sub = SubgraphParams::default();
        let prop = PropagationParams::default();
        SweepSpec {
            root_sizes: vec![sub.root_size],
            depths: vec![sub.depth],
            alphas: vec![prop.alpha],
            gammas: vec![prop.gamma],
            iters: vec![prop.iters],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub subgraph: SubgraphParams,
    pub propagation: PropagationParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.root_sizes.is_empty()
            || self.depths.is_empty()
            || self.alphas.is_empty()
            || self.gammas.is_empty()
            || self.iters.is_empty()
        {
            return Err(Error::bad_params("every sweep grid needs at least one value"));
        }
        for point in self.points() {
            point.subgraph.validate()?;
            point.propagation.validate()?;
        }
        Ok(())
    }

    /// Grid points in lexicographic order over
    /// (root_size, depth, alpha, gamma, iters).
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &root_size in &self.root_sizes {
            for &depth in &self.depths {
                for &alpha in &self.alphas {
                    for &gamma in &self.gammas {
                        for &iters in &self.iters {
                            out.push(GridPoint {
                                subgraph: SubgraphParams { root_size, depth },
                                propagation: PropagationParams {
                                    alpha,
                                    gamma,
                                    iters,
                                    tolerance: None,
                                },
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub point: GridPoint,
    pub map: f64,
    pub mean_recall: f64,
    pub mean_subgraph_order: f64,
}

/// Per-query result of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryScore {
    pub query_id: String,
    pub ap: f64,
    pub recall: f64,
    pub subgraph_order: usize,
}

pub fn evaluate_query(graph: &MatchGraph, query: &Query, truth: &EvalTruth, config: &RankConfig) -> Result<QueryScore> {
    let outcome = run_query(graph, query, config)?;
    let ids: Vec<&str> = outcome.ranking.iter().map(|(id, _)| id.as_str()).collect();
    Ok(QueryScore {
        query_id: query.id.clone(),
        ap: average_precision(&ids, truth)?,
        recall: subgraph_recall(&outcome.subgraph, truth)?,
        subgraph_order: outcome.subgraph.order(),
    })
}

fn evaluate_point(
    graph: &MatchGraph,
    queries: &[Query],
    truths: &BTreeMap<String, EvalTruth>,
    point: GridPoint,
) -> Result<SweepRow> {
    let config = RankConfig {
        subgraph: Some(point.subgraph),
        propagation: point.propagation,
    };
    let mut aps = Vec::with_capacity(queries.len());
    let mut recall = 0.0;
    let mut order = 0.0;
    for query in queries {
        let truth = &truths[&query.id];
        let score = evaluate_query(graph, query, truth, &config)?;
        aps.push(score.ap);
        recall += score.recall;
        order += score.subgraph_order as f64;
    }
    let n = queries.len() as f64;
    Ok(SweepRow {
        point,
        map: mean_ap(&aps)?,
        mean_recall: recall / n,
        mean_subgraph_order: order / n,
    })
}

/// Evaluates every grid point. Rows come back in grid order whatever the
/// worker count; each point is computed on a single thread.
pub fn run_sweep(
    graph: &MatchGraph,
    queries: &[Query],
    truths: &BTreeMap<String, EvalTruth>,
    spec: &SweepSpec,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if queries.is_empty() {
        return Err(Error::EmptyInput);
    }
    for q in queries {
        if !truths.contains_key(&q.id) {
            return Err(Error::MissingTruth(q.id.clone()));
        }
    }
    let points = spec.points();
    let workers = workers.clamp(1, points.len());
    if workers == 1 {
        return points
            .into_iter()
            .map(|p| evaluate_point(graph, queries, truths, p))
            .collect();
    }
    let mut slots: Vec<Option<Result<SweepRow>>> = (0..points.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let points = &points;
                scope.spawn(move || {
                    (w..points.len())
                        .step_by(workers)
                        .map(|i| (i, evaluate_point(graph, queries, truths, points[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (i, row) in handle.join().expect("sweep worker panicked") {
                slots[i] = Some(row);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every grid point evaluated"))
        .collect()
}

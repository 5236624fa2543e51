//! Weighted match graph built from pairwise inlier counts.
//!
//! Each pair of images with `c` verified inliers gets the saturating weight
//! `c² / (σ² + c²)` when `c ≥ θ` and no edge otherwise. The graph keeps both
//! the symmetric weight matrix and its row-normalized form, which is the
//! propagation operator.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Line, Result};
use crate::sparse::CsrMatrix;

pub const DEFAULT_THETA: u64 = 10;
pub const DEFAULT_SIGMA: f64 = 10.0;

/// One undirected observation: `inliers` verified correspondences between
/// images `u` and `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchRecord {
    pub u: String,
    pub v: String,
    pub inliers: u64,
}

impl MatchRecord {
    pub fn new(u: impl Into<String>, v: impl Into<String>, inliers: u64) -> Self {
        MatchRecord {
            u: u.into(),
            v: v.into(),
            inliers,
        }
    }

    /// The pair in canonical (sorted) order.
    pub fn key(&self) -> (&str, &str) {
        if self.u <= self.v {
            (&self.u, &self.v)
        } else {
            (&self.v, &self.u)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub theta: u64,
    pub sigma: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            theta: DEFAULT_THETA,
            sigma: DEFAULT_SIGMA,
        }
    }
}

impl KernelParams {
    pub fn new(theta: u64, sigma: f64) -> Result<Self> {
        let params = KernelParams { theta, sigma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::bad_params(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Saturating match kernel: `c² / (σ² + c²)` for `c ≥ θ`, else 0.
pub fn match_score(c: u64, params: &KernelParams) -> f64 {
    if c < params.theta || c == 0 {
        return 0.0;
    }
    let c = c as f64;
    let c2 = c * c;
    c2 / (params.sigma * params.sigma + c2)
}

/// Immutable match graph with dense vertex indices assigned in lexicographic
/// id order.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchGraph {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    weights: CsrMatrix,
    // Raw inlier counts, parallel to the nonzeros of `weights`.
    counts: Vec<u64>,
    row_norm: CsrMatrix,
    kernel: KernelParams,
}

/// Edge as stored in the graph: `u < v` by index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub inliers: u64,
    pub weight: f64,
}

impl MatchGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.nnz() / 2
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_id(&self, i: usize) -> Option<&str> {
        self.vertices.get(i).map(String::as_str)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    /// Symmetric weight matrix `m_uv`.
    pub fn weights(&self) -> &CsrMatrix {
        &self.weights
    }

    /// Row-normalized adjacency `a_ij = m_ij / Σ_n m_in`.
    pub fn row_normalized(&self) -> &CsrMatrix {
        &self.row_norm
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights.get(u, v)
    }

    /// Indices adjacent to `v`, ascending.
    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        if v >= self.vertex_count() {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(self.weights.row_indices(v))
    }

    /// Each undirected edge once, ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            let start = self.row_offset(u);
            self.weights
                .row(u)
                .enumerate()
                .filter(move |(_, (v, _))| *v > u)
                .map(move |(k, (v, weight))| Edge {
                    u,
                    v,
                    inliers: self.counts[start + k],
                    weight,
                })
        })
    }

    /// Inlier counts of `id` against every neighbor, keyed by neighbor id.
    pub fn counts_for(&self, id: &str) -> Result<BTreeMap<String, u64>> {
        let u = self.index_of(id).ok_or_else(|| Error::UnknownQueryId(id.to_owned()))?;
        let start = self.row_offset(u);
        Ok(self
            .weights
            .row_indices(u)
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.vertices[v].clone(), self.counts[start + k]))
            .collect())
    }

    fn row_offset(&self, u: usize) -> usize {
        self.weights.row_start(u)
    }

    /// Assembles a graph from an explicit vertex table and edge list. Used
    /// by the builder and by the persisted-form decoder.
    pub(crate) fn from_parts(vertices: Vec<String>, edges: Vec<Edge>, kernel: KernelParams) -> Result<Self> {
        let n = vertices.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in vertices.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Format(format!("vertex {id} listed twice")));
            }
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("vertex table is not sorted".into()));
        }
        let mut rows: Vec<Vec<(usize, f64, u64)>> = vec![Vec::new(); n];
        for e in edges {
            if e.u >= n || e.v >= n {
                return Err(Error::Format(format!("edge ({}, {}) out of range", e.u, e.v)));
            }
            if e.u == e.v {
                return Err(Error::SelfMatch {
                    id: vertices[e.u].clone(),
                    line: Line(None),
                });
            }
            if !(e.weight > 0.0 && e.weight <= 1.0) {
                return Err(Error::Format(format!(
                    "edge ({}, {}) weight {} outside (0, 1]",
                    vertices[e.u], vertices[e.v], e.weight
                )));
            }
            rows[e.u].push((e.v, e.weight, e.inliers));
            rows[e.v].push((e.u, e.weight, e.inliers));
        }
        let mut counts = Vec::new();
        let mut weight_rows = Vec::with_capacity(n);
        for (u, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(v, _, _)| v);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                let (a, b) = if u < w[0].0 { (u, w[0].0) } else { (w[0].0, u) };
                return Err(Error::DuplicatePair {
                    u: vertices[a].clone(),
                    v: vertices[b].clone(),
                    line: Line(None),
                });
            }
            counts.extend(row.iter().map(|&(_, _, c)| c));
            weight_rows.push(row.into_iter().map(|(v, w, _)| (v, w)).collect());
        }
        let weights = CsrMatrix::from_rows(weight_rows);
        let row_norm = weights.row_normalized();
        Ok(MatchGraph {
            vertices,
            index,
            weights,
            counts,
            row_norm,
            kernel,
        })
    }
}

/// Builds the match graph. Vertex order is lexicographic by id, so any
/// permutation of `records` yields the same graph.
pub fn build_graph(records: &[MatchRecord], params: &KernelParams) -> Result<MatchGraph> {
    params.validate()?;
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    let mut ids = BTreeSet::new();
    for r in records {
        if r.u == r.v {
            return Err(Error::SelfMatch {
                id: r.u.clone(),
                line: Line(None),
            });
        }
        let (a, b) = r.key();
        if !seen.insert((a, b)) {
            return Err(Error::DuplicatePair {
                u: a.to_owned(),
                v: b.to_owned(),
                line: Line(None),
            });
        }
        ids.insert(r.u.as_str());
        ids.insert(r.v.as_str());
    }
    let vertices: Vec<String> = ids.into_iter().map(str::to_owned).collect();
    let position = |id: &str| vertices.binary_search_by(|v| v.as_str().cmp(id)).unwrap();
    let edges = records
        .iter()
        .filter_map(|r| {
            let weight = match_score(r.inliers, params);
            (weight > 0.0).then(|| {
                let (a, b) = (position(&r.u), position(&r.v));
                Edge {
                    u: a.min(b),
                    v: a.max(b),
                    inliers: r.inliers,
                    weight,
                }
            })
        })
        .collect();
    MatchGraph::from_parts(vertices, edges, *params)
}

//! Query-centered subgraph extraction.
//!
//! The top vertices by direct relevance form the root set; the subgraph is
//! every vertex within `depth` hops of a root, with the induced edges.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::MatchGraph;
use crate::sparse::CsrMatrix;

pub const DEFAULT_ROOT_SIZE: usize = 30;
pub const DEFAULT_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgraphParams {
    pub root_size: usize,
    pub depth: usize,
}

impl Default for SubgraphParams {
    fn default() -> Self {
        SubgraphParams {
            root_size: DEFAULT_ROOT_SIZE,
            depth: DEFAULT_DEPTH,
        }
    }
}

impl SubgraphParams {
    pub fn new(root_size: usize, depth: usize) -> Result<Self> {
        let params = SubgraphParams { root_size, depth };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.root_size == 0 {
            return Err(Error::bad_params("root set size must be at least 1"));
        }
        Ok(())
    }
}

/// Vertex subset of a parent graph. Members are sorted ascending.
#[derive(Debug, Clone)]
pub struct Subgraph<'g> {
    parent: &'g MatchGraph,
    members: Vec<usize>,
    roots: Vec<usize>,
}

impl<'g> Subgraph<'g> {
    /// The whole graph, with the given roots.
    pub fn full(parent: &'g MatchGraph, roots: Vec<usize>) -> Self {
        Subgraph {
            parent,
            members: (0..parent.vertex_count()).collect(),
            roots,
        }
    }

    pub fn parent(&self) -> &'g MatchGraph {
        self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Local index of parent vertex `v`, if it is a member.
    pub fn local_index(&self, v: usize) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    pub fn member_ids(&self) -> impl Iterator<Item = &'g str> + '_ {
        self.members
            .iter()
            .map(|&v| self.parent.vertex_id(v).expect("member index in range"))
    }

    /// Number of undirected parent edges with both endpoints inside.
    pub fn edge_count(&self) -> usize {
        self.members
            .iter()
            .map(|&v| {
                self.parent
                    .weights()
                    .row_indices(v)
                    .iter()
                    .filter(|&&j| j > v && self.contains(j))
                    .count()
            })
            .sum()
    }
}

/// Indices of the `root_size` largest positive entries of `d`, ties broken by
/// ascending index. The result is sorted by index.
pub fn select_roots(d: &[f64], params: &SubgraphParams) -> Result<Vec<usize>> {
    params.validate()?;
    let mut positive: Vec<usize> = (0..d.len()).filter(|&i| d[i] > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::NoDirectMatches);
    }
    positive.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    positive.truncate(params.root_size);
    positive.sort_unstable();
    Ok(positive)
}

/// All vertices within `depth` hops of some root, via level-synchronous BFS.
pub fn expand_subgraph<'g>(graph: &'g MatchGraph, roots: &[usize], depth: usize) -> Result<Subgraph<'g>> {
    if roots.is_empty() {
        return Err(Error::bad_params("root set is empty"));
    }
    let n = graph.vertex_count();
    let mut seen: HashSet<usize> = HashSet::with_capacity(roots.len());
    let mut frontier = Vec::with_capacity(roots.len());
    for &r in roots {
        if r >= n {
            return Err(Error::UnknownVertex(r.to_string()));
        }
        if seen.insert(r) {
            frontier.push(r);
        }
    }
    let mut root_set: Vec<usize> = frontier.clone();
    root_set.sort_unstable();

    for _ in 0..depth {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in graph.neighbors(v)? {
                if seen.insert(w) {
                    next.push(w);
                }
            }
        }
        frontier = next;
    }

    let mut members: Vec<usize> = seen.into_iter().collect();
    members.sort_unstable();
    Ok(Subgraph {
        parent: graph,
        members,
        roots: root_set,
    })
}

/// Vectors and operator restricted to a subgraph's members.
#[derive(Debug, Clone, PartialEq)]
pub struct Restricted {
    /// Parent index of each local index.
    pub parent_index: Vec<usize>,
    /// Vertex id of each local index.
    pub ids: Vec<String>,
    pub d: Vec<f64>,
    /// Induced adjacency, rows re-normalized over surviving edges.
    pub adjacency: CsrMatrix,
}

pub fn restrict_vectors(sub: &Subgraph<'_>, d: &[f64]) -> Result<Restricted> {
    let parent = sub.parent();
    if d.len() != parent.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: parent.vertex_count(),
            found: d.len(),
        });
    }
    let weights = parent.weights();
    let rows = sub
        .members()
        .iter()
        .map(|&v| {
            weights
                .row(v)
                .filter_map(|(j, w)| sub.local_index(j).map(|local| (local, w)))
                .collect()
        })
        .collect();
    Ok(Restricted {
        parent_index: sub.members().to_vec(),
        ids: sub.member_ids().map(str::to_owned).collect(),
        d: sub.members().iter().map(|&v| d[v]).collect(),
        adjacency: CsrMatrix::from_rows(rows).row_normalized(),
    })
}

//! Seeded synthetic corpora.
//!
//! `Chain` is a single object photographed from drifting viewpoints: each
//! image matches only its neighbors in the sequence, and the query matches
//! only the first one. `Clusters` has one relevant object among several
//! distractor objects, joined through hub images that show two objects at
//! once.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::EvalTruth;
use crate::graph::MatchRecord;
use crate::pipeline::Query;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Relevant images in the chain.
    pub relevant: usize,
    /// Distractor images, matched among themselves but never to the chain.
    pub noise: usize,
    /// Inliers between the query and the first chain image.
    pub query_inliers: u64,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            relevant: 4,
            noise: 10,
            query_inliers: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    /// Distractor clusters besides the relevant one.
    pub distractors: usize,
    pub relevant_size: usize,
    pub distractor_size: usize,
    /// Each relevant image matches this many successors in viewpoint order.
    pub relevant_reach: usize,
    /// Probability of an extra match between any two relevant images.
    pub relevant_density: f64,
    /// Intra-cluster match probability in distractor clusters.
    pub distractor_density: f64,
    /// Hub images per distractor cluster.
    pub hubs: usize,
    /// Distractor images each hub matches.
    pub hub_fanout: usize,
    pub queries: usize,
    /// Relevant images each query matches directly.
    pub query_matches: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            distractors: 4,
            relevant_size: 12,
            distractor_size: 16,
            relevant_reach: 2,
            relevant_density: 0.0,
            distractor_density: 0.8,
            hubs: 6,
            hub_fanout: 8,
            queries: 8,
            query_matches: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthModel {
    Chain(ChainParams),
    Clusters(ClusterParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub records: Vec<MatchRecord>,
    pub queries: Vec<Query>,
    pub truths: Vec<EvalTruth>,
}

// Inlier ranges. Strong counts clear the default threshold with margin,
// weak ones stay below any threshold above `WEAK.end()`.
const STRONG: std::ops::RangeInclusive<u64> = 15..=60;
const WEAK: std::ops::RangeInclusive<u64> = 0..=4;

pub fn gen_synthetic(model: &SynthModel, seed: u64) -> Result<SyntheticCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model {
        SynthModel::Chain(p) => chain(p, &mut rng),
        SynthModel::Clusters(p) => clusters(p, &mut rng),
    }
}

fn label(prefix: &str, i: usize, count: usize) -> String {
    let width = count.max(1).to_string().len().max(2);
    format!("{prefix}-{:0width$}", i + 1)
}

/// Accumulates records, keyed by unordered pair so no pair repeats.
#[derive(Default)]
struct Records(BTreeMap<(String, String), u64>);

impl Records {
    fn add(&mut self, u: &str, v: &str, c: u64) -> bool {
        debug_assert_ne!(u, v);
        let key = if u < v {
            (u.to_owned(), v.to_owned())
        } else {
            (v.to_owned(), u.to_owned())
        };
        match self.0.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
                true
            }
            std::collections::btree_map::Entry::Occupied(_) => false,
        }
    }

    fn into_vec(self) -> Vec<MatchRecord> {
        self.0
            .into_iter()
            .map(|((u, v), c)| MatchRecord::new(u, v, c))
            .collect()
    }
}

fn chain(p: &ChainParams, rng: &mut ChaCha8Rng) -> Result<SyntheticCorpus> {
    if p.relevant == 0 {
        return Err(Error::bad_params("chain needs at least one relevant image"));
    }
    if p.relevant + p.noise < 2 {
        return Err(Error::bad_params("chain corpus needs at least two images"));
    }
    if p.query_inliers == 0 {
        return Err(Error::bad_params("query inliers must be positive"));
    }
    let objects: Vec<String> = (0..p.relevant).map(|i| label("obj", i, p.relevant)).collect();
    let noise: Vec<String> = (0..p.noise).map(|i| label("noise", i, p.noise)).collect();
    let mut records = Records::default();

    for pair in objects.windows(2) {
        records.add(&pair[0], &pair[1], rng.gen_range(STRONG));
    }
    // Noise forms its own random forest plus a few extra edges.
    for i in 1..noise.len() {
        let j = rng.gen_range(0..i);
        records.add(&noise[i], &noise[j], rng.gen_range(STRONG));
    }
    for _ in 0..noise.len() / 2 {
        let (a, b) = (rng.gen_range(0..noise.len()), rng.gen_range(0..noise.len()));
        if a != b {
            records.add(&noise[a], &noise[b], rng.gen_range(STRONG));
        }
    }
    // Weak, sub-threshold false matches between objects and noise.
    if !noise.is_empty() {
        for obj in &objects {
            let n = noise.choose(rng).expect("noise non-empty");
            records.add(obj, n, rng.gen_range(WEAK));
        }
    }

    let mut counts = BTreeMap::new();
    counts.insert(objects[0].clone(), p.query_inliers);
    for n in noise.choose_multiple(rng, noise.len().min(3)) {
        counts.insert(n.clone(), rng.gen_range(WEAK));
    }
    let truth = EvalTruth::new("q", objects.iter().cloned(), Vec::<String>::new())?;
    Ok(SyntheticCorpus {
        records: records.into_vec(),
        queries: vec![Query::new("q", counts)],
        truths: vec![truth],
    })
}

/// Random graph over `members` with edge probability `density`, kept
/// connected by a random spanning tree.
fn cluster_edges(members: &[String], density: f64, rng: &mut ChaCha8Rng, records: &mut Records) {
    for i in 1..members.len() {
        let j = rng.gen_range(0..i);
        records.add(&members[i], &members[j], rng.gen_range(STRONG));
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if rng.gen_bool(density) {
                records.add(&members[i], &members[j], rng.gen_range(STRONG));
            }
        }
    }
}

fn clusters(p: &ClusterParams, rng: &mut ChaCha8Rng) -> Result<SyntheticCorpus> {
    if p.relevant_size < 2 || (p.distractors > 0 && p.distractor_size < 2) {
        return Err(Error::bad_params("clusters need at least two images each"));
    }
    if p.relevant_reach == 0 {
        return Err(Error::bad_params("relevant reach must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p.relevant_density) || !(0.0..=1.0).contains(&p.distractor_density) {
        return Err(Error::bad_params("cluster densities must lie in [0, 1]"));
    }
    if p.queries == 0 || p.query_matches == 0 || p.query_matches > p.relevant_size {
        return Err(Error::bad_params(
            "need at least one query matching between 1 and relevant_size images",
        ));
    }
    if p.hub_fanout > p.distractor_size {
        return Err(Error::bad_params("hub fanout exceeds distractor cluster size"));
    }

    let relevant: Vec<String> = (0..p.relevant_size).map(|i| label("rel", i, p.relevant_size)).collect();
    let mut records = Records::default();
    for i in 0..relevant.len() {
        for j in i + 1..relevant.len().min(i + 1 + p.relevant_reach) {
            records.add(&relevant[i], &relevant[j], rng.gen_range(STRONG));
        }
    }
    for i in 0..relevant.len() {
        for j in i + 1 + p.relevant_reach..relevant.len() {
            if rng.gen_bool(p.relevant_density) {
                records.add(&relevant[i], &relevant[j], rng.gen_range(STRONG));
            }
        }
    }

    let mut hubs = Vec::new();
    for c in 0..p.distractors {
        let members: Vec<String> = (0..p.distractor_size)
            .map(|i| label(&format!("d{}", c + 1), i, p.distractor_size))
            .collect();
        cluster_edges(&members, p.distractor_density, rng, &mut records);
        for h in 0..p.hubs {
            let hub = format!("hub{}-{}", c + 1, h + 1);
            let anchor = relevant.choose(rng).expect("relevant non-empty");
            records.add(&hub, anchor, rng.gen_range(STRONG));
            for m in members.choose_multiple(rng, p.hub_fanout) {
                records.add(&hub, m, rng.gen_range(STRONG));
            }
            hubs.push(hub);
        }
    }

    let mut queries = Vec::with_capacity(p.queries);
    let mut truths = Vec::with_capacity(p.queries);
    for q in 0..p.queries {
        let id = label("q", q, p.queries);
        let counts: BTreeMap<String, u64> = relevant
            .choose_multiple(rng, p.query_matches)
            .map(|r| (r.clone(), rng.gen_range(STRONG)))
            .collect();
        let ignore: BTreeSet<&String> = hubs.iter().collect();
        truths.push(EvalTruth::new(
            &id,
            relevant.iter().cloned(),
            ignore.into_iter().cloned(),
        )?);
        queries.push(Query::new(id, counts));
    }

    Ok(SyntheticCorpus {
        records: records.into_vec(),
        queries,
        truths,
    })
}

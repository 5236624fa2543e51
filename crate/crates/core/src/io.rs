//! Text and binary file formats.
//!
//! * matches: `u<TAB>v<TAB>c` per line
//! * query: `id<TAB>c` per line
//! * ranking: `rank<TAB>id<TAB>score`, score with 17 significant digits
//! * truth: JSON object `{query_id: {"relevant": [..], "ignore": [..]}}`
//! * graph: little-endian binary, see [`encode_graph`]
//!
//! In the line formats `#` starts a comment line and blank lines are skipped.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Line, Result};
use crate::eval::{EvalTruth, SweepRow};
use crate::graph::{match_score, Edge, KernelParams, MatchGraph, MatchRecord};

pub const GRAPH_MAGIC: &[u8; 13] = b"RELPROP-GRAPH";
pub const GRAPH_VERSION: u32 = 1;

pub const SWEEP_HEADER: &str = "root_size,depth,alpha,gamma,iters,map,mean_recall,mean_subgraph_order";

/// Non-comment, non-blank lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_count(field: &str, line: usize) -> Result<u64> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(
            line,
            format!("count {field:?} is not a non-negative integer"),
        ));
    }
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("count {field} out of range")))
}

fn parse_id(field: &str, line: usize) -> Result<&str> {
    if field.is_empty() {
        return Err(Error::parse(line, "empty vertex id"));
    }
    Ok(field)
}

pub fn parse_matches(text: &str) -> Result<Vec<MatchRecord>> {
    let mut records = Vec::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        let [u, v, c] = fields[..] else {
            return Err(Error::parse(
                line,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        };
        let (u, v) = (parse_id(u, line)?, parse_id(v, line)?);
        let inliers = parse_count(c, line)?;
        if u == v {
            return Err(Error::SelfMatch {
                id: u.to_owned(),
                line: Line(Some(line)),
            });
        }
        let record = MatchRecord::new(u, v, inliers);
        let (a, b) = record.key();
        if seen.insert((a.to_owned(), b.to_owned()), line).is_some() {
            return Err(Error::DuplicatePair {
                u: a.to_owned(),
                v: b.to_owned(),
                line: Line(Some(line)),
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_matches(records: &[MatchRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}\t{}", r.u, r.v, r.inliers);
    }
    out
}

pub fn parse_query(text: &str) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        let [id, c] = fields[..] else {
            return Err(Error::parse(
                line,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        };
        let id = parse_id(id, line)?;
        let c = parse_count(c, line)?;
        if counts.insert(id.to_owned(), c).is_some() {
            return Err(Error::parse(line, format!("id {id} listed twice")));
        }
    }
    Ok(counts)
}

pub fn write_query(counts: &BTreeMap<String, u64>) -> String {
    let mut out = String::new();
    for (id, c) in counts {
        let _ = writeln!(out, "{id}\t{c}");
    }
    out
}

/// Round-trippable score text: 17 significant digits.
pub fn format_score(score: f64) -> String {
    format!("{score:.16e}")
}

pub fn write_ranking(ranking: &[(String, f64)]) -> String {
    let mut out = String::new();
    for (i, (id, score)) in ranking.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}", i + 1, id, format_score(*score));
    }
    out
}

pub fn parse_ranking(text: &str) -> Result<Vec<(String, f64)>> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        let [rank, id, score] = fields[..] else {
            return Err(Error::parse(
                line,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        };
        let rank: usize = rank
            .parse()
            .map_err(|_| Error::parse(line, format!("bad rank {rank:?}")))?;
        if rank != out.len() + 1 {
            return Err(Error::parse(line, format!("rank {rank} out of sequence")));
        }
        let id = parse_id(id, line)?;
        let score: f64 = score
            .parse()
            .map_err(|_| Error::parse(line, format!("bad score {score:?}")))?;
        if !score.is_finite() {
            return Err(Error::parse(line, "score is not finite"));
        }
        if out.iter().any(|(seen, _)| seen == id) {
            return Err(Error::parse(line, format!("id {id} ranked twice")));
        }
        out.push((id.to_owned(), score));
    }
    Ok(out)
}

pub fn parse_truth(text: &str) -> Result<BTreeMap<String, EvalTruth>> {
    let mut truths: BTreeMap<String, EvalTruth> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    for (id, truth) in truths.iter_mut() {
        truth.query_id = id.clone();
        truth.validate()?;
    }
    Ok(truths)
}

pub fn write_truth<'a>(truths: impl IntoIterator<Item = &'a EvalTruth>) -> String {
    let map: BTreeMap<&str, &EvalTruth> = truths.into_iter().map(|t| (t.query_id.as_str(), t)).collect();
    let mut out = serde_json::to_string_pretty(&map).expect("truth serializes");
    out.push('\n');
    out
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{},{:.6},{:.6},{:.6}",
            r.point.subgraph.root_size,
            r.point.subgraph.depth,
            r.point.propagation.alpha,
            r.point.propagation.gamma,
            r.point.propagation.iters,
            r.map,
            r.mean_recall,
            r.mean_subgraph_order,
        );
    }
    out
}

/// Serializes a graph.
///
/// ```text
/// magic    13 bytes  "RELPROP-GRAPH"
/// version  u32
/// theta    u64
/// sigma    f64
/// vertices u64 count, then per vertex: u32 byte length + UTF-8 id
/// edges    u64 count, then per edge (u < v, ascending):
///          u64 u, u64 v, u64 inliers, f64 weight
/// ```
///
/// All integers and floats are little-endian; floats are raw IEEE-754 bits.
pub fn encode_graph(graph: &MatchGraph) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(GRAPH_MAGIC);
    out.extend_from_slice(&GRAPH_VERSION.to_le_bytes());
    let kernel = graph.kernel();
    out.extend_from_slice(&kernel.theta.to_le_bytes());
    out.extend_from_slice(&kernel.sigma.to_bits().to_le_bytes());
    out.extend_from_slice(&(graph.vertex_count() as u64).to_le_bytes());
    for id in graph.vertices() {
        out.extend_from_slice(&(id.len() as u32).to_le_bytes());
        out.extend_from_slice(id.as_bytes());
    }
    out.extend_from_slice(&(graph.edge_count() as u64).to_le_bytes());
    for e in graph.edges() {
        out.extend_from_slice(&(e.u as u64).to_le_bytes());
        out.extend_from_slice(&(e.v as u64).to_le_bytes());
        out.extend_from_slice(&e.inliers.to_le_bytes());
        out.extend_from_slice(&e.weight.to_bits().to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Format(format!("truncated while reading {what}")));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_bits(self.u64(what)?))
    }

    /// Reads an element count, rejecting counts the remaining bytes cannot
    /// possibly hold.
    fn count(&mut self, min_elem: usize, what: &str) -> Result<usize> {
        let n = self.u64(what)?;
        if n > (self.buf.len() / min_elem) as u64 {
            return Err(Error::Format(format!("{what} count {n} exceeds file size")));
        }
        Ok(n as usize)
    }

    fn index(&mut self, n: usize, what: &str) -> Result<usize> {
        let i = self.u64(what)?;
        if i >= n as u64 {
            return Err(Error::Format(format!("{what} {i} out of range")));
        }
        Ok(i as usize)
    }
}

pub fn decode_graph(bytes: &[u8]) -> Result<MatchGraph> {
    let mut r = Reader { buf: bytes };
    if r.take(GRAPH_MAGIC.len(), "magic")? != GRAPH_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32("version")?;
    if version != GRAPH_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let theta = r.u64("theta")?;
    let sigma = r.f64("sigma")?;
    let kernel = KernelParams::new(theta, sigma).map_err(|e| Error::Format(e.to_string()))?;

    let n = r.count(4, "vertex")?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let len = r.u32("vertex id length")? as usize;
        let raw = r.take(len, "vertex id")?;
        let id = std::str::from_utf8(raw).map_err(|_| Error::Format("vertex id is not UTF-8".into()))?;
        if id.is_empty() {
            return Err(Error::Format("empty vertex id".into()));
        }
        vertices.push(id.to_owned());
    }

    let m = r.count(32, "edge")?;
    let mut edges = Vec::with_capacity(m);
    let mut last: Option<(usize, usize)> = None;
    for _ in 0..m {
        let u = r.index(n, "edge endpoint")?;
        let v = r.index(n, "edge endpoint")?;
        let inliers = r.u64("inliers")?;
        let weight = r.f64("weight")?;
        if u >= v || last.is_some_and(|prev| prev >= (u, v)) {
            return Err(Error::Format(format!("edge ({u}, {v}) out of canonical order")));
        }
        if weight.to_bits() != match_score(inliers, &kernel).to_bits() || weight == 0.0 {
            return Err(Error::Format(format!(
                "edge ({u}, {v}) weight does not match its inlier count"
            )));
        }
        last = Some((u, v));
        edges.push(Edge { u, v, inliers, weight });
    }
    if !r.buf.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", r.buf.len())));
    }
    MatchGraph::from_parts(vertices, edges, kernel)
}

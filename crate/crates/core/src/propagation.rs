//! Direct, indirect and comprehensive relevance.
//!
//! Direct relevance `d` is the kernel score of the query against each vertex,
//! normalized to unit sum. Indirect relevance `τ` starts at `d` and is
//! updated `N` times by the damped step
//!
//! > τ ← α·A·τ + (1 − α)·d
//!
//! where `A` is the row-normalized adjacency. The comprehensive relevance
//! used for ranking is `s = γ·d + (1 − γ)·τ`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{match_score, KernelParams};
use crate::sparse::CsrMatrix;

pub const DEFAULT_ALPHA: f64 = 0.6;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_ITERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    /// Decay factor on propagated mass.
    pub alpha: f64,
    /// Weight of direct relevance in the final blend.
    pub gamma: f64,
    /// Number of damped update steps.
    pub iters: usize,
    /// Stop early once the max-norm step falls to or below this value.
    pub tolerance: Option<f64>,
}

impl Default for PropagationParams {
    fn default() -> Self {
        PropagationParams {
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            iters: DEFAULT_ITERS,
            tolerance: None,
        }
    }
}

impl PropagationParams {
    pub fn new(alpha: f64, gamma: f64, iters: usize) -> Result<Self> {
        let params = PropagationParams {
            alpha,
            gamma,
            iters,
            tolerance: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::bad_params(format!("alpha {} not in [0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::bad_params(format!("gamma {} not in [0, 1]", self.gamma)));
        }
        if self.iters == 0 {
            return Err(Error::bad_params("iters must be at least 1"));
        }
        if let Some(tol) = self.tolerance {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::bad_params(format!(
                    "tolerance {tol} is not a finite non-negative value"
                )));
            }
        }
        Ok(())
    }
}

/// A query's raw inlier counts and its normalized direct relevance over a
/// working vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryContext {
    pub query_id: String,
    pub raw_counts: BTreeMap<String, u64>,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceState {
    pub d: Vec<f64>,
    pub tau: Vec<f64>,
    pub s: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl RelevanceState {
    pub fn compute(adjacency: &CsrMatrix, d: Vec<f64>, params: &PropagationParams) -> Result<Self> {
        let Propagated { tau, residuals } = propagate(adjacency, &d, params)?;
        let s = comprehensive_relevance(&d, &tau, params.gamma)?;
        Ok(RelevanceState { d, tau, s, residuals })
    }
}

/// Kernel scores of the query against `working_set`, normalized to sum 1.
/// Vertices missing from `raw_counts` count as zero inliers.
pub fn direct_relevance<S: AsRef<str>>(
    query_id: &str,
    raw_counts: &BTreeMap<String, u64>,
    working_set: &[S],
    kernel: &KernelParams,
) -> Result<QueryContext> {
    if working_set.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut d: Vec<f64> = working_set
        .iter()
        .map(|id| match_score(raw_counts.get(id.as_ref()).copied().unwrap_or(0), kernel))
        .collect();
    normalize(&mut d)?;
    Ok(QueryContext {
        query_id: query_id.to_owned(),
        raw_counts: raw_counts.clone(),
        d,
    })
}

/// Scales `d` to unit sum.
pub fn normalize(d: &mut [f64]) -> Result<()> {
    let total: f64 = d.iter().sum();
    if total <= 0.0 {
        return Err(Error::NoDirectMatches);
    }
    for x in d.iter_mut() {
        *x /= total;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub tau: Vec<f64>,
    /// `residuals[k]` is `‖τ^{k+1} − τ^k‖∞`.
    pub residuals: Vec<f64>,
}

/// Runs the damped update `params.iters` times from `τ⁰ = d`.
pub fn propagate(adjacency: &CsrMatrix, d: &[f64], params: &PropagationParams) -> Result<Propagated> {
    params.validate()?;
    let n = adjacency.dim();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.len(),
        });
    }
    let alpha = params.alpha;
    let bias = 1.0 - alpha;
    let mut tau = d.to_vec();
    let mut next = vec![0.0; n];
    let mut residuals = Vec::with_capacity(params.iters);
    for _ in 0..params.iters {
        adjacency.mul_vec_into(&tau, &mut next)?;
        let mut delta: f64 = 0.0;
        for ((t_next, &t), &di) in next.iter_mut().zip(&tau).zip(d) {
            *t_next = alpha * *t_next + bias * di;
            delta = delta.max((*t_next - t).abs());
        }
        std::mem::swap(&mut tau, &mut next);
        residuals.push(delta);
        if params.tolerance.is_some_and(|tol| delta <= tol) {
            break;
        }
    }
    Ok(Propagated { tau, residuals })
}

/// `s = γ·d + (1 − γ)·τ`.
pub fn comprehensive_relevance(d: &[f64], tau: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if d.len() != tau.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: tau.len(),
        });
    }
    Ok(d.iter()
        .zip(tau)
        .map(|(&di, &ti)| gamma * di + (1.0 - gamma) * ti)
        .collect())
}

/// Orders scored ids by descending score, then ascending id. Ids whose
/// score is zero were never reached and are left out.
pub fn rank<S: AsRef<str>>(s: &[f64], ids: &[S]) -> Result<Vec<(String, f64)>> {
    if s.len() != ids.len() {
        return Err(Error::DimensionMismatch {
            expected: ids.len(),
            found: s.len(),
        });
    }
    let mut out: Vec<(String, f64)> = s
        .iter()
        .zip(ids)
        .filter(|(&score, _)| score > 0.0)
        .map(|(&score, id)| (id.as_ref().to_owned(), score))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

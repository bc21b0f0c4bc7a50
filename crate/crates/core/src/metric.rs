//! The intrinsic path metric `δ_a` (edge length `1/√a`), metric balls, the
//! Lipschitz cutoff `min(1, δ_a(·, V∖B_{R+1}))`, and asymptotic series
//! classification for completeness along rays.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::catalog::{Completeness, PathFamily};
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::{VertexId, WeightedGraph};

/// `1/√a`.
pub fn edge_length(a: f64) -> Result<f64> {
    if a > 0.0 && a.is_finite() {
        Ok(1.0 / a.sqrt())
    } else {
        Err(Error::Input(format!("conductance must be positive and finite, got {a}")))
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties by index for determinism
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source shortest paths under `1/√a`; the graph's conductances are `a`.
/// Unreachable vertices get `f64::INFINITY`.
fn dijkstra(g: &WeightedGraph, sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Entry(0.0, s));
    }
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(j, a) in g.adj(i) {
            let nd = d + 1.0 / a.sqrt();
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Entry(nd, j));
            }
        }
    }
    dist
}

/// `δ_a(x, ·)` for every vertex of the graph.
pub fn distances_from(g: &WeightedGraph, x: VertexId) -> Result<BTreeMap<VertexId, f64>> {
    let d = dijkstra(g, &[g.idx(x)?]);
    Ok(g.vertices().zip(d).collect())
}

/// `δ_a(x, y)`; infinite when no path exists.
pub fn delta_a(g: &WeightedGraph, x: VertexId, y: VertexId) -> Result<f64> {
    let j = g.idx(y)?;
    Ok(dijkstra(g, &[g.idx(x)?])[j])
}

/// `δ_a(x, S)` for every vertex `x`.
pub fn distances_to_set(g: &WeightedGraph, set: &BTreeSet<VertexId>) -> Result<BTreeMap<VertexId, f64>> {
    let sources = set.iter().map(|&x| g.idx(x)).collect::<Result<Vec<_>>>()?;
    let d = dijkstra(g, &sources);
    Ok(g.vertices().zip(d).collect())
}

/// `{x : δ_a(x0, x) <= R}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricBall {
    pub center: VertexId,
    pub radius: f64,
    pub members: BTreeSet<VertexId>,
    /// `δ_a(x0, x)` for the members.
    pub distances: BTreeMap<VertexId, f64>,
}

fn checked_distances(g: &WeightedGraph, x0: VertexId, radius: f64) -> Result<Vec<f64>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Input(format!("radius must be finite and nonnegative, got {radius}")));
    }
    let d = dijkstra(g, &[g.idx(x0)?]);
    let to_frontier = g
        .frontier()
        .map(|x| d[g.idx(x).expect("own vertex")])
        .fold(f64::INFINITY, f64::min);
    if to_frontier <= radius + 1.0 {
        return Err(Error::TruncationTooSmall(format!(
            "distance {to_frontier} from {x0} to the truncation edge does not exceed {}",
            radius + 1.0
        )));
    }
    Ok(d)
}

/// The metric ball of radius `R`. The truncation must reach beyond `R + 1`.
pub fn metric_ball(g: &WeightedGraph, x0: VertexId, radius: f64) -> Result<MetricBall> {
    let d = checked_distances(g, x0, radius)?;
    let distances: BTreeMap<VertexId, f64> = g.vertices().zip(d).filter(|(_, d)| *d <= radius).collect();
    Ok(MetricBall {
        center: x0,
        radius,
        members: distances.keys().copied().collect(),
        distances,
    })
}

/// `f = min(1, δ_a(·, V∖B_{R+1}))`, keyed on `B_{R+1}` (zero elsewhere).
pub fn cutoff_function(g: &WeightedGraph, x0: VertexId, radius: f64) -> Result<GraphFunction> {
    let d = checked_distances(g, x0, radius)?;
    let outer = radius + 1.0;
    let outside: Vec<usize> = (0..g.len()).filter(|&i| d[i] > outer).collect();
    let to_outside = dijkstra(g, &outside);
    Ok((0..g.len())
        .filter(|&i| d[i] <= outer)
        .map(|i| (g.id(i), to_outside[i].min(1.0)))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVerdict {
    Divergent,
    Convergent,
    Inconclusive,
}

/// Asymptotic classification of `Σ t_k` from its terms up to `n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostic {
    pub verdict: SeriesVerdict,
    /// Decay exponent `p` of `t_k ~ k^−p`, fitted over `[n_max/10, n_max]`.
    pub exponent: f64,
    /// Exponent `q` of `t_k ~ 1/(k (ln k)^q)`, fitted when `p` is near 1.
    pub log_exponent: Option<f64>,
    pub first: u64,
    pub n_max: u64,
    /// `(n, S_n)` at log-spaced `n`, ending at `n_max`.
    pub partial_sums: Vec<(u64, f64)>,
}

/// Below this fitted exponent the series is declared divergent.
pub const DIVERGENT_BELOW: f64 = 0.85;
/// Above this fitted exponent the series is declared convergent.
pub const CONVERGENT_ABOVE: f64 = 1.15;
/// Log-correction exponents at most `1 + LOG_DIVERGENT_SLACK` are divergent.
pub const LOG_DIVERGENT_SLACK: f64 = 1e-3;
/// Log-correction exponents at least this are convergent.
pub const LOG_CONVERGENT_FROM: f64 = 1.1;
const FIT_POINTS: usize = 400;
const SAMPLES_PER_DECADE: f64 = 20.0;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Classifies `Σ_{k>=first} term(k)` for positive terms.
///
/// The decay exponent `p` is fitted by log-log regression over the last
/// decade; `p < 0.85` is divergent and `p > 1.15` convergent. In between,
/// `ln(1/(k t_k))` is regressed on `ln ln k`: a slope `q <= 1.001` is
/// divergent, `q >= 1.1` convergent, anything else inconclusive.
pub fn classify_series(term: impl Fn(u64) -> f64, first: u64, n_max: u64) -> Result<SeriesDiagnostic> {
    if n_max < 100 {
        return Err(Error::Input(format!("n_max must be at least 100, got {n_max}")));
    }
    if first >= n_max / 10 {
        return Err(Error::Input(format!("first index {first} leaves no fitting decade below {n_max}")));
    }
    // partial sums with compensated summation, sampled on a log grid
    let mut sample_at: Vec<u64> = Vec::new();
    let mut t = (first.max(1) as f64).log10();
    let end = (n_max as f64).log10();
    while t < end {
        let k = 10f64.powf(t).round() as u64;
        if k >= first && sample_at.last() != Some(&k) {
            sample_at.push(k);
        }
        t += 1.0 / SAMPLES_PER_DECADE;
    }
    if sample_at.last() != Some(&n_max) {
        sample_at.push(n_max);
    }
    let mut partial_sums = Vec::with_capacity(sample_at.len());
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut next = 0;
    for k in first..=n_max {
        let v = term(k);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Numerical(format!("series term at {k} is {v}")));
        }
        let s = sum + v;
        comp += if sum.abs() >= v { (sum - s) + v } else { (v - s) + sum };
        sum = s;
        if next < sample_at.len() && sample_at[next] == k {
            partial_sums.push((k, sum + comp));
            next += 1;
        }
    }

    let lo = (n_max / 10).max(first.max(2));
    let fit_k: Vec<u64> = (0..FIT_POINTS)
        .map(|i| {
            let u = i as f64 / (FIT_POINTS - 1) as f64;
            ((lo as f64).ln() + u * ((n_max as f64).ln() - (lo as f64).ln())).exp().round() as u64
        })
        .collect();
    let ln_k: Vec<f64> = fit_k.iter().map(|&k| (k as f64).ln()).collect();
    let ln_t: Vec<f64> = fit_k.iter().map(|&k| term(k).ln()).collect();
    let exponent = -slope(&ln_k, &ln_t);

    let (verdict, log_exponent) = if exponent < DIVERGENT_BELOW {
        (SeriesVerdict::Divergent, None)
    } else if exponent > CONVERGENT_ABOVE {
        (SeriesVerdict::Convergent, None)
    } else {
        let ln_ln_k: Vec<f64> = ln_k.iter().map(|l| l.ln()).collect();
        let y: Vec<f64> = fit_k.iter().map(|&k| -((k as f64) * term(k)).ln()).collect();
        let q = slope(&ln_ln_k, &y);
        let v = if q <= 1.0 + LOG_DIVERGENT_SLACK {
            SeriesVerdict::Divergent
        } else if q >= LOG_CONVERGENT_FROM {
            SeriesVerdict::Convergent
        } else {
            SeriesVerdict::Inconclusive
        };
        (v, Some(q))
    };
    Ok(SeriesDiagnostic {
        verdict,
        exponent,
        log_exponent,
        first,
        n_max,
        partial_sums,
    })
}

/// Completeness evidence for a path family: classification of `Σ 1/√a_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessDiagnostic {
    pub family: String,
    pub series: SeriesDiagnostic,
    /// `Some` unless the series verdict is inconclusive.
    pub verdict: Option<Completeness>,
    pub expected: Completeness,
}

impl CompletenessDiagnostic {
    pub fn agrees(&self) -> bool {
        self.verdict == Some(self.expected)
    }
}

pub fn ray_completeness_diagnostic(family: &PathFamily, n_max: u64) -> Result<CompletenessDiagnostic> {
    let series = classify_series(|k| family.edge_length(k), family.first_vertex(), n_max)?;
    let verdict = match series.verdict {
        SeriesVerdict::Divergent => Some(Completeness::Complete),
        SeriesVerdict::Convergent => Some(Completeness::Incomplete),
        SeriesVerdict::Inconclusive => None,
    };
    Ok(CompletenessDiagnostic {
        family: family.to_string(),
        series,
        verdict,
        expected: family.expected_completeness(),
    })
}

/// Whether `Σ ω_n²` is finite, by the same classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSumDiagnostic {
    pub family: String,
    pub series: SeriesDiagnostic,
    /// `Some(true)` when the sum is classified finite.
    pub summable: Option<bool>,
    pub expected_summable: bool,
}

pub fn kl_proxy_check(family: &PathFamily, n_max: u64) -> Result<WeightSumDiagnostic> {
    let series = classify_series(|k| family.omega_square(k), family.first_vertex(), n_max)?;
    let summable = match series.verdict {
        SeriesVerdict::Divergent => Some(false),
        SeriesVerdict::Convergent => Some(true),
        SeriesVerdict::Inconclusive => None,
    };
    Ok(WeightSumDiagnostic {
        family: family.to_string(),
        series,
        summable,
        expected_summable: family.asymptotics().omega_square_summable,
    })
}

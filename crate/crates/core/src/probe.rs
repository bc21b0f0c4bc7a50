//! Evidence probes for essential self-adjointness: forward kernel recurrences
//! on rays, the Agmon identity, the cutoff ring estimate, and truncated form
//! lower bounds. Probes report evidence; they never assert self-adjointness.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::catalog::PathFamily;
use crate::dirichlet::restricted_system;
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::VertexId;
use crate::linalg::{self, SymmetricMatrix};
use crate::metric::{cutoff_function, metric_ball};
use crate::operators::{LaplacianSpec, SchrodingerOperator};

/// Mantissas are renormalized once they exceed this magnitude.
pub const RESCALE_THRESHOLD: f64 = 1e100;
/// Relative tolerance on `(H − λ)v = 0` before identities are evaluated.
pub const KERNEL_TOLERANCE: f64 = 1e-10;
/// Relative stopping tolerance of the form-bound iteration.
pub const FORM_TOLERANCE: f64 = 1e-8;
const FORM_MAX_ITER: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    Grows,
    Decays,
    Inconclusive,
}

/// Forward solution of `(H + s) v = 0` on a ray with `v(first) = 1`.
///
/// `v(n) = values[n − first] · 2^binary_scale[n − first]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProbeResult {
    pub family: String,
    /// The shift `s`.
    pub shift: f64,
    pub first: VertexId,
    pub values: Vec<f64>,
    pub binary_scale: Vec<i32>,
    /// First index from which `v` is positive and strictly increasing.
    pub monotone_from: Option<VertexId>,
    /// Once `v(n+1) > v(n) > 0`, did the increase persist to the end?
    pub growth_persists: bool,
    /// `ln Σ_{k<=n} v(k)²`.
    pub log_l2_partial_sums: Vec<f64>,
    /// Largest relative residual of the recurrence at a checked vertex.
    pub max_relative_residual: f64,
    pub rescalings: usize,
    pub verdict: GrowthVerdict,
}

impl KernelProbeResult {
    pub fn n_max(&self) -> VertexId {
        self.first + self.values.len() as VertexId - 1
    }

    /// `ln |v(n)|`.
    pub fn log_abs(&self, n: VertexId) -> f64 {
        let i = (n - self.first) as usize;
        self.values[i].abs().ln() + self.binary_scale[i] as f64 * std::f64::consts::LN_2
    }

    /// `v` as a function, available only when no rescaling occurred.
    pub fn to_function(&self) -> Result<GraphFunction> {
        if self.rescalings > 0 {
            return Err(Error::Numerical(format!(
                "sequence was rescaled {} times; values exceed the floating point range",
                self.rescalings
            )));
        }
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.first + i as VertexId, v))
            .collect())
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Forward recurrence for `Σ_{m~n} a (v(n) − v(m)) + (W(n) + s) v(n) = 0` on a
/// ray `first, first+1, …` whose first vertex has a single neighbor.
/// `edge(n)` is `a` on `{n, n+1}`; `shift = None` picks `1 − min(0, min W)`.
pub fn kernel_recurrence(
    label: &str,
    edge: impl Fn(VertexId) -> f64,
    potential: impl Fn(VertexId) -> f64,
    first: VertexId,
    n_max: VertexId,
    shift: Option<f64>,
) -> Result<KernelProbeResult> {
    if n_max < first + 2 {
        return Err(Error::Input(format!("n_max must be at least {}", first + 2)));
    }
    let len = (n_max - first + 1) as usize;
    let a: Vec<f64> = (first..n_max).map(&edge).collect();
    let w: Vec<f64> = (first..=n_max).map(&potential).collect();
    if let Some((i, x)) = a.iter().enumerate().find(|(_, x)| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::Input(format!("conductance {x} on edge at {}", first + i as VertexId)));
    }
    if let Some(x) = w.iter().find(|x| !x.is_finite()) {
        return Err(Error::Input(format!("potential value {x} is not finite")));
    }
    let s = shift.unwrap_or_else(|| 1.0 - w.iter().copied().fold(0.0, f64::min));

    let mut values = vec![0.0; len];
    let mut binary_scale = vec![0i32; len];
    let mut scale = 0i32;
    let mut rescalings = 0;
    // state in the current scale
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    values[0] = 1.0;
    for i in 0..len - 1 {
        let left = if i == 0 { 0.0 } else { a[i - 1] * (cur - prev) };
        let next = cur + (left + (w[i] + s) * cur) / a[i];
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Numerical(format!("recurrence overflowed at {}", first + i as VertexId + 1)));
        }
        if cur.abs() > RESCALE_THRESHOLD {
            // powers of two keep the rescaling exact
            let e = cur.abs().log2().floor() as i32;
            let m = 2f64.powi(-e);
            prev *= m;
            cur *= m;
            scale += e;
            rescalings += 1;
        }
        values[i + 1] = cur;
        binary_scale[i + 1] = scale;
    }

    // residuals, evaluated in the scale of the newest value involved
    let at = |j: usize, target: i32| values[j] * 2f64.powi(binary_scale[j] - target);
    let mut max_rel = 0.0f64;
    for i in 0..len - 1 {
        let t = binary_scale[i + 1];
        let (vm, v, vp) = (if i == 0 { 0.0 } else { at(i - 1, t) }, at(i, t), at(i + 1, t));
        let mut r = a[i] * (v - vp) + (w[i] + s) * v;
        let mut mag = a[i] * (v.abs() + vp.abs()) + (w[i] + s).abs() * v.abs();
        if i > 0 {
            r += a[i - 1] * (v - vm);
            mag += a[i - 1] * (v.abs() + vm.abs());
        }
        if mag > 0.0 {
            max_rel = max_rel.max(r.abs() / mag);
        }
    }

    let log_v = |i: usize| values[i].abs().ln() + binary_scale[i] as f64 * std::f64::consts::LN_2;
    let mut log_l2 = Vec::with_capacity(len);
    let mut acc = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v != 0.0 {
            acc = log_add(acc, 2.0 * log_v(i));
        }
        log_l2.push(acc);
    }

    let increasing = |i: usize| {
        values[i] > 0.0 && values[i + 1] * 2f64.powi(binary_scale[i + 1] - binary_scale[i]) > values[i]
    };
    let mut monotone_from = None;
    for i in (0..len - 1).rev() {
        if increasing(i) {
            monotone_from = Some(first + i as VertexId);
        } else {
            break;
        }
    }
    let onset = (0..len - 1).find(|&i| increasing(i));
    let growth_persists = match onset {
        Some(o) => (o..len - 1).all(increasing),
        None => true,
    };
    let decreasing_tail = (len / 2..len - 1).all(|i| values[i + 1].abs() <= values[i].abs() * 2f64.powi(binary_scale[i] - binary_scale[i + 1]));
    let verdict = if monotone_from.is_some() && growth_persists {
        GrowthVerdict::Grows
    } else if decreasing_tail && values.iter().all(|&v| v > 0.0) {
        GrowthVerdict::Decays
    } else {
        GrowthVerdict::Inconclusive
    };
    Ok(KernelProbeResult {
        family: label.to_string(),
        shift: s,
        first,
        values,
        binary_scale,
        monotone_from,
        growth_persists,
        log_l2_partial_sums: log_l2,
        max_relative_residual: max_rel,
        rescalings,
        verdict,
    })
}

/// Forward kernel probe of `H + s` for the conjugate operator of a family.
pub fn kernel_growth_probe(family: &PathFamily, shift: Option<f64>, n_max: VertexId) -> Result<KernelProbeResult> {
    let mut w = Vec::new();
    for n in family.first_vertex()..=n_max {
        w.push(family.gauge_potential_exact(n)?);
    }
    let first = family.first_vertex();
    kernel_recurrence(
        &family.to_string(),
        |n| family.edge_a(n),
        |n| w[(n - first) as usize],
        first,
        n_max,
        shift,
    )
}

/// Forward kernel probe for a Schrödinger operator on a path `first..=last`
/// with consecutive identifiers.
pub fn kernel_growth_probe_operator(p: &SchrodingerOperator, shift: Option<f64>) -> Result<KernelProbeResult> {
    let g = p.graph();
    let ids: Vec<VertexId> = g.vertices().collect();
    let (first, last) = match (ids.first(), ids.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::EmptyGraph),
    };
    let is_path = ids.windows(2).all(|w| w[1] == w[0] + 1)
        && g.edge_count() + 1 == ids.len()
        && ids[..ids.len() - 1].iter().all(|&x| g.conductance(x, x + 1).ok().flatten().is_some());
    if !is_path {
        return Err(Error::Precondition("graph is not a path on consecutive vertices".into()));
    }
    if g.is_frontier(first)? {
        return Err(Error::Precondition("first vertex has neighbors outside the graph".into()));
    }
    kernel_recurrence(
        "operator",
        |n| g.conductance(n, n + 1).ok().flatten().unwrap_or(0.0),
        |n| p.potential(n).unwrap_or(f64::NAN),
        first,
        last,
        shift,
    )
}

/// Both sides of the Agmon identity
/// `⟨fv, (H−λ)(fv)⟩ = Σ_{xy∈E} a v(x) v(y) (f(x) − f(y))²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgmonReport {
    pub lhs: f64,
    pub edge_sum: f64,
    /// `½ Σ_x v(x) Σ_{y~x} a v(y) (f(x) − f(y))²`.
    pub half_sum: f64,
    /// `|lhs − edge_sum| / max(|lhs|, 1)`.
    pub residual: f64,
    /// `|lhs − half_sum| / max(|lhs|, 1)`.
    pub half_sum_residual: f64,
    /// Largest relative residual of `(H−λ)v` on the support of `f`.
    pub kernel_residual: f64,
}

fn check_kernel_on(
    h: &SchrodingerOperator,
    lambda: f64,
    v: &GraphFunction,
    set: impl Iterator<Item = VertexId>,
) -> Result<f64> {
    let g = h.graph();
    let mut worst = 0.0f64;
    for x in set {
        if g.is_frontier(x)? {
            return Err(Error::Precondition(format!(
                "vertex {x} lies on the truncation edge; its neighborhood is unknown"
            )));
        }
        let r = h.apply_at(v, x)? - lambda * v.get(x);
        let scale = h.term_scale_at(v, x)? + lambda.abs() * v.get(x).abs();
        let rel = if r == 0.0 { 0.0 } else { r.abs() / scale };
        if rel > KERNEL_TOLERANCE {
            return Err(Error::Precondition(format!(
                "(H - lambda) v does not vanish at {x}: relative residual {rel:e}"
            )));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}

pub fn agmon_identity_check(
    h: &SchrodingerOperator,
    lambda: f64,
    v: &GraphFunction,
    f: &GraphFunction,
) -> Result<AgmonReport> {
    let g = h.graph();
    let kernel_residual = check_kernel_on(h, lambda, v, f.nonzero_support())?;
    let fv: GraphFunction = f.iter().map(|(x, fx)| (x, fx * v.get(x))).collect();
    let mut lhs = 0.0;
    for (x, u) in fv.iter() {
        if u != 0.0 {
            lhs += u * (h.apply_at(&fv, x)? - lambda * u);
        }
    }
    // vertices meeting an edge on which f varies
    let mut touched = BTreeSet::new();
    for x in f.nonzero_support() {
        touched.insert(x);
        touched.extend(g.neighbors(x)?);
    }
    let mut edge_sum = 0.0;
    let mut half = 0.0;
    for &x in &touched {
        let (fx, vx) = (f.get(x), v.get(x));
        for (y, a) in g.neighbor_entries(x)? {
            let d = fx - f.get(y);
            if d == 0.0 {
                continue;
            }
            let t = a * vx * v.get(y) * d * d;
            half += t;
            if x < y || !touched.contains(&y) {
                edge_sum += t;
            }
        }
    }
    let half_sum = 0.5 * half;
    let denom = lhs.abs().max(1.0);
    Ok(AgmonReport {
        lhs,
        edge_sum,
        half_sum,
        residual: (lhs - edge_sum).abs() / denom,
        half_sum_residual: (lhs - half_sum).abs() / denom,
        kernel_residual,
    })
}

/// The two-sided estimate `Σ_{B_R} v² ≤ ⟨fv,(H−λ)fv⟩ ≤ ½ N Σ_S v²` with `f`
/// the cutoff of the metric ball `B_R` around `x0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingEstimateReport {
    pub radius: f64,
    pub lambda: f64,
    /// Form lower bound on `B_{R+1}`.
    pub form_bound: f64,
    /// Degree bound `N` over `B_{R+1}` and its neighbors.
    pub degree_bound: usize,
    /// `Σ_{B_R} v²`.
    pub inner_mass: f64,
    /// `⟨fv, (H−λ)(fv)⟩`.
    pub form_value: f64,
    /// `½ N Σ_S v²` with `S` the endpoints of edges on which `f` varies.
    pub upper_bound: f64,
    /// `½ N Σ v²` over the set difference `B_{R+1} ∖ B_R` only.
    pub literal_ring_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub literal_ring_holds: bool,
    pub agmon: AgmonReport,
}

impl RingEstimateReport {
    pub fn chain_holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

pub fn ring_estimate_check(
    h: &SchrodingerOperator,
    lambda: f64,
    v: &GraphFunction,
    x0: VertexId,
    radius: f64,
) -> Result<RingEstimateReport> {
    let g = h.graph();
    let inner = metric_ball(g, x0, radius)?;
    let outer = metric_ball(g, x0, radius + 1.0)?;
    let bound = form_lower_bound_on(h, &outer.members)?;
    if bound.value - lambda < 1.0 {
        return Err(Error::Precondition(format!(
            "form bound {} leaves k - lambda = {} below 1",
            bound.value,
            bound.value - lambda
        )));
    }
    let f = cutoff_function(g, x0, radius)?;
    let agmon = agmon_identity_check(h, lambda, v, &f)?;

    let mut degree_bound = 0;
    let mut edge_ends = BTreeSet::new();
    for &x in &outer.members {
        degree_bound = degree_bound.max(g.degree(x)?);
        for y in g.neighbors(x)? {
            degree_bound = degree_bound.max(g.degree(y)?);
            if f.get(x) != f.get(y) {
                edge_ends.insert(x);
                edge_ends.insert(y);
            }
        }
    }
    let sq = |x: &VertexId| v.get(*x) * v.get(*x);
    let inner_mass: f64 = inner.members.iter().map(sq).sum();
    let half_n = 0.5 * degree_bound as f64;
    let upper_bound = half_n * edge_ends.iter().map(sq).sum::<f64>();
    let literal_ring_bound = half_n * outer.members.difference(&inner.members).map(sq).sum::<f64>();
    let form_value = agmon.lhs;
    let slack = |x: f64| 1e-12 * x.abs() + 1e-300;
    Ok(RingEstimateReport {
        radius,
        lambda,
        form_bound: bound.value,
        degree_bound,
        inner_mass,
        form_value,
        upper_bound,
        literal_ring_bound,
        lower_holds: inner_mass <= form_value + slack(form_value),
        upper_holds: form_value <= upper_bound + slack(upper_bound),
        literal_ring_holds: form_value <= literal_ring_bound + slack(literal_ring_bound),
        agmon,
    })
}

/// Smallest Rayleigh quotient of a truncated form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormBound {
    pub value: f64,
    pub size: usize,
    pub iterations: usize,
    /// Normalized minimizing vector.
    pub minimizer: GraphFunction,
}

fn finish(est: linalg::EigenEstimate, ids: &[VertexId]) -> Result<FormBound> {
    if !est.converged {
        return Err(Error::NoConvergence {
            iterations: est.iterations,
            log: est.history,
        });
    }
    Ok(FormBound {
        value: est.value,
        size: ids.len(),
        iterations: est.iterations,
        minimizer: ids.iter().copied().zip(est.vector).collect(),
    })
}

/// `min ⟨Hg,g⟩ / ‖g‖²` over `g` supported in `set` (zero exterior values).
pub fn form_lower_bound_on(h: &SchrodingerOperator, set: &BTreeSet<VertexId>) -> Result<FormBound> {
    if set.is_empty() {
        return Err(Error::Input("empty vertex set".into()));
    }
    let sys = restricted_system(h, set)?;
    let est = linalg::smallest_eigenvalue(&sys.matrix, FORM_MAX_ITER, FORM_TOLERANCE * 1e-2)?;
    finish(est, &sys.ids)
}

/// Form lower bound over every vertex of the truncation except frontier
/// vertices, whose true neighborhood is unknown.
pub fn form_lower_bound(h: &SchrodingerOperator) -> Result<FormBound> {
    let g = h.graph();
    let set: BTreeSet<VertexId> = g.vertices().filter(|&x| !g.is_frontier(x).unwrap_or(true)).collect();
    form_lower_bound_on(h, &set)
}

/// `min Q_c(f) / ‖f‖²_{l²_ω}` over `f` supported on the non-frontier vertices.
/// For `H` the gauge conjugate of `Δ_{ω,c}` this equals `form_lower_bound(H)`.
pub fn laplacian_form_lower_bound(l: &LaplacianSpec) -> Result<FormBound> {
    let g = l.graph();
    let set: Vec<VertexId> = g.vertices().filter(|&x| !g.is_frontier(x).unwrap_or(true)).collect();
    if set.is_empty() {
        return Err(Error::Input("no non-frontier vertices".into()));
    }
    let mut k = SymmetricMatrix::with_size(set.len());
    let mut mass = Vec::with_capacity(set.len());
    for (r, &x) in set.iter().enumerate() {
        let w = g.omega(x)?;
        mass.push(w * w);
        for (y, c) in g.neighbor_entries(x)? {
            k.diag[r] += c;
            if y < x {
                if let Ok(col) = set.binary_search(&y) {
                    k.add_off_diagonal(r, col, -c);
                }
            }
        }
    }
    let est = linalg::smallest_generalized_eigenvalue(&k, &mass, FORM_MAX_ITER, FORM_TOLERANCE * 1e-2)?;
    finish(est, &set)
}

/// `min ‖(H + s) v‖` over unit `v` supported on `set`, with `(H + s)v`
/// evaluated on `set` and its neighbors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelResidualDiagnostic {
    pub shift: f64,
    pub size: usize,
    pub min_residual: f64,
    pub minimizer: GraphFunction,
}

/// Largest support accepted by [`kernel_residual_diagnostic`].
pub const KERNEL_DIAGNOSTIC_LIMIT: usize = 2000;

pub fn kernel_residual_diagnostic(
    h: &SchrodingerOperator,
    shift: f64,
    set: &BTreeSet<VertexId>,
) -> Result<KernelResidualDiagnostic> {
    let g = h.graph();
    if set.is_empty() || set.len() > KERNEL_DIAGNOSTIC_LIMIT {
        return Err(Error::Input(format!(
            "support size must be between 1 and {KERNEL_DIAGNOSTIC_LIMIT}, got {}",
            set.len()
        )));
    }
    let cols: Vec<VertexId> = set.iter().copied().collect();
    let mut rows: BTreeSet<VertexId> = set.clone();
    for &x in set {
        if g.is_frontier(x)? {
            return Err(Error::Precondition(format!("vertex {x} lies on the truncation edge")));
        }
        rows.extend(g.neighbors(x)?);
    }
    let rows: Vec<VertexId> = rows.into_iter().collect();
    let mut b = DMatrix::<f64>::zeros(rows.len(), cols.len());
    for (c, &x) in cols.iter().enumerate() {
        let r = rows.binary_search(&x).expect("set is inside rows");
        let mut d = h.potential(x)? + shift;
        for (y, a) in g.neighbor_entries(x)? {
            d += a;
            b[(rows.binary_search(&y).expect("neighbors are rows"), c)] = -a;
        }
        b[(r, c)] = d;
    }
    let svd = b.svd(false, true);
    let (imin, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Numerical("empty decomposition".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Numerical("singular vectors unavailable".into()))?;
    let minimizer = cols.iter().enumerate().map(|(c, &x)| (x, vt[(imin, c)])).collect();
    Ok(KernelResidualDiagnostic {
        shift,
        size: cols.len(),
        min_residual: smin,
        minimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::gauge_to_schrodinger;

    fn unit_ray() -> PathFamily {
        PathFamily::Constant { omega: 1.0, cond: 1.0 }
    }

    #[test]
    fn unit_ray_growth_sequence() {
        let r = kernel_growth_probe(&unit_ray(), None, 12).unwrap();
        assert_eq!(r.shift, 1.0);
        assert_eq!(&r.values[..6], &[1.0, 2.0, 5.0, 13.0, 34.0, 89.0]);
        assert_eq!(r.monotone_from, Some(0));
        assert_eq!(r.verdict, GrowthVerdict::Grows);
        assert_eq!(r.max_relative_residual, 0.0);
        assert!(r.to_function().is_ok());
    }

    #[test]
    fn rescaling_keeps_logarithms() {
        let r = kernel_growth_probe(&unit_ray(), None, 2000).unwrap();
        assert!(r.rescalings > 0);
        assert!(r.to_function().is_err());
        // v(n) ~ C φ²ⁿ with φ² = (3 + √5)/2
        let rate = r.log_abs(2000) - r.log_abs(1999);
        assert!((rate - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
        assert!(r.max_relative_residual < 1e-14, "{}", r.max_relative_residual);
        assert!(r.log_l2_partial_sums.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn negative_shift_can_oscillate() {
        let r = kernel_growth_probe(&unit_ray(), Some(-2.0), 50).unwrap();
        assert_ne!(r.verdict, GrowthVerdict::Grows);
    }

    #[test]
    fn operator_probe_matches_family_probe() {
        let fam = PathFamily::InverseShift;
        let p = fam.conjugate_operator(30).unwrap();
        let a = kernel_growth_probe(&fam, Some(1.5), 29).unwrap();
        let b = kernel_growth_probe_operator(&p, Some(1.5));
        // the frontier vertex 30 sits at the end, the start is a true endpoint
        let b = b.unwrap();
        for i in 0..a.values.len() {
            assert!((a.values[i] - b.values[i]).abs() <= 1e-12 * a.values[i].abs());
        }
    }

    #[test]
    fn agmon_trivial_cases() {
        let fam = unit_ray();
        let h = fam.conjugate_operator(40).unwrap().shifted(0.0);
        // v ≡ 1 solves (H − λ)v = 0 away from the first vertex when W ≡ λ = 0
        let v = GraphFunction::constant_on(0..=40, 1.0);
        let f: GraphFunction = (5..=15).map(|x| (x, if x == 10 { 1.0 } else { 0.5 })).collect();
        let r = agmon_identity_check(&h, 0.0, &v, &f).unwrap();
        let q = crate::operators::quadratic_form(&h.laplacian_part(), &f).unwrap();
        assert!((r.lhs - q).abs() < 1e-14 && r.residual < 1e-15 && r.half_sum_residual < 1e-15);
        let flat = GraphFunction::constant_on(5..=15, 1.0);
        let g = GraphFunction::constant_on(3..=17, 1.0);
        let r = agmon_identity_check(&h, 0.0, &v, &flat.add(&g.scaled(0.0))).unwrap();
        assert!(r.edge_sum > 0.0); // the support edge still varies
        let all = GraphFunction::constant_on(1..=39, 1.0);
        let r = agmon_identity_check(&h, 0.0, &v, &all).unwrap();
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn agmon_rejects_non_kernel() {
        let h = unit_ray().conjugate_operator(40).unwrap();
        let v: GraphFunction = (0..=40).map(|x| (x, 0.5f64.powi(x as i32))).collect();
        let f = GraphFunction::constant_on(5..=10, 1.0);
        assert!(matches!(agmon_identity_check(&h, 0.0, &v, &f), Err(Error::Precondition(_))));
    }

    #[test]
    fn ring_chain_on_unit_ray() {
        let fam = unit_ray();
        let h = fam.conjugate_operator(60).unwrap();
        let lambda = -1.0;
        let probe = kernel_growth_probe(&fam, Some(-lambda), 60).unwrap();
        let v = probe.to_function().unwrap();
        let r = ring_estimate_check(&h, lambda, &v, 0, 5.5).unwrap();
        assert!(r.chain_holds(), "{r:?}");
        assert!(r.agmon.residual < 1e-12);
        let zero = GraphFunction::new();
        let z = ring_estimate_check(&h, lambda, &zero, 0, 5.5).unwrap();
        assert_eq!((z.inner_mass, z.form_value, z.upper_bound), (0.0, 0.0, 0.0));
        assert!(z.chain_holds());
    }

    #[test]
    fn form_bounds() {
        // single non-frontier interior vertex of a unit path, Dirichlet outside
        let h = unit_ray().conjugate_operator(40).unwrap();
        let b = form_lower_bound_on(&h, &BTreeSet::from([7])).unwrap();
        assert_eq!(b.value, 2.0);
        let l = LaplacianSpec::new(PathFamily::NLogN.instantiate(200).unwrap());
        let h = gauge_to_schrodinger(&l).unwrap();
        let a = form_lower_bound(&h).unwrap();
        let c = laplacian_form_lower_bound(&l).unwrap();
        assert!(a.value >= 0.0);
        assert!((a.value - c.value).abs() <= 1e-8 * c.value, "{} {}", a.value, c.value);
    }

    #[test]
    fn kernel_residual_is_small_for_long_supports() {
        let h = unit_ray().conjugate_operator(80).unwrap();
        let set: BTreeSet<VertexId> = (0..=40).collect();
        let d = kernel_residual_diagnostic(&h, 1.0, &set).unwrap();
        assert!(d.min_residual > 0.0);
        assert!((d.minimizer.norm_sq() - 1.0).abs() < 1e-12);
    }
}

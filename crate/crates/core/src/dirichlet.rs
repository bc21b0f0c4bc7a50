//! Dirichlet problems `(Pf)↾K̊ = 0, f↾∂K = u` on finite regions, the discrete
//! minimum principle, and the Harnack constant of a region.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::{FiniteRegion, VertexId};
use crate::linalg::{self, CgOutcome, EnvelopeLdl, SymmetricMatrix};
use crate::operators::SchrodingerOperator;

/// Interiors up to this size are solved by dense Cholesky.
pub const DENSE_LIMIT: usize = 512;
/// Smallest admissible Rayleigh quotient of the interior system.
pub const POSITIVITY_THRESHOLD: f64 = 1e-12;
/// Largest admissible relative residual of a solution.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
const CG_TOLERANCE: f64 = 1e-10;
const POWER_ITERATIONS: usize = 200;

/// `(P, K, u)`.
#[derive(Clone, Debug)]
pub struct DirichletProblem<'a> {
    pub operator: &'a SchrodingerOperator,
    pub region: &'a FiniteRegion,
    pub boundary: &'a GraphFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    DenseCholesky,
    ConjugateGradient,
    EnvelopeLdl,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirichletSolution {
    /// Values on all of `K`.
    pub solution: GraphFunction,
    /// `max_x |(Pf)(x)| / max_x scale(x)` over the interior, where `scale(x)`
    /// is the sum of the magnitudes of the terms of `(Pf)(x)`.
    pub relative_residual: f64,
    /// `max_x |(Pf)(x)|` over the interior.
    pub absolute_residual: f64,
    /// Estimate of the smallest eigenvalue of the interior system (an upper
    /// bound; positive whenever the factorization is).
    pub positivity_margin: f64,
    pub method: SolveMethod,
}

/// The operator restricted to a vertex set with zero exterior values:
/// row `x` has diagonal `Σ_{y~x} a_xy + W(x)` and `−a_xy` for `y` in the set.
pub(crate) struct RestrictedSystem {
    pub ids: Vec<VertexId>,
    pub matrix: SymmetricMatrix,
}

pub(crate) fn restricted_system(p: &SchrodingerOperator, set: &BTreeSet<VertexId>) -> Result<RestrictedSystem> {
    let g = p.graph();
    let ids: Vec<VertexId> = set.iter().copied().collect();
    let mut matrix = SymmetricMatrix::with_size(ids.len());
    for (r, &x) in ids.iter().enumerate() {
        let i = g.idx(x)?;
        let mut d = p.potential_at(i);
        for &(j, a) in g.adj(i) {
            d += a;
            let y = g.id(j);
            if y < x {
                if let Ok(c) = ids.binary_search(&y) {
                    matrix.add_off_diagonal(r, c, -a);
                }
            }
        }
        matrix.diag[r] = d;
    }
    Ok(RestrictedSystem { ids, matrix })
}

/// Smallest eigenvalue estimate of a restricted system with positivity verdict.
pub(crate) struct Positivity {
    pub positive: bool,
    pub margin: f64,
    pub factor: Option<EnvelopeLdl>,
}

pub(crate) fn positivity(m: &SymmetricMatrix) -> Result<Positivity> {
    match EnvelopeLdl::factor(m, 0.0) {
        Ok(ldl) if ldl.all_pivots_positive() => {
            let est = linalg::smallest_eigenvalue(m, POWER_ITERATIONS, 1e-12)?;
            Ok(Positivity {
                positive: est.value > POSITIVITY_THRESHOLD,
                margin: est.value,
                factor: Some(ldl),
            })
        }
        _ => {
            let est = linalg::smallest_eigenvalue(m, POWER_ITERATIONS, 1e-12)?;
            Ok(Positivity {
                positive: false,
                margin: est.value,
                factor: None,
            })
        }
    }
}

fn validate(prob: &DirichletProblem<'_>) -> Result<()> {
    let region = prob.region;
    for (x, v) in prob.boundary.iter() {
        if !region.boundary.contains(&x) && v != 0.0 {
            return Err(Error::Input(format!("boundary data given at {x}, which is not a boundary vertex")));
        }
        if !v.is_finite() {
            return Err(Error::Input(format!("boundary value at {x} is {v}")));
        }
    }
    if region.interior.is_empty() {
        return Err(Error::Precondition("region has an empty interior".into()));
    }
    if !region.interior_connected {
        return Err(Error::Precondition("region interior is not connected".into()));
    }
    let g = prob.operator.graph();
    for &x in &region.members {
        g.idx(x)?;
    }
    Ok(())
}

/// Solves `(Pf)(x) = 0` on `K̊` with `f = u` on `∂K`.
///
/// Boundary vertices without data read as zero. The interior system must be
/// positive definite; its smallest eigenvalue is reported as the margin.
pub fn solve_dirichlet(prob: &DirichletProblem<'_>) -> Result<DirichletSolution> {
    validate(prob)?;
    let p = prob.operator;
    let g = p.graph();
    let region = prob.region;
    let system = restricted_system(p, &region.interior)?;
    let n = system.ids.len();
    let mut rhs = vec![0.0; n];
    for (r, &x) in system.ids.iter().enumerate() {
        for (y, a) in g.neighbor_entries(x)? {
            if region.boundary.contains(&y) {
                rhs[r] += a * prob.boundary.get(y);
            }
        }
    }

    let pos = positivity(&system.matrix)?;
    if !pos.positive {
        return Err(Error::NotPositive(pos.margin));
    }
    let ldl = pos.factor.expect("factor exists when positive");

    let (values, method) = if n <= DENSE_LIMIT {
        match linalg::dense_cholesky_solve(&system.matrix, &rhs) {
            Some(mut x) => {
                refine(&system.matrix, &rhs, &mut x, |r| linalg::dense_cholesky_solve(&system.matrix, r));
                (x, SolveMethod::DenseCholesky)
            }
            None => (solve_envelope(&system.matrix, &ldl, &rhs), SolveMethod::EnvelopeLdl),
        }
    } else {
        match linalg::conjugate_gradient(&system.matrix, &rhs, CG_TOLERANCE, 20 * n + 100) {
            CgOutcome::Converged { x, .. } => (x, SolveMethod::ConjugateGradient),
            CgOutcome::Indefinite | CgOutcome::Stalled => {
                (solve_envelope(&system.matrix, &ldl, &rhs), SolveMethod::EnvelopeLdl)
            }
        }
    };

    let mut solution: GraphFunction = region.boundary.iter().map(|&y| (y, prob.boundary.get(y))).collect();
    solution.extend(system.ids.iter().copied().zip(values));

    let (absolute_residual, relative_residual) = interior_residual(p, &solution, &region.interior)?;
    if relative_residual > RESIDUAL_TOLERANCE {
        return Err(Error::Numerical(format!(
            "Dirichlet residual {relative_residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    Ok(DirichletSolution {
        solution,
        relative_residual,
        absolute_residual,
        positivity_margin: pos.margin,
        method,
    })
}

fn solve_envelope(m: &SymmetricMatrix, ldl: &EnvelopeLdl, rhs: &[f64]) -> Vec<f64> {
    let mut x = ldl.solve(rhs);
    refine(m, rhs, &mut x, |r| Some(ldl.solve(r)));
    x
}

/// One step of iterative refinement.
fn refine(m: &SymmetricMatrix, rhs: &[f64], x: &mut [f64], solve: impl Fn(&[f64]) -> Option<Vec<f64>>) {
    let ax = m.matvec(x);
    let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if let Some(dx) = solve(&r) {
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
}

/// `(max |Pf|, max |Pf| / max term scale)` over `set`.
pub(crate) fn interior_residual(
    p: &SchrodingerOperator,
    f: &GraphFunction,
    set: &BTreeSet<VertexId>,
) -> Result<(f64, f64)> {
    let mut abs = 0.0f64;
    let mut scale = 0.0f64;
    for &x in set {
        abs = abs.max(p.apply_at(f, x)?.abs());
        scale = scale.max(p.term_scale_at(f, x)?);
    }
    let rel = if abs == 0.0 { 0.0 } else { abs / scale };
    Ok((abs, rel))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum MinimumPrincipleVerdict {
    /// `(Pf)(x) < 0` at an interior vertex; the principle says nothing.
    NotApplicable { vertex: VertexId, value: f64 },
    /// No interior vertex carries a nonpositive minimum of `f` over `K`.
    NoNonpositiveInteriorMinimum,
    /// A nonpositive interior minimum exists and `f` is constant on `K`.
    ConstantOnRegion,
    /// A nonpositive interior minimum exists but `f` is not constant.
    Violated { vertex: VertexId },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimumPrincipleReport {
    pub verdict: MinimumPrincipleVerdict,
    pub minimum: f64,
    pub minimizer: VertexId,
}

impl MinimumPrincipleReport {
    /// False only for a counterexample configuration.
    pub fn consistent(&self) -> bool {
        !matches!(self.verdict, MinimumPrincipleVerdict::Violated { .. })
    }
}

/// Checks the minimum principle for `P` with `W > 0` on `K`, reading the
/// hypothesis pointwise: `(Pf)(x) >= 0` at every interior vertex.
///
/// `f` must have a value at every vertex of `K`.
pub fn check_minimum_principle(
    p: &SchrodingerOperator,
    region: &FiniteRegion,
    f: &GraphFunction,
) -> Result<MinimumPrincipleReport> {
    let mut minimizer = None;
    let mut minimum = f64::INFINITY;
    for &x in &region.members {
        if p.potential(x)? <= 0.0 {
            return Err(Error::Precondition(format!("potential is not positive at {x}")));
        }
        let v = f
            .value(x)
            .ok_or_else(|| Error::Input(format!("function has no value at region vertex {x}")))?;
        if v < minimum {
            minimum = v;
            minimizer = Some(x);
        }
    }
    let minimizer = minimizer.ok_or(Error::EmptyGraph)?;
    let scale = f.max_abs().max(f64::MIN_POSITIVE);

    for &x in &region.interior {
        let value = p.apply_at(f, x)?;
        if value < -1e-12 * p.term_scale_at(f, x)? {
            return Ok(MinimumPrincipleReport {
                verdict: MinimumPrincipleVerdict::NotApplicable { vertex: x, value },
                minimum,
                minimizer,
            });
        }
    }
    // interior vertices attaining the minimum over K (up to rounding)
    let tol = 1e-12 * scale;
    let interior_min = region
        .interior
        .iter()
        .copied()
        .find(|&x| f.get(x) <= minimum + tol);
    let verdict = match interior_min {
        Some(x) if minimum <= tol => {
            let constant = region.members.iter().all(|&y| (f.get(y) - minimum).abs() <= tol);
            if constant {
                MinimumPrincipleVerdict::ConstantOnRegion
            } else {
                MinimumPrincipleVerdict::Violated { vertex: x }
            }
        }
        _ => MinimumPrincipleVerdict::NoNonpositiveInteriorMinimum,
    };
    Ok(MinimumPrincipleReport {
        verdict,
        minimum,
        minimizer,
    })
}

/// Function-independent Harnack constant of a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackCertificate {
    /// Smallest conductance over edges with both ends in `K`.
    pub alpha: f64,
    /// Sum of conductances over those edges, each edge once.
    pub total_conductance: f64,
    /// `max(0, max_K W)`.
    pub max_potential: f64,
    /// `(max_potential + total_conductance) / alpha`.
    pub k0: f64,
    /// Number of edges with both ends in `K`.
    pub edge_count: usize,
    /// `max(k0, 1)^edge_count`; may be infinite.
    pub k: f64,
}

pub fn harnack_certificate(p: &SchrodingerOperator, region: &FiniteRegion) -> Result<HarnackCertificate> {
    let g = p.graph();
    let mut alpha = f64::INFINITY;
    let mut total = 0.0;
    let mut edges = 0usize;
    let mut max_w = 0.0f64;
    for &x in &region.members {
        max_w = max_w.max(p.potential(x)?);
        for (y, a) in g.neighbor_entries(x)? {
            if x < y && region.members.contains(&y) {
                alpha = alpha.min(a);
                total += a;
                edges += 1;
            }
        }
    }
    if edges == 0 {
        return Err(Error::Precondition("region has no edges".into()));
    }
    let k0 = (max_w + total) / alpha;
    let k = k0.max(1.0).powf(edges as f64);
    Ok(HarnackCertificate {
        alpha,
        total_conductance: total,
        max_potential: max_w,
        k0,
        edge_count: edges,
        k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackCheck {
    pub holds: bool,
    /// `max φ / min φ` over the interior.
    pub max_ratio: f64,
    pub k: f64,
    pub argmax: VertexId,
    pub argmin: VertexId,
}

/// Compares interior ratios of a positive `P`-harmonic `φ` against `cert.k`.
///
/// A `φ` that is not harmonic on the interior (relative residual above the
/// solver tolerance) is a precondition error, not a Harnack failure.
pub fn check_harnack(
    p: &SchrodingerOperator,
    region: &FiniteRegion,
    phi: &GraphFunction,
    cert: &HarnackCertificate,
) -> Result<HarnackCheck> {
    for &x in &region.members {
        match phi.value(x) {
            Some(v) if v > 0.0 => {}
            _ => return Err(Error::Precondition(format!("function is not positive at {x}"))),
        }
    }
    let (_, rel) = interior_residual(p, phi, &region.interior)?;
    if rel > RESIDUAL_TOLERANCE {
        return Err(Error::Precondition(format!(
            "function is not harmonic on the interior (relative residual {rel:e})"
        )));
    }
    let mut lo = (f64::INFINITY, 0);
    let mut hi = (f64::NEG_INFINITY, 0);
    for &x in &region.interior {
        let v = phi.get(x);
        if v < lo.0 {
            lo = (v, x);
        }
        if v > hi.0 {
            hi = (v, x);
        }
    }
    if region.interior.is_empty() {
        return Err(Error::Precondition("region has an empty interior".into()));
    }
    let max_ratio = hi.0 / lo.0;
    Ok(HarnackCheck {
        holds: max_ratio <= cert.k,
        max_ratio,
        k: cert.k,
        argmax: hi.1,
        argmin: lo.1,
    })
}

//! Positive harmonic functions by ball exhaustion, and the ground-state
//! transform that turns `Δ_{1,a} + W` into a pure Laplacian.
//!
//! On the ball `B_n` around `x0` the Dirichlet problem with boundary data 1
//! is solved and the solution normalized to 1 at `x0`. The sequence is
//! monitored at a fixed set of vertices; convergence is declared once the
//! largest change stays below `tol` for three consecutive radii.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dirichlet::{self, harnack_certificate, solve_dirichlet, DirichletProblem};
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::VertexId;
use crate::operators::{LaplacianSpec, SchrodingerOperator};

/// Consecutive stable radii required to declare convergence.
pub const STABLE_RADII: usize = 3;

/// Relative slack applied to Harnack windows to absorb solver rounding.
pub const WINDOW_SLACK: f64 = 1e-10;

/// Bounds `[lower, upper]` for `Φ_n(vertex)` valid for every `n >= n0`,
/// from the Harnack certificate of `B_{n0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackWindow {
    pub vertex: VertexId,
    pub n0: usize,
    pub lower: f64,
    pub upper: f64,
}

impl HarnackWindow {
    /// Membership test with [`WINDOW_SLACK`] relative tolerance on both ends.
    pub fn contains(&self, v: f64) -> bool {
        self.lower * (1.0 - WINDOW_SLACK) <= v && v <= self.upper * (1.0 + WINDOW_SLACK)
    }
}

/// One row of exhaustion diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusRow {
    pub radius: usize,
    /// `ψ_n(x0)` before normalization; absent for skipped radii.
    pub psi_x0: Option<f64>,
    /// `Φ_n` at monitored vertices inside `B_n`.
    pub monitored: BTreeMap<VertexId, f64>,
    /// Largest change at monitored vertices present at both radii.
    pub max_delta: Option<f64>,
    pub relative_residual: Option<f64>,
    pub positivity_margin: Option<f64>,
    /// Monitored vertices whose value left their Harnack window.
    pub window_violations: Vec<VertexId>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionState {
    pub x0: VertexId,
    pub radius: usize,
    /// `Φ_n` on `B_n`; empty before the first solved radius.
    pub phi: GraphFunction,
    pub monitored: Vec<VertexId>,
    pub tol: f64,
    pub rows: Vec<RadiusRow>,
    pub windows: BTreeMap<VertexId, HarnackWindow>,
    /// First radius of the current run of stable radii.
    pub stable_since: Option<usize>,
    pub stable_count: usize,
    /// Set once `STABLE_RADII` consecutive changes fall below `tol`.
    pub converged_at: Option<usize>,
    /// Set when the ball has swallowed the whole graph.
    pub exhausted: bool,
}

impl ExhaustionState {
    pub fn new(x0: VertexId, monitored: Vec<VertexId>, tol: f64) -> Self {
        Self {
            x0,
            radius: 0,
            phi: GraphFunction::new(),
            monitored,
            tol,
            rows: Vec::new(),
            windows: BTreeMap::new(),
            stable_since: None,
            stable_count: 0,
            converged_at: None,
            exhausted: false,
        }
    }
}

/// Advances to the next radius: 0 for a fresh state, else `state.radius + 1`.
///
/// A radius whose ball has no interior (always the case at radius 0) is
/// recorded with a note and skipped.
/// A ball that reaches a frontier vertex before its outer sphere is a
/// truncation error: the materialized graph is too small for that radius.
pub fn exhaustion_step(p: &SchrodingerOperator, state: &ExhaustionState) -> Result<ExhaustionState> {
    let g = p.graph();
    let n = if state.rows.is_empty() { 0 } else { state.radius + 1 };
    let ball = g.combinatorial_ball(state.x0, n)?;
    if let Some((&v, &d)) = ball.distances.iter().find(|(v, d)| **d < n && g.is_frontier(**v).unwrap_or(false)) {
        return Err(Error::TruncationTooSmall(format!(
            "frontier vertex {v} at distance {d} lies inside the ball of radius {n}"
        )));
    }
    let region = g.region(ball.members.iter().copied())?;
    let mut next = state.clone();
    next.radius = n;

    let mut row = RadiusRow {
        radius: n,
        psi_x0: None,
        monitored: BTreeMap::new(),
        max_delta: None,
        relative_residual: None,
        positivity_margin: None,
        window_violations: Vec::new(),
        note: None,
    };
    if region.boundary.is_empty() {
        next.exhausted = true;
        row.note = Some("ball covers the whole graph; boundary is empty".into());
        next.rows.push(row);
        return Ok(next);
    }
    if !region.interior.contains(&state.x0) {
        row.note = Some("origin is not interior to the ball; radius skipped".into());
        next.stable_count = 0;
        next.stable_since = None;
        next.rows.push(row);
        return Ok(next);
    }

    let ones = GraphFunction::constant_on(region.boundary.iter().copied(), 1.0);
    let sol = solve_dirichlet(&DirichletProblem {
        operator: p,
        region: &region,
        boundary: &ones,
    })?;
    let psi_x0 = sol.solution.get(state.x0);
    if psi_x0 <= 0.0 {
        return Err(Error::Numerical(format!("solution at the origin is {psi_x0}")));
    }
    let phi = sol.solution.map(|_, v| v / psi_x0);

    // windows for monitored vertices entering the interior for the first time
    let mut cert = None;
    for &y in &state.monitored {
        if !next.windows.contains_key(&y) && region.interior.contains(&y) {
            let c = match &cert {
                Some(c) => c,
                None => cert.insert(harnack_certificate(p, &region)?),
            };
            next.windows.insert(
                y,
                HarnackWindow {
                    vertex: y,
                    n0: n,
                    lower: 1.0 / c.k,
                    upper: c.k,
                },
            );
        }
    }

    let mut max_delta: Option<f64> = None;
    for &y in &state.monitored {
        if let Some(v) = phi.value(y) {
            row.monitored.insert(y, v);
            if let Some(prev) = state.phi.value(y) {
                let d = (v - prev).abs();
                max_delta = Some(max_delta.map_or(d, |m| m.max(d)));
            }
            if let Some(w) = next.windows.get(&y) {
                if !w.contains(v) {
                    row.window_violations.push(y);
                }
            }
        }
    }

    match max_delta {
        Some(d) if d < state.tol => {
            if next.stable_count == 0 {
                next.stable_since = Some(state.radius);
            }
            next.stable_count += 1;
            if next.stable_count >= STABLE_RADII && next.converged_at.is_none() {
                next.converged_at = next.stable_since;
            }
        }
        _ => {
            next.stable_count = 0;
            next.stable_since = None;
        }
    }

    row.psi_x0 = Some(psi_x0);
    row.max_delta = max_delta;
    row.relative_residual = Some(sol.relative_residual);
    row.positivity_margin = Some(sol.positivity_margin);
    next.rows.push(row);
    next.phi = phi;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    /// `Φ` on the largest solved ball.
    pub phi: GraphFunction,
    pub rows: Vec<RadiusRow>,
    pub windows: BTreeMap<VertexId, HarnackWindow>,
    pub converged_at: Option<usize>,
    /// Largest radius actually solved.
    pub final_radius: usize,
    /// `max |PΦ|` over the interior of the largest ball.
    pub final_absolute_residual: f64,
    pub final_relative_residual: f64,
    pub window_violations: usize,
}

impl ExhaustionReport {
    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }
}

/// Runs radii `0..=n_max` (fewer if the ball exhausts a finite graph).
///
/// `monitored` defaults to the ball of radius 2 around `x0`. Non-convergence
/// is a reported outcome, not an error.
pub fn run_exhaustion(
    p: &SchrodingerOperator,
    x0: VertexId,
    n_max: usize,
    tol: f64,
    monitored: Option<Vec<VertexId>>,
) -> Result<ExhaustionReport> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let g = p.graph();
    let monitored = match monitored {
        Some(m) => {
            for &y in &m {
                g.idx(y)?;
            }
            m
        }
        None => g.combinatorial_ball(x0, 2)?.members.into_iter().collect(),
    };
    let mut state = ExhaustionState::new(x0, monitored, tol);
    let mut last_solved = 0;
    while (state.rows.is_empty() || state.radius < n_max) && !state.exhausted {
        state = exhaustion_step(p, &state)?;
        if state.rows.last().is_some_and(|r| r.psi_x0.is_some()) {
            last_solved = state.radius;
        }
    }
    if last_solved == 0 {
        return Err(Error::Precondition(format!("no ball up to radius {n_max} has an interior")));
    }
    let solved_ball = g.combinatorial_ball(x0, last_solved)?;
    let region = g.region(solved_ball.members)?;
    let (abs, rel) = dirichlet::interior_residual(p, &state.phi, &region.interior)?;
    let window_violations = state.rows.iter().map(|r| r.window_violations.len()).sum();
    Ok(ExhaustionReport {
        phi: state.phi,
        rows: state.rows,
        windows: state.windows,
        converged_at: state.converged_at,
        final_radius: last_solved,
        final_absolute_residual: abs,
        final_relative_residual: rel,
        window_violations,
    })
}

/// `Δ_{ω,c}` with `ω = φ` and `c_xy = a_xy φ(x) φ(y)` on the subgraph spanned
/// by the keyed vertices of `φ`.
///
/// `φ` must be positive wherever it is keyed and `P`-harmonic (relative
/// residual within the solver tolerance) at every vertex of that subgraph
/// whose neighborhood it covers. Vertices whose neighborhood is cut become
/// frontier vertices of the result.
pub fn ground_state_transform(p: &SchrodingerOperator, phi: &GraphFunction) -> Result<LaplacianSpec> {
    let g = p.graph();
    let support: BTreeSet<VertexId> = phi.support().collect();
    if support.is_empty() {
        return Err(Error::Input("empty function".into()));
    }
    for (x, v) in phi.iter() {
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("function is not positive at {x}")));
        }
    }
    let region = g.region(support.iter().copied())?;
    let (_, rel) = dirichlet::interior_residual(p, phi, &region.interior)?;
    if rel > dirichlet::RESIDUAL_TOLERANCE {
        return Err(Error::Precondition(format!(
            "function is not harmonic on its interior (relative residual {rel:e})"
        )));
    }
    let sub = g.induced_subgraph(&support)?;
    let graph = sub.reweighted(|x| phi.get(x), |x, y, a| a * phi.get(x) * phi.get(y))?;
    Ok(LaplacianSpec::new(graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::PathFamily;
    use crate::operators::gauge_to_schrodinger;

    #[test]
    fn zero_potential_gives_constants() {
        let g = PathFamily::Constant { omega: 1.0, cond: 2.5 }.instantiate(30).unwrap();
        let p = SchrodingerOperator::new(&g, |_| 0.0).unwrap();
        let r = run_exhaustion(&p, 10, 10, 1e-12, None).unwrap();
        assert_eq!(r.converged_at, Some(1));
        for (_, v) in r.phi.iter() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert_eq!(r.window_violations, 0);
    }

    #[test]
    fn recovers_the_inverse_weight() {
        let f = PathFamily::NegPotential;
        let p = f.conjugate_operator(60).unwrap();
        let r = run_exhaustion(&p, 1, 40, 1e-10, Some(vec![1, 2, 5, 10, 20])).unwrap();
        for m in [1u64, 2, 5, 10, 20] {
            let rel = (r.phi.get(m) * m as f64 - 1.0).abs();
            assert!(rel < 1e-9, "{m}: {rel}");
        }
    }

    #[test]
    fn truncation_guard() {
        let p = PathFamily::NegPotential.conjugate_operator(10).unwrap();
        assert!(matches!(
            run_exhaustion(&p, 1, 20, 1e-8, None),
            Err(Error::TruncationTooSmall(_))
        ));
    }

    #[test]
    fn empty_interior_radius_is_skipped() {
        let p = PathFamily::Constant { omega: 1.0, cond: 1.0 }.conjugate_operator(10).unwrap();
        let s = exhaustion_step(&p, &ExhaustionState::new(3, vec![3], 1e-8)).unwrap();
        assert_eq!(s.radius, 0);
        assert!(s.rows[0].note.is_some());
        assert!(s.phi.is_empty());
        let s = exhaustion_step(&p, &s).unwrap();
        assert_eq!((s.radius, s.phi.get(3)), (1, 1.0));
    }

    #[test]
    fn transform_roundtrip() {
        let f = PathFamily::InverseShift;
        let l = LaplacianSpec::new(f.instantiate(20).unwrap());
        let p = gauge_to_schrodinger(&l).unwrap();
        let omega: GraphFunction = l.graph().vertices().map(|x| (x, l.graph().omega(x).unwrap())).collect();
        let back = ground_state_transform(&p, &omega).unwrap();
        for x in l.graph().vertices() {
            assert!((back.graph().omega(x).unwrap() - l.graph().omega(x).unwrap()).abs() < 1e-15);
        }
        for (x, y, c) in l.graph().edges() {
            let c2 = back.graph().conductance(x, y).unwrap().unwrap();
            assert!((c - c2).abs() <= 1e-14 * c);
        }
        let bad: GraphFunction = [(3, 1.0), (4, -1.0)].into_iter().collect();
        assert!(ground_state_transform(&p, &bad).is_err());
    }
}

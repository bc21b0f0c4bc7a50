//! Sparse symmetric kernels behind the Dirichlet solver and the form probes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetric matrix stored as a diagonal plus strictly-lower rows.
#[derive(Clone, Debug, Default)]
pub(crate) struct SymmetricMatrix {
    pub diag: Vec<f64>,
    /// `lower[i]` holds `(j, a_ij)` with `j < i`, ascending in `j`.
    pub lower: Vec<Vec<(usize, f64)>>,
}

impl SymmetricMatrix {
    pub fn with_size(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            lower: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Adds `v` at `(i, j)` and `(j, i)`; `i != j`.
    pub fn add_off_diagonal(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i > j { (i, j) } else { (j, i) };
        let row = &mut self.lower[r];
        match row.binary_search_by_key(&c, |&(k, _)| k) {
            Ok(p) => row[p].1 += v,
            Err(p) => row.insert(p, (c, v)),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for (i, row) in self.lower.iter().enumerate() {
            for &(j, a) in row {
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
        }
        y
    }

    /// Lower end of the Gershgorin enclosure of the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut radius = vec![0.0; self.n()];
        for (i, row) in self.lower.iter().enumerate() {
            for &(j, a) in row {
                radius[i] += a.abs();
                radius[j] += a.abs();
            }
        }
        self.diag
            .iter()
            .zip(&radius)
            .map(|(d, r)| d - r)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diag(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diag));
        for (i, row) in self.lower.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] = a;
                m[(j, i)] = a;
            }
        }
        debug_assert_eq!(m.nrows(), n);
        m
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `A − shift·I = L D Lᵀ` without pivoting, stored in the row envelope.
///
/// Row `i` keeps entries from its first nonzero column onward; fill-in cannot
/// leave the envelope. For path-like orderings the envelope is the band.
#[derive(Clone, Debug)]
pub(crate) struct EnvelopeLdl {
    first: Vec<usize>,
    rows: Vec<Vec<f64>>,
    d: Vec<f64>,
}

impl EnvelopeLdl {
    /// Fails with the offending row when a pivot is exactly zero or not finite.
    pub fn factor(m: &SymmetricMatrix, shift: f64) -> std::result::Result<Self, usize> {
        let n = m.n();
        let first: Vec<usize> = (0..n).map(|i| m.lower[i].first().map_or(i, |&(j, _)| j)).collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let fi = first[i];
            let mut row = vec![0.0; i - fi];
            for &(j, a) in &m.lower[i] {
                row[j - fi] = a;
            }
            // row holds a_ij; first pass turns it into u_ij = l_ij d_j
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let rj = &rows[j];
                let mut s = row[j - fi];
                for k in start..j {
                    s -= row[k - fi] * rj[k - fj];
                }
                row[j - fi] = s;
            }
            let mut di = m.diag[i] - shift;
            for j in fi..i {
                let u = row[j - fi];
                let l = u / d[j];
                di -= u * l;
                row[j - fi] = l;
            }
            if di == 0.0 || !di.is_finite() {
                return Err(i);
            }
            d.push(di);
            rows.push(row);
        }
        Ok(Self { first, rows, d })
    }

    pub fn all_pivots_positive(&self) -> bool {
        self.d.iter().all(|&p| p > 0.0)
    }

    /// Number of negative pivots, i.e. eigenvalues below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&p| p < 0.0).count()
    }

    fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for i in 0..y.len() {
            let fi = self.first[i];
            let s: f64 = self.rows[i].iter().enumerate().map(|(k, l)| l * y[fi + k]).sum();
            y[i] -= s;
        }
        y
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.forward(b);
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..x.len()).rev() {
            let fi = self.first[i];
            let xi = x[i];
            for (k, l) in self.rows[i].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
        x
    }

    /// `bᵀ (A − shift)⁻¹ b` as `Σ yᵢ² / dᵢ` with `y = L⁻¹ b`; a sum of positive
    /// terms whenever every pivot is positive.
    pub fn inverse_quad(&self, b: &[f64]) -> f64 {
        self.forward(b).iter().zip(&self.d).map(|(y, d)| y * y / d).sum()
    }
}

/// Dense solve with symmetric diagonal equilibration and Cholesky.
/// `None` when the matrix is not numerically positive definite.
pub(crate) fn dense_cholesky_solve(m: &SymmetricMatrix, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Some(Vec::new());
    }
    if m.diag.iter().any(|&d| d <= 0.0) {
        return None;
    }
    let s: Vec<f64> = m.diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut a = m.to_dense();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= s[i] * s[j];
        }
    }
    let chol = a.cholesky()?;
    let b = DVector::from_iterator(n, rhs.iter().zip(&s).map(|(b, s)| b * s));
    let y = chol.solve(&b);
    Some(y.iter().zip(&s).map(|(y, s)| y * s).collect())
}

#[derive(Debug, Clone)]
pub(crate) enum CgOutcome {
    Converged { x: Vec<f64> },
    /// Nonpositive curvature `pᵀAp <= 0`: the matrix is not positive definite.
    Indefinite,
    /// No convergence within the iteration budget.
    Stalled,
}

/// Jacobi-preconditioned conjugate gradients.
pub(crate) fn conjugate_gradient(m: &SymmetricMatrix, b: &[f64], rel_tol: f64, max_iter: usize) -> CgOutcome {
    let n = m.n();
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return CgOutcome::Converged { x };
    }
    let inv_diag: Vec<f64> = m.diag.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, p)| r * p).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = m.matvec(&p);
        let curvature = dot(&p, &ap);
        if curvature <= 0.0 {
            return CgOutcome::Indefinite;
        }
        let alpha = rz / curvature;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if norm(&r) <= rel_tol * bnorm {
            // confirm with a true residual
            let true_r: Vec<f64> = m.matvec(&x).iter().zip(b).map(|(ax, b)| b - ax).collect();
            if norm(&true_r) <= rel_tol * bnorm {
                return CgOutcome::Converged { x };
            }
            r = true_r;
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    CgOutcome::Stalled
}

/// Result of an inverse power iteration.
#[derive(Clone, Debug)]
pub(crate) struct EigenEstimate {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

fn start_vector(n: usize) -> Vec<f64> {
    // deterministic, positive, and not aligned with any sparse pattern
    let v: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i as f64) * 0.7548776662).sin()).collect();
    let s = norm(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// Inverse iteration on `A − shift` with every pivot positive. The estimate
/// `shift + vᵀv / vᵀ(A − shift)⁻¹v` approaches the smallest eigenvalue from above.
fn inverse_iteration(ldl: &EnvelopeLdl, shift: f64, n: usize, max_iter: usize, rel_tol: f64) -> EigenEstimate {
    let mut v = start_vector(n);
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    for it in 1..=max_iter {
        let q = ldl.inverse_quad(&v);
        let mu = shift + 1.0 / q;
        history.push(mu);
        let w = ldl.solve(&v);
        let wn = norm(&w);
        v = w.into_iter().map(|x| x / wn).collect();
        let scale = mu.abs().max(f64::MIN_POSITIVE);
        if (prev - mu).abs() <= rel_tol * scale {
            let q = ldl.inverse_quad(&v);
            let mu = shift + 1.0 / q;
            history.push(mu);
            return EigenEstimate {
                value: mu,
                vector: v,
                iterations: it,
                converged: true,
                history,
            };
        }
        prev = mu;
    }
    EigenEstimate {
        value: prev,
        vector: v,
        iterations: max_iter,
        converged: false,
        history,
    }
}

/// Number of eigenvalues below `shift`. An exactly singular leading minor
/// nudges the shift by a few ulps.
pub(crate) fn count_below(m: &SymmetricMatrix, shift: f64) -> usize {
    let mut s = shift;
    let step = 4.0 * f64::EPSILON * m.max_abs_diag().max(shift.abs()).max(1.0);
    loop {
        if let Ok(ldl) = EnvelopeLdl::factor(m, s) {
            return ldl.negative_pivots();
        }
        s -= step;
    }
}

/// Smallest eigenvalue of a symmetric matrix.
///
/// When `A` factors with positive pivots it is positive definite and inverse
/// iteration runs at shift 0. Otherwise a shift strictly below the spectrum is
/// located by bisection on the pivot inertia (Sylvester's law), starting from
/// the Gershgorin bound, and inverse iteration runs there.
pub(crate) fn smallest_eigenvalue(m: &SymmetricMatrix, max_iter: usize, rel_tol: f64) -> Result<EigenEstimate> {
    let n = m.n();
    if n == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    if let Ok(ldl) = EnvelopeLdl::factor(m, 0.0) {
        if ldl.all_pivots_positive() {
            return Ok(inverse_iteration(&ldl, 0.0, n, max_iter, rel_tol));
        }
    }
    let scale = m.max_abs_diag().max(1.0);
    let mut lo = m.gershgorin_lower() - 1e-8 * scale;
    let mut hi = 0.0f64;
    // invariant: no eigenvalue below lo, at least one at or below hi
    for _ in 0..200 {
        if hi - lo <= 1e-13 * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if count_below(m, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut shift = lo;
    for _ in 0..60 {
        match EnvelopeLdl::factor(m, shift) {
            Ok(ldl) if ldl.all_pivots_positive() => {
                return Ok(inverse_iteration(&ldl, shift, n, max_iter, rel_tol));
            }
            _ => shift -= 1e-12 * scale + (hi - lo),
        }
    }
    Err(Error::Numerical("could not find a shift below the spectrum".into()))
}

/// Smallest `λ` of `K f = λ M f` with `M = diag(mass) > 0` and `K` positive definite.
pub(crate) fn smallest_generalized_eigenvalue(
    k: &SymmetricMatrix,
    mass: &[f64],
    max_iter: usize,
    rel_tol: f64,
) -> Result<EigenEstimate> {
    let n = k.n();
    let ldl = EnvelopeLdl::factor(k, 0.0).map_err(|row| Error::Numerical(format!("zero pivot at row {row}")))?;
    if !ldl.all_pivots_positive() {
        return Err(Error::NotPositive(f64::NAN));
    }
    let mut v = start_vector(n);
    let m_norm = |v: &[f64]| v.iter().zip(mass).map(|(x, m)| m * x * x).sum::<f64>().sqrt();
    let s = m_norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    for it in 1..=max_iter {
        let mv: Vec<f64> = v.iter().zip(mass).map(|(x, m)| m * x).collect();
        // with vᵀMv = 1: λ ≈ 1 / (Mv)ᵀ K⁻¹ (Mv)
        let mu = 1.0 / ldl.inverse_quad(&mv);
        history.push(mu);
        let w = ldl.solve(&mv);
        let wn = m_norm(&w);
        v = w.into_iter().map(|x| x / wn).collect();
        if (prev - mu).abs() <= rel_tol * mu.abs() {
            return Ok(EigenEstimate {
                value: mu,
                vector: v,
                iterations: it,
                converged: true,
                history,
            });
        }
        prev = mu;
    }
    Ok(EigenEstimate {
        value: prev,
        vector: v,
        iterations: max_iter,
        converged: false,
        history,
    })
}

//! Functional-calculus projections attached to component subsets, Riesz
//! contour projections, and their orthogonalizations.
//!
//! All constructions here run in double precision; `exactify` recovers
//! bit-exact rational projections afterwards when the tuple is exact and the
//! entries snap to small Gaussian rationals.

use num_complex::Complex64;

use crate::decomposition::ComponentDecomposition;
use crate::error::{Error, Result};
use crate::matrix::{poly_at_matrix, CMat};
use crate::numf::{self, CDMat};
use crate::pencil::MatrixTuple;
use crate::poly::UniPoly;
use crate::scalar::Exact;

/// Eigenvalues `1/t_{j,s,r}` of `A_{j+1}` attached to component `s`.
fn component_eigenvalues(d: &ComponentDecomposition, j: usize, s: usize) -> Vec<Complex64> {
    d.components[s].intersections[j]
        .iter()
        .map(|&t| 1.0 / t)
        .collect()
}

/// The annihilating polynomial of the subset: `q_{j,S}` (self-adjoint mode)
/// or `q̂_{j,S}` with exponents `m_s` (general mode).
pub fn build_q(
    d: &ComponentDecomposition,
    j: usize,
    subset: &[usize],
    general: bool,
) -> UniPoly<Complex64> {
    let mut q = UniPoly::one();
    for &s in subset {
        let exp = if general { d.components[s].multiplicity } else { 1 };
        for lam in component_eigenvalues(d, j, s) {
            q = q.mul(&UniPoly::linear(lam).pow(exp));
        }
    }
    q
}

/// Per-component eigenvalue group of one matrix: the eigenvalues attached to
/// the component, with its degree and multiplicity.
struct EigGroup {
    eigs: Vec<Complex64>,
    degree: usize,
    multiplicity: usize,
    selected: bool,
}

/// Core of the product formula, shared by `build_projection` (coordinate
/// directions) and `projection_at_direction` (arbitrary directions).
fn projection_from_groups(
    a: &CMat<Complex64>,
    groups: &[EigGroup],
    general: bool,
    subset: &[usize],
) -> Result<CMat<Complex64>> {
    let n = a.nrows;
    if groups.iter().all(|g| g.selected) {
        return Ok(CMat::identity(n));
    }
    let mut q = UniPoly::one();
    for g in groups.iter().filter(|g| g.selected) {
        let exp = if general { g.multiplicity } else { 1 };
        for &lam in &g.eigs {
            q = q.mul(&UniPoly::linear(lam).pow(exp));
        }
    }
    let qa = poly_at_matrix(&q, a);
    let mut alpha = Complex64::new(1.0, 0.0);
    let mut prod = CMat::<Complex64>::identity(n);
    let mut min_qval = f64::INFINITY;
    let scale = q
        .coeffs
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    for g in groups.iter().filter(|g| !g.selected) {
        let (exp, sign_exp) = if general {
            (g.multiplicity, g.degree * g.multiplicity)
        } else {
            (1, g.degree)
        };
        for &lam in &g.eigs {
            let qval = q.eval(&lam);
            min_qval = min_qval.min(qval.norm());
            let mut factor = qa.clone();
            for i in 0..n {
                factor[(i, i)] -= qval;
            }
            prod = prod.mul(&factor.pow(exp));
            for _ in 0..exp {
                alpha *= qval;
            }
        }
        if sign_exp % 2 == 1 {
            alpha = -alpha;
        }
    }
    if min_qval <= 1e-9 * scale {
        return Err(Error::NotAdmissibleForSubset(subset.to_vec()));
    }
    let p = prod.scale(&(Complex64::new(1.0, 0.0) / alpha));
    let resid = p.mul(&p).sub(&p).frob_norm();
    if resid > 1e-9 * (1.0 + p.frob_norm().powi(2)) {
        return Err(Error::IllConditionedProjection(resid));
    }
    // The product formula loses a few digits through cancellation; polish the
    // result with Newton steps on the invariant-subspace equations.
    let ad = a.to_dmatrix();
    let anorm = numf::frob(&ad);
    let quality = |pd: &numf::CDMat| -> f64 {
        numf::frob(&(pd * pd - pd)) + numf::frob(&(&ad * pd - pd * &ad)) / (1.0 + anorm)
    };
    let mut pd = p.to_dmatrix();
    let mut qv = quality(&pd);
    for _ in 0..3 {
        if qv < 1e-13 {
            break;
        }
        match numf::refine_spectral_projector(&ad, &pd) {
            Some(next) => {
                let nq = quality(&next);
                if nq < qv {
                    pd = next;
                    qv = nq;
                } else {
                    break;
                }
            }
            None => break,
        }
    }
    Ok(CMat::from_dmatrix(&pd))
}

/// The projection `𝒫_{j,S}` (self-adjoint mode) or `𝒫̂_{j,S}` (general mode)
/// as a polynomial in `A_{j+1}`, normalized so eigenvalues in `S` map to 1 and
/// the rest to 0. The full subset gives the identity by convention.
/// Path tracking locates eigenvalues only to tracking accuracy; replace each
/// approximate value by the centroid of the matching cluster of directly
/// computed eigenvalues of `a` before building polynomials from them.
fn polish_groups(a: &CMat<Complex64>, groups: &mut [EigGroup]) {
    let Ok(eigs) = numf::eigenvalues_dm(&a.to_dmatrix()) else {
        return;
    };
    let delta = crate::pencil::delta_cluster(a.frob_norm());
    for g in groups.iter_mut() {
        for v in g.eigs.iter_mut() {
            let dmin = eigs
                .iter()
                .map(|e| (e - *v).norm())
                .fold(f64::INFINITY, f64::min);
            let close: Vec<Complex64> = eigs
                .iter()
                .copied()
                .filter(|e| (e - *v).norm() <= dmin + 10.0 * delta)
                .collect();
            if !close.is_empty() {
                *v = close.iter().sum::<Complex64>() / close.len() as f64;
            }
        }
    }
}

pub fn build_projection(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    j: usize,
    subset: &[usize],
    general: bool,
) -> Result<CMat<Complex64>> {
    let mut groups: Vec<EigGroup> = (0..d.k())
        .map(|s| EigGroup {
            eigs: component_eigenvalues(d, j, s),
            degree: d.components[s].degree,
            multiplicity: d.components[s].multiplicity,
            selected: subset.contains(&s),
        })
        .collect();
    polish_groups(&t.matrices[j], &mut groups);
    projection_from_groups(&t.matrices[j], &groups, general, subset)
}

/// `𝒫_{1,S}(c)` for an arbitrary first row `c`: the same construction applied
/// to `B(c) = Σ c_j A_j`, with the component grouping transported from the
/// decomposition's base direction along a path to `c`.
pub fn projection_at_direction(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    row: &[Complex64],
    subset: &[usize],
    general: bool,
) -> Result<CMat<Complex64>> {
    let endpoints = crate::decomposition::transport_branches(t, d, row, 1)?;
    let b = t.combine(row)?;
    let mut groups: Vec<EigGroup> = (0..d.k())
        .map(|s| EigGroup {
            eigs: endpoints
                .iter()
                .enumerate()
                .filter(|&(bi, _)| d.assignment[bi] == s)
                .map(|(_, &(mu, _))| mu)
                .collect(),
            degree: d.components[s].degree,
            multiplicity: d.components[s].multiplicity,
            selected: subset.contains(&s),
        })
        .collect();
    polish_groups(&b, &mut groups);
    projection_from_groups(&b, &groups, general, subset)
}

/// Riesz projection `(1/2πi) ∮ (w - A_j)^{-1} dw` around the given group of
/// eigenvalues, with trapezoid quadrature on a circle.
pub fn riesz_projection(
    t: &MatrixTuple<Complex64>,
    j: usize,
    group: &[Complex64],
    quad_nodes: usize,
) -> Result<CMat<Complex64>> {
    let a = t.matrices[j].to_dmatrix();
    let eigs = numf::eigenvalues_dm(&a)?;
    let delta = crate::pencil::delta_cluster(t.norm_scale());
    // One circle per eigenvalue cluster of the group. A single circle around
    // the whole group converges poorly (or encloses the wrong eigenvalues)
    // when outside eigenvalues interleave with the group.
    let clusters = numf::cluster(group, 3.0 * delta);
    let nodes = quad_nodes.max(8);
    let n = t.size();
    let id = CDMat::identity(n, n);
    let mut acc = CDMat::zeros(n, n);
    for &(center, _) in &clusters {
        let dmin = eigs
            .iter()
            .filter(|&&e| group.iter().all(|&g| (e - g).norm() > 3.0 * delta))
            .map(|&e| (e - center).norm())
            .chain(
                clusters
                    .iter()
                    .map(|&(c, _)| (c - center).norm())
                    .filter(|&d| d > 3.0 * delta),
            )
            .fold(f64::INFINITY, f64::min);
        if dmin <= 6.0 * delta {
            return Err(Error::ContourTooTight {
                suggested: 3.0 * delta,
            });
        }
        let radius = if dmin.is_finite() { dmin / 2.0 } else { 1.0 };
        for k in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
            let w = center + Complex64::from_polar(radius, theta);
            let resolvent =
                numf::resolvent_apply(&a, w, &id).map_err(|_| Error::ContourTooTight {
                    suggested: radius * 0.9,
                })?;
            acc += resolvent * Complex64::from_polar(radius, theta) / Complex64::new(nodes as f64, 0.0);
        }
    }
    Ok(CMat::from_dmatrix(&acc))
}

/// Orthogonal projection onto `range(P)`: with `μ_1..μ_r` the positive
/// eigenvalues of `PP*`, forms `Q(z) = 1 - Π(μ_t - z)/Π μ_t` and returns
/// `Q(PP*)`.
pub fn orthogonalize(p: &CMat<Complex64>) -> Result<CMat<Complex64>> {
    let h = p.mul(&p.adjoint());
    let hd = h.to_dmatrix();
    let (vals, _) = numf::hermitian_eigen(&hd);
    let hnorm = h.frob_norm().max(1e-300);
    let delta_psd = 1e-8 * hnorm;
    if vals.iter().any(|&v| v > delta_psd && v <= 10.0 * delta_psd) {
        return Err(Error::IllConditionedProjection(
            *vals
                .iter()
                .find(|&&v| v > delta_psd && v <= 10.0 * delta_psd)
                .unwrap(),
        ));
    }
    let mus: Vec<f64> = vals.iter().copied().filter(|&v| v > delta_psd).collect();
    if mus.is_empty() {
        return Ok(CMat::zeros(p.nrows, p.ncols));
    }
    // Q(z) = 1 - prod (mu_t - z) / prod mu_t
    let mut num = UniPoly::one();
    let mut denom = 1.0f64;
    for &mu in &mus {
        num = num.mul(&UniPoly::new(vec![
            Complex64::new(mu, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        denom *= mu;
    }
    let mut qpoly = num.scale(&Complex64::new(-1.0 / denom, 0.0));
    qpoly.coeffs[0] += Complex64::new(1.0, 0.0);
    let q = poly_at_matrix(&qpoly, &h);
    let resid = q.mul(&q).sub(&q).frob_norm() + q.sub(&q.adjoint()).frob_norm();
    if resid > 1e-7 * (1.0 + q.frob_norm().powi(2)) {
        return Err(Error::IllConditionedProjection(resid));
    }
    Ok(q)
}

/// The projections `P_j` and orthogonalized `Q_j` for every `j`, for one
/// component subset.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    pub subset: Vec<usize>,
    pub general: bool,
    pub p: Vec<CMat<Complex64>>,
    pub q: Vec<CMat<Complex64>>,
    /// Common rank of the projections.
    pub rank: usize,
}

pub fn build_family(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    subset: &[usize],
    general: bool,
) -> Result<ProjectionFamily> {
    let n = t.n();
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    let mut rank = None;
    for j in 0..n {
        let pj = build_projection(t, d, j, subset, general)?;
        let qj = orthogonalize(&pj)?;
        let r = numf::rank(&qj.to_dmatrix(), 0.5);
        match rank {
            None => rank = Some(r),
            Some(r0) if r0 != r => {
                return Err(Error::CertificateDisagreement(format!(
                    "projection ranks differ across the tuple: {} vs {}",
                    r0, r
                )));
            }
            _ => {}
        }
        p.push(pj);
        q.push(qj);
    }
    Ok(ProjectionFamily {
        subset: subset.to_vec(),
        general,
        p,
        q,
        rank: rank.unwrap_or(0),
    })
}

/// Snaps a float matrix to Gaussian rationals and validates the result: it
/// must be idempotent and commute with `a` exactly. Returns `None` when the
/// entries are not small rationals or validation fails.
pub fn exactify(p: &CMat<Complex64>, a: &CMat<Exact>) -> Option<CMat<Exact>> {
    let scale = 1.0 + p.max_abs();
    let tol = 1e-7 * scale;
    let mut out = CMat::<Exact>::zeros(p.nrows, p.ncols);
    for i in 0..p.nrows {
        for j in 0..p.ncols {
            out[(i, j)] = Exact::snap(p[(i, j)], tol, 1 << 24)?;
        }
    }
    if out.mul(&out) != out {
        return None;
    }
    if out.mul(a) != a.mul(&out) {
        return None;
    }
    Some(out)
}

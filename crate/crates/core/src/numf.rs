//! Double-precision numeric kernels on top of nalgebra: eigenvalues, clustering,
//! optimal point matching, and orthonormal subspace bases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CDMat = DMatrix<Complex64>;

/// Eigenvalues of a general complex matrix via its Schur form.
pub fn eigenvalues_dm(m: &CDMat) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let schur = m
        .clone()
        .try_schur(1e-14, 10_000)
        .ok_or(Error::NonConvergence(n))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// an orthonormal matrix of column eigenvectors.
pub fn hermitian_eigen(m: &CDMat) -> (Vec<f64>, CDMat) {
    let se = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CDMat::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Greedy clustering of complex points: two points are merged when within
/// `delta`. Returns (centroid, count) pairs, sorted by (re, im).
pub fn cluster(points: &[Complex64], delta: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &p in points {
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - p).norm() <= delta)
        {
            Some((c, k)) => {
                // running centroid
                *c = (*c * (*k as f64) + p) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => clusters.push((p, 1)),
        }
    }
    clusters.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    clusters
}

/// Minimum-total-distance perfect matching between two equally sized point
/// sets, by bitmask dynamic programming. Returns `perm` with `to[perm[i]]`
/// matched to `from[i]`, plus the largest single matched distance.
pub fn optimal_assignment(from: &[Complex64], to: &[Complex64]) -> Result<(Vec<usize>, f64)> {
    let k = from.len();
    if to.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "matching {} points to {}",
            k,
            to.len()
        )));
    }
    if k == 0 {
        return Ok((vec![], 0.0));
    }
    if k > 20 {
        return Err(Error::TooManyComponents(k, 20));
    }
    let cost = |i: usize, j: usize| (from[i] - to[j]).norm();
    let full = 1usize << k;
    let mut dp = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    dp[0] = 0.0;
    for mask in 0..full - 1 {
        if !dp[mask].is_finite() {
            continue;
        }
        let i = mask.count_ones() as usize; // next `from` point to place
        for j in 0..k {
            if mask & (1 << j) != 0 {
                continue;
            }
            let next = mask | (1 << j);
            let c = dp[mask] + cost(i, j);
            if c < dp[next] {
                dp[next] = c;
                choice[next] = j;
            }
        }
    }
    let mut perm = vec![0usize; k];
    let mut mask = full - 1;
    while mask != 0 {
        let j = choice[mask];
        let i = mask.count_ones() as usize - 1;
        perm[i] = j;
        mask &= !(1 << j);
    }
    let max_dist = (0..k).map(|i| cost(i, perm[i])).fold(0.0, f64::max);
    Ok((perm, max_dist))
}

/// Orthonormal basis of the range of `m`: left singular vectors whose singular
/// values exceed `tol`. Returns an n x r matrix.
pub fn range_basis(m: &CDMat, tol: f64) -> CDMat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd with u requested");
    let r = svd.singular_values.iter().filter(|&&s| s > tol).count();
    u.columns(0, r).into_owned()
}

/// Orthonormal basis of the nullspace of `m` (right singular vectors whose
/// singular values are at most `tol`). Returns an n x k matrix.
pub fn null_basis(m: &CDMat, tol: f64) -> CDMat {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("svd with v_t requested");
    let r = svd.singular_values.iter().filter(|&&s| s > tol).count();
    // rows r.. of V^H span the nullspace; conjugate-transpose them into columns
    let mut out = CDMat::zeros(n, n - r);
    for (col, row) in (r..n).enumerate() {
        for j in 0..n {
            out[(j, col)] = vt[(row, j)].conj();
        }
    }
    out
}

/// Solves the Sylvester equation `A X - X B = C` by vectorization; fine for
/// the small blocks this crate works with.
fn solve_sylvester(a: &CDMat, b: &CDMat, c: &CDMat) -> Option<CDMat> {
    let m = a.nrows();
    let k = b.ncols();
    let mut big = CDMat::zeros(m * k, m * k);
    // vec is column-stacked: entry (i, j) of X sits at row j*m + i.
    for j in 0..k {
        for i in 0..m {
            let row = j * m + i;
            for l in 0..m {
                big[(row, j * m + l)] += a[(i, l)];
            }
            for l in 0..k {
                big[(row, l * m + i)] -= b[(l, j)];
            }
        }
    }
    let mut rhs = CDMat::zeros(m * k, 1);
    for j in 0..k {
        for i in 0..m {
            rhs[(j * m + i, 0)] = c[(i, j)];
        }
    }
    let sol = big.lu().solve(&rhs)?;
    let mut x = CDMat::zeros(m, k);
    for j in 0..k {
        for i in 0..m {
            x[(i, j)] = sol[(j * m + i, 0)];
        }
    }
    Some(x)
}

/// One Newton step refining an approximate spectral projector `p` of `a`.
/// Corrects the range and kernel bases by solving the linearized
/// invariant-subspace equations, then rebuilds the oblique projector; each
/// step roughly squares the subspace error.
pub fn refine_spectral_projector(a: &CDMat, p: &CDMat) -> Option<CDMat> {
    let n = a.nrows();
    let trace: f64 = (0..n).map(|i| p[(i, i)].re).sum();
    let r = trace.round();
    if !(r >= 1.0 && r <= (n - 1) as f64) {
        return None;
    }
    let r = r as usize;
    let id = CDMat::identity(n, n);
    // Nonzero singular values of an idempotent are >= 1, so 0.5 splits them.
    let v = range_basis(p, 0.5);
    let w = range_basis(&(&id - p), 0.5);
    if v.ncols() != r || w.ncols() != n - r {
        return None;
    }
    let mut s = CDMat::zeros(n, n);
    s.view_mut((0, 0), (n, r)).copy_from(&v);
    s.view_mut((0, r), (n, n - r)).copy_from(&w);
    let s_inv = s.clone().lu().try_inverse()?;
    let h = &s_inv * a * &s;
    let h11 = h.view((0, 0), (r, r)).into_owned();
    let h12 = h.view((0, r), (r, n - r)).into_owned();
    let h21 = h.view((r, 0), (n - r, r)).into_owned();
    let h22 = h.view((r, r), (n - r, n - r)).into_owned();
    let x = solve_sylvester(&h22, &h11, &(-&h21))?;
    let y = solve_sylvester(&h11, &h22, &(-&h12))?;
    let vp = &v + &w * &x;
    let wp = &w + &v * &y;
    let mut m2 = CDMat::zeros(n, n);
    m2.view_mut((0, 0), (n, r)).copy_from(&vp);
    m2.view_mut((0, r), (n, n - r)).copy_from(&wp);
    let m_inv = m2.lu().try_inverse()?;
    Some(&vp * m_inv.rows(0, r))
}

pub fn rank(m: &CDMat, tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases of equal dimension.
pub fn max_principal_angle(a: &CDMat, b: &CDMat) -> f64 {
    let prod = a.adjoint() * b;
    let svd = prod.svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |acc, &s| acc.min(s));
    smin.clamp(-1.0, 1.0).acos()
}

/// Solves (w I - A) x = b by LU with partial pivoting.
pub fn resolvent_apply(a: &CDMat, w: Complex64, b: &CDMat) -> Result<CDMat> {
    let n = a.nrows();
    let shifted = CDMat::identity(n, n) * w - a;
    shifted
        .lu()
        .solve(b)
        .ok_or(Error::ContourTooTight { suggested: 0.0 })
}

pub fn frob(m: &CDMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dvec(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_rotation() {
        // [[0,-1],[1,0]] has eigenvalues +-i
        let m = CDMat::from_row_slice(2, 2, &[c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)]);
        let mut eigs = eigenvalues_dm(&m).unwrap();
        eigs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((eigs[0] - c(0., -1.)).norm() < 1e-12);
        assert!((eigs[1] - c(0., 1.)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_pauli_y() {
        // sigma_y = [[0,-i],[i,0]], eigenvalues -1, 1
        let m = CDMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let resid = &m * &vecs - &vecs * CDMat::from_diagonal(&dvec(&[c(vals[0], 0.), c(vals[1], 0.)]));
        assert!(frob(&resid) < 1e-12);
    }

    #[test]
    fn clustering_merges_nearby() {
        let pts = [c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(2.0, 0.0)];
        let cl = cluster(&pts, 1e-7);
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].1, 2);
        assert_eq!(cl[1].1, 1);
    }

    #[test]
    fn assignment_recovers_shuffle() {
        let from = [c(0., 0.), c(1., 0.), c(2., 0.), c(3., 0.)];
        let to = [c(3.01, 0.), c(0.01, 0.), c(2.01, 0.), c(1.01, 0.)];
        let (perm, maxd) = optimal_assignment(&from, &to).unwrap();
        assert_eq!(perm, vec![1, 3, 2, 0]);
        assert!(maxd < 0.02);
    }

    #[test]
    fn null_and_range() {
        // rank-1 matrix [[1,1],[1,1]]
        let m = CDMat::from_element(2, 2, c(1.0, 0.0));
        assert_eq!(rank(&m, 1e-10), 1);
        let nb = null_basis(&m, 1e-10);
        assert_eq!(nb.ncols(), 1);
        assert!(frob(&(&m * &nb)) < 1e-12);
        let rb = range_basis(&m, 1e-10);
        assert_eq!(rb.ncols(), 1);
    }

    #[test]
    fn principal_angle_orthogonal_planes() {
        let e1 = CDMat::from_row_slice(2, 1, &[c(1., 0.), c(0., 0.)]);
        let e2 = CDMat::from_row_slice(2, 1, &[c(0., 0.), c(1., 0.)]);
        assert!(max_principal_angle(&e1, &e1) < 1e-8);
        assert!((max_principal_angle(&e1, &e2) - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }
}

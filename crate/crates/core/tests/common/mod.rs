//! Helpers shared by the integration suites.

use num_complex::Complex64;

use jspec::matrix::CMat;
use jspec::pencil::MatrixTuple;
use jspec::scalar::Exact;

pub fn em(rows: &[&[i64]]) -> CMat<Exact> {
    CMat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&v| Exact::from_ints(v, 0)).collect())
            .collect(),
    )
    .unwrap()
}

/// Contour-integral derivative of the spectral projector of
/// `M(c) = c1 A1 + c2 A2` onto a group of eigenvalues, with respect to `c2`
/// at `(1, 0)`:
/// `dP/dc2 = (1/2 pi i) \oint (z-M)^{-1} A2 (z-M)^{-1} dz`.
/// One small circle per group eigenvalue, so interleaved outside eigenvalues
/// are never enclosed.
pub fn contour_projector_derivative(
    t: &MatrixTuple<Complex64>,
    group: &[Complex64],
    others: &[Complex64],
    nodes: usize,
) -> CMat<Complex64> {
    let m = t.matrices[0].to_dmatrix();
    let a2 = t.matrices[1].to_dmatrix();
    let size = t.size();
    let id = jspec::numf::CDMat::identity(size, size);
    let mut acc = jspec::numf::CDMat::zeros(size, size);
    for (gi, &lambda) in group.iter().enumerate() {
        let radius = 0.5
            * group
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != gi)
                .map(|(_, &g)| (g - lambda).norm())
                .chain(others.iter().map(|&g| (g - lambda).norm()))
                .fold(f64::INFINITY, f64::min);
        for k in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
            let z = lambda + Complex64::from_polar(radius, theta);
            let res = (&id * z - &m).lu().try_inverse().unwrap();
            let dz = Complex64::new(0.0, 1.0)
                * Complex64::from_polar(radius, theta)
                * (2.0 * std::f64::consts::PI / nodes as f64);
            acc += &res * &a2 * &res * dz;
        }
    }
    acc /= Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    CMat::from_dmatrix(&acc)
}

//! Matrix tuples, pencil evaluation, the determinant polynomial, tuple
//! transformations, and admissibility testing/sampling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::numf;
use crate::poly::{interpolate_homogeneous, MultiPoly};
use crate::scalar::Coeff;

use std::sync::atomic::{AtomicU64, Ordering};

static CLUSTER_FACTOR_BITS: AtomicU64 = AtomicU64::new(0);

/// Overrides the relative eigenvalue-clustering tolerance (default `1e-7`).
pub fn set_cluster_factor(f: f64) {
    CLUSTER_FACTOR_BITS.store(f.to_bits(), Ordering::Relaxed);
}

/// Cluster tolerance for eigenvalues of a matrix with Frobenius norm `scale`.
pub fn delta_cluster(scale: f64) -> f64 {
    let bits = CLUSTER_FACTOR_BITS.load(Ordering::Relaxed);
    let factor = if bits == 0 { 1e-7 } else { f64::from_bits(bits) };
    factor * (1.0 + scale)
}

/// An ordered tuple `(A_1, ..., A_n)` of square matrices, with the pencil
/// convention `A(x) = x_1 A_1 + ... + x_n A_n - x_{n+1} I`.
#[derive(Clone, Debug)]
pub struct MatrixTuple<C: Coeff> {
    pub matrices: Vec<CMat<C>>,
    pub selfadjoint: bool,
    /// Common shift recorded by preprocessing: stored matrices are the
    /// originals plus `shift * I`.
    pub shift: i64,
}

impl<C: Coeff> MatrixTuple<C> {
    pub fn n(&self) -> usize {
        self.matrices.len()
    }

    pub fn size(&self) -> usize {
        self.matrices[0].nrows
    }

    pub fn norm_scale(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| m.frob_norm())
            .fold(0.0, f64::max)
    }

    /// `B(c) = c_1 A_1 + ... + c_n A_n` for a direction `c` of length n.
    pub fn combine(&self, c: &[C]) -> Result<CMat<C>> {
        if c.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "direction of length {} for a tuple of {} matrices",
                c.len(),
                self.n()
            )));
        }
        let mut acc = CMat::zeros(self.size(), self.size());
        for (coef, m) in c.iter().zip(&self.matrices) {
            if !coef.is_zero() {
                acc = acc.add(&m.scale(coef));
            }
        }
        Ok(acc)
    }

    pub fn to_c64(&self) -> MatrixTuple<Complex64> {
        MatrixTuple {
            matrices: self.matrices.iter().map(|m| m.to_c64()).collect(),
            selfadjoint: self.selfadjoint,
            shift: self.shift,
        }
    }
}

/// Builds a tuple from raw matrices: validates shapes, detects
/// self-adjointness, and applies the smallest positive integer shift making
/// every matrix invertible when any is singular.
pub fn make_tuple<C: Coeff>(matrices: Vec<CMat<C>>) -> Result<MatrixTuple<C>> {
    if matrices.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let size = matrices[0].nrows;
    for (i, m) in matrices.iter().enumerate() {
        if m.nrows != size || m.ncols != size {
            return Err(Error::RaggedInput(i, size));
        }
    }
    let selfadjoint = matrices.iter().all(|m| {
        if C::EXACT {
            m.is_hermitian()
        } else {
            m.sub(&m.adjoint()).frob_norm() <= 1e-12 * (1.0 + m.frob_norm())
        }
    });
    let eps_inv = |m: &CMat<C>| 1e-10 * size as f64 * (1.0 + m.frob_norm());
    let all_invertible = |mats: &[CMat<C>]| -> Result<bool> {
        for m in mats {
            if m.det()?.abs() <= eps_inv(m) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut mats = matrices;
    let mut shift = 0i64;
    if !all_invertible(&mats)? {
        let cap = 4 * size as i64 + 4;
        let mut found = false;
        for t in 1..=cap {
            let shifted: Vec<CMat<C>> = mats
                .iter()
                .map(|m| m.add(&CMat::identity(size).scale(&C::from_int(t))))
                .collect();
            if all_invertible(&shifted)? {
                mats = shifted;
                shift = t;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::ShiftSearchFailed(cap));
        }
    }
    Ok(MatrixTuple {
        matrices: mats,
        selfadjoint,
        shift,
    })
}

/// `A(x) = x_1 A_1 + ... + x_n A_n - x_{n+1} I` for `x` of length n+1.
pub fn evaluate_pencil<C: Coeff>(t: &MatrixTuple<C>, x: &[C]) -> Result<CMat<C>> {
    if x.len() != t.n() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} for a pencil in {} variables",
            x.len(),
            t.n() + 1
        )));
    }
    let mut acc = t.combine(&x[..t.n()])?;
    let last = x[t.n()].clone();
    for i in 0..t.size() {
        acc[(i, i)] = acc[(i, i)].clone() - last.clone();
    }
    Ok(acc)
}

/// The homogeneous degree-N polynomial `det A(x)` in n+1 variables, recovered
/// by interpolation from point evaluations. Its value at `(0,...,0,1)` is
/// `(-1)^N`.
pub fn spectrum_polynomial<C: Coeff>(t: &MatrixTuple<C>) -> Result<MultiPoly<C>> {
    let nvars = t.n() + 1;
    let degree = t.size() as u32;
    let p = interpolate_homogeneous(
        |x: &[C]| evaluate_pencil(t, x)?.det(),
        nvars,
        degree,
    )?;
    if C::EXACT {
        let mut point = vec![C::zero(); nvars];
        point[nvars - 1] = C::one();
        let v = p.eval(&point)?;
        let expect = if t.size() % 2 == 0 { C::one() } else { -C::one() };
        if v != expect {
            return Err(Error::InterpolationInconsistent {
                degree: degree as usize,
                residual: (v.to_c64() - expect.to_c64()).norm(),
            });
        }
    }
    Ok(p)
}

/// Joint spectrum polynomial of an ad-hoc list of equal-size square matrices
/// (no shift preprocessing). Used for pencils of constructed projections.
pub fn spectrum_poly_of<C: Coeff>(mats: &[CMat<C>]) -> Result<MultiPoly<C>> {
    let t = MatrixTuple {
        matrices: mats.to_vec(),
        selfadjoint: false,
        shift: 0,
    };
    let nvars = t.n() + 1;
    interpolate_homogeneous(
        |x: &[C]| evaluate_pencil(&t, x)?.det(),
        nvars,
        t.size() as u32,
    )
}

/// A tuple transformation matrix: `Â_j = Σ_s c_{js} A_s`.
#[derive(Clone, Debug)]
pub struct TransformMatrix<C: Coeff> {
    pub c: CMat<C>,
}

impl<C: Coeff> TransformMatrix<C> {
    pub fn identity(n: usize) -> Self {
        TransformMatrix {
            c: CMat::identity(n),
        }
    }

    pub fn is_real(&self) -> bool {
        self.c.entries().all(|v| {
            let z = v.to_c64();
            if C::EXACT {
                z.im == 0.0
            } else {
                z.im.abs() <= 1e-14 * (1.0 + z.re.abs())
            }
        })
    }
}

/// Applies an invertible recombination to the tuple. Self-adjointness is kept
/// only for real transforms.
pub fn apply_transform<C: Coeff>(
    t: &MatrixTuple<C>,
    tr: &TransformMatrix<C>,
) -> Result<MatrixTuple<C>> {
    let n = t.n();
    if tr.c.nrows != n || tr.c.ncols != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} transform for a tuple of {} matrices",
            tr.c.nrows, tr.c.ncols, n
        )));
    }
    let eps = if C::EXACT { 0.0 } else { 1e-12 * (1.0 + tr.c.frob_norm()) };
    if tr.c.det()?.abs() <= eps {
        return Err(Error::SingularTransform);
    }
    let matrices: Vec<CMat<C>> = (0..n)
        .map(|j| {
            let row: Vec<C> = (0..n).map(|s| tr.c[(j, s)].clone()).collect();
            t.combine(&row)
        })
        .collect::<Result<_>>()?;
    Ok(MatrixTuple {
        selfadjoint: t.selfadjoint && tr.is_real(),
        matrices,
        shift: t.shift,
    })
}

/// Multiplicity profile of a direction: sorted eigenvalue multiplicities of
/// `B(c)`, plus the minimum gap between distinct eigenvalues.
fn direction_profile(
    t: &MatrixTuple<Complex64>,
    c: &[Complex64],
    delta: f64,
) -> Result<(Vec<usize>, f64)> {
    let b = t.combine(c)?;
    let eigs = numf::eigenvalues_dm(&b.to_dmatrix())?;
    let clusters = numf::cluster(&eigs, delta);
    let mut profile: Vec<usize> = clusters.iter().map(|&(_, m)| m).collect();
    profile.sort_unstable();
    let mut gap = f64::INFINITY;
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            gap = gap.min((clusters[i].0 - clusters[j].0).norm());
        }
    }
    Ok((profile, gap))
}

fn generic_direction(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(0.25..1.0), rng.gen_range(0.25..1.0)))
        .collect()
}

/// Checks Definition-style admissibility of `tr` for the tuple: `C` invertible
/// (and real for self-adjoint tuples), and on every coordinate line the
/// transformed spectrum meets each component in simple, well-separated points.
///
/// Operationally: the eigenvalue multiplicity profile of `Â_j` must coincide
/// with the profile of a generic direction (where all component branches are
/// distinct), with distinct eigenvalues separated by more than the cluster
/// tolerance.
pub fn is_admissible<C: Coeff>(
    t: &MatrixTuple<C>,
    tr: &TransformMatrix<C>,
) -> Result<(bool, String)> {
    if t.selfadjoint && !tr.is_real() {
        return Ok((false, "transform must be real for a self-adjoint tuple".into()));
    }
    let eps = if C::EXACT { 0.0 } else { 1e-12 * (1.0 + tr.c.frob_norm()) };
    if tr.c.det()?.abs() <= eps {
        return Ok((false, "transform matrix is not invertible".into()));
    }
    let hat = apply_transform(t, tr)?.to_c64();
    let n = hat.n();
    let delta = delta_cluster(hat.norm_scale());
    // Reference profile from generic directions; take the finest (most
    // distinct eigenvalues) over a few draws to dodge an unlucky direction.
    let mut reference: Option<Vec<usize>> = None;
    for s in 0..3u64 {
        let c = generic_direction(n, s);
        let (profile, _) = direction_profile(&hat, &c, delta)?;
        reference = Some(match reference {
            Some(r) if r.len() >= profile.len() => r,
            _ => profile,
        });
    }
    let reference = reference.unwrap();
    for j in 0..n {
        let mut ej = vec![Complex64::new(0.0, 0.0); n];
        ej[j] = Complex64::new(1.0, 0.0);
        let (profile, gap) = direction_profile(&hat, &ej, delta)?;
        if profile != reference {
            return Ok((
                false,
                format!(
                    "line {}: multiplicity profile {:?} differs from generic profile {:?}",
                    j + 1,
                    profile,
                    reference
                ),
            ));
        }
        if profile.len() > 1 && gap <= 10.0 * delta {
            return Ok((
                false,
                format!("line {}: eigenvalue gap {:.3e} below separation threshold", j + 1, gap),
            ));
        }
    }
    Ok((true, String::new()))
}

/// Draws `C = I + radius * R` (entries of `R` uniform on a fine grid in
/// `[-1,1]`, real for self-adjoint tuples) until `is_admissible` accepts.
/// Deterministic for a fixed seed.
pub fn sample_admissible<C: Coeff>(
    t: &MatrixTuple<C>,
    seed: u64,
    radius: f64,
    max_tries: usize,
) -> Result<TransformMatrix<C>> {
    let n = t.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    // Quantize entries to k/1024 so exact tuples stay exact.
    let q = (radius * 1024.0).round() as i64;
    for try_idx in 0..max_tries.max(1) {
        let tr = if try_idx == 0 || q == 0 {
            TransformMatrix::identity(n)
        } else {
            let mut c = CMat::<C>::identity(n);
            for i in 0..n {
                for j in 0..n {
                    let re = rng.gen_range(-q..=q);
                    let im = if t.selfadjoint { 0 } else { rng.gen_range(-q..=q) };
                    let bump =
                        (C::from_int(re) + C::from_int(im) * C::i()).div(&C::from_int(1024))?;
                    c[(i, j)] = c[(i, j)].clone() + bump;
                }
            }
            TransformMatrix { c }
        };
        let (ok, diag) = is_admissible(t, &tr)?;
        if ok {
            return Ok(tr);
        }
        last = diag;
        if q == 0 {
            break;
        }
    }
    Err(Error::AdmissibleSamplingFailed {
        tries: max_tries,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn em(rows: &[&[i64]]) -> CMat<Exact> {
        CMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Exact::from_ints(v, 0)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn ex42() -> Vec<CMat<Exact>> {
        let a1 = em(&[&[1, 0, 0], &[0, 5, 0], &[0, 0, 0]]);
        let mut a2 = em(&[&[1, 2, 1], &[2, 7, 1], &[1, 1, 0]]);
        a2[(2, 2)] = Exact::from_ratio(1, 2);
        vec![a1, a2]
    }

    fn ex44() -> Vec<CMat<Exact>> {
        vec![em(&[&[1, 1], &[0, 0]]), em(&[&[0, 0], &[1, 1]])]
    }

    #[test]
    fn shift_applied_when_singular() {
        let t = make_tuple(ex42()).unwrap();
        assert_eq!(t.shift, 1);
        assert!(t.selfadjoint);
        for m in &t.matrices {
            assert!(!m.det().unwrap().is_zero());
        }
        let id = make_tuple(vec![CMat::<Exact>::identity(2), CMat::identity(2)]).unwrap();
        assert_eq!(id.shift, 0);
    }

    #[test]
    fn pencil_values() {
        let t = make_tuple(vec![CMat::<Exact>::identity(2)]).unwrap();
        let z = evaluate_pencil(&t, &[Exact::from_ints(1, 0), Exact::from_ints(1, 0)]).unwrap();
        assert!(z.is_zero_matrix());
        // shift-free non-self-adjoint pair at (1,1,1)
        let p = MatrixTuple {
            matrices: ex44(),
            selfadjoint: false,
            shift: 0,
        };
        let m = evaluate_pencil(
            &p,
            &[
                Exact::from_ints(1, 0),
                Exact::from_ints(1, 0),
                Exact::from_ints(1, 0),
            ],
        )
        .unwrap();
        assert_eq!(m, em(&[&[0, 1], &[1, 0]]));
        let at_last = evaluate_pencil(
            &p,
            &[Exact::zero(), Exact::zero(), Exact::one()],
        )
        .unwrap();
        assert_eq!(at_last, CMat::identity(2).scale(&Exact::from_ints(-1, 0)));
    }

    #[test]
    fn spectrum_of_diag_pair() {
        // A1=diag(1,2), A2=diag(3,4): (x1+3x2-x3)(2x1+4x2-x3)
        let t = make_tuple(vec![em(&[&[1, 0], &[0, 2]]), em(&[&[3, 0], &[0, 4]])]).unwrap();
        let p = spectrum_polynomial(&t).unwrap();
        let mut l1 = MultiPoly::<Exact>::zero(3);
        l1.insert_term(vec![1, 0, 0], Exact::from_ints(1, 0));
        l1.insert_term(vec![0, 1, 0], Exact::from_ints(3, 0));
        l1.insert_term(vec![0, 0, 1], Exact::from_ints(-1, 0));
        let mut l2 = MultiPoly::<Exact>::zero(3);
        l2.insert_term(vec![1, 0, 0], Exact::from_ints(2, 0));
        l2.insert_term(vec![0, 1, 0], Exact::from_ints(4, 0));
        l2.insert_term(vec![0, 0, 1], Exact::from_ints(-1, 0));
        assert_eq!(p, l1.mul(&l2));
    }

    #[test]
    fn spectrum_of_ex44_line_pair() {
        // sigma = (x1+x2-x3) * (-x3) after expanding det directly
        let t = MatrixTuple {
            matrices: ex44(),
            selfadjoint: false,
            shift: 0,
        };
        let p = spectrum_polynomial(&t).unwrap();
        let mut line = MultiPoly::<Exact>::zero(3);
        line.insert_term(vec![1, 0, 0], Exact::from_ints(1, 0));
        line.insert_term(vec![0, 1, 0], Exact::from_ints(1, 0));
        line.insert_term(vec![0, 0, 1], Exact::from_ints(-1, 0));
        let x3 = MultiPoly::var(3, 2, Exact::from_ints(-1, 0));
        assert_eq!(p, line.mul(&x3));
    }

    #[test]
    fn transform_covariance() {
        // spectrum(apply_transform(t, C))(x) == spectrum(t)(x * script-C)
        let t = make_tuple(ex42()).unwrap();
        let c = TransformMatrix {
            c: em(&[&[2, 1], &[1, 1]]),
        };
        let lhs = spectrum_polynomial(&apply_transform(&t, &c).unwrap()).unwrap();
        let rhs_direct = |x: &[Exact]| -> crate::error::Result<Exact> {
            // y = x * script-C with the extra row/column (0,...,0,1)
            let y = vec![
                c.c[(0, 0)].clone() * x[0].clone() + c.c[(1, 0)].clone() * x[1].clone(),
                c.c[(0, 1)].clone() * x[0].clone() + c.c[(1, 1)].clone() * x[1].clone(),
                x[2].clone(),
            ];
            evaluate_pencil(&t, &y)?.det()
        };
        let rhs = interpolate_homogeneous(rhs_direct, 3, 3).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_admissible_for_ex44() {
        let t = MatrixTuple {
            matrices: ex44(),
            selfadjoint: false,
            shift: 0,
        };
        let (ok, diag) = is_admissible(&t, &TransformMatrix::identity(2)).unwrap();
        assert!(ok, "{diag}");
    }

    #[test]
    fn repeated_cross_component_eigenvalue_fails() {
        // A1 has eigenvalue 1 on two distinct line components.
        let t = make_tuple(vec![em(&[&[1, 0], &[0, 1]]), em(&[&[2, 0], &[0, 3]])]).unwrap();
        let (ok, diag) = is_admissible(&t, &TransformMatrix::identity(2)).unwrap();
        assert!(!ok);
        assert!(diag.contains("line 1"), "{diag}");
    }

    #[test]
    fn singular_transform_rejected() {
        let t = make_tuple(ex44()).unwrap();
        let c = TransformMatrix {
            c: em(&[&[1, 1], &[1, 1]]),
        };
        let (ok, diag) = is_admissible(&t, &c).unwrap();
        assert!(!ok);
        assert!(diag.contains("invertible"));
    }

    #[test]
    fn sampling_recovers_admissibility() {
        // Identity is inadmissible (shared eigenvalue across components), but a
        // nearby transform fixes it.
        let t = make_tuple(vec![em(&[&[1, 0], &[0, 1]]), em(&[&[2, 0], &[0, 3]])]).unwrap();
        let tr = sample_admissible(&t, 0, 0.1, 32).unwrap();
        let (ok, _) = is_admissible(&t, &tr).unwrap();
        assert!(ok);
        // Already-admissible tuple returns the identity immediately.
        let easy = MatrixTuple {
            matrices: ex44(),
            selfadjoint: false,
            shift: 0,
        };
        let tr0 = sample_admissible(&easy, 7, 0.1, 32).unwrap();
        assert_eq!(tr0.c, CMat::identity(2));
    }
}

//! Decision procedures: the self-adjoint spectral criterion, the general
//! criterion via orthogonalized projections, the auxiliary-tuple permutation
//! tests, constancy probes, subspace extraction, and the `analyze`
//! orchestrator.

use num_complex::Complex64;

use crate::decomposition::{decompose, ComponentDecomposition};
use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::numf;
use crate::pencil::{
    apply_transform, is_admissible, sample_admissible, spectrum_poly_of, MatrixTuple,
    TransformMatrix,
};
use crate::poly::MultiPoly;
use crate::projections::{
    build_family, orthogonalize, projection_at_direction, ProjectionFamily,
};
use crate::scalar::Coeff;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Check {
    Pass,
    Fail,
    Skipped,
}

/// Everything decided about one component subset.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub subset: Vec<usize>,
    pub selfadjoint_check: Check,
    pub general_check_b: Check,
    pub general_check_c: Check,
    pub permutation_sufficient: Check,
    pub constancy_probe: Option<f64>,
    pub rank: usize,
    /// Orthonormal basis columns of the common invariant subspace, when found.
    pub subspace: Option<CMat<Complex64>>,
    pub residual: Option<f64>,
    pub notes: Vec<String>,
}

impl Verdict {
    /// The authoritative outcome: the self-adjoint criterion for self-adjoint
    /// tuples, the general criterion (b) otherwise.
    pub fn passes(&self) -> bool {
        self.subspace.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub n: usize,
    pub size: usize,
    pub selfadjoint: bool,
    pub shift: i64,
    pub transform_is_identity: bool,
    pub seed: u64,
    pub decomposition: ComponentDecomposition,
    pub verdicts: Vec<Verdict>,
    /// Invariant subspace found through the commutant, when the subset checks
    /// cannot see it (single-component spectra with multiplicity).
    pub commutant_subspace: Option<CMat<Complex64>>,
    pub commutant_residual: Option<f64>,
    pub reducible: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub loop_budget: usize,
    /// Restrict the analysis to these subsets (component ids).
    pub subsets: Option<Vec<Vec<usize>>>,
    pub probe_step: f64,
    pub max_components: usize,
    /// Caps for the (n+4)-variable auxiliary interpolation.
    pub aux_cap_size: usize,
    pub aux_cap_vars: usize,
    pub tol_eq: Option<f64>,
    pub tol_const: f64,
    pub tol_inv: Option<f64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0,
            loop_budget: 24,
            subsets: None,
            probe_step: 1e-3,
            max_components: 10,
            aux_cap_size: 8,
            aux_cap_vars: 3,
            tol_eq: None,
            tol_const: 1e-6,
            tol_inv: None,
        }
    }
}

fn tol_eq(opts: &AnalyzeOptions, size: usize) -> f64 {
    opts.tol_eq.unwrap_or(1e-8 * (size as f64).sqrt())
}

fn tol_inv(opts: &AnalyzeOptions, t: &MatrixTuple<Complex64>) -> f64 {
    opts.tol_inv.unwrap_or(1e-8 * (1.0 + t.norm_scale()))
}

/// Does `p` equal `c * (x_1 + ... + x_n - x_{n+1})^rho * x_{n+1}^(size-rho)`
/// for some nonzero scalar `c`?
pub fn matches_hyperplane_power(
    p: &MultiPoly<Complex64>,
    nvars: usize,
    rho: usize,
    size: usize,
) -> bool {
    let mut hyper = MultiPoly::<Complex64>::zero(nvars);
    for i in 0..nvars - 1 {
        hyper.insert_term(
            {
                let mut e = vec![0u32; nvars];
                e[i] = 1;
                e
            },
            Complex64::new(1.0, 0.0),
        );
    }
    hyper.insert_term(
        {
            let mut e = vec![0u32; nvars];
            e[nvars - 1] = 1;
            e
        },
        Complex64::new(-1.0, 0.0),
    );
    let mut expect = MultiPoly::constant(nvars, Complex64::new(1.0, 0.0));
    for _ in 0..rho {
        expect = expect.mul(&hyper);
    }
    let mut xlast = MultiPoly::<Complex64>::zero(nvars);
    xlast.insert_term(
        {
            let mut e = vec![0u32; nvars];
            e[nvars - 1] = 1;
            e
        },
        Complex64::new(1.0, 0.0),
    );
    for _ in 0..size - rho {
        expect = expect.mul(&xlast);
    }
    polys_proportional(p, &expect, 1e-6)
}

/// Are two polynomials equal up to a nonzero scalar, at relative tolerance?
pub fn polys_proportional(
    a: &MultiPoly<Complex64>,
    b: &MultiPoly<Complex64>,
    rel_tol: f64,
) -> bool {
    let scale_a = a.max_coeff_abs();
    let scale_b = b.max_coeff_abs();
    if scale_a == 0.0 || scale_b == 0.0 {
        return scale_a == scale_b;
    }
    // Ratio at the largest coefficient of b.
    let (e_ref, c_ref) = b
        .terms
        .iter()
        .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
        .unwrap();
    let Some(c_a) = a.terms.get(e_ref) else {
        return false;
    };
    let ratio = c_a / c_ref;
    let tol = rel_tol * scale_a.max(scale_b * ratio.norm());
    for (e, cb) in &b.terms {
        let ca = a
            .terms
            .get(e)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0));
        if (ca - cb * ratio).norm() > tol {
            return false;
        }
    }
    for (e, ca) in &a.terms {
        if !b.terms.contains_key(e) && ca.norm() > tol {
            return false;
        }
    }
    true
}

/// Self-adjoint criterion for a subset: the joint spectrum of
/// the projections must be the hyperplane power, and the projections must be
/// pairwise equal. The two certificates must agree.
pub fn check_selfadjoint(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    subset: &[usize],
    opts: &AnalyzeOptions,
) -> Result<(Check, ProjectionFamily)> {
    if !t.selfadjoint {
        return Err(Error::ModeMismatch);
    }
    let fam = build_family(t, d, subset, false)?;
    let spec = spectrum_poly_of(&fam.p)?;
    let spectral = matches_hyperplane_power(&spec, t.n() + 1, fam.rank, t.size());
    let scale = fam.p.iter().map(|p| p.frob_norm()).fold(0.0, f64::max);
    let mut pairwise = true;
    for i in 0..fam.p.len() {
        for j in i + 1..fam.p.len() {
            if fam.p[i].sub(&fam.p[j]).frob_norm() > tol_eq(opts, t.size()) * (1.0 + scale) {
                pairwise = false;
            }
        }
    }
    if spectral != pairwise {
        return Err(Error::CertificateDisagreement(format!(
            "subset {:?}: spectral test says {}, pairwise equality says {}",
            subset, spectral, pairwise
        )));
    }
    Ok((if spectral { Check::Pass } else { Check::Fail }, fam))
}

/// General criterion (b): the joint spectrum of the orthogonalized
/// projections must be the hyperplane power of their common rank.
pub fn check_general_b(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    subset: &[usize],
) -> Result<(Check, ProjectionFamily)> {
    let fam = build_family(t, d, subset, true)?;
    let spec = spectrum_poly_of(&fam.q)?;
    let ok = matches_hyperplane_power(&spec, t.n() + 1, fam.rank, t.size());
    Ok((if ok { Check::Pass } else { Check::Fail }, fam))
}

/// The auxiliary tuple `(A_Λ, T, T*)` with `A_Λ = diag(1..N)` and `T` the
/// lower shift.
pub fn auxiliary_tuple(size: usize) -> Vec<CMat<Complex64>> {
    let lam = CMat::from_fn(size, size, |i, j| {
        if i == j {
            Complex64::new(i as f64 + 1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let t = CMat::from_fn(size, size, |i, j| {
        if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let tstar = t.adjoint();
    vec![lam, t, tstar]
}

/// Permutation test on `σ(A_Λ, T, T*, M_1, ..., M_n)`: is the spectrum
/// polynomial invariant under every transposition of the `M` slots?
pub fn check_permutation_invariance(mats: &[CMat<Complex64>]) -> Result<Check> {
    let size = mats[0].nrows;
    let mut tuple = auxiliary_tuple(size);
    tuple.extend(mats.iter().cloned());
    let nvars = tuple.len() + 1;
    let spec = spectrum_poly_of(&tuple)?;
    let scale = spec.max_coeff_abs().max(1.0);
    for a in 3..3 + mats.len() {
        for b in a + 1..3 + mats.len() {
            let mut perm: Vec<usize> = (0..nvars).collect();
            perm.swap(a, b);
            let swapped = spec.permute_vars(&perm);
            let diff = spec.sub(&swapped);
            if diff.max_coeff_abs() > 1e-6 * scale {
                return Ok(Check::Fail);
            }
        }
    }
    Ok(Check::Pass)
}

/// General criterion (c) with `M_j = Q_j` (or the sufficient-only variant
/// with `M_j = P_j`). Skipped above the size caps.
pub fn check_general_c(
    t: &MatrixTuple<Complex64>,
    fam: &ProjectionFamily,
    use_orthogonalized: bool,
    opts: &AnalyzeOptions,
) -> Result<Check> {
    if t.size() > opts.aux_cap_size || t.n() > opts.aux_cap_vars {
        return Ok(Check::Skipped);
    }
    let mats = if use_orthogonalized { &fam.q } else { &fam.p };
    check_permutation_invariance(mats)
}

/// Max central-difference norm of `𝒫_{1,S}` (or `𝒬_{1,S}` in general mode)
/// over perturbations of the first transform row along the coordinate
/// directions.
pub fn constancy_probe(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    subset: &[usize],
    row0: &[Complex64],
    h: f64,
    general: bool,
) -> Result<f64> {
    let mut max_d = 0.0f64;
    for l in 0..t.n() {
        let mut step = h;
        let mut done = false;
        for _ in 0..4 {
            match probe_derivative(t, d, subset, row0, l, step, general) {
                Ok(der) => {
                    max_d = max_d.max(der.frob_norm());
                    done = true;
                    break;
                }
                Err(_) => step /= 2.0,
            }
        }
        if !done {
            return Err(Error::AdmissibleSamplingFailed {
                tries: 4,
                last: format!("constancy probe failed along direction {}", l + 1),
            });
        }
    }
    Ok(max_d)
}

/// Central difference `(P(row + h e_l) - P(row - h e_l)) / 2h`.
pub fn probe_derivative(
    t: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    subset: &[usize],
    row0: &[Complex64],
    l: usize,
    h: f64,
    general: bool,
) -> Result<CMat<Complex64>> {
    let build = |row: &[Complex64]| -> Result<CMat<Complex64>> {
        let p = projection_at_direction(t, d, row, subset, general)?;
        if general {
            orthogonalize(&p)
        } else {
            Ok(p)
        }
    };
    let mut plus = row0.to_vec();
    plus[l] += Complex64::new(h, 0.0);
    let mut minus = row0.to_vec();
    minus[l] -= Complex64::new(h, 0.0);
    let dp = build(&plus)?.sub(&build(&minus)?);
    Ok(dp.scale(&Complex64::new(1.0 / (2.0 * h), 0.0)))
}

/// Orthonormal basis of the range of an orthogonal projection.
pub fn extract_subspace(q: &CMat<Complex64>) -> Result<CMat<Complex64>> {
    let basis = numf::range_basis(&q.to_dmatrix(), 0.5);
    let r = basis.ncols();
    if r == 0 || r == q.nrows {
        return Err(Error::TrivialSubspace(r, q.nrows));
    }
    Ok(CMat::from_dmatrix(&basis))
}

/// Residual `‖(I - Π) A_j Π‖₂` per matrix, with `Π` the projector onto the
/// span of the (orthonormal) basis columns.
pub fn verify_invariance(t: &MatrixTuple<Complex64>, basis: &CMat<Complex64>) -> Vec<f64> {
    let b = basis.to_dmatrix();
    let pi = &b * b.adjoint();
    let n = t.size();
    let id = numf::CDMat::identity(n, n);
    t.matrices
        .iter()
        .map(|a| {
            let m = (&id - &pi) * a.to_dmatrix() * &pi;
            let svd = m.svd(false, false);
            svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s))
        })
        .collect()
}

/// Invariant subspace from a non-scalar element of the commutant
/// `{X : XA_j = A_jX for all j}`, when one exists. This sees reducibility that
/// subset enumeration cannot (a single component with multiplicity).
pub fn commutant_subspace(
    t: &MatrixTuple<Complex64>,
    seed: u64,
) -> Result<Option<CMat<Complex64>>> {
    use rand::Rng;
    use rand::SeedableRng;
    let n = t.size();
    let rows = t.n() * n * n;
    // Vectorize: (A X - X A)_{ik} = sum_j A_{ij} X_{jk} - X_{ij} A_{jk};
    // unknowns X_{jk} flattened as j*n + k.
    let mut sys = numf::CDMat::zeros(rows, n * n);
    for (mi, a) in t.matrices.iter().enumerate() {
        for i in 0..n {
            for k in 0..n {
                let row = (mi * n + i) * n + k;
                for j in 0..n {
                    sys[(row, j * n + k)] += a[(i, j)];
                    sys[(row, i * n + j)] -= a[(j, k)];
                }
            }
        }
    }
    let tol = 1e-9 * (1.0 + t.norm_scale());
    let null = numf::null_basis(&sys, tol);
    if null.ncols() <= 1 {
        return Ok(None); // only scalars commute
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..6 {
        // Random commutant element; its spectral projectors commute with the
        // whole tuple, so any nontrivial eigenvalue cluster yields an
        // invariant subspace.
        let mut xv = numf::CDMat::zeros(n * n, 1);
        for c in 0..null.ncols() {
            let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for r in 0..n * n {
                xv[(r, 0)] += null[(r, c)] * w;
            }
        }
        let x = numf::CDMat::from_fn(n, n, |i, j| xv[(i * n + j, 0)]);
        let eigs = numf::eigenvalues_dm(&x)?;
        let delta = crate::pencil::delta_cluster(numf::frob(&x));
        let clusters = numf::cluster(&eigs, delta * 100.0);
        if clusters.len() < 2 {
            continue;
        }
        // Smallest cluster's generalized eigenspace via a kernel power.
        let (lam, mult) = clusters
            .iter()
            .copied()
            .min_by_key(|&(_, m)| m)
            .unwrap();
        let shifted = &x - numf::CDMat::identity(n, n) * lam;
        let powered = {
            let mut acc = numf::CDMat::identity(n, n);
            for _ in 0..mult.max(1) {
                acc *= &shifted;
            }
            acc
        };
        let kernel_tol = 1e-7 * (1.0 + numf::frob(&powered));
        let basis = numf::null_basis(&powered, kernel_tol);
        if basis.ncols() == 0 || basis.ncols() == n {
            continue;
        }
        let bm = CMat::from_dmatrix(&basis);
        let resid = verify_invariance(t, &bm);
        let tau = 1e-7 * (1.0 + t.norm_scale());
        if resid.iter().all(|&r| r <= tau) {
            return Ok(Some(bm));
        }
    }
    Ok(None)
}

/// Enumerates nontrivial subsets: all of them in general mode, one of each
/// complementary pair for self-adjoint tuples.
pub fn enumerate_subsets(k: usize, selfadjoint: bool) -> Vec<Vec<usize>> {
    let full = 1usize << k;
    let mut out = Vec::new();
    for mask in 1..full - 1 {
        if selfadjoint {
            let comp = (full - 1) ^ mask;
            if comp < mask {
                continue;
            }
        }
        out.push((0..k).filter(|&s| mask & (1 << s) != 0).collect());
    }
    out
}

/// Full pipeline: admissible transform, decomposition, per-subset checks,
/// subspace extraction, and the commutant certificate.
pub fn analyze<C: Coeff>(t: &MatrixTuple<C>, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let mut notes = Vec::new();
    // Prefer the identity transform (it preserves exactness of the inputs).
    let identity = TransformMatrix::identity(t.n());
    let (id_ok, id_diag) = is_admissible(t, &identity)?;
    let (tr, transformed) = if id_ok {
        (identity, t.clone())
    } else {
        notes.push(format!("identity transform not admissible: {}", id_diag));
        let tr = sample_admissible(t, opts.seed, 0.1, 40)?;
        let tt = apply_transform(t, &tr)?;
        (tr, tt)
    };
    let transform_is_identity = id_ok;
    let _ = &tr;
    let tf = transformed.to_c64();
    let d = decompose(&transformed, opts.seed, opts.loop_budget)?;
    let k = d.k();
    if k > opts.max_components {
        return Err(Error::TooManyComponents(k, opts.max_components));
    }
    let subsets = match &opts.subsets {
        Some(s) => s.clone(),
        None => enumerate_subsets(k, tf.selfadjoint),
    };
    let row0: Vec<Complex64> = {
        let mut r = vec![Complex64::new(0.0, 0.0); tf.n()];
        r[0] = Complex64::new(1.0, 0.0);
        r
    };
    let tau_inv = tol_inv(opts, &tf);
    let mut verdicts = Vec::new();
    for subset in subsets {
        let mut v = Verdict {
            subset: subset.clone(),
            selfadjoint_check: Check::Skipped,
            general_check_b: Check::Skipped,
            general_check_c: Check::Skipped,
            permutation_sufficient: Check::Skipped,
            constancy_probe: None,
            rank: 0,
            subspace: None,
            residual: None,
            notes: Vec::new(),
        };
        let authoritative: Result<(Check, ProjectionFamily)> = if tf.selfadjoint {
            check_selfadjoint(&tf, &d, &subset, opts)
        } else {
            check_general_b(&tf, &d, &subset)
        };
        match authoritative {
            Ok((check, fam)) => {
                v.rank = fam.rank;
                if tf.selfadjoint {
                    v.selfadjoint_check = check;
                    // advisory: the general criterion must agree
                    match check_general_b(&tf, &d, &subset) {
                        Ok((cb, _)) => v.general_check_b = cb,
                        Err(e) => v.notes.push(format!("general check errored: {}", e)),
                    }
                } else {
                    v.general_check_b = check;
                }
                match check_general_c(&tf, &fam, true, opts) {
                    Ok(c) => v.general_check_c = c,
                    Err(e) => v.notes.push(format!("auxiliary check errored: {}", e)),
                }
                match check_general_c(&tf, &fam, false, opts) {
                    Ok(c) => v.permutation_sufficient = c,
                    Err(e) => v
                        .notes
                        .push(format!("permutation sufficient test errored: {}", e)),
                }
                match constancy_probe(
                    &tf,
                    &d,
                    &subset,
                    &row0,
                    opts.probe_step,
                    !tf.selfadjoint,
                ) {
                    Ok(m) => v.constancy_probe = Some(m),
                    Err(e) => v.notes.push(format!("constancy probe errored: {}", e)),
                }
                if check == Check::Pass {
                    match extract_subspace(&fam.q[0]).and_then(|basis| {
                        let resid = verify_invariance(&tf, &basis);
                        let max = resid.iter().cloned().fold(0.0, f64::max);
                        if max <= tau_inv {
                            Ok((basis, max))
                        } else {
                            Err(Error::CertificateDisagreement(format!(
                                "criterion passed but invariance residual is {:.3e}",
                                max
                            )))
                        }
                    }) {
                        Ok((basis, max)) => {
                            v.subspace = Some(basis);
                            v.residual = Some(max);
                        }
                        Err(e) => {
                            v.notes.push(format!("subspace verification failed: {}", e));
                            if tf.selfadjoint {
                                v.selfadjoint_check = Check::Fail;
                            } else {
                                v.general_check_b = Check::Fail;
                            }
                        }
                    }
                }
            }
            Err(e) => {
                v.notes.push(format!("checks errored: {}", e));
            }
        }
        verdicts.push(v);
    }
    let (commutant_basis, commutant_resid) = match commutant_subspace(&tf, opts.seed ^ 0x51ab)? {
        Some(b) => {
            let resid = verify_invariance(&tf, &b);
            let max = resid.iter().cloned().fold(0.0, f64::max);
            (Some(b), Some(max))
        }
        None => (None, None),
    };
    let reducible =
        verdicts.iter().any(|v| v.passes()) || commutant_basis.is_some();
    Ok(AnalysisReport {
        n: tf.n(),
        size: tf.size(),
        selfadjoint: tf.selfadjoint,
        shift: t.shift,
        transform_is_identity,
        seed: opts.seed,
        decomposition: d,
        verdicts,
        commutant_subspace: commutant_basis,
        commutant_residual: commutant_resid,
        reducible,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::make_tuple;
    use crate::scalar::Exact;

    fn em(rows: &[&[i64]]) -> CMat<Exact> {
        CMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Exact::from_ints(v, 0)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn fm(rows: &[&[f64]]) -> CMat<Complex64> {
        CMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hyperplane_form_detection() {
        // sigma of two equal rank-1 diagonal projections
        let p = fm(&[&[1., 0.], &[0., 0.]]);
        let spec = spectrum_poly_of(&[p.clone(), p]).unwrap();
        assert!(matches_hyperplane_power(&spec, 3, 1, 2));
        // distinct projections: (x1 - x3)(x2 - x3)
        let p1 = fm(&[&[1., 0.], &[0., 0.]]);
        let p2 = fm(&[&[0., 0.], &[0., 1.]]);
        let spec2 = spectrum_poly_of(&[p1, p2]).unwrap();
        assert!(!matches_hyperplane_power(&spec2, 3, 1, 2));
    }

    #[test]
    fn ex44_reported_reducible_with_verified_subspace() {
        // The pair of Example-type matrices with sigma = (x1+x2-x3)x3: both
        // share the kernel vector (1,-1), so the criterion finds it.
        let t = make_tuple(vec![em(&[&[1, 1], &[0, 0]]), em(&[&[0, 0], &[1, 1]])]).unwrap();
        let report = analyze(&t, &AnalyzeOptions::default()).unwrap();
        assert_eq!(report.decomposition.shape(), vec![(1, 1), (1, 1)]);
        // Exactly one subset passes: the one whose Q is the rank-1 projection
        // onto span{(1,-1)} (the common kernel).
        let passing: Vec<&Verdict> = report.verdicts.iter().filter(|v| v.passes()).collect();
        assert_eq!(passing.len(), 1);
        let basis = passing[0].subspace.as_ref().unwrap();
        assert_eq!(basis.ncols, 1);
        let dir = basis[(0, 0)] / basis[(1, 0)];
        assert!((dir + Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(passing[0].residual.unwrap() < 1e-9);
        assert!(report.reducible);
    }

    #[test]
    fn diagonal_commuting_pair_fully_reducible() {
        let t = make_tuple(vec![em(&[&[1, 0], &[0, 2]]), em(&[&[3, 0], &[0, 5]])]).unwrap();
        let report = analyze(&t, &AnalyzeOptions::default()).unwrap();
        assert!(report.selfadjoint);
        assert!(report.reducible);
        for v in &report.verdicts {
            assert_eq!(v.selfadjoint_check, Check::Pass, "{:?}", v.subset);
            assert_eq!(v.general_check_b, Check::Pass);
            assert!(v.constancy_probe.unwrap() < 1e-6);
        }
    }

    #[test]
    fn generic_dense_pair_irreducible() {
        let t = make_tuple(vec![
            em(&[&[2, 1, 0], &[0, 3, 1], &[1, 0, 5]]),
            em(&[&[1, 0, 2], &[3, 7, 1], &[0, 1, 4]]),
        ])
        .unwrap();
        let report = analyze(&t, &AnalyzeOptions::default()).unwrap();
        assert!(!report.reducible, "verdicts: {:?}", report.verdicts);
    }

    #[test]
    fn planted_block_triangular_found() {
        // Common invariant subspace span{e1, e2} by construction, then
        // conjugated.
        let b1 = em(&[&[1, 2, 5], &[0, 3, 1], &[0, 0, 8]]);
        let b2 = em(&[&[4, 1, 2], &[1, 6, 3], &[0, 0, 11]]);
        let g = em(&[&[1, 0, 1], &[1, 1, 0], &[0, 1, 1]]);
        let ginv = g.inverse(0.0).unwrap();
        let t = make_tuple(vec![g.mul(&b1).mul(&ginv), g.mul(&b2).mul(&ginv)]).unwrap();
        let report = analyze(&t, &AnalyzeOptions::default()).unwrap();
        assert!(report.reducible);
        let v = report.verdicts.iter().find(|v| v.passes()).unwrap();
        let basis = v.subspace.as_ref().unwrap();
        // planted subspace is g * span{e1,e2}
        let planted = g.mul(&em(&[&[1, 0], &[0, 1], &[0, 0]])).to_c64();
        let planted_on = numf::range_basis(&planted.to_dmatrix(), 1e-10);
        let angle = numf::max_principal_angle(&planted_on, &basis.to_dmatrix());
        assert!(angle < 1e-7, "angle {angle}");
    }

    #[test]
    fn constancy_probe_zero_for_equal_projections() {
        let p = em(&[&[1, 0], &[0, 0]]);
        let t = make_tuple(vec![p.clone(), p]).unwrap();
        let tf = t.to_c64();
        let d = decompose(&t, 0, 8).unwrap();
        let row0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let m = constancy_probe(&tf, &d, &[0], &row0, 1e-3, false).unwrap();
        assert!(m < 1e-8, "{m}");
    }

    #[test]
    fn commutant_finds_multiplicity_split() {
        // Block-diagonal doubled pair: spectrum is a single component squared,
        // subsets cannot split it, but the commutant can.
        let a1 = em(&[&[1, 2], &[3, 4]]);
        let a2 = em(&[&[0, 1], &[1, 2]]);
        let block = |m: &CMat<Exact>| {
            let mut out = CMat::<Exact>::zeros(4, 4);
            for i in 0..2 {
                for j in 0..2 {
                    out[(i, j)] = m[(i, j)].clone();
                    out[(i + 2, j + 2)] = m[(i, j)].clone();
                }
            }
            out
        };
        let t = make_tuple(vec![block(&a1), block(&a2)]).unwrap();
        let tf = t.to_c64();
        let sub = commutant_subspace(&tf, 1).unwrap();
        assert!(sub.is_some());
        let basis = sub.unwrap();
        let resid = verify_invariance(&tf, &basis);
        assert!(resid.iter().all(|&r| r < 1e-7));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(enumerate_subsets(2, true), vec![vec![0]]);
        assert_eq!(
            enumerate_subsets(2, false),
            vec![vec![0], vec![1]]
        );
        assert_eq!(enumerate_subsets(3, false).len(), 6);
        assert_eq!(enumerate_subsets(3, true).len(), 3);
    }
}

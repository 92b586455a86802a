//! Fixture and report files: the versioned tuple JSON format, the analysis
//! report mirror, and the planted-instance generator used by tests and the
//! `plant` subcommand.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{AnalysisReport, Check, Verdict};
use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::numf;
use crate::pencil::{make_tuple, MatrixTuple};
use crate::poly::MultiPoly;
use crate::scalar::{Coeff, Exact};

pub const TUPLE_FORMAT_VERSION: &str = "v1";

/// One matrix entry on disk: a rational string in exact mode, an `[re, im]`
/// pair in float mode.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum EntryRepr {
    Exact(String),
    Float([f64; 2]),
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TupleFile {
    pub version: String,
    pub mode: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selfadjoint: Option<bool>,
    pub matrices: Vec<Vec<Vec<EntryRepr>>>,
}

/// A parsed tuple in whichever scalar domain the file declared.
#[derive(Clone, Debug)]
pub enum LoadedTuple {
    Exact(MatrixTuple<Exact>),
    Float(MatrixTuple<Complex64>),
}

impl LoadedTuple {
    pub fn to_float(&self) -> MatrixTuple<Complex64> {
        match self {
            LoadedTuple::Exact(t) => t.to_c64(),
            LoadedTuple::Float(t) => t.clone(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            LoadedTuple::Exact(t) => t.n(),
            LoadedTuple::Float(t) => t.n(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LoadedTuple::Exact(t) => t.size(),
            LoadedTuple::Float(t) => t.size(),
        }
    }
}

fn matrices_from_file<C: Coeff>(
    file: &TupleFile,
    entry: impl Fn(&EntryRepr, usize, usize, usize) -> Result<C>,
) -> Result<Vec<CMat<C>>> {
    let mut out = Vec::with_capacity(file.matrices.len());
    for (mi, rows) in file.matrices.iter().enumerate() {
        if rows.len() != file.size {
            return Err(Error::InvalidInput(format!(
                "matrix {} has {} rows, expected {}",
                mi + 1,
                rows.len(),
                file.size
            )));
        }
        let mut parsed = Vec::with_capacity(rows.len());
        for (ri, row) in rows.iter().enumerate() {
            if row.len() != file.size {
                return Err(Error::InvalidInput(format!(
                    "matrix {} row {} has {} entries, expected {}",
                    mi + 1,
                    ri + 1,
                    row.len(),
                    file.size
                )));
            }
            let mut prow = Vec::with_capacity(row.len());
            for (ci, e) in row.iter().enumerate() {
                prow.push(entry(e, mi, ri, ci)?);
            }
            parsed.push(prow);
        }
        out.push(CMat::from_rows(parsed)?);
    }
    Ok(out)
}

pub fn tuple_from_file(file: &TupleFile) -> Result<LoadedTuple> {
    if file.version != TUPLE_FORMAT_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported tuple file version {:?}",
            file.version
        )));
    }
    if file.matrices.len() != file.n {
        return Err(Error::InvalidInput(format!(
            "file declares n={} but holds {} matrices",
            file.n,
            file.matrices.len()
        )));
    }
    let ctx = |e: &EntryRepr, mi: usize, ri: usize, ci: usize, want: &str| {
        Error::InvalidInput(format!(
            "matrix {} entry ({},{}): expected {} entry, got {:?}",
            mi + 1,
            ri + 1,
            ci + 1,
            want,
            e
        ))
    };
    let loaded = match file.mode.as_str() {
        "exact" => {
            let mats = matrices_from_file(file, |e, mi, ri, ci| match e {
                EntryRepr::Exact(s) => Exact::parse(s).map_err(|err| {
                    Error::InvalidInput(format!(
                        "matrix {} entry ({},{}): {}",
                        mi + 1,
                        ri + 1,
                        ci + 1,
                        err
                    ))
                }),
                other => Err(ctx(other, mi, ri, ci, "rational string")),
            })?;
            LoadedTuple::Exact(make_tuple(mats)?)
        }
        "float" => {
            let mats = matrices_from_file(file, |e, mi, ri, ci| match e {
                EntryRepr::Float([re, im]) => Ok(Complex64::new(*re, *im)),
                other => Err(ctx(other, mi, ri, ci, "[re, im]")),
            })?;
            LoadedTuple::Float(make_tuple(mats)?)
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown entries mode {:?} (expected \"exact\" or \"float\")",
                other
            )))
        }
    };
    if let Some(flag) = file.selfadjoint {
        let actual = match &loaded {
            LoadedTuple::Exact(t) => t.selfadjoint,
            LoadedTuple::Float(t) => t.selfadjoint,
        };
        if flag && !actual {
            return Err(Error::InvalidInput(
                "file claims selfadjoint but a matrix is not Hermitian".into(),
            ));
        }
    }
    Ok(loaded)
}

pub fn parse_tuple(path: &Path) -> Result<LoadedTuple> {
    let text = std::fs::read_to_string(path)?;
    let file: TupleFile = serde_json::from_str(&text)?;
    tuple_from_file(&file)
}

/// Undo the diagonal preprocessing shift so files hold the matrices as the
/// user supplied them; parsing recomputes the same shift deterministically.
fn unshifted<C: Coeff>(t: &MatrixTuple<C>) -> Vec<CMat<C>> {
    let offset = CMat::identity(t.size()).scale(&C::from_int(t.shift));
    t.matrices.iter().map(|m| m.sub(&offset)).collect()
}

pub fn emit_exact_tuple(t: &MatrixTuple<Exact>) -> TupleFile {
    TupleFile {
        version: TUPLE_FORMAT_VERSION.into(),
        mode: "exact".into(),
        n: t.n(),
        size: t.size(),
        selfadjoint: Some(t.selfadjoint),
        matrices: unshifted(t)
            .iter()
            .map(|m| {
                (0..m.nrows)
                    .map(|i| {
                        (0..m.ncols)
                            .map(|j| EntryRepr::Exact(m[(i, j)].to_string()))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn emit_float_tuple(t: &MatrixTuple<Complex64>) -> TupleFile {
    TupleFile {
        version: TUPLE_FORMAT_VERSION.into(),
        mode: "float".into(),
        n: t.n(),
        size: t.size(),
        selfadjoint: Some(t.selfadjoint),
        matrices: unshifted(t)
            .iter()
            .map(|m| {
                (0..m.nrows)
                    .map(|i| {
                        (0..m.ncols)
                            .map(|j| EntryRepr::Float([m[(i, j)].re, m[(i, j)].im]))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Report files

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ReportFile {
    pub version: String,
    pub tool_version: String,
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub selfadjoint: bool,
    pub shift: i64,
    pub transform_is_identity: bool,
    pub tolerances: ToleranceRecord,
    pub component_shape: Vec<[usize; 2]>,
    pub verdicts: Vec<VerdictRecord>,
    pub commutant_subspace: Option<Vec<Vec<[f64; 2]>>>,
    pub commutant_residual: Option<f64>,
    pub reducible: bool,
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ToleranceRecord {
    pub cluster_factor: f64,
    pub tol_eq: Option<f64>,
    pub tol_const: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerdictRecord {
    pub subset: Vec<usize>,
    pub selfadjoint_check: String,
    pub general_check_b: String,
    pub general_check_c: String,
    pub permutation_sufficient: String,
    pub constancy_probe: Option<f64>,
    pub rank: usize,
    pub invariant: bool,
    pub basis: Option<Vec<Vec<[f64; 2]>>>,
    pub residual: Option<f64>,
    pub notes: Vec<String>,
}

fn check_str(c: Check) -> String {
    match c {
        Check::Pass => "pass",
        Check::Fail => "fail",
        Check::Skipped => "skipped",
    }
    .into()
}

fn matrix_cols(m: &CMat<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.ncols)
        .map(|j| (0..m.nrows).map(|i| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn verdict_record(v: &Verdict) -> VerdictRecord {
    VerdictRecord {
        subset: v.subset.iter().map(|s| s + 1).collect(),
        selfadjoint_check: check_str(v.selfadjoint_check),
        general_check_b: check_str(v.general_check_b),
        general_check_c: check_str(v.general_check_c),
        permutation_sufficient: check_str(v.permutation_sufficient),
        constancy_probe: v.constancy_probe,
        rank: v.rank,
        invariant: v.passes(),
        basis: v.subspace.as_ref().map(matrix_cols),
        residual: v.residual,
        notes: v.notes.clone(),
    }
}

pub fn report_file(
    report: &AnalysisReport,
    tolerances: ToleranceRecord,
    elapsed_ms: u128,
) -> ReportFile {
    ReportFile {
        version: TUPLE_FORMAT_VERSION.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed: report.seed,
        n: report.n,
        size: report.size,
        selfadjoint: report.selfadjoint,
        shift: report.shift,
        transform_is_identity: report.transform_is_identity,
        tolerances,
        component_shape: report
            .decomposition
            .shape()
            .into_iter()
            .map(|(l, m)| [l, m])
            .collect(),
        verdicts: report.verdicts.iter().map(verdict_record).collect(),
        commutant_subspace: report.commutant_subspace.as_ref().map(matrix_cols),
        commutant_residual: report.commutant_residual,
        reducible: report.reducible,
        notes: report.notes.clone(),
        elapsed_ms,
    }
}

/// Serializes a float polynomial as `{ "e1,e2,...": [re, im] }`.
pub fn poly_to_json(p: &MultiPoly<Complex64>) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (e, c) in &p.terms {
        let key = e
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        map.insert(key, serde_json::json!([c.re, c.im]));
    }
    serde_json::Value::Object(map)
}

/// CSV of real slice curves for `n = 2`: grid samples `(x1, x2)` where
/// `det(x1 A1 + x2 A2 - I)` changes sign between neighbors.
pub fn slice_csv(t: &MatrixTuple<Complex64>, half_width: f64, steps: usize) -> Result<String> {
    if t.n() != 2 {
        return Err(Error::InvalidInput(
            "slice output requires a pair (n = 2)".into(),
        ));
    }
    let mut vals = vec![vec![0.0f64; steps]; steps];
    let h = 2.0 * half_width / (steps - 1) as f64;
    for (i, row) in vals.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let x1 = -half_width + i as f64 * h;
            let x2 = -half_width + j as f64 * h;
            let m = t.matrices[0]
                .scale(&Complex64::new(x1, 0.0))
                .add(&t.matrices[1].scale(&Complex64::new(x2, 0.0)))
                .sub(&CMat::identity(t.size()));
            *v = m.det()?.re;
        }
    }
    let mut out = String::from("x1,x2\n");
    for i in 0..steps {
        for j in 0..steps {
            let here = vals[i][j];
            let right = if i + 1 < steps { vals[i + 1][j] } else { here };
            let up = if j + 1 < steps { vals[i][j + 1] } else { here };
            if here == 0.0 || here * right < 0.0 || here * up < 0.0 {
                let x1 = -half_width + i as f64 * h;
                let x2 = -half_width + j as f64 * h;
                writeln!(out, "{x1},{x2}").unwrap();
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Planted instances

#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub tuple: MatrixTuple<Complex64>,
    /// Orthonormal basis of the planted invariant subspace, as columns.
    pub basis: CMat<Complex64>,
    pub selfadjoint: bool,
}

/// Random invertible `size x size` matrix with 2-norm condition number at
/// most `conditioning`, built from its SVD.
fn conditioned_matrix(size: usize, conditioning: f64, rng: &mut ChaCha8Rng) -> numf::CDMat {
    let raw = numf::CDMat::from_fn(size, size, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let svd = raw.svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    // Replace singular values by a spread of exactly `conditioning`.
    let mut s = numf::CDMat::zeros(size, size);
    for i in 0..size {
        let f = if size == 1 {
            1.0
        } else {
            i as f64 / (size - 1) as f64
        };
        s[(i, i)] = Complex64::new(conditioning.powf(-f) * conditioning.sqrt(), 0.0);
    }
    u * s * vt
}

fn random_unitary(size: usize, rng: &mut ChaCha8Rng) -> numf::CDMat {
    let raw = numf::CDMat::from_fn(size, size, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let svd = raw.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Draws a tuple with a planted `d`-dimensional common invariant subspace:
/// block upper-triangular matrices (block-diagonal Hermitian ones in the
/// self-adjoint variant) with separated block spectra, conjugated by a single
/// conditioned matrix (unitary in the self-adjoint variant).
pub fn plant_instance(
    size: usize,
    n: usize,
    d: usize,
    seed: u64,
    conditioning: f64,
    selfadjoint: bool,
) -> Result<PlantedInstance> {
    if d == 0 || d >= size {
        return Err(Error::InvalidInput(format!(
            "planted dimension must satisfy 0 < d < N, got d={d}, N={size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut mats = Vec::with_capacity(n);
    for mi in 0..n {
        let mut m = CMat::<Complex64>::zeros(size, size);
        let fill = |i: usize, j: usize, rng: &mut ChaCha8Rng| {
            Complex64::new(rng.gen_range(-1.0..1.0), {
                if selfadjoint && i == j {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
        };
        for i in 0..size {
            for j in 0..size {
                let same_block = (i < d) == (j < d);
                let upper = i < d && j >= d;
                if same_block && (!selfadjoint || j >= i) {
                    m[(i, j)] = fill(i, j, &mut rng);
                } else if upper && !selfadjoint {
                    m[(i, j)] = fill(i, j, &mut rng);
                }
            }
        }
        if selfadjoint {
            for i in 0..size {
                for j in 0..i {
                    m[(i, j)] = m[(j, i)].conj();
                }
            }
        }
        // Separate the block spectra by an integer shift so the planted
        // split survives clustering.
        let offset = Complex64::new(3.0 + 2.0 * mi as f64, 0.0);
        for i in 0..d {
            m[(i, i)] += offset;
        }
        for i in d..size {
            m[(i, i)] -= offset;
        }
        mats.push(m);
    }
    let g = if selfadjoint {
        random_unitary(size, &mut rng)
    } else {
        conditioned_matrix(size, conditioning, &mut rng)
    };
    let ginv = g.clone().try_inverse().ok_or(Error::SingularTransform)?;
    let conjugated: Vec<CMat<Complex64>> = mats
        .iter()
        .map(|m| CMat::from_dmatrix(&(&g * m.to_dmatrix() * &ginv)))
        .collect();
    // Planted subspace is g * span{e_1..e_d}, orthonormalized.
    let first = numf::CDMat::from_fn(size, d, |i, j| g[(i, j)]);
    let basis = numf::range_basis(&first, 1e-12);
    Ok(PlantedInstance {
        tuple: make_tuple(conjugated)?,
        basis: CMat::from_dmatrix(&basis),
        selfadjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria;

    #[test]
    fn exact_round_trip() {
        let a1 = CMat::from_rows(vec![
            vec![Exact::from_ints(1, 0), Exact::from_ratio(1, 2)],
            vec![Exact::from_ints(0, -3), Exact::from_ratio(-2, 7)],
        ])
        .unwrap();
        let a2 = CMat::from_rows(vec![
            vec![Exact::from_ints(0, 0), Exact::from_ints(2, 1)],
            vec![Exact::from_ints(5, 0), Exact::from_ints(1, 1)],
        ])
        .unwrap();
        let t = make_tuple(vec![a1, a2]).unwrap();
        let file = emit_exact_tuple(&t);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: TupleFile = serde_json::from_str(&text).unwrap();
        match tuple_from_file(&back).unwrap() {
            LoadedTuple::Exact(t2) => {
                assert_eq!(t.matrices.len(), t2.matrices.len());
                for (m1, m2) in t.matrices.iter().zip(&t2.matrices) {
                    for i in 0..2 {
                        for j in 0..2 {
                            assert_eq!(m1[(i, j)], m2[(i, j)]);
                        }
                    }
                }
            }
            _ => panic!("expected exact tuple"),
        }
    }

    #[test]
    fn float_round_trip_and_mode_check() {
        let a = CMat::from_rows(vec![
            vec![Complex64::new(1.25, 0.0), Complex64::new(0.5, -0.125)],
            vec![Complex64::new(0.0, 2.0), Complex64::new(-3.0, 0.0)],
        ])
        .unwrap();
        let t = make_tuple(vec![a]).unwrap();
        let file = emit_float_tuple(&t);
        let text = serde_json::to_string(&file).unwrap();
        let back: TupleFile = serde_json::from_str(&text).unwrap();
        match tuple_from_file(&back).unwrap() {
            LoadedTuple::Float(t2) => {
                assert_eq!(t.matrices[0][(0, 1)], t2.matrices[0][(0, 1)]);
            }
            _ => panic!("expected float tuple"),
        }
    }

    #[test]
    fn ragged_matrix_names_offender() {
        let text = r#"{
            "version": "v1", "mode": "float", "n": 1, "N": 2,
            "matrices": [[[[1.0,0.0],[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]
        }"#;
        let file: TupleFile = serde_json::from_str(text).unwrap();
        let err = tuple_from_file(&file).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("matrix 1 row 1"), "{msg}");
    }

    #[test]
    fn bad_rational_names_entry() {
        let text = r#"{
            "version": "v1", "mode": "exact", "n": 1, "N": 1,
            "matrices": [[["1//2"]]]
        }"#;
        let file: TupleFile = serde_json::from_str(text).unwrap();
        let err = tuple_from_file(&file).unwrap_err();
        assert!(err.to_string().contains("(1,1)"), "{err}");
    }

    #[test]
    fn planted_instance_analyzed_reducible() {
        let inst = plant_instance(4, 2, 2, 7, 10.0, false).unwrap();
        let resid = criteria::verify_invariance(&inst.tuple, &inst.basis);
        assert!(resid.iter().all(|&r| r < 1e-9 * 10.0), "{resid:?}");
        let report = criteria::analyze(&inst.tuple, &Default::default()).unwrap();
        assert!(report.reducible);
        let v = report.verdicts.iter().find(|v| v.passes()).unwrap();
        let angle = numf::max_principal_angle(
            &inst.basis.to_dmatrix(),
            &v.subspace.as_ref().unwrap().to_dmatrix(),
        );
        assert!(angle < 1e-6, "angle {angle}");
    }

    #[test]
    fn planted_selfadjoint_is_hermitian() {
        let inst = plant_instance(4, 2, 1, 3, 10.0, true).unwrap();
        assert!(inst.tuple.selfadjoint);
        let resid = criteria::verify_invariance(&inst.tuple, &inst.basis);
        assert!(resid.iter().all(|&r| r < 1e-10), "{resid:?}");
    }

    #[test]
    fn codimension_one_plant() {
        let inst = plant_instance(3, 2, 2, 11, 10.0, false).unwrap();
        assert_eq!(inst.basis.ncols, 2);
        let resid = criteria::verify_invariance(&inst.tuple, &inst.basis);
        assert!(resid.iter().all(|&r| r < 1e-8));
    }
}

//! Property-based invariants: transform covariance of the spectrum
//! polynomial, root multiplicity accounting, homogeneity, Riesz-sum and
//! complementarity of projections, fixture round-trips, and certificate
//! agreement for the self-adjoint criterion.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jspec::criteria;
use jspec::decomposition::decompose;
use jspec::io;
use jspec::matrix::CMat;
use jspec::numf;
use jspec::pencil::{
    apply_transform, make_tuple, spectrum_polynomial, MatrixTuple, TransformMatrix,
};
use jspec::poly::{uni_roots, UniPoly};
use jspec::projections::{build_projection, riesz_projection};
use jspec::scalar::{Coeff, Exact};

fn exact_mat(entries: &[Vec<(i64, i64)>]) -> CMat<Exact> {
    CMat::from_rows(
        entries
            .iter()
            .map(|r| r.iter().map(|&(a, b)| Exact::from_ints(a, b)).collect())
            .collect(),
    )
    .unwrap()
}

fn small_exact_tuple() -> impl Strategy<Value = Vec<Vec<Vec<(i64, i64)>>>> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(n, size)| {
        proptest::collection::vec(
            proptest::collection::vec(
                proptest::collection::vec((-4i64..=4, -2i64..=2), size),
                size,
            ),
            n,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_is_homogeneous_degree_n(mats in small_exact_tuple()) {
        let tuple: Vec<CMat<Exact>> = mats.iter().map(|m| exact_mat(m)).collect();
        let size = tuple[0].nrows;
        if let Ok(t) = make_tuple(tuple) {
            let p = spectrum_polynomial(&t).unwrap();
            prop_assert!(p.is_homogeneous());
            prop_assert_eq!(p.total_degree(), size as u32);
        }
    }

    #[test]
    fn transform_covariance(mats in small_exact_tuple(), cseed in 0u64..1000) {
        let tuple: Vec<CMat<Exact>> = mats.iter().map(|m| exact_mat(m)).collect();
        let n = tuple.len();
        let Ok(t) = make_tuple(tuple) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(cseed);
        let c = CMat::from_rows(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            Exact::from_ints(
                                rng.gen_range(-3..=3) + i64::from(i == j),
                                0,
                            )
                        })
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        if c.det().unwrap().is_zero() {
            return Ok(());
        }
        let tc = apply_transform(&t, &TransformMatrix { c: c.clone() }).unwrap();
        let p = spectrum_polynomial(&t).unwrap();
        let pc = spectrum_polynomial(&tc).unwrap();
        // Compare pc(x) with p(x C, x_{n+1}) at random rational points; exact
        // arithmetic makes agreement at many points a polynomial identity
        // check in practice.
        for _ in 0..8 {
            let x: Vec<Exact> = (0..=n)
                .map(|_| Exact::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect();
            let mut y: Vec<Exact> = (0..n)
                .map(|s| {
                    (0..n)
                        .map(|j| x[j].clone() * c[(j, s)].clone())
                        .fold(Exact::zero(), |a, b| a + b)
                })
                .collect();
            y.push(x[n].clone());
            prop_assert_eq!(pc.eval(&x).unwrap(), p.eval(&y).unwrap());
        }
    }

    #[test]
    fn root_multiplicities_sum_to_degree(
        roots in proptest::collection::vec((-5i64..=5, -2i64..=2), 1..5),
        mults in proptest::collection::vec(1usize..=3, 1..5),
    ) {
        let pairs: Vec<((i64, i64), usize)> = roots
            .iter()
            .cloned()
            .zip(mults.iter().cloned())
            .collect();
        let mut p = UniPoly::linear(Exact::from_ints(pairs[0].0 .0, pairs[0].0 .1));
        let mut first = true;
        let mut degree = 0usize;
        for (r, m) in &pairs {
            let lin = UniPoly::linear(Exact::from_ints(r.0, r.1));
            for _ in 0..*m {
                if first {
                    first = false;
                } else {
                    p = p.mul(&lin);
                }
                degree += 1;
            }
        }
        let found = uni_roots(&p, 1e-9).unwrap();
        prop_assert_eq!(found.iter().map(|&(_, m)| m).sum::<usize>(), degree);
    }

    #[test]
    fn tuple_file_round_trip(mats in small_exact_tuple()) {
        let tuple: Vec<CMat<Exact>> = mats.iter().map(|m| exact_mat(m)).collect();
        let Ok(t) = make_tuple(tuple) else { return Ok(()) };
        let text = serde_json::to_string(&io::emit_exact_tuple(&t)).unwrap();
        let back: io::TupleFile = serde_json::from_str(&text).unwrap();
        match io::tuple_from_file(&back).unwrap() {
            io::LoadedTuple::Exact(t2) => {
                prop_assert_eq!(t.shift, t2.shift);
                for (a, b) in t.matrices.iter().zip(&t2.matrices) {
                    for i in 0..a.nrows {
                        for j in 0..a.ncols {
                            prop_assert_eq!(&a[(i, j)], &b[(i, j)]);
                        }
                    }
                }
            }
            _ => prop_assert!(false, "mode changed in round trip"),
        }
    }
}

/// Conjugated direct sum with at least two separated blocks, so the spectrum
/// decomposes and nontrivial subsets exist.
fn split_tuple(seed: u64, selfadjoint: bool) -> MatrixTuple<Complex64> {
    let d = 1 + (seed as usize % 2);
    let size = d + 2;
    io::plant_instance(size, 2, d, seed, if selfadjoint { 1.0 } else { 4.0 }, selfadjoint)
        .unwrap()
        .tuple
}

#[test]
fn projection_complementarity_and_riesz_sum() {
    for seed in 0..12u64 {
        let t = split_tuple(seed, seed % 2 == 0);
        let d = decompose(&t, seed, 24).unwrap();
        let k = d.k();
        if k < 2 {
            continue;
        }
        let all: Vec<usize> = (0..k).collect();
        for j in 0..t.n() {
            // complementarity of the functional-calculus projections
            let s: Vec<usize> = vec![0];
            let sc: Vec<usize> = (1..k).collect();
            let p1 = build_projection(&t, &d, j, &s, true).unwrap();
            let p2 = build_projection(&t, &d, j, &sc, true).unwrap();
            let sum = p1.add(&p2);
            let dev = sum.sub(&CMat::identity(t.size())).frob_norm();
            assert!(dev < 1e-7 * (1.0 + t.norm_scale()), "seed {seed} j {j}: {dev}");
            // full-subset projection is the identity
            let pall = build_projection(&t, &d, j, &all, true).unwrap();
            let dev = pall.sub(&CMat::identity(t.size())).frob_norm();
            assert!(dev < 1e-7 * (1.0 + t.norm_scale()), "seed {seed} j {j}: {dev}");
        }
    }
}

#[test]
fn riesz_projections_sum_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let size = rng.gen_range(2..=5);
        let mats: Vec<CMat<Complex64>> = (0..2)
            .map(|_| {
                let rows = (0..size)
                    .map(|_| {
                        (0..size)
                            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                            .collect()
                    })
                    .collect();
                CMat::from_rows(rows).unwrap()
            })
            .collect();
        let t = make_tuple(mats).unwrap();
        for j in 0..t.n() {
            let eigs = numf::eigenvalues_dm(&t.matrices[j].to_dmatrix()).unwrap();
            let clusters = numf::cluster(&eigs, 1e-6);
            let mut sum = CMat::<Complex64>::zeros(size, size);
            for (center, mult) in &clusters {
                let group = vec![*center; *mult];
                sum = sum.add(&riesz_projection(&t, j, &group, 64).unwrap());
            }
            let dev = sum.sub(&CMat::identity(size)).frob_norm();
            assert!(dev < 1e-7, "riesz sum deviates by {dev}");
        }
    }
}

#[test]
fn selfadjoint_certificates_agree() {
    // check_selfadjoint errors out if its two certificates (joint-spectrum
    // form vs pairwise equality of projections) ever disagree; sweep planted
    // and plain block tuples looking for such a disagreement.
    for seed in 0..15u64 {
        let t = split_tuple(seed, true);
        let d = decompose(&t, seed, 24).unwrap();
        let opts = criteria::AnalyzeOptions::default();
        for subset in criteria::enumerate_subsets(d.k(), true) {
            match criteria::check_selfadjoint(&t, &d, &subset, &opts) {
                Ok(_) => {}
                Err(e) => panic!("seed {seed} subset {subset:?}: {e}"),
            }
        }
    }
}

#[test]
fn analyze_invariant_under_invertible_transform() {
    // The reducibility verdict and the found subspace survive a change of
    // tuple basis A_j -> sum_s c_js A_s.
    for seed in [3u64, 8, 21] {
        let inst = io::plant_instance(4, 2, 2, seed, 5.0, false).unwrap();
        let report = criteria::analyze(&inst.tuple, &Default::default()).unwrap();
        let c = exact_to_c64(&CMat::from_rows(vec![
            vec![Exact::from_ints(1, 0), Exact::from_ratio(1, 3)],
            vec![Exact::from_ints(-1, 0), Exact::from_ints(2, 0)],
        ])
        .unwrap());
        let tc = apply_transform(&inst.tuple, &TransformMatrix { c }).unwrap();
        let report_c = criteria::analyze(&tc, &Default::default()).unwrap();
        assert_eq!(report.reducible, report_c.reducible, "seed {seed}");
        let b1 = report.verdicts.iter().find_map(|v| v.subspace.as_ref()).unwrap();
        let b2 = report_c
            .verdicts
            .iter()
            .find_map(|v| v.subspace.as_ref())
            .unwrap();
        let angle = numf::max_principal_angle(&b1.to_dmatrix(), &b2.to_dmatrix());
        assert!(angle < 1e-6, "seed {seed}: subspaces differ by angle {angle}");
    }
}

fn exact_to_c64(m: &CMat<Exact>) -> CMat<Complex64> {
    m.to_c64()
}

//! Numerical irreducible decomposition of the determinantal hypersurface.
//!
//! Eigenvalue branches of `B(c) = c_1 A_1 + ... + c_n A_n` are tracked along
//! closed loops in direction space; the permutations they induce are merged
//! with a union-find, and each orbit becomes one irreducible component with
//! degree `l_s` (orbit size) and multiplicity `m_s` (shared branch
//! multiplicity). Open paths to the coordinate directions `e_j` transport the
//! grouping and fill in the intersection data `t_{j,s,r}`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::numf;
use crate::pencil::{delta_cluster, MatrixTuple};
use crate::scalar::Coeff;

/// One irreducible component of the hypersurface.
#[derive(Clone, Debug)]
pub struct Component {
    /// Degree `l_s`.
    pub degree: usize,
    /// Multiplicity `m_s` of the factor in the determinant.
    pub multiplicity: usize,
    /// `intersections[j]` lists the coordinate-line parameters `t_{j,s,r}`,
    /// `r = 1..l_s`; each `1/t` is an eigenvalue of `A_{j+1}`.
    pub intersections: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
    pub base_direction: Vec<Complex64>,
    /// Distinct eigenvalues of `B(base_direction)` with multiplicities.
    pub base_branches: Vec<(Complex64, usize)>,
    /// `assignment[b]` = index into `components` for base branch `b`.
    pub assignment: Vec<usize>,
    /// One line per monodromy loop: permutation found and merges performed.
    pub loop_log: Vec<String>,
}

impl ComponentDecomposition {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Multiset of (degree, multiplicity) pairs, sorted.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self
            .components
            .iter()
            .map(|c| (c.degree, c.multiplicity))
            .collect();
        v.sort_unstable();
        v
    }
}

/// Eigenvalues of `B(c)` clustered into branches with multiplicities.
pub fn branches_at(
    t: &MatrixTuple<Complex64>,
    c: &[Complex64],
) -> Result<Vec<(Complex64, usize)>> {
    let b = t.combine(c)?;
    let eigs = numf::eigenvalues_dm(&b.to_dmatrix())?;
    Ok(numf::cluster(&eigs, branch_delta(t, c)))
}

fn branch_delta(t: &MatrixTuple<Complex64>, c: &[Complex64]) -> f64 {
    let cscale = c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    delta_cluster(t.norm_scale() * cscale)
}

fn min_gap(points: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            gap = gap.min((points[i] - points[j]).norm());
        }
    }
    gap
}

/// Tracks the branches along the path `theta -> dir(theta)`, `theta` from 0
/// to 1, starting from `start` (points with multiplicities). Steps are halved
/// whenever branches threaten to collide or the cluster count drops. Returns
/// the transported points in start order.
fn track_path<F>(
    t: &MatrixTuple<Complex64>,
    dir: F,
    start: &[(Complex64, usize)],
    initial_steps: usize,
) -> Result<Vec<(Complex64, usize)>>
where
    F: Fn(f64) -> Vec<Complex64>,
{
    let kk = start.len();
    let mut points: Vec<Complex64> = start.iter().map(|&(p, _)| p).collect();
    let mults: Vec<usize> = start.iter().map(|&(_, m)| m).collect();
    let mut theta = 0.0f64;
    let mut h = 1.0 / initial_steps as f64;
    // Near a branch point just off the path, eigenvalue velocity scales like
    // the inverse square root of the distance; a deep floor lets the tracker
    // creep through such regions while still bounding the cost.
    let h_min = 1.0 / (initial_steps as f64 * 8192.0);
    let mut segment = 0usize;
    while theta < 1.0 - 1e-12 {
        let next = (theta + h).min(1.0);
        let clusters = branches_at(t, &dir(next))?;
        let ok = clusters.len() == kk && {
            let q: Vec<Complex64> = clusters.iter().map(|&(p, _)| p).collect();
            match numf::optimal_assignment(&points, &q) {
                Ok((perm, maxd)) => {
                    let gap = min_gap(&q);
                    let mult_ok = (0..kk).all(|i| clusters[perm[i]].1 == mults[i]);
                    if mult_ok && (kk < 2 || maxd < 0.45 * gap) {
                        for i in 0..kk {
                            points[i] = q[perm[i]];
                        }
                        true
                    } else {
                        false
                    }
                }
                Err(_) => false,
            }
        };
        if ok {
            theta = next;
            h = (h * 1.5).min(1.0 / initial_steps as f64);
            segment += 1;
        } else {
            h /= 2.0;
            if h < h_min {
                // Branches may legitimately coincide at the endpoint itself
                // (the hypersurface meets the target line at a multiple
                // point). Once the tracker has crept close enough, finish by
                // assigning each branch to its nearest endpoint cluster.
                if theta > 0.95 {
                    if let Ok(clusters) = branches_at(t, &dir(1.0)) {
                        if let Some(end) = terminal_assignment(&clusters, &points, &mults) {
                            return Ok(end);
                        }
                    }
                }
                return Err(Error::PathCollision {
                    segment,
                    gap: min_gap(&points),
                });
            }
        }
    }
    Ok(points.into_iter().zip(mults).collect())
}

/// Maps each tracked point to its nearest endpoint cluster. Several branches
/// may share one cluster, but every point must be markedly closer to its own
/// cluster than to any other, and each cluster's eigenvalue count must equal
/// the total multiplicity of the branches assigned to it.
fn terminal_assignment(
    clusters: &[(Complex64, usize)],
    points: &[Complex64],
    mults: &[usize],
) -> Option<Vec<(Complex64, usize)>> {
    let kk = points.len();
    let mut received = vec![0usize; clusters.len()];
    let mut nearest = vec![0usize; kk];
    for i in 0..kk {
        let (ci, di) = clusters
            .iter()
            .enumerate()
            .map(|(c, &(p, _))| (c, (p - points[i]).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        let second = clusters
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != ci)
            .map(|(_, &(p, _))| (p - points[i]).norm())
            .fold(f64::INFINITY, f64::min);
        if di > 0.45 * second {
            return None;
        }
        nearest[i] = ci;
        received[ci] += mults[i];
    }
    for (c, &(_, m)) in clusters.iter().enumerate() {
        if received[c] != m {
            return None;
        }
    }
    Some((0..kk).map(|i| (clusters[nearest[i]].0, mults[i])).collect())
}

/// Runs a closed loop based at `c0` inside the complex line `c0 + lambda d`:
/// straight out to a circle around `center`, once around, and straight back.
/// Returns the permutation of base branches it induces.
fn loop_permutation(
    t: &MatrixTuple<Complex64>,
    base: &[(Complex64, usize)],
    c0: &[Complex64],
    d: &[Complex64],
    center: Complex64,
    radius: f64,
) -> Result<Vec<usize>> {
    let at = move |lambda: Complex64, c0: &[Complex64], d: &[Complex64]| -> Vec<Complex64> {
        c0.iter().zip(d).map(|(&c, &dd)| c + lambda * dd).collect()
    };
    // Closest point of the circle to lambda = 0 (generic center, not at 0).
    let dir0 = if center.norm() > 1e-12 {
        -center / center.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let p = center + dir0 * radius;
    let phase0 = (p - center).arg();
    let dir = |theta: f64| -> Vec<Complex64> {
        let lambda = if theta < 0.25 {
            p * (theta / 0.25)
        } else if theta < 0.75 {
            let ang = phase0 + 2.0 * std::f64::consts::PI * ((theta - 0.25) / 0.5);
            center + Complex64::from_polar(radius, ang)
        } else {
            p * ((1.0 - theta) / 0.25)
        };
        at(lambda, c0, d)
    };
    let end = track_path(t, dir, base, 96)?;
    let base_pts: Vec<Complex64> = base.iter().map(|&(p, _)| p).collect();
    let end_pts: Vec<Complex64> = end.iter().map(|&(p, _)| p).collect();
    // end_pts is a permutation of base_pts: branch i arrived at end_pts[i],
    // which coincides with base point perm[i].
    let (perm, maxd) = numf::optimal_assignment(&end_pts, &base_pts)?;
    let gap = min_gap(&base_pts);
    if base.len() >= 2 && maxd > 0.45 * gap {
        return Err(Error::PathCollision { segment: 0, gap });
    }
    Ok(perm)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Decomposes the hypersurface of an (assumed admissible) tuple into
/// irreducible components by monodromy grouping.
pub fn decompose<C: Coeff>(
    t: &MatrixTuple<C>,
    seed: u64,
    loop_budget: usize,
) -> Result<ComponentDecomposition> {
    let tf = t.to_c64();
    let n = tf.n();
    let nn = tf.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Generic base direction, biased away from the axes.
    let c0: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(0.4..1.2), rng.gen_range(0.2..0.9)))
        .collect();
    let base = branches_at(&tf, &c0)?;
    let profile = |bs: &[(Complex64, usize)]| {
        let mut p: Vec<usize> = bs.iter().map(|&(_, m)| m).collect();
        p.sort_unstable();
        p
    };
    let base_profile = profile(&base);
    for _ in 0..3 {
        let c = random_direction(&mut rng, n);
        let p = profile(&branches_at(&tf, &c)?);
        if p != base_profile {
            return Err(Error::MultiplicityProfile(format!(
                "{:?} at the base direction vs {:?} elsewhere",
                base_profile, p
            )));
        }
    }

    let kk = base.len();
    let mut uf = UnionFind::new(kk);
    let mut loop_log = Vec::new();
    let mut quiet = 0usize;
    let c0_norm = c0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let base_gap = min_gap(&base.iter().map(|&(p, _)| p).collect::<Vec<_>>());
    for loop_idx in 0..loop_budget {
        if quiet >= 5 || kk == 1 {
            break;
        }
        let scale = rng.gen_range(0.2..1.5) * c0_norm;
        let mut d = random_direction(&mut rng, n);
        let dn = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-9);
        for z in &mut d {
            *z *= scale / dn;
        }
        // Scan the complex line c0 + lambda d for the lambda where branches come
        // closest together: a nearby discriminant zero is where monodromy
        // happens, so the loop is aimed there.
        let mut best = (Complex64::new(1.0, 0.0), f64::INFINITY);
        for ir in 0..5 {
            let r = [0.3, 0.6, 1.0, 1.6, 2.4][ir];
            for ia in 0..12 {
                let lambda =
                    Complex64::from_polar(r, 2.0 * std::f64::consts::PI * ia as f64 / 12.0);
                let c: Vec<Complex64> =
                    c0.iter().zip(&d).map(|(&a, &dd)| a + lambda * dd).collect();
                let gap = match branches_at(&tf, &c) {
                    Ok(bs) if bs.len() == kk => {
                        min_gap(&bs.iter().map(|&(p, _)| p).collect::<Vec<_>>())
                    }
                    Ok(_) => 0.0, // clusters merged right here
                    Err(_) => continue,
                };
                if gap < best.1 {
                    best = (lambda, gap);
                }
            }
        }
        let (center, radius) = if best.1 < 0.8 * base_gap {
            (best.0, (0.35 * best.0.norm()).max(0.05))
        } else {
            // No near-collision on this line; sweep a unit circle anyway.
            (Complex64::new(1.0, 0.0), 1.0)
        };
        match loop_permutation(&tf, &base, &c0, &d, center, radius) {
            Ok(perm) => {
                let mut merges = 0;
                for (i, &p) in perm.iter().enumerate() {
                    if uf.union(i, p) {
                        merges += 1;
                    }
                }
                loop_log.push(format!(
                    "loop {}: permutation {:?}, {} merge(s)",
                    loop_idx, perm, merges
                ));
                if merges == 0 {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
            }
            Err(e) => {
                loop_log.push(format!("loop {}: discarded ({})", loop_idx, e));
            }
        }
    }

    // Orbits -> components, ordered by smallest member branch.
    let mut roots: Vec<usize> = (0..kk).map(|i| uf.find(i)).collect();
    let mut component_ids: Vec<usize> = Vec::new();
    let mut assignment = vec![0usize; kk];
    for (i, &r) in roots.iter().enumerate() {
        let id = match component_ids.iter().position(|&x| x == r) {
            Some(p) => p,
            None => {
                component_ids.push(r);
                component_ids.len() - 1
            }
        };
        assignment[i] = id;
    }
    roots.clear();

    // Transport the grouping to each coordinate direction.
    let endpoint_sets: Vec<Result<Vec<(Complex64, usize)>>> = exec::par_map_range(n, |j| {
        let mut ej = vec![Complex64::new(0.0, 0.0); n];
        ej[j] = Complex64::new(1.0, 0.0);
        let mut local_rng = ChaCha8Rng::seed_from_u64(seed ^ (0xabcd + j as u64));
        let mut last = Err(Error::PathCollision { segment: 0, gap: 0.0 });
        for _ in 0..6 {
            // Arc with a random complex bow so the segment avoids collisions.
            let w: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::new(
                        local_rng.gen_range(-0.5..0.5),
                        local_rng.gen_range(-0.5..0.5),
                    )
                })
                .collect();
            let c0c = c0.clone();
            let ejc = ej.clone();
            let dir = move |theta: f64| -> Vec<Complex64> {
                let bow = theta * (1.0 - theta) * 4.0;
                c0c.iter()
                    .zip(&ejc)
                    .zip(&w)
                    .map(|((&a, &b), &ww)| a * (1.0 - theta) + b * theta + ww * bow)
                    .collect()
            };
            last = track_path(&tf, dir, &base, 32);
            if last.is_ok() {
                break;
            }
        }
        last
    });

    let k_comp = component_ids.len();
    let mut components: Vec<Component> = Vec::with_capacity(k_comp);
    for id in 0..k_comp {
        let members: Vec<usize> = (0..kk).filter(|&b| assignment[b] == id).collect();
        let mult = base[members[0]].1;
        if members.iter().any(|&b| base[b].1 != mult) {
            return Err(Error::DecompositionInconsistent(
                "branches in one monodromy orbit have different multiplicities".into(),
            ));
        }
        components.push(Component {
            degree: members.len(),
            multiplicity: mult,
            intersections: vec![Vec::new(); n],
        });
    }
    for (j, endpoints) in endpoint_sets.into_iter().enumerate() {
        let endpoints = endpoints?;
        for (b, &(mu, m)) in endpoints.iter().enumerate() {
            let comp = &mut components[assignment[b]];
            if m != comp.multiplicity {
                return Err(Error::DecompositionInconsistent(format!(
                    "multiplicity changed along the path to coordinate line {}",
                    j + 1
                )));
            }
            if mu.norm() < 1e-12 * (1.0 + tf.norm_scale()) {
                return Err(Error::DecompositionInconsistent(format!(
                    "zero eigenvalue on coordinate line {} (tuple not invertible?)",
                    j + 1
                )));
            }
            comp.intersections[j].push(1.0 / mu);
        }
    }

    let total: usize = components
        .iter()
        .map(|c| c.degree * c.multiplicity)
        .sum();
    if total != nn {
        return Err(Error::DecompositionInconsistent(format!(
            "sum of degree*multiplicity = {} but the matrices are {}x{}",
            total, nn, nn
        )));
    }

    Ok(ComponentDecomposition {
        components,
        base_direction: c0,
        base_branches: base,
        assignment,
        loop_log,
    })
}

/// Tracks the base branches of a decomposition to an arbitrary target
/// direction, retrying with random arcs when the straight segment hits a
/// collision. Entry `b` of the result is where base branch `b` arrives.
pub fn transport_branches(
    tf: &MatrixTuple<Complex64>,
    d: &ComponentDecomposition,
    target: &[Complex64],
    seed: u64,
) -> Result<Vec<(Complex64, usize)>> {
    let n = tf.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a58_90d1);
    let mut last = Err(Error::PathCollision { segment: 0, gap: 0.0 });
    for attempt in 0..6 {
        let w: Vec<Complex64> = (0..n)
            .map(|_| {
                if attempt == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
                }
            })
            .collect();
        let c0 = d.base_direction.clone();
        let tgt = target.to_vec();
        let dir = move |theta: f64| -> Vec<Complex64> {
            let bow = theta * (1.0 - theta) * 4.0;
            c0.iter()
                .zip(&tgt)
                .zip(&w)
                .map(|((&a, &b), &ww)| a * (1.0 - theta) + b * theta + ww * bow)
                .collect()
        };
        last = track_path(tf, dir, &d.base_branches, 32);
        if last.is_ok() {
            break;
        }
    }
    last
}

/// Re-runs the decomposition with a different seed and compares shapes and
/// per-line intersection partitions.
pub fn resample_consistency<C: Coeff>(
    t: &MatrixTuple<C>,
    d: &ComponentDecomposition,
    seed: u64,
) -> Result<bool> {
    let d2 = decompose(t, seed, 24)?;
    if d.shape() != d2.shape() {
        return Ok(false);
    }
    let delta = delta_cluster(t.norm_scale());
    // Match components of equal shape whose intersection sets coincide.
    let mut used = vec![false; d2.components.len()];
    'outer: for c in &d.components {
        for (i, c2) in d2.components.iter().enumerate() {
            if used[i]
                || c2.degree != c.degree
                || c2.multiplicity != c.multiplicity
                || !same_point_sets(&c.intersections, &c2.intersections, delta)
            {
                continue;
            }
            used[i] = true;
            continue 'outer;
        }
        return Ok(false);
    }
    Ok(true)
}

fn same_point_sets(a: &[Vec<Complex64>], b: &[Vec<Complex64>], delta: f64) -> bool {
    a.iter().zip(b).all(|(pa, pb)| {
        pa.len() == pb.len()
            && pa.iter().all(|x| pb.iter().any(|y| (x - y).norm() <= delta.max(1e-6)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CMat;
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

    fn ex42() -> MatrixTuple<Exact> {
        let a1 = em(&[&[1, 0, 0], &[0, 5, 0], &[0, 0, 0]]);
        let mut a2 = em(&[&[1, 2, 1], &[2, 7, 1], &[1, 1, 0]]);
        a2[(2, 2)] = Exact::from_ratio(1, 2);
        make_tuple(vec![a1, a2]).unwrap()
    }

    /// Hermitian pair with A1^2 = A2^2 = I and A1 A2 + A2 A1 = -I, whose
    /// spectrum is the square of an irreducible conic.
    fn anticommuting_pair() -> MatrixTuple<Exact> {
        let a1 = em(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]]);
        let h = Exact::from_ratio(1, 2);
        let i2 = Exact::new(
            num_rational::BigRational::new(1.into(), 2.into()),
            num_rational::BigRational::new(1.into(), 2.into()),
        );
        let mut a2 = CMat::<Exact>::zeros(4, 4);
        a2[(0, 0)] = -h.clone();
        a2[(1, 1)] = -h.clone();
        a2[(2, 2)] = h.clone();
        a2[(3, 3)] = h.clone();
        // Q = [[(1+i)/2, 1/2], [-1/2, (1-i)/2]] in the off-diagonal blocks
        a2[(0, 2)] = i2.clone();
        a2[(0, 3)] = h.clone();
        a2[(1, 2)] = -h.clone();
        a2[(1, 3)] = i2.conj();
        a2[(2, 0)] = i2.conj();
        a2[(2, 1)] = -h.clone();
        a2[(3, 0)] = h.clone();
        a2[(3, 1)] = i2.clone();
        make_tuple(vec![a1, a2]).unwrap()
    }

    #[test]
    fn branch_formula_ex42() {
        // Branches at (1,0) are the eigenvalues of A1 + shift.
        let t = ex42();
        let bs = branches_at(&t.to_c64(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let mut vals: Vec<f64> = bs.iter().map(|&(p, _)| p.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(bs.len(), 3);
        assert!((vals[0] - 1.0).abs() < 1e-8); // 0 + 1
        assert!((vals[1] - 2.0).abs() < 1e-8); // 1 + 1
        assert!((vals[2] - 6.0).abs() < 1e-8); // 5 + 1
    }

    #[test]
    fn diag_lines_never_merge() {
        let t = make_tuple(vec![em(&[&[1, 0], &[0, 2]]), em(&[&[3, 0], &[0, 4]])]).unwrap();
        let d = decompose(&t, 3, 24).unwrap();
        assert_eq!(d.shape(), vec![(1, 1), (1, 1)]);
        // intersections on line 1: eigenvalues 1 and 2 -> t = 1, 1/2
        let mut ts: Vec<f64> = d
            .components
            .iter()
            .map(|c| c.intersections[0][0].re)
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ts[0] - 0.5).abs() < 1e-8 && (ts[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ex42_line_plus_conic() {
        let t = ex42();
        let d = decompose(&t, 1, 24).unwrap();
        assert_eq!(d.shape(), vec![(1, 1), (2, 1)]);
        assert!(resample_consistency(&t, &d, 99).unwrap());
    }

    #[test]
    fn double_conic_component() {
        let t = anticommuting_pair();
        assert!(t.selfadjoint);
        assert_eq!(t.shift, 0);
        let d = decompose(&t, 5, 24).unwrap();
        assert_eq!(d.shape(), vec![(2, 2)]);
    }

    #[test]
    fn conjugated_block_sum_recovered() {
        // diag blocks diag(1,2) and diag(7) conjugated by an invertible matrix:
        // three line components for A1; A2 chosen to keep them separate.
        let g = em(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let ginv = g.inverse(0.0).unwrap();
        let a1 = g.mul(&em(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 7]])).mul(&ginv);
        let a2 = g.mul(&em(&[&[3, 0, 0], &[0, 5, 0], &[0, 0, 11]])).mul(&ginv);
        let t = make_tuple(vec![a1, a2]).unwrap();
        let d = decompose(&t, 11, 24).unwrap();
        assert_eq!(d.shape(), vec![(1, 1), (1, 1), (1, 1)]);
    }
}

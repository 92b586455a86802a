//! Dense univariate and sparse multivariate polynomials over either scalar domain,
//! Newton interpolation of homogeneous polynomials on the integer simplex grid,
//! and root finding with multiplicities.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::numf;
use crate::scalar::Coeff;

/// Sparse multivariate polynomial; exponent vectors map to nonzero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<C: Coeff> {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The monomial `c * x_i`.
    pub fn var(nvars: usize, i: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            let mut e = vec![0u32; nvars];
            e[i] = 1;
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_term(&mut self, exps: Vec<u32>, c: C) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.insert_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), -v.clone());
        }
        out
    }

    pub fn eval(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "poly in {} variables evaluated at a point of length {}",
                self.nvars,
                point.len()
            )));
        }
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e.iter()) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Substitutes variable `i` by the constant `value`, keeping the arity.
    pub fn substitute(&self, i: usize, value: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..e[i] {
                term = term * value.clone();
            }
            let mut e2 = e.clone();
            e2[i] = 0;
            out.insert_term(e2, term);
        }
        out
    }

    /// Applies a permutation of variables: exponent `e[i]` moves to slot `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0u32; self.nvars];
            for (i, &k) in e.iter().enumerate() {
                e2[perm[i]] = k;
            }
            out.insert_term(e2, c.clone());
        }
        out
    }

    /// Restriction to the `j`-th coordinate line: keeps `x_j`, sets the other
    /// first `nvars-1` variables to zero and the last variable to one.
    pub fn restrict_to_line(&self, j: usize) -> UniPoly<C> {
        let last = self.nvars - 1;
        let mut coeffs: Vec<C> = Vec::new();
        for (e, c) in &self.terms {
            let others = e
                .iter()
                .enumerate()
                .any(|(i, &k)| i != j && i != last && k > 0);
            if others {
                continue;
            }
            let d = e[j] as usize;
            if coeffs.len() <= d {
                coeffs.resize(d + 1, C::zero());
            }
            coeffs[d] = coeffs[d].clone() + c.clone();
        }
        UniPoly::new(coeffs)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> MultiPoly<Complex64> {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.insert_term(e.clone(), c.to_c64());
        }
        out
    }

    /// Exact single-term division helper for `exact_div`; lex leading term.
    fn leading(&self) -> Option<(&Vec<u32>, &C)> {
        self.terms.iter().next_back()
    }

    /// Exact polynomial division (panics must not happen for callers that
    /// guarantee divisibility; a remainder is reported as an error).
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (dl_e, dl_c) = divisor.leading().unwrap();
        let dl_e = dl_e.clone();
        let dl_c = dl_c.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            let e: Option<Vec<u32>> = re
                .iter()
                .zip(&dl_e)
                .map(|(a, b)| a.checked_sub(*b))
                .collect();
            let Some(e) = e else {
                return Err(Error::DimensionMismatch(
                    "exact division left a remainder".into(),
                ));
            };
            let c = rc.div(&dl_c)?;
            let mut mono = Self::zero(self.nvars);
            mono.insert_term(e, c);
            rem = rem.sub(&mono.mul(divisor));
            quot = quot.add(&mono);
        }
        Ok(quot)
    }
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (i, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*x{}", i + 1)?;
                } else if k > 1 {
                    write!(f, "*x{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

/// Dense univariate polynomial, coefficients low degree first.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<C: Coeff> {
    pub coeffs: Vec<C>,
}

impl<C: Coeff> UniPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![C::one()],
        }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `z - root`
    pub fn linear(root: C) -> Self {
        UniPoly {
            coeffs: vec![-root, C::one()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * C::from_int(k as i64))
            .collect();
        Self::new(coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![C::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i].clone() + c.clone();
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i].clone() + c.clone();
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(coeffs)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; requires an invertible leading coefficient.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dlead = divisor.coeffs.last().unwrap().clone();
        let dinv = dlead.inv().ok_or(Error::DivisionByZero)?;
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let qlen = rem.len() - divisor.coeffs.len() + 1;
        let mut quot = vec![C::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + divisor.degree()].clone() * dinv.clone();
            quot[k] = c.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
            }
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn monic(&self) -> Result<Self> {
        let lead = self.coeffs.last().ok_or(Error::ZeroPolynomial)?;
        let inv = lead.inv().ok_or(Error::DivisionByZero)?;
        Ok(self.scale(&inv))
    }

    /// Polynomial gcd via the Euclidean algorithm; meaningful in exact mode.
    pub fn gcd(&self, rhs: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    pub fn to_c64(&self) -> UniPoly<Complex64> {
        UniPoly::new(self.coeffs.iter().map(|c| c.to_c64()).collect())
    }
}

impl UniPoly<Complex64> {
    /// All roots via the companion-matrix eigenvalues, clustered within `delta`.
    pub fn roots(&self, delta: f64) -> Result<Vec<(Complex64, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let monic = self.monic()?;
        let d = monic.degree();
        if d == 0 {
            return Ok(vec![]);
        }
        let mut companion = nalgebra::DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            companion[(i, d - 1)] = -monic.coeffs[i];
        }
        let eigs = numf::eigenvalues_dm(&companion)?;
        Ok(numf::cluster(&eigs, delta))
    }
}

impl<C: Coeff> fmt::Display for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*z", c)?,
                _ => write!(f, "({})*z^{}", c, k)?,
            }
        }
        Ok(())
    }
}

/// Roots with multiplicities. Exact mode separates multiplicities with a
/// gcd-based squarefree decomposition, then locates each simple factor's
/// roots numerically; float mode clusters companion-matrix eigenvalues.
pub fn uni_roots<C: Coeff>(p: &UniPoly<C>, delta: f64) -> Result<Vec<(Complex64, usize)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !C::EXACT {
        return p.to_c64().roots(delta);
    }
    // Yun-style: strip repeated factors one multiplicity level at a time.
    let mut out = Vec::new();
    let mut current = p.monic()?;
    let mut mult = 0usize;
    while current.degree() > 0 {
        mult += 1;
        let g = current.gcd(&current.derivative())?;
        let squarefree_all = current.div_rem(&g)?.0; // roots of `current`, each once
        // Roots at exactly this multiplicity level and above live in `current`;
        // those that disappear from `g` have multiplicity == mult.
        let next = g.clone();
        let level = if next.degree() > 0 {
            squarefree_all.div_rem(&squarefree_all.gcd(&next)?)?.0
        } else {
            squarefree_all
        };
        for (r, m) in level.to_c64().roots(delta)? {
            debug_assert_eq!(m, 1);
            out.push((r, mult));
        }
        current = next;
    }
    let total: usize = out.iter().map(|(_, m)| m).sum();
    debug_assert_eq!(total, p.degree());
    Ok(out)
}

/// Enumerates exponent vectors of length `k` with total degree `<= d`.
pub fn simplex_points(k: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(k: usize, d: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..=d {
            cur[i] = v;
            rec(k, d - v, i + 1, cur, out);
        }
        cur[i] = 0;
    }
    rec(k, d, 0, &mut cur, &mut out);
    out
}

/// Interpolates the unique homogeneous degree-`degree` polynomial in `nvars`
/// variables agreeing with `eval`. Dehomogenizes at `x_nvars = 1`, runs
/// iterated Newton divided differences on the integer simplex grid, expands
/// the Newton basis, and rehomogenizes.
pub fn interpolate_homogeneous<C, F>(eval: F, nvars: usize, degree: u32) -> Result<MultiPoly<C>>
where
    C: Coeff,
    F: Fn(&[C]) -> Result<C> + Sync,
{
    assert!(nvars >= 1);
    let k = nvars - 1;
    if k == 0 {
        let v = eval(&[C::one()])?;
        let mut p = MultiPoly::zero(1);
        p.insert_term(vec![degree], v);
        return Ok(p);
    }
    let grid = simplex_points(k, degree);
    let eval_at = |e: &Vec<u32>| -> Result<(Vec<u32>, C)> {
        let mut point: Vec<C> = e.iter().map(|&v| C::from_int(v as i64)).collect();
        point.push(C::one());
        Ok((e.clone(), eval(&point)?))
    };
    let samples: Vec<(Vec<u32>, C)> = exec::par_map(&grid, eval_at)
        .into_iter()
        .collect::<Result<_>>()?;
    let mut values: BTreeMap<Vec<u32>, C> = samples.into_iter().collect();

    // In-place divided differences, one dimension at a time. After processing
    // every dimension, values[t] is the Newton coefficient of multi-index t.
    for dim in 0..k {
        let keys: Vec<Vec<u32>> = values.keys().cloned().collect();
        // group keys into lines along `dim`
        let mut lines: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for key in &keys {
            let mut base = key.clone();
            base[dim] = 0;
            let entry = lines.entry(base).or_insert(0);
            *entry = (*entry).max(key[dim]);
        }
        for (base, maxidx) in lines {
            let m = maxidx as usize;
            let mut line: Vec<C> = (0..=m)
                .map(|t| {
                    let mut key = base.clone();
                    key[dim] = t as u32;
                    values[&key].clone()
                })
                .collect();
            for i in 1..=m {
                for j in (i..=m).rev() {
                    let num = line[j].clone() - line[j - 1].clone();
                    line[j] = num.div(&C::from_int(i as i64))?;
                }
            }
            for (t, v) in line.into_iter().enumerate() {
                let mut key = base.clone();
                key[dim] = t as u32;
                values.insert(key, v);
            }
        }
    }

    // Newton basis per variable: prod_{l<t} (x - l), expanded once per degree.
    let mut basis: Vec<UniPoly<C>> = Vec::with_capacity(degree as usize + 1);
    basis.push(UniPoly::one());
    for t in 0..degree {
        let prev = basis.last().unwrap().clone();
        basis.push(prev.mul(&UniPoly::linear(C::from_int(t as i64))));
    }

    let mut dehom = MultiPoly::zero(k);
    for (t, c) in &values {
        if c.is_zero() {
            continue;
        }
        let mut term = MultiPoly::constant(k, c.clone());
        for (dim, &tk) in t.iter().enumerate() {
            let mut factor = MultiPoly::zero(k);
            for (pow, bc) in basis[tk as usize].coeffs.iter().enumerate() {
                let mut e = vec![0u32; k];
                e[dim] = pow as u32;
                factor.insert_term(e, bc.clone());
            }
            term = term.mul(&factor);
        }
        dehom = dehom.add(&term);
    }

    // Rehomogenize with the last variable.
    let mut out = MultiPoly::zero(nvars);
    for (e, c) in &dehom.terms {
        let total: u32 = e.iter().sum();
        if total > degree {
            return Err(Error::InterpolationInconsistent {
                degree: degree as usize,
                residual: c.abs(),
            });
        }
        let mut e2 = e.clone();
        e2.push(degree - total);
        out.insert_term(e2, c.clone());
    }

    if !C::EXACT {
        verify_float_interpolation(&eval, &out, nvars, degree)?;
    }
    Ok(out)
}

fn verify_float_interpolation<C, F>(
    eval: &F,
    p: &MultiPoly<C>,
    nvars: usize,
    degree: u32,
) -> Result<()>
where
    C: Coeff,
    F: Fn(&[C]) -> Result<C> + Sync,
{
    // Deterministic off-grid probe points.
    let scale = p.max_coeff_abs().max(1.0);
    for probe in 0..3u32 {
        let point: Vec<C> = (0..nvars)
            .map(|i| {
                let x = 0.37 + 0.61 * ((i as f64 + 1.3) * (probe as f64 + 1.7)).sin();
                let c = C::from_int((x * 1e6) as i64);
                c.div(&C::from_int(1_000_000)).unwrap()
            })
            .collect();
        let expected = eval(&point)?;
        let got = p.eval(&point)?;
        let err = (expected.to_c64() - got.to_c64()).norm();
        let tol = 1e-6 * (scale + expected.abs()) * (degree as f64 + 1.0);
        if err > tol {
            return Err(Error::InterpolationInconsistent {
                degree: degree as usize,
                residual: err,
            });
        }
    }
    Ok(())
}

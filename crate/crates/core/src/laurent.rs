//! Laurent polynomials in one variable and multiplicity-aware root finding.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::linalg::{self, ONE, ZERO};
use crate::{Error, Result, C64};

/// `Σ_{m = low}^{low + len - 1} coeffs[m - low] z^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent {
    pub low: i64,
    pub coeffs: Vec<C64>,
}

impl Laurent {
    pub fn new(low: i64, coeffs: Vec<C64>) -> Self {
        Self { low, coeffs }
    }

    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self { low: 0, coeffs: vec![c] }
    }

    pub fn from_fn(low: i64, high: i64, f: impl Fn(i64) -> C64) -> Self {
        Self { low, coeffs: (low..=high).map(f).collect() }
    }

    /// Highest exponent with a stored coefficient (`low - 1` when empty).
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, m: i64) -> C64 {
        if m < self.low || m > self.high() {
            ZERO
        } else {
            self.coeffs[(m - self.low) as usize]
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z == ZERO && self.low < 0 && self.coeffs.iter().any(|c| *c != ZERO) {
            return Err(Error::Pole);
        }
        if self.coeffs.is_empty() {
            return Ok(ZERO);
        }
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        Ok(if self.low == 0 { acc } else { acc * z.powi(self.low as i32) })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    fn combine(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        if self.coeffs.is_empty() {
            return Self { low: other.low, coeffs: other.coeffs.iter().map(|c| f(ZERO, *c)).collect() };
        }
        if other.coeffs.is_empty() {
            return Self { low: self.low, coeffs: self.coeffs.iter().map(|c| f(*c, ZERO)).collect() };
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        Self::from_fn(low, high, |m| f(self.coeff(m), other.coeff(m)))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { low: self.low, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { low: self.low + other.low, coeffs: out }
    }

    /// `d/dz`.
    pub fn derivative(&self) -> Self {
        Self::from_fn(self.low - 1, self.high() - 1, |m| self.coeff(m + 1) * (m + 1) as f64)
    }

    /// Drops outer coefficients with modulus `<= tol`.
    pub fn trim(&self, tol: f64) -> Self {
        let first = self.coeffs.iter().position(|c| c.norm() > tol);
        match first {
            None => Self::zero(),
            Some(f) => {
                let last = self.coeffs.iter().rposition(|c| c.norm() > tol).unwrap();
                Self { low: self.low + f as i64, coeffs: self.coeffs[f..=last].to_vec() }
            }
        }
    }

    /// `max_m |c_{-m} - conj(c_m)|`, relative to the largest coefficient.
    pub fn reality_residual(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let top = self.high().max(-self.low);
        (-top..=top).map(|m| (self.coeff(-m) - self.coeff(m).conj()).norm()).fold(0.0, f64::max) / scale
    }

    /// Ascending coefficients of `z^{-shift} · self` where `shift = low`.
    pub fn shifted_poly(&self) -> Vec<C64> {
        self.coeffs.clone()
    }
}

pub fn poly_eval(asc: &[C64], z: C64) -> C64 {
    asc.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

fn poly_derivative(asc: &[C64]) -> Vec<C64> {
    asc.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

/// All roots of the polynomial with ascending coefficients `asc`, counted
/// with multiplicity. Leading coefficients below `1e-14 · max|c|` are treated
/// as zero; trailing zero coefficients give roots at the origin.
pub fn poly_roots(asc: &[C64]) -> Vec<C64> {
    let scale = asc.iter().fold(0.0, |a: f64, c| a.max(c.norm()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut hi = asc.len() - 1;
    while asc[hi].norm() <= 1e-14 * scale {
        hi -= 1;
    }
    let mut lo = 0;
    while asc[lo] == ZERO {
        lo += 1;
    }
    let mut roots = vec![ZERO; lo];
    let p = &asc[lo..=hi];
    let n = p.len() - 1;
    if n == 0 {
        return roots;
    }
    let lead = p[n];
    let mut comp = DMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
    }
    let dp = poly_derivative(p);
    for mut r in linalg::eigenvalues(&comp) {
        let mut fr = poly_eval(p, r).norm();
        for _ in 0..8 {
            let d = poly_eval(&dp, r);
            if d == ZERO {
                break;
            }
            let cand = r - poly_eval(p, r) / d;
            let fc = poly_eval(p, cand).norm();
            if fc < fr {
                r = cand;
                fr = fc;
            } else {
                break;
            }
        }
        roots.push(r);
    }
    roots
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub center: C64,
    pub multiplicity: usize,
}

/// Single-linkage clustering: two roots join when
/// `|r_i - r_j| <= rel · max(|r_i|, |r_j|, floor)`.
pub fn cluster_roots(roots: &[C64], rel: f64, floor: f64) -> Vec<Cluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let radius = rel * roots[i].norm().max(roots[j].norm()).max(floor);
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut out: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match out.iter_mut().find(|(root, _, _)| *root == r) {
            Some(entry) => {
                entry.1 += roots[i];
                entry.2 += 1;
            }
            None => out.push((r, roots[i], 1)),
        }
    }
    out.into_iter().map(|(_, s, m)| Cluster { center: s / m as f64, multiplicity: m }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use proptest::prelude::*;

    #[test]
    fn laurent_arithmetic() {
        let a = Laurent::new(-1, vec![c(1.0), c(0.0), c(2.0)]);
        let b = Laurent::new(0, vec![c(3.0), c(1.0)]);
        let z = C64::new(0.4, -1.3);
        let p = a.mul(&b);
        assert!((p.eval(z).unwrap() - a.eval(z).unwrap() * b.eval(z).unwrap()).norm() < 1e-13);
        let s = a.sub(&b);
        assert!((s.eval(z).unwrap() - a.eval(z).unwrap() + b.eval(z).unwrap()).norm() < 1e-13);
        assert_eq!(a.eval(ZERO), Err(Error::Pole));
        let d = a.derivative();
        let h = 1e-6;
        let fd = (a.eval(z + h).unwrap() - a.eval(z - h).unwrap()) / (2.0 * h);
        assert!((d.eval(z).unwrap() - fd).norm() < 1e-6);
    }

    #[test]
    fn double_root_is_clustered() {
        // (z - 2)^2 (z + 1)
        let asc = [c(4.0), c(0.0), c(-3.0), c(1.0)];
        let roots = poly_roots(&asc);
        let cl = cluster_roots(&roots, 1e-6, 1.0);
        assert_eq!(cl.len(), 2);
        let two = cl.iter().find(|k| k.multiplicity == 2).unwrap();
        assert!((two.center - c(2.0)).norm() < 1e-7);
    }

    proptest! {
        #[test]
        fn roots_reconstruct_polynomial(re in prop::collection::vec(-2.0f64..2.0, 6), im in prop::collection::vec(-2.0f64..2.0, 6)) {
            let want: Vec<C64> = re.iter().zip(im.iter()).map(|(a, b)| C64::new(*a, *b)).collect();
            let mut asc = vec![ONE];
            for r in &want {
                let mut next = vec![ZERO; asc.len() + 1];
                for (i, x) in asc.iter().enumerate() {
                    next[i + 1] += x;
                    next[i] -= x * r;
                }
                asc = next;
            }
            let got = poly_roots(&asc);
            prop_assert_eq!(got.len(), 6);
            for r in &got {
                prop_assert!(poly_eval(&asc, *r).norm() < 1e-8 * (1.0 + r.norm()).powi(6));
            }
        }
    }
}

//! Exterior algebra of `C^n` for `n <= 7`, dense in the monomial basis.
//!
//! A monomial `θ_{i1}∧…∧θ_{ip}` with `i1 < … < ip` is stored at the bitmask
//! with bits `i1..ip` set (0-based indices).

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::ZERO;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtForm {
    dim: usize,
    coeffs: Vec<C64>,
}

/// Sign of moving the monomial `b` past `a` into sorted position in `a ∧ b`.
fn wedge_sign(a: usize, b: usize) -> f64 {
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ExtForm {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= 7, "exterior algebra supports dim <= 7");
        Self { dim, coeffs: vec![ZERO; 1 << dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Monomial with the given (not necessarily sorted, distinct) 0-based indices.
    pub fn monomial(dim: usize, idx: &[usize], coeff: C64) -> Self {
        let mut f = Self::zero(dim);
        let mut sorted = idx.to_vec();
        let mut sign = 1.0;
        // bubble sort, tracking parity
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return f;
        }
        let mask = sorted.iter().fold(0usize, |m, &i| m | (1 << i));
        f.coeffs[mask] = coeff * sign;
        f
    }

    pub fn one_form(v: &[C64]) -> Self {
        let mut f = Self::zero(v.len());
        for (i, x) in v.iter().enumerate() {
            f.coeffs[1 << i] = *x;
        }
        f
    }

    /// 3-form with components `t(i,j,k)` for `i<j<k`.
    pub fn three_form(dim: usize, t: impl Fn(usize, usize, usize) -> C64) -> Self {
        let mut f = Self::zero(dim);
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    f.coeffs[(1 << i) | (1 << j) | (1 << k)] = t(i, j, k);
                }
            }
        }
        f
    }

    pub fn coeff(&self, mask: usize) -> C64 {
        self.coeffs[mask]
    }

    pub fn set_coeff(&mut self, mask: usize, value: C64) {
        self.coeffs[mask] = value;
    }

    /// Component `β(e_{i1}, …, e_{ip})` for arbitrary index order.
    pub fn component(&self, idx: &[usize]) -> C64 {
        let m = Self::monomial(self.dim, idx, C64::new(1.0, 0.0));
        // monomial stores sign * 1 at the sorted mask; component picks the same sign
        m.coeffs
            .iter()
            .zip(self.coeffs.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Top-degree coefficient against `θ_1∧…∧θ_n`.
    pub fn top(&self) -> C64 {
        self.coeffs[(1 << self.dim) - 1]
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if *ca == ZERO {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if *cb == ZERO || a & b != 0 {
                    continue;
                }
                out.coeffs[a | b] += ca * cb * wedge_sign(a, b);
            }
        }
        out
    }

    /// Interior product `v ⌟ self`.
    pub fn interior(&self, v: &[C64]) -> Self {
        assert_eq!(v.len(), self.dim);
        let mut out = Self::zero(self.dim);
        for (mask, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let below = (mask & ((1 << i) - 1)).count_ones();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                out.coeffs[mask & !(1 << i)] += c * v[i] * sign;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    /// Vector `u` with `u ⌟ (θ_1∧…∧θ_n) = self` for an (n-1)-form.
    pub fn hodge_vector(&self) -> Vec<C64> {
        let full = (1usize << self.dim) - 1;
        (0..self.dim)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                self.coeffs[full & !(1 << i)] * sign
            })
            .collect()
    }
}

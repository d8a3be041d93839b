//! Small dense linear algebra helpers on top of `nalgebra`.

#[allow(unused_imports)]
use num_traits::Float as _;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use num_traits::Zero;

use crate::C64;

pub type Mat7 = SMatrix<C64, 7, 7>;
pub type Vec7 = SVector<C64, 7>;
pub type RMat7 = SMatrix<f64, 7, 7>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn complexify(m: &RMat7) -> Mat7 {
    m.map(c)
}

pub fn frob(m: &Mat7) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat7) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn conj(m: &Mat7) -> Mat7 {
    m.map(|z| z.conj())
}

pub fn bracket(a: &Mat7, b: &Mat7) -> Mat7 {
    a * b - b * a
}

pub fn vnorm(v: &Vec7) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Bilinear (not Hermitian) pairing `x^T y`.
pub fn bilinear(x: &Vec7, y: &Vec7) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// Coefficients `[1, c1, ..., cn]` of `det(x I - A) = x^n + c1 x^{n-1} + ... + cn`
/// by the Berkowitz algorithm (division free).
pub fn charpoly(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    // Berkowitz: successive Toeplitz products, starting from the 1x1 leading block.
    let mut poly: Vec<C64> = vec![ONE];
    for r in 0..n {
        // Leading (r+1)x(r+1) block is [[A_r, s], [t, a_rr]] where A_r is r x r.
        let arr = a[(r, r)];
        let col: Vec<C64> = (0..r).map(|i| a[(i, r)]).collect();
        let row: Vec<C64> = (0..r).map(|j| a[(r, j)]).collect();
        // Toeplitz column entries: 1, -a_rr, -t s, -t A s, -t A^2 s, ...
        let mut t = vec![ZERO; r + 2];
        t[0] = ONE;
        t[1] = -arr;
        let mut v = col.clone();
        for m in 2..r + 2 {
            let dot: C64 = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            t[m] = -dot;
            let mut next = vec![ZERO; r];
            for i in 0..r {
                let mut acc = ZERO;
                for j in 0..r {
                    acc += a[(i, j)] * v[j];
                }
                next[i] = acc;
            }
            v = next;
        }
        // new poly = Toeplitz(t) * poly, lengths (r+2) x (r+1)
        let mut np = vec![ZERO; r + 2];
        for i in 0..r + 2 {
            let mut acc = ZERO;
            for j in 0..=r.min(i) {
                acc += t[i - j] * poly[j];
            }
            np[i] = acc;
        }
        poly = np;
    }
    poly
}

pub fn charpoly7(a: &Mat7) -> Vec<C64> {
    charpoly(&DMatrix::from_iterator(7, 7, a.iter().copied()))
}

/// Eigenvalues of a complex square matrix (Schur form).
/// Eigenvalues via complex Schur. Unconverged inputs (exactly repeated
/// eigenvalues can stall the shifts) are retried after a perturbation at
/// the level of rounding.
pub fn eigenvalues(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    let scale = a.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    for attempt in 0..8 {
        if let Some(schur) = m.clone().try_schur(f64::EPSILON, 2000) {
            let (_, t) = schur.unpack();
            return (0..n).map(|i| t[(i, i)]).collect();
        }
        let eps = scale * 1e-15 * (1u64 << (2 * attempt)) as f64;
        m = a.clone();
        for i in 0..n {
            for j in 0..n {
                let phase = ((7 * i + 13 * j + attempt) % 17) as f64 * 0.37;
                m[(i, j)] += C64::from_polar(eps, phase);
            }
        }
    }
    panic!("Schur decomposition failed to converge");
}

pub fn eigenvalues7(a: &Mat7) -> Vec<C64> {
    eigenvalues(&DMatrix::from_iterator(7, 7, a.iter().copied()))
}

/// Real `2n x 2m` form of a complex matrix acting on `(Re x, Im x)`.
pub fn realify(a: &DMatrix<C64>) -> DMatrix<f64> {
    let (n, m) = a.shape();
    DMatrix::from_fn(2 * n, 2 * m, |r, q| {
        let z = a[(r % n, q % m)];
        match (r < n, q < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn complexify_vec(v: &DVector<f64>) -> DVector<C64> {
    let m = v.len() / 2;
    DVector::from_fn(m, |i, _| C64::new(v[i], v[i + m]))
}

/// Singular values (descending) and right singular vectors of a real matrix.
/// Wide inputs are padded with zero rows so all `ncols` right vectors come back.
pub fn real_svd_right(a: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let n = a.ncols();
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let vs = idx.iter().map(|&i| vt.row(i).transpose()).collect();
    (sv, vs)
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    let (sv, _) = real_svd_right(&realify(a));
    // the real form doubles every singular value
    sv.into_iter().step_by(2).collect()
}

/// Orthonormal (Hermitian) basis of the numerical null space,
/// `sigma <= tol * sigma_max`.
pub fn null_space(a: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let (sv, vs) = real_svd_right(&realify(a));
    let smax = sv.first().copied().unwrap_or(0.0);
    let cols: Vec<DVector<C64>> = sv
        .iter()
        .zip(vs.iter())
        .filter(|(s, _)| **s <= tol * smax.max(f64::MIN_POSITIVE))
        .map(|(_, v)| complexify_vec(v))
        .collect();
    if cols.is_empty() {
        return cols;
    }
    let m = DMatrix::from_columns(&cols);
    column_basis(&m, 1e-6)
}

/// Unit right singular vector for the smallest singular value, with that value.
pub fn null_vector(a: &DMatrix<C64>) -> (DVector<C64>, f64) {
    let (sv, vs) = real_svd_right(&realify(a));
    let s = *sv.last().unwrap();
    let v = complexify_vec(vs.last().unwrap());
    let n = v.norm();
    (v / c(n), s)
}

/// Real null space of a real matrix, same convention as [`null_space`].
pub fn real_null_space(a: &DMatrix<f64>, tol: f64) -> (Vec<DVector<f64>>, Vec<f64>) {
    let (sv, vs) = real_svd_right(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let out = sv.iter().zip(vs).filter(|(s, _)| **s <= tol * smax).map(|(_, v)| v).collect();
    (out, sv)
}

/// Numerical rank of a real matrix.
pub fn real_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    let sv = a.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * smax).count()
}

/// Orthonormal (Hermitian) basis of the column span by column-pivoted
/// Gram–Schmidt; columns whose remaining norm drops below `tol` times the
/// largest column norm are treated as dependent.
pub fn column_basis(a: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let mut cols: Vec<DVector<C64>> = (0..a.ncols()).map(|j| a.column(j).into_owned()).collect();
    let scale = cols.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut out: Vec<DVector<C64>> = Vec::new();
    if scale == 0.0 {
        return out;
    }
    loop {
        let (best, norm) = cols.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if cols.is_empty() || norm <= tol * scale {
            return out;
        }
        let mut q = cols.swap_remove(best) / c(norm);
        // second pass for numerical orthogonality
        for u in &out {
            let p = u.dotc(&q);
            q -= u * p;
        }
        let nq = q.norm();
        q /= c(nq);
        for v in cols.iter_mut() {
            let p = q.dotc(v);
            *v -= &q * p;
        }
        out.push(q);
    }
}

/// Least squares solution of `a x = b` with the 2-norm condition number of `a`.
pub fn lstsq(a: &DMatrix<C64>, b: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    let ra = realify(a);
    let (n, m) = a.shape();
    let rb = DMatrix::from_fn(2 * n, b.ncols(), |r, q| if r < n { b[(r, q)].re } else { b[(r - n, q)].im });
    let svd = ra.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd.solve(&rb, smax * 1e-14).expect("svd solve");
    let out = DMatrix::from_fn(m, b.ncols(), |r, q| C64::new(x[(r, q)], x[(r + m, q)]));
    (out, cond)
}

pub fn to_dmatrix(m: &Mat7) -> DMatrix<C64> {
    DMatrix::from_iterator(7, 7, m.iter().copied())
}

pub fn dvec_to_vec7(v: &DVector<C64>) -> Vec7 {
    Vec7::from_iterator(v.iter().copied())
}

/// Principal square root, kept as a named helper to make branch choices visible.
pub fn sqrt_principal(z: C64) -> C64 {
    if z.is_zero() {
        ZERO
    } else {
        z.sqrt()
    }
}

/// Principal cube root.
pub fn cbrt_principal(z: C64) -> C64 {
    if z.is_zero() {
        ZERO
    } else {
        z.powf(1.0 / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn berkowitz_matches_eigenvalue_product() {
        let a = DMatrix::from_fn(5, 5, |i, j| C64::new((i * 3 + j) as f64 * 0.1 - 0.7, (i as f64 - j as f64) * 0.3));
        let p = charpoly(&a);
        let ev = eigenvalues(&a);
        // p(x) = prod (x - ev_i)
        let mut prod = vec![ONE];
        for e in ev {
            let mut next = vec![ZERO; prod.len() + 1];
            for (i, c) in prod.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * e;
            }
            prod = next;
        }
        for (x, y) in p.iter().zip(prod.iter()) {
            assert!((x - y).norm() < 1e-10, "{x} vs {y}");
        }
        let tr: C64 = (0..5).map(|i| a[(i, i)]).sum();
        assert!((p[1] + tr).norm() < 1e-12);
    }

    #[test]
    fn complex_svd_helpers_are_accurate() {
        // 49 x 14 rank-3 matrix of the kind that trips nalgebra's complex SVD
        let alg = crate::octonion::G2Algebra::new().unwrap();
        let cols: Vec<_> = alg.basis.iter().map(|b| crate::octonion::graded_part(b, 5)).collect();
        let a = DMatrix::from_fn(49, 14, |r, q| cols[q][r]);
        let sv = singular_values(&a);
        assert!((sv[0] - 2f64.sqrt()).abs() < 1e-12, "{sv:?}");
        let basis = column_basis(&a, 1e-9);
        assert_eq!(basis.len(), 3);
        let ns = null_space(&a, 1e-9);
        assert_eq!(ns.len(), 11);
        for v in ns {
            assert!((&a * v).norm() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&a * v).norm() < 1e-12);
        }
    }

    #[test]
    fn cube_root_principal_branch() {
        let r = cbrt_principal(c(8.0));
        assert!((r - c(2.0)).norm() < 1e-14);
        assert!(cbrt_principal(c(-1.0)).re > 0.0);
    }
}

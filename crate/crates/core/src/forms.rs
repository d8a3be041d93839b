//! Invariants of generic 3-forms in dimensions 7 and 6.
//!
//! Dimension 7: the quadratic form `q`, `κ = (det q)^{1/3}` and the induced
//! metric `g = q / κ^{1/3}`. Dimension 6: the endomorphism
//! `K_α: v ↦ (v⌟α)∧α` (identified with a vector via the volume form), its
//! scalar `s` with `K² = s·I`, and the `±√s` eigenspaces.

#[allow(unused_imports)]
use num_traits::Float as _;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SMatrix, SVector};

use crate::exterior::ExtForm;
use crate::linalg::{self, c, Mat7, Vec7, ONE, ZERO};
use crate::{Error, Result, C64};

pub type Mat6 = SMatrix<C64, 6, 6>;
pub type Vec6 = SVector<C64, 6>;

fn antisymmetric_component(form: &ExtForm, i: usize, j: usize, k: usize) -> C64 {
    form.component(&[i, j, k])
}

/// `form(x, y, z)` for an exterior 3-form.
fn eval3(form: &ExtForm, x: &[C64], y: &[C64], z: &[C64]) -> C64 {
    form.interior(x).interior(y).interior(z).coeff(0)
}

macro_rules! three_form_common {
    ($name:ident, $dim:expr, $vec:ty, $mat:ty) => {
        impl $name {
            pub fn from_ext(form: ExtForm) -> Self {
                assert_eq!(form.dim(), $dim);
                Self(form)
            }

            /// Builds the form from its components on increasing index triples.
            pub fn from_tensor(t: impl Fn(usize, usize, usize) -> C64) -> Self {
                Self(ExtForm::three_form($dim, t))
            }

            /// Sum of monomials `coeff · θ_i∧θ_j∧θ_k` with 1-based indices.
            pub fn from_monomials(terms: &[(f64, [usize; 3])]) -> Self {
                let mut f = ExtForm::zero($dim);
                for (coef, idx) in terms {
                    let m = ExtForm::monomial($dim, &idx.map(|i| i - 1), c(*coef));
                    f = f.add(&m);
                }
                Self(f)
            }

            pub fn zero() -> Self {
                Self(ExtForm::zero($dim))
            }

            pub fn ext(&self) -> &ExtForm {
                &self.0
            }

            /// Component `α(e_i, e_j, e_k)`, 0-based, any index order.
            pub fn component(&self, i: usize, j: usize, k: usize) -> C64 {
                antisymmetric_component(&self.0, i, j, k)
            }

            pub fn eval(&self, x: &$vec, y: &$vec, z: &$vec) -> C64 {
                eval3(&self.0, x.as_slice(), y.as_slice(), z.as_slice())
            }

            pub fn interior(&self, v: &$vec) -> ExtForm {
                self.0.interior(v.as_slice())
            }

            pub fn scale(&self, s: C64) -> Self {
                Self(self.0.scale(s))
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self(self.0.sub(&other.0))
            }

            pub fn max_abs(&self) -> f64 {
                self.0.max_abs()
            }

            /// `(x, y, z) ↦ α(Ax, Ay, Az)`.
            pub fn pullback(&self, a: &$mat) -> Self {
                let cols: Vec<$vec> = (0..$dim).map(|i| a.column(i).into_owned()).collect();
                Self::from_tensor(|i, j, k| self.eval(&cols[i], &cols[j], &cols[k]))
            }

            /// `(x, y, z) ↦ α(Dx, y, z) + α(x, Dy, z) + α(x, y, Dz)`.
            pub fn infinitesimal_action(&self, d: &$mat) -> Self {
                Self::from_tensor(|i, j, k| {
                    let mut acc = ZERO;
                    for a in 0..$dim {
                        acc += d[(a, i)] * self.component(a, j, k)
                            + d[(a, j)] * self.component(i, a, k)
                            + d[(a, k)] * self.component(i, j, a);
                    }
                    acc
                })
            }
        }
    };
}

/// Antisymmetric 3-tensor on `C^7`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm7(ExtForm);

/// Antisymmetric 3-tensor on `C^6`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm6(ExtForm);

three_form_common!(ThreeForm7, 7, Vec7, Mat7);
three_form_common!(ThreeForm6, 6, Vec6, Mat6);

impl ThreeForm7 {
    /// Restriction to the span of six vectors, in that frame.
    pub fn restrict(&self, frame: &[Vec7; 6]) -> ThreeForm6 {
        ThreeForm6::from_tensor(|i, j, k| self.eval(&frame[i], &frame[j], &frame[k]))
    }
}

/// `q(v, w) = -1/6 · coefficient of (v⌟α)∧(w⌟α)∧α` against `θ_1∧…∧θ_7`.
pub fn q_form(alpha: &ThreeForm7, v: &Vec7, w: &Vec7) -> C64 {
    let vv = alpha.interior(v);
    let ww = alpha.interior(w);
    -vv.wedge(&ww).wedge(alpha.ext()).top() / 6.0
}

/// Matrix of `q` on the standard basis.
pub fn q_matrix(alpha: &ThreeForm7) -> Mat7 {
    let contractions: Vec<ExtForm> = (0..7).map(|i| alpha.interior(&Vec7::from_fn(|r, _| c((r == i) as u8 as f64)))).collect();
    let mut q = Mat7::zeros();
    for i in 0..7 {
        for j in i..7 {
            let v = -contractions[i].wedge(&contractions[j]).wedge(alpha.ext()).top() / 6.0;
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

/// Where `det q` sits, which decides how the principal cube root behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootBranch {
    /// `det q > 0`: the real positive cube root.
    RealPositive,
    /// `det q < 0`: principal root `|det q|^{1/3} e^{iπ/3}`.
    RealNegative,
    /// Nonreal `det q`: principal root.
    Complex,
    /// `det q = 0`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: C64,
    pub branch: RootBranch,
}

fn classify(det: C64, scale: f64) -> RootBranch {
    if det.norm() <= 1e-13 * scale {
        RootBranch::Zero
    } else if det.im.abs() <= 1e-12 * det.norm() {
        if det.re > 0.0 {
            RootBranch::RealPositive
        } else {
            RootBranch::RealNegative
        }
    } else {
        RootBranch::Complex
    }
}

/// `κ` with `det q = κ³`, principal branch.
pub fn kappa_invariant(alpha: &ThreeForm7) -> Kappa {
    let q = q_matrix(alpha);
    let det = q.determinant();
    let scale = alpha.max_abs().powi(21).max(f64::MIN_POSITIVE);
    let branch = classify(det, scale);
    let value = if branch == RootBranch::Zero { ZERO } else { linalg::cbrt_principal(det) };
    Kappa { value, branch }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    pub matrix: Mat7,
    pub kappa_root_choice: RootBranch,
}

impl MetricTensor {
    pub fn apply(&self, v: &Vec7, w: &Vec7) -> C64 {
        (v.transpose() * self.matrix * w)[(0, 0)]
    }
}

/// `g = q / κ^{1/3}`.
pub fn metric_from_form(alpha: &ThreeForm7) -> Result<MetricTensor> {
    let kappa = kappa_invariant(alpha);
    if kappa.branch == RootBranch::Zero {
        return Err(Error::DegenerateOrbit);
    }
    let q = q_matrix(alpha);
    let root = linalg::cbrt_principal(kappa.value);
    Ok(MetricTensor { matrix: q / root, kappa_root_choice: kappa.branch })
}

/// The vector `u` with `u ⌟ (θ_1∧…∧θ_7) = beta` for a 6-form `beta` on `C^7`.
pub fn psi_dual(beta: &ExtForm) -> Vec7 {
    assert_eq!(beta.dim(), 7);
    Vec7::from_vec(beta.hodge_vector())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KOperator {
    pub matrix: Mat6,
    pub s_value: C64,
}

impl KOperator {
    /// `|K² - s I|`, entrywise max.
    pub fn square_residual(&self) -> f64 {
        (self.matrix * self.matrix - Mat6::identity() * self.s_value).iter().fold(0.0, |a, z| a.max(z.norm()))
    }
}

/// `K_α` with the volume form `θ_1∧…∧θ_6`.
pub fn k_alpha(alpha: &ThreeForm6) -> KOperator {
    k_alpha_with_volume(alpha, ONE)
}

/// `K_α` where the trivialization of `Λ⁶` is `vol · θ_1∧…∧θ_6`.
pub fn k_alpha_with_volume(alpha: &ThreeForm6, vol: C64) -> KOperator {
    let mut k = Mat6::zeros();
    for i in 0..6 {
        let e = Vec6::from_fn(|r, _| c((r == i) as u8 as f64));
        let five = alpha.interior(&e).wedge(alpha.ext());
        let u = five.hodge_vector();
        for r in 0..6 {
            k[(r, i)] = u[r] / vol;
        }
    }
    let s_value = (k * k).trace() / 6.0;
    KOperator { matrix: k, s_value }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlusMinusSplit {
    pub sqrt_s: C64,
    pub plus: Vec<Vec6>,
    pub minus: Vec<Vec6>,
}

/// Eigenspaces of `K` for `±√s` (principal root).
pub fn plus_minus_split(k: &KOperator) -> Result<PlusMinusSplit> {
    let scale = k.matrix.iter().fold(0.0, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
    if k.s_value.norm() <= 1e-10 * scale * scale {
        return Err(Error::SplitDegenerate { s: k.s_value.norm() });
    }
    let r = linalg::sqrt_principal(k.s_value);
    let basis = |sign: f64| -> Vec<Vec6> {
        let p = (k.matrix + Mat6::identity() * (r * sign)) / (r * 2.0 * sign);
        let d = DMatrix::from_iterator(6, 6, p.iter().copied());
        linalg::column_basis(&d, 1e-8).iter().map(|v: &DVector<C64>| Vec6::from_iterator(v.iter().copied())).collect()
    };
    Ok(PlusMinusSplit { sqrt_s: r, plus: basis(1.0), minus: basis(-1.0) })
}

/// Standard symplectic form `θ1∧θ4 + θ2∧θ5 + θ3∧θ6` as a matrix.
pub fn standard_symplectic6() -> Mat6 {
    let mut w = Mat6::zeros();
    for i in 0..3 {
        w[(i, i + 3)] = ONE;
        w[(i + 3, i)] = -ONE;
    }
    w
}

/// `θ123 + θ456`, the `s ≠ 0` normal form.
pub fn split_normal_form6() -> ThreeForm6 {
    ThreeForm6::from_monomials(&[(1.0, [1, 2, 3]), (1.0, [4, 5, 6])])
}

/// `θ156 + θ264 + θ345`, representative of the open `s = 0` orbit.
pub fn nilpotent_normal_form6() -> ThreeForm6 {
    ThreeForm6::from_monomials(&[(1.0, [1, 5, 6]), (1.0, [2, 6, 4]), (1.0, [3, 4, 5])])
}

fn normal_form_head() -> [(f64, [usize; 3]); 6] {
    [
        (1.0, [1, 2, 5]),
        (-1.0, [3, 4, 5]),
        (1.0, [1, 3, 6]),
        (-1.0, [4, 2, 6]),
        (1.0, [1, 4, 7]),
        (-1.0, [2, 3, 7]),
    ]
}

/// Normal form of the 7-dimensional 3-form with last term `θ4∧θ6∧θ7`.
pub fn normal_form7_literal() -> ThreeForm7 {
    let mut t = normal_form_head().to_vec();
    t.push((1.0, [4, 6, 7]));
    ThreeForm7::from_monomials(&t)
}

/// Normal form of the 7-dimensional 3-form with last term `θ5∧θ6∧θ7`.
pub fn normal_form7_variant() -> ThreeForm7 {
    let mut t = normal_form_head().to_vec();
    t.push((1.0, [5, 6, 7]));
    ThreeForm7::from_monomials(&t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalFormChoice {
    Literal,
    Variant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormSelection {
    pub choice: NormalFormChoice,
    pub form: ThreeForm7,
    /// `max |g - I|` for the literal and the variant form (∞ when degenerate).
    pub literal_residual: f64,
    pub variant_residual: f64,
}

fn identity_residual(alpha: &ThreeForm7) -> f64 {
    match metric_from_form(alpha) {
        Ok(g) => linalg::max_abs(&(g.matrix - Mat7::identity())),
        Err(_) => f64::INFINITY,
    }
}

/// Picks the candidate normal form whose metric is the Euclidean identity.
pub fn select_normal_form() -> Result<NormalFormSelection> {
    let literal_residual = identity_residual(&normal_form7_literal());
    let variant_residual = identity_residual(&normal_form7_variant());
    let (choice, form) = if literal_residual <= variant_residual {
        (NormalFormChoice::Literal, normal_form7_literal())
    } else {
        (NormalFormChoice::Variant, normal_form7_variant())
    };
    if literal_residual.min(variant_residual) > crate::MEMBERSHIP_TOL {
        return Err(Error::DegenerateInput("neither normal form candidate yields the Euclidean metric"));
    }
    Ok(NormalFormSelection { choice, form, literal_residual, variant_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octonion::{assoc_form3, G2Algebra};
    use proptest::prelude::*;

    fn random_form7(seed: &[f64]) -> ThreeForm7 {
        let mut n = 0;
        let mut coeffs = [[[ZERO; 7]; 7]; 7];
        for i in 0..7 {
            for j in i + 1..7 {
                for k in j + 1..7 {
                    coeffs[i][j][k] = C64::new(seed[n], seed[n + 35]);
                    n += 1;
                }
            }
        }
        ThreeForm7::from_tensor(|i, j, k| coeffs[i][j][k])
    }

    fn random_form6(seed: &[f64]) -> ThreeForm6 {
        let mut n = 0;
        let mut coeffs = [[[ZERO; 6]; 6]; 6];
        for i in 0..6 {
            for j in i + 1..6 {
                for k in j + 1..6 {
                    coeffs[i][j][k] = C64::new(seed[n], seed[n + 20]);
                    n += 1;
                }
            }
        }
        ThreeForm6::from_tensor(|i, j, k| coeffs[i][j][k])
    }

    /// Oracle for `q`: expand `(v⌟α)∧(w⌟α)∧α` term by term over index sets.
    fn q_oracle(alpha: &ThreeForm7, a: usize, b: usize) -> C64 {
        // (e_a⌟α) = Σ_{j<k} α_{ajk} θ_jk ; top coefficient of θ_jk∧θ_lm∧θ_npq
        let mut acc = ZERO;
        let perm_sign = |idx: &[usize]| -> Option<f64> {
            let mut v = idx.to_vec();
            let mut s = 1.0;
            for i in 0..v.len() {
                for j in 0..v.len() - 1 - i {
                    if v[j] > v[j + 1] {
                        v.swap(j, j + 1);
                        s = -s;
                    } else if v[j] == v[j + 1] {
                        return None;
                    }
                }
            }
            (v == [0, 1, 2, 3, 4, 5, 6]).then_some(s)
        };
        for j in 0..7 {
            for k in j + 1..7 {
                for l in 0..7 {
                    for m in l + 1..7 {
                        for n in 0..7 {
                            for p in n + 1..7 {
                                for q in p + 1..7 {
                                    if let Some(s) = perm_sign(&[j, k, l, m, n, p, q]) {
                                        acc += alpha.component(a, j, k)
                                            * alpha.component(b, l, m)
                                            * alpha.component(n, p, q)
                                            * s;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        -acc / 6.0
    }

    #[test]
    fn q_of_assoc_form_is_identity() {
        let alpha = assoc_form3();
        let q = q_matrix(&alpha);
        for a in 0..7 {
            for b in 0..7 {
                assert!((q[(a, b)] - q_oracle(&alpha, a, b)).norm() < 1e-13);
            }
        }
        assert!(linalg::max_abs(&(q - Mat7::identity())) < 1e-13);
        let g = metric_from_form(&alpha).unwrap();
        assert!(linalg::max_abs(&(g.matrix - Mat7::identity())) < 1e-12);
        assert_eq!(g.kappa_root_choice, RootBranch::RealPositive);
    }

    #[test]
    fn zero_form_is_degenerate() {
        let z = ThreeForm7::zero();
        assert!(linalg::max_abs(&q_matrix(&z)) == 0.0);
        assert_eq!(kappa_invariant(&z).value, ZERO);
        assert_eq!(metric_from_form(&z), Err(Error::DegenerateOrbit));
        let k = k_alpha(&ThreeForm6::zero());
        assert_eq!(k.s_value, ZERO);
        assert!(k.matrix.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn kappa_scaling() {
        let alpha = assoc_form3();
        let r = kappa_invariant(&alpha.scale(c(2.0))).value / kappa_invariant(&alpha).value;
        assert!((r - c(128.0)).norm() < 1e-9);
    }

    #[test]
    fn normal_form_selection() {
        let sel = select_normal_form().unwrap();
        assert_eq!(sel.choice, NormalFormChoice::Variant);
        assert!(sel.variant_residual < 1e-9);
        assert!(sel.literal_residual > 0.1);
        // The literal form still lies in the open orbit.
        assert!(kappa_invariant(&normal_form7_literal()).value.norm() > 0.1);
    }

    #[test]
    fn metric_transformation_law() {
        // A with det 1
        let mut a = Mat7::from_fn(|r, q| C64::new(((r * 7 + q) as f64 * 0.37).sin() * 0.3, 0.0) + if r == q { ONE } else { ZERO });
        let scale = a.determinant().powf(1.0 / 7.0);
        a /= scale;
        assert!((a.determinant() - ONE).norm() < 1e-12);
        let alpha = assoc_form3();
        let moved = alpha.pullback(&a);
        // oracle: components by direct evaluation α(Ae_i, Ae_j, Ae_k)
        for (i, j, k) in [(0, 1, 2), (1, 3, 6), (0, 5, 6)] {
            let direct = crate::octonion::assoc_eval(&a.column(i).into_owned(), &a.column(j).into_owned(), &a.column(k).into_owned());
            assert!((moved.component(i, j, k) - direct).norm() < 1e-12);
        }
        let g = metric_from_form(&alpha).unwrap().matrix;
        let gm = metric_from_form(&moved).unwrap().matrix;
        assert!(linalg::max_abs(&(gm - a.transpose() * g * a)) < 1e-8);
    }

    #[test]
    fn g2_annihilates_assoc_form() {
        let alg = G2Algebra::new().unwrap();
        for d in &alg.basis {
            assert!(assoc_form3().infinitesimal_action(d).max_abs() < 1e-12);
        }
    }

    #[test]
    fn psi_examples() {
        let vol = ExtForm::monomial(7, &[0, 1, 2, 3, 4, 5, 6], ONE);
        let e1: Vec<C64> = (0..7).map(|i| c((i == 0) as u8 as f64)).collect();
        assert_eq!(psi_dual(&vol.interior(&e1)), Vec7::from_vec(e1.clone()));
        assert_eq!(psi_dual(&ExtForm::zero(7)), Vec7::zeros());
    }

    #[test]
    fn k_operator_normal_forms() {
        let k = k_alpha(&split_normal_form6());
        let want = Mat6::from_diagonal(&Vec6::from_iterator([1.0, 1.0, 1.0, -1.0, -1.0, -1.0].map(c)));
        assert_eq!(k.matrix, want);
        assert_eq!(k.s_value, ONE);
        let split = plus_minus_split(&k).unwrap();
        assert_eq!(split.plus.len(), 3);
        for v in &split.plus {
            assert!(v.rows(3, 3).norm() < 1e-12);
        }
        for v in &split.minus {
            assert!(v.rows(0, 3).norm() < 1e-12);
        }
        let w = standard_symplectic6();
        for side in [&split.plus, &split.minus] {
            for x in side.iter() {
                for y in side.iter() {
                    assert!((x.transpose() * w * y)[(0, 0)].norm() < 1e-9);
                }
            }
        }

        let nil = k_alpha(&nilpotent_normal_form6());
        assert!(nil.s_value.norm() < 1e-14);
        assert!((nil.matrix * nil.matrix).iter().all(|z| z.norm() < 1e-14));
        assert!(nil.matrix.iter().any(|z| z.norm() > 0.5));
        assert!(matches!(plus_minus_split(&nil), Err(Error::SplitDegenerate { .. })));
    }

    #[test]
    fn restriction_of_split_form_to_plus_space() {
        let alpha = split_normal_form6();
        let split = plus_minus_split(&k_alpha(&alpha)).unwrap();
        let p = &split.plus;
        assert!(alpha.eval(&p[0], &p[1], &p[2]).norm() > 0.5);
    }

    proptest! {
        #[test]
        fn q_is_symmetric(seed in prop::collection::vec(-1.0f64..1.0, 70), v in prop::array::uniform7(-1.0f64..1.0), w in prop::array::uniform7(-1.0f64..1.0)) {
            let alpha = random_form7(&seed);
            let v = Vec7::from_iterator(v.map(c));
            let w = Vec7::from_iterator(w.map(c));
            prop_assert!((q_form(&alpha, &v, &w) - q_form(&alpha, &w, &v)).norm() < 1e-12);
        }

        #[test]
        fn alpha_antisymmetry(x in prop::array::uniform7(-1.0f64..1.0), z in prop::array::uniform7(-1.0f64..1.0)) {
            let x = Vec7::from_iterator(x.map(c));
            let z = Vec7::from_iterator(z.map(c));
            prop_assert!(assoc_form3().eval(&x, &x, &z).norm() < 1e-14);
        }

        #[test]
        fn k_squares_to_scalar(seed in prop::collection::vec(-1.0f64..1.0, 40)) {
            let k = k_alpha(&random_form6(&seed));
            let scale = k.matrix.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(1.0);
            prop_assert!(k.square_residual() < 1e-8 * scale * scale);
            if k.s_value.norm() > 1e-6 {
                let split = plus_minus_split(&k).unwrap();
                prop_assert_eq!(split.plus.len(), 3);
                prop_assert_eq!(split.minus.len(), 3);
            }
        }

        #[test]
        fn psi_is_linear(b in prop::collection::vec(-1.0f64..1.0, 14), s in -3.0f64..3.0) {
            let mut beta = ExtForm::zero(7);
            for i in 0..7 {
                beta.set_coeff(0x7f & !(1 << i), C64::new(b[i], b[i + 7]));
            }
            let lhs = psi_dual(&beta.scale(c(s)));
            let rhs = psi_dual(&beta) * c(s);
            prop_assert!((lhs - rhs).norm() < 1e-14);
        }
    }
}

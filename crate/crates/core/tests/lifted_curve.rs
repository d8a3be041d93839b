//! Monodromy of the eigenvalues of `A(ζ)` around `ζ = 0`, `ζ = ∞` and a
//! zero of `a2`, by continuation along circles.

use g2spectral::laurent::poly_roots;
use g2spectral::linalg::eigenvalues7;
use g2spectral::loop_algebra::KillingField;
use g2spectral::octonion::G2Algebra;
use g2spectral::spectral::spectral_coefficients;
use g2spectral::C64;

const STEPS: usize = 6000;

/// Eigenvalues tracked once around `center + radius·e^{iθ}`; returns the
/// number of eigenvalues that end on a different branch.
fn moved_after_loop(a: &KillingField, center: C64, radius: f64) -> usize {
    let at = |t: f64| eigenvalues7(&a.evaluate(center + C64::from_polar(radius, t)).unwrap());
    let start = at(0.0);
    let mut cur = start.clone();
    for i in 1..=STEPS {
        let next = at(std::f64::consts::TAU * i as f64 / STEPS as f64);
        let mut used = [false; 7];
        let mut matched = cur.clone();
        for (slot, m) in cur.iter().zip(matched.iter_mut()) {
            let j = (0..7)
                .filter(|j| !used[*j])
                .min_by(|p, q| (next[*p] - slot).norm().total_cmp(&(next[*q] - slot).norm()))
                .unwrap();
            used[j] = true;
            *m = next[j];
        }
        cur = matched;
    }
    let scale = start.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    start.iter().zip(&cur).filter(|(s, e)| (*s - *e).norm() > 1e-6 * scale).count()
}

/// `ζ`-plane zeros of `b2(ζ⁶)` and `Δ2(ζ⁶)`, i.e. all finite branch points.
fn zeta_branch_points(a: &KillingField) -> (Vec<C64>, Vec<C64>) {
    let s = spectral_coefficients(a).unwrap();
    let lift = |p: &g2spectral::laurent::Laurent| -> Vec<C64> {
        let t = p.trim(1e-13 * p.max_abs());
        let mut out = Vec::new();
        for l in poly_roots(&t.shifted_poly()).into_iter().filter(|r| r.norm() > 0.0) {
            for m in 0..6 {
                out.push(C64::from_polar(l.norm().powf(1.0 / 6.0), (l.arg() + std::f64::consts::TAU * m as f64) / 6.0));
            }
        }
        out
    };
    (lift(&s.b2), lift(&s.delta2()))
}

#[test]
fn lifted_curve_is_unramified_over_zero_and_infinity() {
    let alg = G2Algebra::new().unwrap();
    for (k, seed) in [(0usize, 1u64), (0, 2), (1, 3)] {
        let a = alg.random_field(k, seed);
        let (b2z, d2z) = zeta_branch_points(&a);
        let all: Vec<C64> = b2z.iter().chain(&d2z).copied().collect();
        let rmin = all.iter().fold(f64::INFINITY, |m, z| m.min(z.norm()));
        let rmax = all.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert_eq!(moved_after_loop(&a, C64::new(0.0, 0.0), 0.5 * rmin), 0, "k={k} seed={seed} at 0");
        assert_eq!(moved_after_loop(&a, C64::new(0.0, 0.0), 2.0 * rmax), 0, "k={k} seed={seed} at inf");
    }
}

#[test]
fn zero_of_a2_permutes_three_pairs() {
    // control for the tracker: three transpositions among the six nonzero eigenvalues
    let alg = G2Algebra::new().unwrap();
    let a = alg.random_field(0, 1);
    let (b2z, d2z) = zeta_branch_points(&a);
    let z0 = b2z[0];
    let gap = b2z.iter().chain(&d2z).filter(|z| (**z - z0).norm() > 1e-9).fold(f64::INFINITY, |m, z| m.min((z - z0).norm()));
    assert_eq!(moved_after_loop(&a, z0, 0.3 * gap.min(z0.norm())), 6);
    let w0 = d2z[0];
    let gap = b2z.iter().chain(&d2z).filter(|z| (**z - w0).norm() > 1e-9).fold(f64::INFINITY, |m, z| m.min((z - w0).norm()));
    // two transpositions at a zero of Δ2
    assert_eq!(moved_after_loop(&a, w0, 0.3 * gap.min(w0.norm())), 4);
}

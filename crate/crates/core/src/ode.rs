//! Dormand–Prince 5(4) with step-size control on real state vectors.

#[allow(unused_imports)]
use num_traits::Float as _;

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Initial step; `None` picks one from the first derivative.
    pub h0: Option<f64>,
    /// Relative to `|t_end - t0|`.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { atol: tol, rtol: tol, h0: None, h_min_rel: 1e-14, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Underflow {
    pub t: f64,
    pub h: f64,
    pub last_good: Vec<f64>,
    /// Outputs reached before the failure.
    pub outputs: Vec<(f64, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus the embedded fourth-order ones
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..out.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `y' = f(t, y)` from `t0` and returns the state at each time in
/// `outputs` (monotone in the direction of integration). Steps are shortened
/// to land on output times exactly.
pub fn dopri5<F>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<(f64, Vec<f64>)>, OdeStats), Underflow>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(outputs.len());
    let t_end = outputs.last().copied().unwrap_or(t0);
    let span = (t_end - t0).abs();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    f(t, &y, &mut k1);
    stats.evaluations += 1;

    let norm = |v: &[f64], s: &[f64]| -> f64 {
        if v.is_empty() {
            return 0.0;
        }
        (v.iter().zip(s).map(|(a, b)| (a / b) * (a / b)).sum::<f64>() / v.len() as f64).sqrt()
    };
    let mut h = match opts.h0 {
        Some(h) => h.abs(),
        None => {
            let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
            let (d0, d1) = (norm(&y, &sc), norm(&k1, &sc));
            let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h.min(span.max(f64::MIN_POSITIVE))
        }
    };
    let h_min = opts.h_min_rel * span.max(1.0);
    let mut next_out = 0;
    while next_out < outputs.len() && (outputs[next_out] - t) * dir <= 0.0 {
        out.push((outputs[next_out], y.clone()));
        next_out += 1;
    }

    while next_out < outputs.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Underflow { t, h, last_good: y, outputs: out });
        }
        let target = outputs[next_out];
        let remaining = (target - t).abs();
        let landing = h >= remaining;
        let hs = if landing { remaining } else { h } * dir;

        axpy(&mut tmp, &y, hs, &[(A21, &k1)]);
        f(t + C2 * hs, &tmp, &mut k2);
        axpy(&mut tmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * hs, &tmp, &mut k3);
        axpy(&mut tmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * hs, &tmp, &mut k4);
        axpy(&mut tmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * hs, &tmp, &mut k5);
        axpy(&mut tmp, &y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(t + hs, &tmp, &mut k6);
        axpy(&mut ynew, &y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        f(t + hs, &ynew, &mut k7);
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = if n == 0 { 0.0 } else { (err / n as f64).sqrt() };

        if err <= 1.0 {
            stats.accepted += 1;
            t = if landing { target } else { t + hs };
            core::mem::swap(&mut y, &mut ynew);
            core::mem::swap(&mut k1, &mut k7);
            while next_out < outputs.len() && (outputs[next_out] - t) * dir <= 0.0 {
                out.push((outputs[next_out], y.clone()));
                next_out += 1;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // a short landing step says nothing about the natural step size
            if !landing || hs.abs() >= h {
                h *= fac;
            }
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < h_min {
                return Err(Underflow { t, h, last_good: y, outputs: out });
            }
        }
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let outs: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let (traj, stats) = dopri5(f, 0.0, &[1.0, 0.0], &outs, &OdeOptions::with_tol(1e-11)).unwrap();
        assert_eq!(traj.len(), 11);
        for (t, y) in &traj {
            assert!((y[0] - t.cos()).abs() < 1e-8, "t={t}");
            assert!((y[1] + t.sin()).abs() < 1e-8);
        }
        assert!(stats.accepted > 10);
    }

    #[test]
    fn backwards_matches_forwards() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * y[0];
        let (fw, _) = dopri5(f, 0.0, &[1.0], &[1.0], &OdeOptions::with_tol(1e-12)).unwrap();
        let (bw, _) = dopri5(f, 1.0, &fw[0].1, &[0.0], &OdeOptions::with_tol(1e-12)).unwrap();
        assert!((bw[0].1[0] - 1.0).abs() < 1e-9);
        assert!((fw[0].1[0] - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y², y(0) = 1 blows up at t = 1
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0];
        let mut o = OdeOptions::with_tol(1e-10);
        o.h_min_rel = 1e-12;
        let e = dopri5(f, 0.0, &[1.0], &[0.5, 2.0], &o).unwrap_err();
        assert!(e.t > 0.9 && e.t < 1.0);
        assert_eq!(e.outputs.len(), 1);
        assert!((e.outputs[0].1[0] - 2.0).abs() < 1e-8);
    }
}

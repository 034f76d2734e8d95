//! Adaptive Dormand–Prince 5(4) propagation of `ψ'' = (V(r) - E) ψ`.
//!
//! Alongside `(ψ, ψ')` the propagator accumulates `∫ψ² dr` and `∫r²ψ² dr`
//! over the traversed interval and counts sign changes of ψ. When `(ψ, ψ')`
//! grows past [`RESCALE_THRESHOLD`] the state is divided by a common positive
//! factor whose logarithm is tracked in `log_scale`, so log-derivatives and
//! ratios are unaffected.

use crate::error::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-11;
pub const RESCALE_THRESHOLD: f64 = 1e100;
const MAX_STEPS: usize = 20_000_000;

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [f64; 4];

/// End state of a propagation. True values are `exp(log_scale)` times the
/// stored `(psi, dpsi)` and `exp(2 log_scale)` times the stored integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub r: f64,
    pub psi: f64,
    pub dpsi: f64,
    pub log_scale: f64,
    /// Sign changes of ψ strictly between the endpoints.
    pub nodes: u32,
    /// `∫ψ² dr` over the traversed interval (non-negative).
    pub norm: f64,
    /// `∫r²ψ² dr` over the traversed interval (non-negative).
    pub r2_moment: f64,
    pub steps: usize,
}

/// One recorded point `(r, ψ, ψ', log_scale)`.
pub type Sample = (f64, f64, f64, f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub rtol: f64,
}

impl Default for Propagator {
    fn default() -> Self {
        Self { rtol: DEFAULT_RTOL }
    }
}

impl Propagator {
    pub fn new(rtol: f64) -> Self {
        Self { rtol }
    }

    /// Propagate from `r0` to `r1` (either direction) in a region where `v`
    /// is smooth.
    #[allow(clippy::too_many_arguments)]
    pub fn propagate<V: Fn(f64) -> f64>(
        &self,
        v: &V,
        energy: f64,
        r0: f64,
        r1: f64,
        psi0: f64,
        dpsi0: f64,
        mut recorder: Option<&mut Vec<Sample>>,
    ) -> Result<Propagation> {
        let mut y: State = [psi0, dpsi0, 0.0, 0.0];
        let mut r = r0;
        let mut log_scale = 0.0;
        let mut nodes = 0;
        let mut last_sign = psi0.signum() * (psi0 != 0.0) as i32 as f64;
        let direction = (r1 - r0).signum();
        let span = (r1 - r0).abs();
        let mut steps = 0;
        if let Some(rec) = recorder.as_deref_mut() {
            rec.push((r, y[0], y[1], log_scale));
        }
        if span == 0.0 {
            return Ok(self.finish(r, y, log_scale, nodes, direction, steps));
        }

        let r_floor = span * 1e-6;
        let local_k = |r: f64| ((v(r) - energy).abs().sqrt()).max(1.0 / r.abs().max(r_floor));
        let mut h = direction * (0.02 / local_k(r0)).min(span);
        let deriv = |r: f64, y: &State| -> State {
            [y[1], (v(r) - energy) * y[0], y[0] * y[0], r * r * y[0] * y[0]]
        };
        let mut k1 = deriv(r, &y);

        while (r1 - r) * direction > 0.0 {
            if steps >= MAX_STEPS {
                return Err(Error::StepUnderflow { r });
            }
            let remaining = r1 - r;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            let mut k = [[0.0; 4]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for c in 0..4 {
                            ys[c] += h * a * kj[c];
                        }
                    }
                }
                k[s] = deriv(r + C[s] * h, &ys);
            }
            let mut y_new = y;
            let mut err = [0.0; 2];
            for c in 0..4 {
                let mut incr = 0.0;
                for s in 0..7 {
                    incr += B[s] * k[s][c];
                }
                y_new[c] += h * incr;
            }
            for (c, e) in err.iter_mut().enumerate() {
                let mut acc = 0.0;
                for s in 0..7 {
                    acc += E[s] * k[s][c];
                }
                *e = h * acc;
            }
            let kl = local_k(r + h);
            let amplitude = (y[0].abs() + y[1].abs() / kl).max(y_new[0].abs() + y_new[1].abs() / kl);
            let scale = self.rtol * amplitude + f64::MIN_POSITIVE;
            let ratio = (err[0].abs() + err[1].abs() / kl) / scale;

            if ratio <= 1.0 {
                r = if last { r1 } else { r + h };
                y = y_new;
                k1 = k[6];
                steps += 1;
                if y[0] != 0.0 {
                    let sign = y[0].signum();
                    if last_sign != 0.0 && sign != last_sign {
                        nodes += 1;
                    }
                    last_sign = sign;
                }
                let magnitude = y[0].abs() + y[1].abs() / kl;
                if magnitude > RESCALE_THRESHOLD {
                    let inv = 1.0 / magnitude;
                    y[0] *= inv;
                    y[1] *= inv;
                    y[2] *= inv * inv;
                    y[3] *= inv * inv;
                    for (c, kc) in k1.iter_mut().enumerate() {
                        *kc *= if c < 2 { inv } else { inv * inv };
                    }
                    log_scale += magnitude.ln();
                }
                if let Some(rec) = recorder.as_deref_mut() {
                    rec.push((r, y[0], y[1], log_scale));
                }
                if last {
                    break;
                }
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h.abs() < 1e-14 * r.abs().max(span * 1e-3) {
                return Err(Error::StepUnderflow { r });
            }
        }
        Ok(self.finish(r, y, log_scale, nodes, direction, steps))
    }

    fn finish(&self, r: f64, y: State, log_scale: f64, nodes: u32, direction: f64, steps: usize) -> Propagation {
        Propagation {
            r,
            psi: y[0],
            dpsi: y[1],
            log_scale,
            nodes,
            norm: direction * y[2],
            r2_moment: direction * y[3],
            steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_decay_stays_exponential() {
        let kappa = 1.3;
        let p = Propagator::default();
        let out = p
            .propagate(&|_| 0.0, -kappa * kappa, 20.0, 1.0, 1.0, -kappa, None)
            .unwrap();
        let expected = (kappa * 19.0f64).exp();
        let got = out.psi * out.log_scale.exp();
        assert_relative_eq!(got, expected, max_relative = 1e-8);
        assert_relative_eq!(out.dpsi / out.psi, -kappa, max_relative = 1e-10);
    }

    #[test]
    fn harmonic_nodes_and_norm() {
        // ψ = sin(r) on [0, 9.5π]: sign changes at kπ, k = 1..9.
        let p = Propagator::default();
        let end = 9.5 * std::f64::consts::PI;
        let out = p.propagate(&|_| 0.0, 1.0, 0.0, end, 0.0, 1.0, None).unwrap();
        assert_eq!(out.nodes, 9);
        assert_relative_eq!(out.psi, end.sin(), epsilon = 1e-9);
        // ∫ sin² = r/2 - sin(2r)/4
        assert_relative_eq!(out.norm, end / 2.0 - (2.0 * end).sin() / 4.0, max_relative = 1e-9);
    }

    #[test]
    fn rescaling_preserves_log_derivative() {
        let kappa = 40.0;
        let p = Propagator::default();
        let out = p.propagate(&|_| 0.0, -kappa * kappa, 20.0, 0.0, 1.0, -kappa, None).unwrap();
        assert!(out.log_scale > 600.0);
        assert_relative_eq!(out.dpsi / out.psi, -kappa, max_relative = 1e-9);
        assert_relative_eq!(out.log_scale + out.psi.ln(), kappa * 20.0, max_relative = 1e-9);
    }

    #[test]
    fn reversal_recovers_initial_data() {
        let v = |r: f64| -1.0 / r.powi(4);
        let p = Propagator::default();
        let fwd = p.propagate(&v, -0.3, 0.5, 3.0, 0.2, 1.0, None).unwrap();
        let back = p
            .propagate(&v, -0.3, 3.0, 0.5, fwd.psi, fwd.dpsi, None)
            .unwrap();
        let s = (fwd.log_scale + back.log_scale).exp();
        assert_relative_eq!(back.psi * s, 0.2, max_relative = 1e-8);
        assert_relative_eq!(back.dpsi * s, 1.0, max_relative = 1e-8);
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Trigonometric interpolant of `N` equispaced samples `f(2 pi k / N)`.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    /// Coefficients of `e^{ik theta}` for `k = 0, 1, ..`.
    pos: Vec<Complex64>,
    /// Coefficients of `e^{-ik theta}` for `k = 1, 2, ..`.
    neg: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(samples: &[Complex64]) -> Self {
        let n = samples.len();
        assert!(n >= 2, "need at least two samples");
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let half = n / 2;
        let zero = Complex64::new(0.0, 0.0);
        let mut pos = vec![zero; half + 1];
        let mut neg = vec![zero; half];
        for (k, c) in buf.into_iter().enumerate() {
            let c = c * scale;
            if n.is_multiple_of(2) && k == half {
                // split the Nyquist term so real data interpolates to a real function
                pos[half] = c * 0.5;
                neg[half - 1] = c * 0.5;
            } else if k > half {
                neg[n - k - 1] = c;
            } else {
                pos[k] = c;
            }
        }
        let peak = pos.iter().chain(&neg).map(|c| c.norm()).fold(0.0, f64::max);
        let tiny = |c: &Complex64| c.norm() <= 1e-17 * peak;
        while pos.len() > 1 && pos.last().is_some_and(tiny) {
            pos.pop();
        }
        while neg.last().is_some_and(tiny) {
            neg.pop();
        }
        Self { pos, neg }
    }

    pub fn from_real(samples: &[f64]) -> Self {
        let s: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(&s)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, theta);
        let zero = Complex64::new(0.0, 0.0);
        let p = self.pos.iter().rev().fold(zero, |acc, &c| acc * e + c);
        let q = self.neg.iter().rev().fold(zero, |acc, &c| acc * e.conj() + c);
        p + q * e.conj()
    }

    pub fn eval_real(&self, theta: f64) -> f64 {
        self.eval(theta).re
    }

    pub fn n_modes(&self) -> usize {
        self.pos.len() + self.neg.len()
    }
}

/// Sample angles `2 pi k / n`.
pub fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| 2.0 * PI * k as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_trig_polynomial() {
        let f = |t: f64| Complex64::new(1.0 + (3.0 * t).cos(), (-5.0 * t).sin() * 0.5);
        let samples: Vec<_> = grid(32).map(f).collect();
        let p = TrigInterpolant::new(&samples);
        for t in [0.1, 1.3, 2.9, 5.0] {
            assert!((p.eval(t) - f(t)).norm() < 1e-14);
        }
    }

    #[test]
    fn spectrally_accurate_for_smooth_data() {
        let f = |t: f64| 1.0 / (1.2 - t.cos());
        let samples: Vec<f64> = grid(128).map(f).collect();
        let p = TrigInterpolant::from_real(&samples);
        for t in [0.05, 0.77, 3.3] {
            assert!((p.eval_real(t) - f(t)).abs() < 1e-11);
        }
    }
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeState;

/// Which Jost solution, fixed by its behaviour at one end of the lattice:
/// `phi ~ z^n (1,0)` and `phi* ~ z^{-n} (0,1)` to the left,
/// `psi ~ z^{-n} (0,1)` and `psi* ~ z^n (1,0)` to the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JostKind {
    Phi,
    PhiStar,
    Psi,
    PsiStar,
}

/// A Jost solution tabulated on `n_min ..= n_max + 1`. Outside that range it
/// is the free solution and [`JostSolution::value`] extends it exactly.
///
/// Values are unscaled powers of `z`, so this is meant for `|z|` near one or
/// modest windows; the scattering coefficients use a rescaled recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct JostSolution {
    pub z: Complex64,
    pub kind: JostKind,
    n_first: i64,
    values: Vec<[Complex64; 2]>,
}

fn zpow(z: Complex64, n: i64) -> Complex64 {
    z.powi(n as i32)
}

impl JostSolution {
    pub fn compute(kind: JostKind, z: Complex64, state: &LatticeState) -> Result<Self> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroSpectralParameter);
        }
        let zero = Complex64::new(0.0, 0.0);
        let zi = z.inv();
        let amps = state.amplitudes();
        let len = amps.len() + 1;
        let mut values = vec![[zero; 2]; len];
        match kind {
            JostKind::Phi | JostKind::PhiStar => {
                values[0] = if kind == JostKind::Phi {
                    [zpow(z, state.n_min()), zero]
                } else {
                    [zero, zpow(z, -state.n_min())]
                };
                for (k, r) in amps.iter().enumerate() {
                    let [x, y] = values[k];
                    values[k + 1] = [z * x - r.conj() * y, r * x + zi * y];
                }
            }
            JostKind::Psi | JostKind::PsiStar => {
                let last = state.n_max() + 1;
                values[len - 1] = if kind == JostKind::Psi {
                    [zero, zpow(z, -last)]
                } else {
                    [zpow(z, last), zero]
                };
                for (k, r) in amps.iter().enumerate().rev() {
                    let [x, y] = values[k + 1];
                    let d = 1.0 + r.norm_sqr();
                    values[k] = [(zi * x + r.conj() * y) / d, (z * y - r * x) / d];
                }
            }
        }
        Ok(Self {
            z,
            kind,
            n_first: state.n_min(),
            values,
        })
    }

    pub fn n_first(&self) -> i64 {
        self.n_first
    }

    pub fn n_last(&self) -> i64 {
        self.n_first + self.values.len() as i64 - 1
    }

    /// Value at any site, using the free recursion beyond the table.
    pub fn value(&self, n: i64) -> [Complex64; 2] {
        let z = self.z;
        if n < self.n_first {
            let [x, y] = self.values[0];
            return [x * zpow(z, n - self.n_first), y * zpow(z, self.n_first - n)];
        }
        if n > self.n_last() {
            let [x, y] = self.values[self.values.len() - 1];
            let k = n - self.n_last();
            return [x * zpow(z, k), y * zpow(z, -k)];
        }
        self.values[(n - self.n_first) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::compute_ab;

    fn state() -> LatticeState {
        LatticeState::from_fn(-3, 4, 0.0, |n| Complex64::new(0.3 / (1.0 + (n * n) as f64), 0.2 * (n as f64).sin()))
            .unwrap()
    }

    #[test]
    fn boundary_behaviour() {
        let s = state();
        let z = Complex64::from_polar(1.0, 0.7);
        let phi = JostSolution::compute(JostKind::Phi, z, &s).unwrap();
        for n in -8..=-3 {
            let v = phi.value(n);
            assert!((v[0] - z.powi(n as i32)).norm() < 1e-14 && v[1].norm() < 1e-15);
        }
        let psi = JostSolution::compute(JostKind::Psi, z, &s).unwrap();
        for n in 5..=9 {
            let v = psi.value(n);
            assert!(v[0].norm() < 1e-15 && (v[1] - z.powi(-(n as i32))).norm() < 1e-14);
        }
    }

    #[test]
    fn phi_decomposes_on_right_basis() {
        let s = state();
        for theta in [0.1, 1.3, 2.9, 4.4] {
            let z = Complex64::from_polar(1.0, theta);
            let (a, b) = compute_ab(z, &s).unwrap();
            let phi = JostSolution::compute(JostKind::Phi, z, &s).unwrap();
            let psi = JostSolution::compute(JostKind::Psi, z, &s).unwrap();
            let psis = JostSolution::compute(JostKind::PsiStar, z, &s).unwrap();
            for n in -5..=7 {
                let (p, q, r) = (phi.value(n), psi.value(n), psis.value(n));
                for c in 0..2 {
                    assert!((p[c] - (b * q[c] + a * r[c])).norm() < 1e-12, "n={n}");
                }
            }
        }
    }

    #[test]
    fn star_solutions_are_free_at_their_end() {
        let s = state();
        let z = Complex64::new(1.3, 0.4);
        let ps = JostSolution::compute(JostKind::PhiStar, z, &s).unwrap();
        assert!((ps.value(-6)[1] - z.powi(6)).norm() < 1e-12);
        let qs = JostSolution::compute(JostKind::PsiStar, z, &s).unwrap();
        assert!((qs.value(7)[0] - z.powi(7)).norm() < 1e-12);
    }
}

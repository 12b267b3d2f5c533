//! Zeros of `a(z)` in `1 + eps0 <= |z| <= r_max`.
//!
//! `a` is even in `z`, so only the half plane `Re z >= 0` is searched, in
//! log-polar coordinates `w = ln|z| + i arg z`. Cells are subdivided until
//! their winding number is 0 or 1; simple zeros are then polished by Newton.
//! The total count is cross-checked against the winding of `a` on the two
//! bounding circles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{a_derivative, canonical, scaled_phi_right, ScatterConfig};
use crate::error::{AssumptionKind, Error, Result};
use crate::lattice::LatticeState;
use crate::numerics::winding::arg_increment_above;

const MIN_CELL: f64 = 1e-6;
const NEWTON_TOL: f64 = 1e-12;
const SPLITS: [f64; 4] = [0.5137, 0.4311, 0.5733, 0.4712];

#[derive(Debug, Clone, Copy)]
struct Cell {
    rho: (f64, f64),
    theta: (f64, f64),
}

impl Cell {
    fn contains(&self, z: Complex64) -> bool {
        let (r, t) = (z.norm().ln(), z.arg());
        let mr = 1e-9 * (1.0 + self.rho.1.abs());
        let mt = 1e-9;
        r >= self.rho.0 - mr && r <= self.rho.1 + mr && t >= self.theta.0 - mt && t <= self.theta.1 + mt
    }

    fn center(&self) -> Complex64 {
        let r = 0.5 * (self.rho.0 + self.rho.1);
        let t = 0.5 * (self.theta.0 + self.theta.1);
        Complex64::from_polar(r.exp(), t)
    }

    fn split(&self, f: f64) -> [Cell; 4] {
        let rm = self.rho.0 + f * (self.rho.1 - self.rho.0);
        let tm = self.theta.0 + f * (self.theta.1 - self.theta.0);
        [
            Cell { rho: (self.rho.0, rm), theta: (self.theta.0, tm) },
            Cell { rho: (rm, self.rho.1), theta: (self.theta.0, tm) },
            Cell { rho: (self.rho.0, rm), theta: (tm, self.theta.1) },
            Cell { rho: (rm, self.rho.1), theta: (tm, self.theta.1) },
        ]
    }

    fn small(&self) -> bool {
        self.rho.1 - self.rho.0 < MIN_CELL && self.theta.1 - self.theta.0 < MIN_CELL
    }
}

fn round_winding(total: f64) -> Result<i64> {
    let w = total / (2.0 * PI);
    let k = w.round();
    if (w - k).abs() > 0.05 {
        return Err(Error::RootSearch(format!("non-integer winding {w}")));
    }
    Ok(k as i64)
}

fn circle_winding<F: Fn(Complex64) -> Complex64>(a: &F, radius: f64, floor: f64) -> Result<i64> {
    let g = |s: f64| a(Complex64::from_polar(radius, s));
    round_winding(arg_increment_above(&g, 0.0, 2.0 * PI, 64, floor)?)
}

fn cell_winding<F: Fn(Complex64) -> Complex64>(a: &F, c: &Cell, floor: f64) -> Result<i64> {
    let at = |r: f64, t: f64| a(Complex64::from_polar(r.exp(), t));
    let (r0, r1) = c.rho;
    let (t0, t1) = c.theta;
    let mut total = 0.0;
    total += arg_increment_above(&|s: f64| at(r0 + s * (r1 - r0), t0), 0.0, 1.0, 4, floor)?;
    total += arg_increment_above(&|s: f64| at(r1, t0 + s * (t1 - t0)), 0.0, 1.0, 4, floor)?;
    total += arg_increment_above(&|s: f64| at(r1 - s * (r1 - r0), t1), 0.0, 1.0, 4, floor)?;
    total += arg_increment_above(&|s: f64| at(r0, t1 - s * (t1 - t0)), 0.0, 1.0, 4, floor)?;
    round_winding(total)
}

fn newton(state: &LatticeState, z0: Complex64) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..60 {
        let a = scaled_phi_right(z, state)[0];
        if a.norm() <= NEWTON_TOL {
            return Some(z);
        }
        let da = a_derivative(z, state);
        if da.norm() == 0.0 {
            return None;
        }
        z -= a / da;
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() < 1e-3 {
            return None;
        }
    }
    (scaled_phi_right(z, state)[0].norm() <= 10.0 * NEWTON_TOL).then_some(z)
}

/// Canonical eigenvalues with [`ScatterConfig::default`].
pub fn find_eigenvalues(state: &LatticeState) -> Result<Vec<Complex64>> {
    find_eigenvalues_with(state, &ScatterConfig::default())
}

/// Canonical representatives of the zeros of `a` with `|z| > 1`, unsorted.
///
/// Returns `AssumptionViolated(ZeroOnCircle)` if zeros lie within `eps0` of
/// the unit circle and `AssumptionViolated(DoubleZero)` if a zero cannot be
/// isolated down to cells of size `1e-6`.
pub fn find_eigenvalues_with(state: &LatticeState, cfg: &ScatterConfig) -> Result<Vec<Complex64>> {
    let a = |z: Complex64| scaled_phi_right(z, state)[0];
    // |a|^2 <= c_inf on the circle; values below this are rounding noise
    let floor = 1e-13 * crate::lattice::conserved_product(state).sqrt();
    let near = |e: Error| match e {
        Error::RootSearch(_) => Error::AssumptionViolated(AssumptionKind::ZeroOnCircle),
        other => other,
    };
    // a(z) ~ 1 at infinity, so the winding on |z| = rho is minus the number
    // of zeros outside rho.
    let w_in = circle_winding(&a, 1.0 - cfg.eps0, floor).map_err(near)?;
    let w_out = circle_winding(&a, 1.0 + cfg.eps0, floor).map_err(near)?;
    if w_out != w_in {
        return Err(Error::AssumptionViolated(AssumptionKind::ZeroOnCircle));
    }
    let w_max = circle_winding(&a, cfg.r_max, floor)?;
    let expected = w_max - w_out;
    if expected == 0 {
        return Ok(Vec::new());
    }

    let root = Cell {
        rho: ((1.0 + cfg.eps0).ln(), cfg.r_max.ln()),
        theta: (-0.5 * PI - 0.0213, 0.5 * PI + 0.0377),
    };
    let mut found: Vec<Complex64> = Vec::new();
    let mut stack = vec![(root, cell_winding(&a, &root, floor)?)];
    while let Some((cell, w)) = stack.pop() {
        match w {
            0 => continue,
            w if w < 0 => return Err(Error::RootSearch("negative winding".into())),
            1 => {
                if let Some(z) = newton(state, cell.center()).filter(|z| cell.contains(*z)) {
                    found.push(z);
                    continue;
                }
            }
            _ => {}
        }
        if cell.small() {
            return Err(if w >= 2 {
                Error::AssumptionViolated(AssumptionKind::DoubleZero)
            } else {
                Error::RootSearch("Newton failed in an isolated cell".into())
            });
        }
        let mut children = None;
        for f in SPLITS {
            let parts = cell.split(f);
            let wind: Result<Vec<i64>> = parts.iter().map(|c| cell_winding(&a, c, floor)).collect();
            if let Ok(ws) = wind {
                if ws.iter().sum::<i64>() == w {
                    children = Some(parts.into_iter().zip(ws));
                    break;
                }
            }
        }
        // a cell holding two or more zeros that cannot be separated without
        // running into rounding noise is a multiple zero for our purposes
        let children = children.ok_or_else(|| {
            if w >= 2 {
                Error::AssumptionViolated(AssumptionKind::DoubleZero)
            } else {
                Error::RootSearch("cannot subdivide search cell".into())
            }
        })?;
        stack.extend(children);
    }

    let mut roots: Vec<Complex64> = Vec::new();
    for z in found.into_iter().map(canonical) {
        if !roots.iter().any(|r| (r - z).norm() <= 1e-9 * z.norm()) {
            roots.push(z);
        }
    }
    if 2 * roots.len() as i64 != expected {
        return Err(Error::RootSearch(format!(
            "found {} quartets but the annulus holds {expected} zeros",
            roots.len()
        )));
    }
    Ok(roots)
}

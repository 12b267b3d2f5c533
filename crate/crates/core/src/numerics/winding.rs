//! Argument-increment tracking along parametrized paths.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_STEP: f64 = 0.4;
const MAX_DEPTH: u32 = 48;

/// Total continuous change of `arg g(s)` for `s` from `s0` to `s1`.
///
/// Bisects until consecutive samples differ in argument by less than
/// `MAX_STEP` and the two halves agree with the whole. Fails if `g` vanishes
/// (numerically) on the path.
pub fn arg_increment<G>(g: &G, s0: f64, s1: f64, initial: usize) -> Result<f64>
where
    G: Fn(f64) -> Complex64,
{
    arg_increment_above(g, s0, s1, initial, 1e-280)
}

/// [`arg_increment`], treating `|g| < floor` as a zero on the path. Use a
/// floor above the rounding noise of `g` so the argument stays meaningful.
pub fn arg_increment_above<G>(g: &G, s0: f64, s1: f64, initial: usize, floor: f64) -> Result<f64>
where
    G: Fn(f64) -> Complex64,
{
    let eval = |s: f64| -> Result<Complex64> {
        let v = g(s);
        if !(v.re.is_finite() && v.im.is_finite()) || v.norm() < floor {
            return Err(Error::RootSearch(format!("function vanishes on contour at s={s}")));
        }
        Ok(v)
    };
    let mut total = 0.0;
    let n = initial.max(1);
    let mut prev_s = s0;
    let mut prev_v = eval(s0)?;
    for k in 1..=n {
        let s = s0 + (s1 - s0) * k as f64 / n as f64;
        let v = eval(s)?;
        total += segment(&eval, prev_s, prev_v, s, v, 0)?;
        prev_s = s;
        prev_v = v;
    }
    Ok(total)
}

fn segment<E>(eval: &E, sa: f64, va: Complex64, sb: f64, vb: Complex64, depth: u32) -> Result<f64>
where
    E: Fn(f64) -> Result<Complex64>,
{
    let whole = (vb / va).arg();
    if depth >= MAX_DEPTH {
        return Ok(whole);
    }
    let sm = 0.5 * (sa + sb);
    let vm = eval(sm)?;
    let left = (vm / va).arg();
    let right = (vb / vm).arg();
    if whole.abs() < MAX_STEP && left.abs() < MAX_STEP && right.abs() < MAX_STEP
        && (left + right - whole).abs() < 1e-9
    {
        return Ok(whole);
    }
    Ok(segment(eval, sa, va, sm, vm, depth + 1)? + segment(eval, sm, vm, sb, vb, depth + 1)?)
}

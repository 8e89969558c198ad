use crate::error::{Error, Result};

use super::{PhasePoint, System};

/// `C_F(V)^2 = f(1+V)` with `f(W) = W (k1 W^2 - k2 W + k3) / (W + alpha)`.
pub fn nullcline_f_sq(v: f64, sys: &System) -> Result<f64> {
    if v < -1.0 {
        return Err(Error::OutsideBranchDomain { v });
    }
    let w = 1.0 + v;
    let k = &sys.k;
    Ok(w * ((k.k1 * w - k.k2) * w + k.k3) / (w + k.alpha))
}

/// Height of `{F = 0}` above `V`, for `V >= -1`.
pub fn nullcline_f(v: f64, sys: &System) -> Result<f64> {
    let r = nullcline_f_sq(v, sys)?;
    if r < 0.0 {
        return Err(Error::NegativeRadicand { v, value: r });
    }
    Ok(r.sqrt())
}

/// `C_G(V)^2 = V (1+V) (lambda+V) / (n (V - V*))`, evaluated anywhere off
/// the asymptote.
pub fn nullcline_g_sq(v: f64, sys: &System) -> f64 {
    v * (1.0 + v) * (sys.lambda() + v) / (sys.n() * (v - sys.k.v_star))
}

/// Height of `{G = 0}` on its upper branches `[-1, V*)` and `[0, inf)`.
pub fn nullcline_g(v: f64, sys: &System) -> Result<f64> {
    let on_left = (-1.0..sys.k.v_star).contains(&v);
    let on_right = v >= 0.0 && v.is_finite();
    if !(on_left || on_right) {
        return Err(Error::OutsideBranchDomain { v });
    }
    let r = nullcline_g_sq(v, sys);
    if r < 0.0 {
        return Err(Error::NegativeRadicand { v, value: r });
    }
    Ok(r.sqrt())
}

/// Samples `curve` at `samples` evenly spaced `V` in `[v_lo, v_hi]`,
/// dropping points where it is undefined.
pub fn polyline(
    curve: impl Fn(f64) -> Result<f64>,
    v_lo: f64,
    v_hi: f64,
    samples: usize,
) -> Vec<PhasePoint> {
    let samples = samples.max(2);
    (0..samples)
        .filter_map(|i| {
            let v = v_lo + (v_hi - v_lo) * i as f64 / (samples - 1) as f64;
            curve(v).ok().filter(|c| c.is_finite()).map(|c| PhasePoint::new(v, c))
        })
        .collect()
}

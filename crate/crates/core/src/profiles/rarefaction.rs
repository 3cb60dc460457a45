//! Smoothed 1-rarefaction built from the Burgers equation with `tanh` data.

use super::{slice_from_points, ProfilePoint, SpaceTimeField};
use crate::error::Result;
use crate::gas::GasState;
use crate::numerics::{safeguarded_newton, UniformGrid};
use crate::par::{map_range, Execution};
use crate::riemann::WavePattern;

const SQRT10: f64 = 3.162_277_660_168_379_5;

/// Smooth Burgers solution with data `w(0,x) = (w₊+w₋)/2 + (w₊−w₋)/2·tanh(x/σ)`.
pub fn burgers_smooth(w_minus: f64, w_plus: f64, sigma: f64, t: f64, x: f64) -> f64 {
    burgers_smooth_derivs(w_minus, w_plus, sigma, t, x)[0]
}

/// `[w, w_x, w_xx]` of [`burgers_smooth`].
pub fn burgers_smooth_derivs(w_minus: f64, w_plus: f64, sigma: f64, t: f64, x: f64) -> [f64; 3] {
    debug_assert!(sigma > 0.0 && w_minus <= w_plus && t >= 0.0);
    let m = 0.5 * (w_plus + w_minus);
    let a = 0.5 * (w_plus - w_minus);
    let w0 = |x0: f64| {
        let z = x0 / sigma;
        let th = z.tanh();
        let q = (-2.0 * z.abs()).exp();
        let sech2 = 4.0 * q / ((1.0 + q) * (1.0 + q));
        (
            m + a * th,
            a / sigma * sech2,
            -2.0 * a / (sigma * sigma) * sech2 * th,
        )
    };
    let x0 = if t == 0.0 || a == 0.0 {
        x - m * t
    } else {
        let g = |x0: f64| {
            let (w, dw, _) = w0(x0);
            (x0 + t * w - x, 1.0 + t * dw)
        };
        safeguarded_newton(g, x - w_plus * t, x - w_minus * t, 1e-15, 200)
            .unwrap_or(x - m * t)
    };
    let (w, dw, ddw) = w0(x0);
    let j = 1.0 + t * dw;
    [w, dw / j, ddw / (j * j * j)]
}

/// Analytic smoothed rarefaction connecting `left` to `mid_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RarefactionProfile {
    pub left: GasState,
    pub sigma: f64,
    w_minus: f64,
    w_plus: f64,
    k: f64,
}

impl RarefactionProfile {
    pub fn new(pattern: &WavePattern, sigma: f64) -> Self {
        let left = GasState {
            u2: 0.0,
            u3: 0.0,
            ..pattern.left
        };
        Self {
            left,
            sigma,
            w_minus: pattern.fan_left,
            w_plus: pattern.fan_right.max(pattern.fan_left),
            k: left.theta.sqrt() * left.v.cbrt(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.w_plus <= self.w_minus
    }

    /// Characteristic speed `λ1` carried by the profile.
    pub fn w(&self, t: f64, x: f64) -> [f64; 3] {
        if self.is_trivial() {
            return [self.w_minus, 0.0, 0.0];
        }
        burgers_smooth_derivs(self.w_minus, self.w_plus, self.sigma, t, x)
    }

    /// Volume, velocity and temperature with their first two `x`-derivatives.
    pub fn point(&self, t: f64, x: f64) -> ProfilePoint {
        let l = &self.left;
        if self.is_trivial() {
            return ProfilePoint {
                v: [l.v, 0.0, 0.0],
                u1: [l.u1, 0.0, 0.0],
                theta: [l.theta, 0.0, 0.0],
            };
        }
        let [w, wx, wxx] = self.w(t, x);
        let mw = -w;
        let v = (SQRT10 / 3.0 * self.k / mw).powf(0.75);
        let v_w = 0.75 * v / mw;
        let v_ww = 21.0 / 16.0 * v / (w * w);
        let vx = v_w * wx;
        let vxx = v_ww * wx * wx + v_w * wxx;

        let u = l.u1 - SQRT10 * self.k * (1.0 / v.cbrt() - 1.0 / l.v.cbrt());
        let u_v = SQRT10 / 3.0 * self.k * v.powf(-4.0 / 3.0);
        let u_vv = -4.0 / 9.0 * SQRT10 * self.k * v.powf(-7.0 / 3.0);

        let th = l.theta * (l.v / v).powf(2.0 / 3.0);
        let th_v = -2.0 / 3.0 * th / v;
        let th_vv = 10.0 / 9.0 * th / (v * v);

        ProfilePoint {
            v: [v, vx, vxx],
            u1: [u, u_v * vx, u_vv * vx * vx + u_v * vxx],
            theta: [th, th_v * vx, th_vv * vx * vx + th_v * vxx],
        }
    }

    pub fn field(&self, t: f64, grid: &UniformGrid, exec: Execution) -> SpaceTimeField {
        let pts = map_range(exec, grid.n, |i| self.point(t, grid.x(i)));
        SpaceTimeField::single(grid.clone(), slice_from_points(t, &pts))
    }
}

/// Smoothed rarefaction field at time `t`; constant left state when the
/// pattern carries no rarefaction.
pub fn build_rarefaction_profile(
    pattern: &WavePattern,
    sigma: f64,
    t: f64,
    x_grid: &UniformGrid,
) -> Result<SpaceTimeField> {
    if !(sigma > 0.0) || !(t >= 0.0) {
        return Err(crate::Error::Precondition(format!(
            "rarefaction profile needs sigma > 0 and t >= 0 (sigma = {sigma}, t = {t})"
        )));
    }
    Ok(RarefactionProfile::new(pattern, sigma).field(t, x_grid, Execution::default()))
}

//! Slab-symmetric kinetic solver with a BGK collision operator.
//!
//! The distribution `f(t, X, ξ)` is carried through its Chu reduction
//!
//! ```text
//! g(ξ₁) = ∬ f dξ₂dξ₃,    h(ξ₁) = ∬ (ξ₂² + ξ₃²) f dξ₂dξ₃,
//! ```
//!
//! which is exact for slab-symmetric data without transverse velocity. The
//! solver works in Eulerian coordinates `X` and tracks the Lagrangian mass
//! coordinate of every cell.

mod config;
mod projection;
mod solver;
mod velocity;

pub use config::{InitMode, KineticConfig};
pub(crate) use config::KINETIC_KEYS;
pub use projection::{macro_micro_project, MacroMicro, TensorQuadrature};
pub use solver::{run, step, Boundary, ReducedKineticState};
pub use velocity::{VelocityGrid, THERMAL_SPAN};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasState, R_GAS};

/// Macroscopic fields over the spatial grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MacroFields {
    pub rho: Vec<f64>,
    pub u1: Vec<f64>,
    pub theta: Vec<f64>,
    pub e: Vec<f64>,
}

impl MacroFields {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn from_states(states: &[GasState]) -> Self {
        Self {
            rho: states.iter().map(|s| s.rho()).collect(),
            u1: states.iter().map(|s| s.u1).collect(),
            theta: states.iter().map(|s| s.theta).collect(),
            e: states.iter().map(|s| s.theta + 0.5 * s.u1 * s.u1).collect(),
        }
    }

    pub fn state(&self, i: usize) -> GasState {
        GasState {
            v: 1.0 / self.rho[i],
            u1: self.u1[i],
            u2: 0.0,
            u3: 0.0,
            theta: self.theta[i],
        }
    }
}

/// Raw moments `∫g`, `∫ξg`, `∫(ξ²g + h)` of one reduced distribution.
pub(crate) fn raw_moments(vg: &VelocityGrid, g: &[f64], h: &[f64]) -> [f64; 3] {
    let mut m = [0.0; 3];
    for k in 0..vg.n_xi {
        let (xi, w) = (vg.nodes[k], vg.weights[k]);
        m[0] += w * g[k];
        m[1] += w * xi * g[k];
        m[2] += w * (xi * xi * g[k] + h[k]);
    }
    m
}

/// Moments `(ρ, u₁, θ)` from raw moments.
pub(crate) fn primitive(m: [f64; 3]) -> (f64, f64, f64) {
    let u = m[1] / m[0];
    let e = 0.5 * m[2] / m[0];
    // ρE = (3/2)ρRθ + ρu²/2 with R = 2/3
    (m[0], u, e - 0.5 * u * u)
}

/// Moments `(ρ, u₁, θ)` of one reduced distribution.
pub(crate) fn cell_moments(vg: &VelocityGrid, g: &[f64], h: &[f64]) -> (f64, f64, f64) {
    primitive(raw_moments(vg, g, h))
}

/// Reduced Maxwellian `(g_M, h_M)` sampled on the velocity grid.
pub fn reduced_maxwellian(rho: f64, u1: f64, theta: f64, vgrid: &VelocityGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(rho > 0.0) || !(theta > 0.0) {
        return Err(Error::Domain(format!(
            "Maxwellian needs rho > 0 and theta > 0 (rho = {rho}, theta = {theta})"
        )));
    }
    let mut g = vec![0.0; vgrid.n_xi];
    let mut h = vec![0.0; vgrid.n_xi];
    fill_maxwellian(rho, u1, theta, vgrid, &mut g, &mut h);
    Ok((g, h))
}

pub(crate) fn fill_maxwellian(rho: f64, u1: f64, theta: f64, vg: &VelocityGrid, g: &mut [f64], h: &mut [f64]) {
    let rt = R_GAS * theta;
    let a = rho / (2.0 * std::f64::consts::PI * rt).sqrt();
    let n = vg.n_xi;
    let d = vg.spacing();
    // Gaussian recurrence outward from the node nearest u1: two exp calls per side
    let k0 = (((u1 - vg.xi_min) / d).round().max(0.0) as usize).min(n - 1);
    let c0 = vg.nodes[k0] - u1;
    let e0 = a * (-0.5 * c0 * c0 / rt).exp();
    let q = (-d * d / rt).exp();
    g[k0] = e0;
    let mut e = e0;
    let mut r = (-(2.0 * c0 * d + d * d) / (2.0 * rt)).exp();
    for gk in g[k0 + 1..].iter_mut() {
        e *= r;
        r *= q;
        *gk = e;
    }
    let mut e = e0;
    let mut r = (-(-2.0 * c0 * d + d * d) / (2.0 * rt)).exp();
    for gk in g[..k0].iter_mut().rev() {
        e *= r;
        r *= q;
        *gk = e;
    }
    for k in 0..n {
        h[k] = 2.0 * rt * g[k];
    }
}

/// Maxwellian whose discrete moments equal `(m0, m1, m2)` exactly: the
/// sampled Maxwellian times `1 + α + βξ + γξ²`.
pub(crate) fn conservative_maxwellian(
    vg: &VelocityGrid,
    rho: f64,
    u1: f64,
    theta: f64,
    target: [f64; 3],
    g: &mut [f64],
    h: &mut [f64],
) {
    fill_maxwellian(rho, u1, theta, vg, g, h);
    // residual moments and the 3×3 sensitivity matrix
    let mut a = [[0.0; 3]; 3];
    let mut r = target;
    for k in 0..vg.n_xi {
        let (xi, w) = (vg.nodes[k], vg.weights[k]);
        let basis = [1.0, xi, xi * xi];
        let rows = [w * g[k], w * xi * g[k], w * (xi * xi * g[k] + h[k])];
        for i in 0..3 {
            r[i] -= rows[i];
            for j in 0..3 {
                a[i][j] += rows[i] * basis[j];
            }
        }
    }
    if let Some(c) = solve3(a, r) {
        for k in 0..vg.n_xi {
            let xi = vg.nodes[k];
            let f = 1.0 + c[0] + c[1] * xi + c[2] * xi * xi;
            g[k] *= f;
            h[k] *= f;
        }
    }
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let m = nalgebra::Matrix3::from_fn(|i, j| a[i][j]);
    let x = m.lu().solve(&nalgebra::Vector3::from(b))?;
    x.iter().all(|v| v.is_finite()).then(|| [x[0], x[1], x[2]])
}

/// Cell-wise moments of a kinetic state.
pub fn moments(state: &ReducedKineticState) -> Result<MacroFields> {
    let n = state.x_grid.n;
    let nv = state.vgrid.n_xi;
    let mut out = MacroFields {
        rho: vec![0.0; n],
        u1: vec![0.0; n],
        theta: vec![0.0; n],
        e: vec![0.0; n],
    };
    for i in 0..n {
        let s = i * nv..(i + 1) * nv;
        let (rho, u, th) = cell_moments(&state.vgrid, &state.g[s.clone()], &state.h[s]);
        if !(rho > 0.0) || !(th > 0.0) {
            return Err(Error::CorruptedState {
                cell: i,
                what: format!("rho = {rho}, theta = {th}"),
            });
        }
        out.rho[i] = rho;
        out.u1[i] = u;
        out.theta[i] = th;
        out.e[i] = th + 0.5 * u * u;
    }
    Ok(out)
}

/// Pointwise distance between the state's distribution and the Maxwellian
/// of `reference`, weighted by the global Maxwellian of `star`:
///
/// `d(x)² = ∫ [(g − g_ref)² + (h − h_ref)²/(2Rθ★)²] / g★ dξ₁`.
pub fn micro_distance(state: &ReducedKineticState, reference: &MacroFields, star: &GasState) -> Result<Vec<f64>> {
    let n = state.x_grid.n;
    if reference.len() != n {
        return Err(Error::Precondition(format!(
            "reference has {} cells, state has {n}",
            reference.len()
        )));
    }
    let vg = &state.vgrid;
    let (gs, _) = reduced_maxwellian(star.rho(), star.u1, star.theta, vg)?;
    let scale = 1.0 / (2.0 * R_GAS * star.theta).powi(2);
    let nv = vg.n_xi;
    let rows = crate::par::try_map_range(state.exec, n, |i| {
        let mut gr = vec![0.0; nv];
        let mut hr = vec![0.0; nv];
        let (rho, u, th) = (reference.rho[i], reference.u1[i], reference.theta[i]);
        if !(rho > 0.0) || !(th > 0.0) {
            return Err(Error::Domain(format!("reference cell {i}: rho = {rho}, theta = {th}")));
        }
        fill_maxwellian(rho, u, th, vg, &mut gr, &mut hr);
        let g = &state.g[i * nv..(i + 1) * nv];
        let h = &state.h[i * nv..(i + 1) * nv];
        let mut d2 = 0.0;
        for k in 0..nv {
            if gs[k] < 1e-300 {
                continue;
            }
            let (dg, dh) = (g[k] - gr[k], h[k] - hr[k]);
            d2 += vg.weights[k] * (dg * dg + dh * dh * scale) / gs[k];
        }
        Ok(d2.sqrt())
    })?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{fit_line, UniformGrid};

    fn vgrid() -> VelocityGrid {
        VelocityGrid::new(-10.0, 10.0, 257).unwrap()
    }

    #[test]
    fn maxwellian_peak_and_moments() {
        let vg = vgrid();
        let (g, h) = reduced_maxwellian(1.0, 0.0, 1.0, &vg).unwrap();
        let mid = vg.n_xi / 2;
        // 1/√(4π/3)
        assert!((g[mid] - 0.488_602_511_902_919_9).abs() < 1e-15);
        let (rho, u, th) = cell_moments(&vg, &g, &h);
        assert!((rho - 1.0).abs() < 1e-12 && u.abs() < 1e-14 && (th - 1.0).abs() < 1e-12);
        let (g, h) = reduced_maxwellian(2.3, 0.4, 0.7, &vg).unwrap();
        let (rho, u, th) = cell_moments(&vg, &g, &h);
        assert!((rho - 2.3).abs() < 1e-8 * 2.3);
        assert!((u - 0.4).abs() < 1e-10 && (th - 0.7).abs() < 1e-10);
        assert!(reduced_maxwellian(0.0, 0.0, 1.0, &vg).is_err());
        assert!(reduced_maxwellian(1.0, 0.0, -1.0, &vg).is_err());
    }

    #[test]
    fn moments_homogeneity_and_mixture() {
        let vg = vgrid();
        let (g1, h1) = reduced_maxwellian(1.0, -1.0, 1.0, &vg).unwrap();
        let (g2, h2) = reduced_maxwellian(1.0, 1.0, 1.0, &vg).unwrap();
        let g: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| 0.5 * (a + b)).collect();
        let h: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| 0.5 * (a + b)).collect();
        let (rho, u, th) = cell_moments(&vg, &g, &h);
        // E = ½·(R θ + u²) + R θ from ξ₁ and the transverse pair; with u = ±1: E = 1 + ½
        assert!((rho - 1.0).abs() < 1e-12);
        assert!(u.abs() < 1e-12);
        let e = th + 0.5 * u * u;
        assert!((e - 1.5).abs() < 1e-10, "{e}");
        let g2x: Vec<f64> = g.iter().map(|v| 2.0 * v).collect();
        let h2x: Vec<f64> = h.iter().map(|v| 2.0 * v).collect();
        let (rho2, u2, th2) = cell_moments(&vg, &g2x, &h2x);
        assert!((rho2 - 2.0 * rho).abs() < 1e-12 && (u2 - u).abs() < 1e-14 && (th2 - th).abs() < 1e-12);
    }

    #[test]
    fn conservative_maxwellian_matches_moments_exactly() {
        let vg = VelocityGrid::new(-6.0, 6.0, 64).unwrap();
        let (g1, h1) = reduced_maxwellian(1.0, -0.6, 0.8, &vg).unwrap();
        let (g2, h2) = reduced_maxwellian(0.5, 0.9, 0.3, &vg).unwrap();
        let g: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
        let h: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a + b).collect();
        let raw = |g: &[f64], h: &[f64]| {
            let mut m = [0.0; 3];
            for k in 0..vg.n_xi {
                let (xi, w) = (vg.nodes[k], vg.weights[k]);
                m[0] += w * g[k];
                m[1] += w * xi * g[k];
                m[2] += w * (xi * xi * g[k] + h[k]);
            }
            m
        };
        let target = raw(&g, &h);
        let (rho, u, th) = cell_moments(&vg, &g, &h);
        let mut gm = vec![0.0; vg.n_xi];
        let mut hm = vec![0.0; vg.n_xi];
        conservative_maxwellian(&vg, rho, u, th, target, &mut gm, &mut hm);
        let got = raw(&gm, &hm);
        for i in 0..3 {
            assert!((got[i] - target[i]).abs() < 1e-15 * target[i].abs().max(1.0) * 8.0);
        }
    }

    fn uniform_state(rho: f64, u: f64, th: f64, n: usize) -> ReducedKineticState {
        let grid = UniformGrid::new(0.0, 1.0, n).unwrap();
        let vg = vgrid();
        let s = GasState::new(1.0 / rho, u, th).unwrap();
        ReducedKineticState::from_states(grid, vg, &vec![s; n], 0.01, Boundary::Periodic).unwrap()
    }

    #[test]
    fn distance_vanishes_at_reference_and_is_linear() {
        let st = uniform_state(1.0, 0.1, 1.0, 4);
        let star = GasState::new(1.0, 0.0, 0.75).unwrap();
        let mf = moments(&st).unwrap();
        assert!(micro_distance(&st, &mf, &star).unwrap().iter().all(|&d| d < 1e-10));
        let dts = [1e-3, 2e-3, 4e-3];
        let ds: Vec<f64> = dts
            .iter()
            .map(|&dt| {
                let mut r = mf.clone();
                r.theta.iter_mut().for_each(|t| *t += dt);
                micro_distance(&st, &r, &star).unwrap()[0]
            })
            .collect();
        let fit = fit_line(&dts.map(f64::ln), &ds.iter().map(|d| d.ln()).collect::<Vec<_>>()).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "{}", fit.slope);
    }

    #[test]
    fn distance_is_symmetric() {
        let a = uniform_state(1.0, 0.1, 1.0, 3);
        let b = uniform_state(1.2, -0.1, 0.9, 3);
        let star = GasState::new(1.0, 0.0, 0.75).unwrap();
        let (ma, mb) = (moments(&a).unwrap(), moments(&b).unwrap());
        let dab = micro_distance(&a, &mb, &star).unwrap();
        let dba = micro_distance(&b, &ma, &star).unwrap();
        for (x, y) in dab.iter().zip(&dba) {
            assert!((x - y).abs() < 1e-10 * x.max(1.0));
        }
    }
}

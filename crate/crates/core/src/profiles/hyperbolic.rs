//! Linear hyperbolic correction waves.
//!
//! Wave I carries the viscous error of the smoothed rarefaction and is
//! solved around it with `D1(h) = 0`, `D2(T) = D3(T) = 0`. Wave II removes
//! the contact-wave error around the composite profile with all five
//! diagonal variables vanishing at `T`.

#![allow(non_snake_case)]

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::characteristics::{DiagonalSystem, Direction, LevelCoefficients};
use super::{ContactProfile, RarefactionProfile, ShockProfile, Transport};
use crate::error::{Error, Result};
use crate::gas::{eigensystem3, eigensystem5, GasState};
use crate::numerics::{monotone_cubic_uniform, trapezoid, UniformGrid};
use crate::par::{try_map_range, Execution};
use crate::riemann::WavePattern;

/// Correction field in physical and diagonal variables, indexed
/// `[level][component][point]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicWaveField {
    pub x_grid: UniformGrid,
    pub times: Vec<f64>,
    /// `d = R·D` (wave I: d1, d2, d3) or `b = R̄·B` (wave II: b1, b21, b22, b23, b3).
    pub physical: Vec<Vec<Vec<f64>>>,
    pub diag: Vec<Vec<Vec<f64>>>,
}

impl HyperbolicWaveField {
    pub fn components(&self) -> usize {
        self.physical.first().map_or(0, |l| l.len())
    }

    /// `Σ_i ‖d_i(t_n)‖²_{L²}`.
    pub fn l2_sq(&self, level: usize) -> f64 {
        self.physical[level]
            .iter()
            .map(|c| trapezoid(&c.iter().map(|v| v * v).collect::<Vec<_>>(), self.x_grid.dx))
            .sum()
    }

    /// Largest `Σ_i ‖d_i(t)‖²` over the stored levels.
    pub fn max_l2_sq(&self) -> f64 {
        (0..self.times.len()).map(|n| self.l2_sq(n)).fold(0.0, f64::max)
    }

    /// `∫∫ w(t,x) |d|² dx dt` over the stored levels.
    pub fn weighted_dissipation(&self, w: impl Fn(f64, f64) -> f64) -> f64 {
        let g = &self.x_grid;
        let per_level: Vec<f64> = (0..self.times.len())
            .map(|n| {
                let t = self.times[n];
                let y: Vec<f64> = (0..g.n)
                    .map(|i| {
                        let s: f64 = self.physical[n].iter().map(|c| c[i] * c[i]).sum();
                        w(t, g.x(i)) * s
                    })
                    .collect();
                trapezoid(&y, g.dx)
            })
            .collect();
        self.times
            .windows(2)
            .zip(per_level.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }

    fn bracket(&self, t: f64) -> (usize, f64) {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return (0, 0.0);
        }
        if t >= self.times[n - 1] {
            return (n - 2, 1.0);
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let k = k.min(n - 2);
        (k, (t - self.times[k]) / (self.times[k + 1] - self.times[k]))
    }

    /// Physical components at time `t` (linear in time between levels).
    pub fn at_time(&self, t: f64) -> Vec<Vec<f64>> {
        if self.times.len() == 1 {
            return self.physical[0].clone();
        }
        let (k, f) = self.bracket(t);
        self.physical[k]
            .iter()
            .zip(&self.physical[k + 1])
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + f * (y - x)).collect())
            .collect()
    }

    /// Physical components at an arbitrary point; zero outside the grid.
    pub fn sample(&self, t: f64, x: f64) -> Vec<f64> {
        let g = &self.x_grid;
        if x < g.start || x > g.end() {
            return vec![0.0; self.components()];
        }
        let interp = |lvl: usize, c: usize| monotone_cubic_uniform(g, &self.physical[lvl][c], x);
        if self.times.len() == 1 {
            return (0..self.components()).map(|c| interp(0, c)).collect();
        }
        let (k, f) = self.bracket(t);
        (0..self.components())
            .map(|c| {
                let a = interp(k, c);
                a + f * (interp(k + 1, c) - a)
            })
            .collect()
    }
}

fn time_levels(h: f64, t_end: f64, dt_max: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && t_end > h) {
        return Err(Error::Precondition(format!(
            "hyperbolic waves need 0 < h < T (h = {h}, T = {t_end})"
        )));
    }
    let n = ((t_end - h) / dt_max).ceil().max(1.0) as usize;
    Ok((0..=n).map(|k| h + (t_end - h) * k as f64 / n as f64).collect())
}

#[derive(Debug, Clone)]
pub struct WaveIOptions {
    pub eps: f64,
    pub h: f64,
    pub t_end: f64,
    pub grid: UniformGrid,
    pub transport: Transport,
    /// Fraction of the characteristic CFL limit used for the time step.
    pub cfl: f64,
    pub exec: Execution,
}

/// Viscous forcing `(0, H1, H2)` of wave I at one point.
fn wave_i_forcing(rar: &RarefactionProfile, tr: &Transport, eps: f64, t: f64, x: f64) -> [f64; 3] {
    let p = rar.point(t, x);
    let [v, vx, _] = p.v;
    let [u, ux, uxx] = p.u1;
    let [th, thx, thxx] = p.theta;
    let (mu, dmu) = (tr.mu(th), tr.dmu(th));
    let (ka, dka) = (tr.kappa(th), tr.dkappa(th));
    // (μU_x/V)_x, (κΘ_x/V)_x and (μUU_x/V)_x
    let m = mu * ux / v;
    let mx = dmu * thx * ux / v + mu * uxx / v - mu * ux * vx / (v * v);
    let kx = dka * thx * thx / v + ka * thxx / v - ka * thx * vx / (v * v);
    let mux = ux * m + u * mx;
    [0.0, 4.0 / 3.0 * eps * mx, eps * kx + 4.0 / 3.0 * eps * mux]
}

/// Solves hyperbolic wave I around the smoothed rarefaction on `[h, T]`.
pub fn build_hyperbolic_wave_I(rar: &RarefactionProfile, opts: &WaveIOptions) -> Result<HyperbolicWaveField> {
    let g = &opts.grid;
    if g.dx > rar.sigma / 10.0 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "wave I grid needs dx <= sigma/10 (dx = {}, sigma = {})",
            g.dx, rar.sigma
        )));
    }
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1] (got {})", opts.cfl)));
    }
    let c_max = crate::gas::lagrangian_sound_speed(rar.left.v, rar.left.theta).max(
        {
            let far = rar.point(0.0, g.end().abs().max(g.start.abs()) * 10.0 + 10.0).state();
            crate::gas::lagrangian_sound_speed(far.v, far.theta)
        },
    );
    let times = time_levels(opts.h, opts.t_end, opts.cfl * g.dx / c_max)?;
    let delta = 1e-4 * rar.sigma;
    let tr = opts.transport;
    let eps = opts.eps;
    let levels: Vec<LevelCoefficients<3>> = try_map_range(opts.exec, times.len(), |n| {
        let t = times[n];
        let mut lvl = LevelCoefficients::<3>::zeros(g.n);
        for i in 0..g.n {
            let x = g.x(i);
            let es = eigensystem3(&rar.point(t, x).state())?;
            let ea = eigensystem3(&rar.point(t, x + delta).state())?;
            let eb = eigensystem3(&rar.point(t, x - delta).state())?;
            let lx = (ea.left - eb.left) / (2.0 * delta);
            let lxr = lx * es.right;
            let lam = es.lambdas;
            for j in 0..3 {
                lvl.speed[i][j] = lam[j];
                lvl.speed_x[i][j] = (ea.lambdas[j] - eb.lambdas[j]) / (2.0 * delta);
                for k in 0..3 {
                    // L_t = −λ1 L_x along the rarefaction
                    lvl.coupling[i][j][k] = lxr[(j, k)] * (lam[k] - lam[0]);
                }
            }
            let h = SVector::<f64, 3>::from(wave_i_forcing(rar, &tr, eps, t, x));
            let s = es.left * h;
            lvl.source[i] = [s[0], s[1], s[2]];
        }
        Ok::<_, Error>(lvl)
    })?;
    let sys = DiagonalSystem { grid: g.clone(), times, levels };
    let mut sol = vec![vec![[0.0; 3]; g.n]; sys.times.len()];
    sys.solve_group(Direction::Backward, &[1, 2], &mut sol, opts.exec)?;
    sys.solve_group(Direction::Forward, &[0], &mut sol, opts.exec)?;
    let times = sys.times;
    let physical = try_map_range(opts.exec, times.len(), |n| {
        let mut out = vec![vec![0.0; g.n]; 3];
        for i in 0..g.n {
            let es = eigensystem3(&rar.point(times[n], g.x(i)).state())?;
            let d = es.right * SVector::<f64, 3>::from(sol[n][i]);
            for c in 0..3 {
                out[c][i] = d[c];
            }
        }
        Ok::<_, Error>(out)
    })?;
    let diag = to_component_major(&sol);
    Ok(HyperbolicWaveField {
        x_grid: g.clone(),
        times,
        physical,
        diag,
    })
}

fn to_component_major<const N: usize>(sol: &[Vec<[f64; N]>]) -> Vec<Vec<Vec<f64>>> {
    sol.iter()
        .map(|lvl| (0..N).map(|c| lvl.iter().map(|p| p[c]).collect()).collect())
        .collect()
}

/// Supplies the contact-wave error terms `(Q1, Q2, Q3, Q4)` driving wave II.
pub trait SourceProvider: Sync {
    fn q_cd(&self, t: f64, x: f64) -> [f64; 4];
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSource;

impl SourceProvider for ZeroSource {
    fn q_cd(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }
}

/// Model source with the contact-wave envelope
/// `amplitude · δ^{CD} · ε · (1+t)^{−2} · exp(−c x²/(ε(1+t)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModelSource {
    pub delta_cd: f64,
    pub eps: f64,
    pub c: f64,
    pub amplitude: [f64; 4],
}

impl GaussianModelSource {
    pub fn new(delta_cd: f64, eps: f64, c: f64) -> Self {
        Self {
            delta_cd,
            eps,
            c,
            amplitude: [1.0; 4],
        }
    }
}

impl SourceProvider for GaussianModelSource {
    fn q_cd(&self, t: f64, x: f64) -> [f64; 4] {
        let s = 1.0 + t;
        let env = self.delta_cd * self.eps / (s * s) * (-self.c * x * x / (self.eps * s)).exp();
        self.amplitude.map(|a| a * env)
    }
}

/// Composite profile `(V̄, Ū, Ē)` without wave II: rarefaction, optional
/// wave I, contact and shock superposed.
#[derive(Debug, Clone, Copy)]
pub struct CompositeBar<'a> {
    pub pattern: &'a WavePattern,
    pub eps: f64,
    pub rarefaction: &'a RarefactionProfile,
    pub contact: &'a ContactProfile,
    pub shock: &'a ShockProfile,
    pub wave_i: Option<&'a HyperbolicWaveField>,
}

/// Individual pieces of the superposition at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BarParts {
    /// `(V, U1, E)` of the rarefaction, contact and shock waves.
    pub rarefaction: [f64; 3],
    pub contact: [f64; 3],
    pub shock: [f64; 3],
    pub d: [f64; 3],
    pub bar: [f64; 3],
}

fn vue(p: &super::ProfilePoint) -> [f64; 3] {
    [p.v[0], p.u1[0], p.theta[0] + 0.5 * p.u1[0] * p.u1[0]]
}

impl CompositeBar<'_> {
    pub fn parts(&self, t: f64, x: f64) -> BarParts {
        let r = vue(&self.rarefaction.point(t, x));
        let c = vue(&self.contact.point(self.eps, t, x));
        let s = vue(&self.shock.point(self.eps, t, x));
        let d = match self.wave_i {
            Some(w) => {
                let v = w.sample(t, x);
                [v[0], v[1], v[2]]
            }
            None => [0.0; 3],
        };
        let (ms, mu) = (&self.pattern.mid_star, &self.pattern.mid_upper);
        let sub = [ms.v + mu.v, ms.u1 + mu.u1, ms.total_energy() + mu.total_energy()];
        let mut bar = [0.0; 3];
        for k in 0..3 {
            bar[k] = r[k] + d[k] + c[k] + s[k] - sub[k];
        }
        BarParts {
            rarefaction: r,
            contact: c,
            shock: s,
            d,
            bar,
        }
    }

    pub fn state(&self, t: f64, x: f64) -> GasState {
        let [v, u, e] = self.parts(t, x).bar;
        GasState {
            v,
            u1: u,
            u2: 0.0,
            u3: 0.0,
            theta: e - 0.5 * u * u,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WaveIIOptions {
    pub h: f64,
    pub t_end: f64,
    pub grid: UniformGrid,
    pub cfl: f64,
    pub exec: Execution,
}

type M5 = SMatrix<f64, 5, 5>;

/// Solves hyperbolic wave II around the composite profile, entirely backward
/// from zero data at `T`.
pub fn build_hyperbolic_wave_II(
    bar: &CompositeBar<'_>,
    sources: &dyn SourceProvider,
    opts: &WaveIIOptions,
) -> Result<HyperbolicWaveField> {
    let g = &opts.grid;
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1] (got {})", opts.cfl)));
    }
    // speed bound from samples over the whole window
    let mut c_max = 0.0_f64;
    for k in 0..=4 {
        let t = opts.h + (opts.t_end - opts.h) * k as f64 / 4.0;
        for i in 0..g.n {
            let s = bar.state(t, g.x(i));
            s.validate()?;
            c_max = c_max.max(crate::gas::lagrangian_sound_speed(s.v, s.theta));
        }
    }
    let times = time_levels(opts.h, opts.t_end, opts.cfl * g.dx / (1.1 * c_max))?;
    let dx_fd = 1e-3 * g.dx;
    let dt_fd = 1e-3 * (times[1] - times[0]);
    let levels: Vec<LevelCoefficients<5>> = try_map_range(opts.exec, times.len(), |n| {
        let t = times[n];
        let mut lvl = LevelCoefficients::<5>::zeros(g.n);
        for i in 0..g.n {
            let x = g.x(i);
            let es = eigensystem5(&bar.state(t, x))?;
            let exa = eigensystem5(&bar.state(t, x + dx_fd))?;
            let exb = eigensystem5(&bar.state(t, x - dx_fd))?;
            let eta = eigensystem5(&bar.state(t + dt_fd, x))?;
            let etb = eigensystem5(&bar.state(t - dt_fd, x))?;
            let lx: M5 = (exa.left - exb.left) / (2.0 * dx_fd);
            let lt: M5 = (eta.left - etb.left) / (2.0 * dt_fd);
            let lam = M5::from_diagonal(&SVector::<f64, 5>::from(es.lambdas));
            let c: M5 = lt * es.right + lx * es.right * lam;
            let q = sources.q_cd(t, x);
            let rhs = SVector::<f64, 5>::from([0.0, -q[0], -q[1], -q[2], -q[3]]);
            let s = es.left * rhs;
            for j in 0..5 {
                lvl.speed[i][j] = es.lambdas[j];
                lvl.speed_x[i][j] = (exa.lambdas[j] - exb.lambdas[j]) / (2.0 * dx_fd);
                lvl.source[i][j] = s[j];
                for k in 0..5 {
                    lvl.coupling[i][j][k] = c[(j, k)];
                }
            }
        }
        Ok::<_, Error>(lvl)
    })?;
    let sys = DiagonalSystem { grid: g.clone(), times, levels };
    let mut sol = vec![vec![[0.0; 5]; g.n]; sys.times.len()];
    sys.solve_group(Direction::Backward, &[0, 1, 2, 3, 4], &mut sol, opts.exec)?;
    if sol.last().unwrap().iter().any(|p| p.iter().any(|&v| v != 0.0)) {
        return Err(Error::Numerical("wave II terminal data not zero".into()));
    }
    let times = sys.times;
    let physical = try_map_range(opts.exec, times.len(), |n| {
        let mut out = vec![vec![0.0; g.n]; 5];
        for i in 0..g.n {
            let es = eigensystem5(&bar.state(times[n], g.x(i)))?;
            let b = es.right * SVector::<f64, 5>::from(sol[n][i]);
            for c in 0..5 {
                out[c][i] = b[c];
            }
        }
        Ok::<_, Error>(out)
    })?;
    Ok(HyperbolicWaveField {
        x_grid: g.clone(),
        times,
        physical,
        diag: to_component_major(&sol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::loglog_slope;
    use crate::riemann::{contact_connect, shock_connect, solve_riemann};

    fn pattern_with(vratio: f64) -> WavePattern {
        // R1–CD–S3 pattern built from the right state; `vratio` sets the fan
        let right = GasState::new(1.0, 0.0, 1.0).unwrap();
        let (mu, _) = shock_connect(&right, 0.92).unwrap();
        let ms = contact_connect(&mu, mu.v * 0.85).unwrap();
        let k = ms.theta.sqrt() * ms.v.cbrt();
        let vl = ms.v * vratio;
        let left = GasState {
            v: vl,
            u1: ms.u1 - 10f64.sqrt() * k * (1.0 / vl.cbrt() - 1.0 / ms.v.cbrt()),
            u2: 0.0,
            u3: 0.0,
            theta: ms.theta * (ms.v / vl).powf(2.0 / 3.0),
        };
        solve_riemann(&left, &right).unwrap()
    }

    fn pattern() -> WavePattern {
        pattern_with(0.93)
    }

    fn wave_i_with(p: &WavePattern, eps: f64, sigma: f64) -> HyperbolicWaveField {
        let rar = RarefactionProfile::new(p, sigma);
        let t_end = 1.0;
        let opts = WaveIOptions {
            eps,
            h: 0.1,
            t_end,
            grid: UniformGrid::with_max_spacing(p.fan_left * t_end - 2.5, 2.5, sigma / 12.0).unwrap(),
            transport: Transport::default(),
            cfl: 0.9,
            exec: Execution::Parallel,
        };
        build_hyperbolic_wave_I(&rar, &opts).unwrap()
    }

    fn wave_i(p: &WavePattern, eps: f64) -> HyperbolicWaveField {
        wave_i_with(p, eps, eps.powf(0.2))
    }

    #[test]
    fn wave_i_vanishes_without_viscosity() {
        let p = pattern();
        let w = wave_i_with(&p, 0.0, 0.3);
        assert!(w.physical.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn wave_i_boundary_conditions_and_relation() {
        let p = pattern();
        let w = wave_i(&p, 0.01);
        let last = w.times.len() - 1;
        assert!(w.diag[0][0].iter().all(|&v| v == 0.0));
        assert!(w.diag[last][1].iter().all(|&v| v == 0.0));
        assert!(w.diag[last][2].iter().all(|&v| v == 0.0));
        assert!(w.max_l2_sq() > 0.0);
        // d = R D at a sample point
        let rar = RarefactionProfile::new(&p, 0.01f64.powf(0.2));
        let (n, i) = (w.times.len() / 2, w.x_grid.n / 2);
        let es = eigensystem3(&rar.point(w.times[n], w.x_grid.x(i)).state()).unwrap();
        let dd = SVector::<f64, 3>::new(w.diag[n][0][i], w.diag[n][1][i], w.diag[n][2][i]);
        let d = es.right * dd;
        for c in 0..3 {
            assert!((d[c] - w.physical[n][c][i]).abs() < 1e-8);
        }
    }

    #[test]
    fn wave_i_scaling_in_eps() {
        // the fan must be wide compared with σ for the asymptotic rate
        let p = pattern_with(0.6);
        let eps = [1e-2, 5e-3, 2.5e-3];
        let norms: Vec<f64> = eps.iter().map(|&e| wave_i(&p, e).max_l2_sq()).collect();
        let fit = loglog_slope(&eps, &norms).unwrap();
        assert!((fit.slope - 1.8).abs() < 0.3, "slope {}", fit.slope);
    }

    #[test]
    fn wave_i_decays_ahead_of_the_fan() {
        let p = pattern();
        let eps: f64 = 0.005;
        let sigma = eps.powf(0.2);
        let w = wave_i(&p, eps);
        let n = w.times.len() / 2;
        let t = w.times[n];
        let g = &w.x_grid;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..g.n {
            let x = g.x(i);
            let r = x - p.fan_right * t;
            if r > 2.0 * sigma && r < 6.0 * sigma {
                let m = (0..3).map(|c| w.physical[n][c][i].abs()).fold(0.0, f64::max);
                xs.push(r);
                ys.push(m.ln());
            }
        }
        let fit = crate::numerics::fit_line(&xs, &ys).unwrap();
        assert!(fit.slope < -1.0 / sigma * 0.8, "decay {} vs {}", fit.slope, -1.0 / sigma);
    }

    fn wave_ii_norm(p: &WavePattern, eps: f64, scale: f64, src_zero: bool) -> (HyperbolicWaveField, f64) {
        let tr = Transport::default();
        let sigma = eps.powf(0.2);
        let rar = RarefactionProfile::new(p, sigma);
        let contact = ContactProfile::new(p, &tr).unwrap();
        let shock = ShockProfile::new(p, &tr).unwrap();
        let grid = UniformGrid::with_max_spacing(-2.5, 2.5, (eps.sqrt() / 10.0).min(sigma / 10.0)).unwrap();
        let bar = CompositeBar {
            pattern: p,
            eps,
            rarefaction: &rar,
            contact: &contact,
            shock: &shock,
            wave_i: None,
        };
        let c = contact.solution.gaussian_tail().unwrap();
        let mut src = GaussianModelSource::new(p.strengths.contact, eps, c.c_minus.min(c.c_plus));
        src.amplitude = [scale; 4];
        let opts = WaveIIOptions {
            h: 0.1,
            t_end: 0.6,
            grid,
            cfl: 0.9,
            exec: Execution::Parallel,
        };
        let w = if src_zero {
            build_hyperbolic_wave_II(&bar, &ZeroSource, &opts).unwrap()
        } else {
            build_hyperbolic_wave_II(&bar, &src, &opts).unwrap()
        };
        let n = w.max_l2_sq();
        (w, n)
    }

    #[test]
    fn wave_ii_zero_source_and_linearity() {
        let p = pattern();
        let (w0, n0) = wave_ii_norm(&p, 0.01, 1.0, true);
        assert_eq!(n0, 0.0);
        assert!(w0.diag.last().unwrap().iter().flatten().all(|&v| v == 0.0));
        let (w1, _) = wave_ii_norm(&p, 0.01, 1.0, false);
        let (w3, _) = wave_ii_norm(&p, 0.01, 3.0, false);
        for (a, b) in w1.physical.iter().flatten().flatten().zip(w3.physical.iter().flatten().flatten()) {
            assert!((3.0 * a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn wave_ii_scaling_in_eps() {
        let p = pattern();
        let eps = [1e-2, 5e-3, 2.5e-3];
        let norms: Vec<f64> = eps.iter().map(|&e| wave_ii_norm(&p, e, 1.0, false).1).collect();
        let fit = loglog_slope(&eps, &norms).unwrap();
        assert!((fit.slope - 2.5).abs() < 0.3, "slope {}", fit.slope);
    }
}

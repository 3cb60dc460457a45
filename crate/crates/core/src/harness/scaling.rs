use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{fit_line, loglog_slope, lp_norm, UniformGrid};
use crate::par::{try_map_range, Execution};
use crate::profiles::{
    build_hyperbolic_wave_I, build_hyperbolic_wave_II, build_rarefaction_profile, CompositeBar, ContactProfile,
    GaussianModelSource, RarefactionProfile, ShockProfile, Transport, WaveIIOptions, WaveIOptions,
};
use crate::riemann::WavePattern;

/// Which scaling law to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingStudy {
    /// `‖∂ₓ(V,U,Θ)‖_{L^p}` of the smoothed rarefaction against `σ`.
    Lemma21,
    /// `sup_t ‖d‖²_{L²}` of hyperbolic wave I against `ε` (σ = ε^{1/5}).
    Lemma22,
    /// `sup_t ‖b‖²_{L²}` of hyperbolic wave II against `ε`.
    Lemma26,
    /// Exponential decay rate of the shock tail against `ε`.
    ShockTail,
    /// Gaussian coefficient of the contact tail against `ε`.
    ContactTail,
}

impl ScalingStudy {
    pub const ALL: [ScalingStudy; 5] = [
        ScalingStudy::Lemma21,
        ScalingStudy::Lemma22,
        ScalingStudy::Lemma26,
        ScalingStudy::ShockTail,
        ScalingStudy::ContactTail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalingStudy::Lemma21 => "lemma21",
            ScalingStudy::Lemma22 => "lemma22",
            ScalingStudy::Lemma26 => "lemma26",
            ScalingStudy::ShockTail => "shock_tail",
            ScalingStudy::ContactTail => "contact_tail",
        }
    }

    /// Predicted log-log slope; `p` is the Lebesgue exponent of `Lemma21`.
    pub fn predicted(self, p: f64) -> f64 {
        match self {
            ScalingStudy::Lemma21 => -1.0 + 1.0 / p,
            ScalingStudy::Lemma22 => 1.8,
            ScalingStudy::Lemma26 => 2.5,
            ScalingStudy::ShockTail | ScalingStudy::ContactTail => -1.0,
        }
    }
}

impl fmt::Display for ScalingStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalingStudy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scaling study {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub pattern: WavePattern,
    /// Swept parameter: `σ` for `Lemma21`, `ε` otherwise.
    pub values: Vec<f64>,
    /// Lebesgue exponent for `Lemma21`.
    pub p: f64,
    pub h: f64,
    pub t_end: f64,
    pub transport: Transport,
    pub exec: Execution,
}

impl ScalingConfig {
    pub fn new(pattern: WavePattern, values: Vec<f64>) -> Self {
        Self {
            pattern,
            values,
            p: 2.0,
            h: 0.1,
            t_end: 1.0,
            transport: Transport::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub parameter: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub which: ScalingStudy,
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub predicted: f64,
    pub residual: f64,
}

impl ScalingReport {
    pub fn within(&self, tol: f64) -> bool {
        (self.slope - self.predicted).abs() <= tol
    }
}

/// Measures one scaling law across `cfg.values` and fits its log-log slope.
pub fn run_scaling_study(which: ScalingStudy, cfg: &ScalingConfig) -> Result<ScalingReport> {
    if cfg.values.len() < 3 {
        return Err(Error::Config(format!("{which} needs at least 3 parameter values")));
    }
    if cfg.values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Config(format!("{which}: parameters must be positive")));
    }
    let measure = |x: f64| -> Result<f64> {
        match which {
            ScalingStudy::Lemma21 => gradient_norm(&cfg.pattern, x, cfg.p),
            ScalingStudy::Lemma22 => wave_i_norm(cfg, x),
            ScalingStudy::Lemma26 => wave_ii_norm(cfg, x),
            ScalingStudy::ShockTail => shock_tail_rate(cfg, x),
            ScalingStudy::ContactTail => contact_tail_coefficient(cfg, x),
        }
    };
    let values = try_map_range(cfg.exec, cfg.values.len(), |i| measure(cfg.values[i]))?;
    let fit = loglog_slope(&cfg.values, &values)?;
    Ok(ScalingReport {
        which,
        rows: cfg
            .values
            .iter()
            .zip(&values)
            .map(|(&parameter, &value)| ScalingRow { parameter, value })
            .collect(),
        slope: fit.slope,
        predicted: which.predicted(cfg.p),
        residual: fit.residual,
    })
}

fn gradient_norm(pattern: &WavePattern, sigma: f64, p: f64) -> Result<f64> {
    let grid = UniformGrid::with_max_spacing(-3.0 - 40.0 * sigma, 3.0 + 40.0 * sigma, sigma / 40.0)?;
    let f = build_rarefaction_profile(pattern, sigma, 0.0, &grid)?;
    let d = &f.slice().dx;
    let g: Vec<f64> = (0..grid.n)
        .map(|i| (d.v[i].powi(2) + d.u1[i].powi(2) + d.theta[i].powi(2)).sqrt())
        .collect();
    Ok(lp_norm(&g, grid.dx, p))
}

fn wave_i_norm(cfg: &ScalingConfig, eps: f64) -> Result<f64> {
    let sigma = eps.powf(0.2);
    let rar = RarefactionProfile::new(&cfg.pattern, sigma);
    let opts = WaveIOptions {
        eps,
        h: cfg.h,
        t_end: cfg.t_end,
        grid: UniformGrid::with_max_spacing(cfg.pattern.fan_left * cfg.t_end - 2.5, 2.5, sigma / 12.0)?,
        transport: cfg.transport,
        cfl: 0.9,
        exec: cfg.exec,
    };
    Ok(build_hyperbolic_wave_I(&rar, &opts)?.max_l2_sq())
}

fn wave_ii_norm(cfg: &ScalingConfig, eps: f64) -> Result<f64> {
    let p = &cfg.pattern;
    let sigma = eps.powf(0.2);
    let rar = RarefactionProfile::new(p, sigma);
    let contact = ContactProfile::new(p, &cfg.transport)?;
    let shock = ShockProfile::new(p, &cfg.transport)?;
    let bar = CompositeBar {
        pattern: p,
        eps,
        rarefaction: &rar,
        contact: &contact,
        shock: &shock,
        wave_i: None,
    };
    let tail = contact.solution.gaussian_tail()?;
    let src = GaussianModelSource::new(p.strengths.contact, eps, tail.c_minus.min(tail.c_plus));
    let opts = WaveIIOptions {
        h: cfg.h,
        t_end: cfg.t_end,
        grid: UniformGrid::with_max_spacing(-2.5, 2.5, eps.sqrt().min(sigma) / 10.0)?,
        cfl: 0.9,
        exec: cfg.exec,
    };
    Ok(build_hyperbolic_wave_II(&bar, &src, &opts)?.max_l2_sq())
}

/// Decay rate of `|V − v₊|` ahead of the shock, from a fit of its logarithm.
fn shock_tail_rate(cfg: &ScalingConfig, eps: f64) -> Result<f64> {
    let p = &cfg.pattern;
    let prof = ShockProfile::new(p, &cfg.transport)?;
    let d = p.strengths.shock;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 0..8000 {
        let x = k as f64 * eps * 0.125;
        let dv = (p.right.v - prof.point(eps, 0.0, x).v[0]).abs();
        if dv < 1e-4 * d && dv > 1e-10 * d {
            xs.push(x);
            ys.push(dv.ln());
        }
    }
    Ok(-fit_line(&xs, &ys)?.slope)
}

/// Coefficient `c` in `|Θ_x| ~ exp(−c x²)` on the right of the contact at `t_end`.
fn contact_tail_coefficient(cfg: &ScalingConfig, eps: f64) -> Result<f64> {
    let prof = ContactProfile::new(&cfg.pattern, &cfg.transport)?;
    let sol = &prof.solution;
    let s = (eps * (1.0 + cfg.t_end)).sqrt();
    let w = sol.a(sol.theta_plus).sqrt() * s;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 0..=400 {
        let x = w * (3.0 + 5.0 * k as f64 / 400.0);
        let d = prof.point(eps, cfg.t_end, x).theta[1].abs();
        if d > 1e-280 {
            xs.push(x * x);
            ys.push(d.ln());
        }
    }
    Ok(-fit_line(&xs, &ys)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasState;
    use crate::riemann::compose_pattern;

    fn pattern() -> WavePattern {
        compose_pattern(&GasState::new(1.0, 0.0, 1.0).unwrap(), 0.92, 0.85, 0.93).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for w in ScalingStudy::ALL {
            assert_eq!(w.name().parse::<ScalingStudy>().unwrap(), w);
        }
        assert!("lemma99".parse::<ScalingStudy>().is_err());
    }

    #[test]
    fn too_few_values_are_refused() {
        let cfg = ScalingConfig::new(pattern(), vec![0.1, 0.05]);
        assert!(run_scaling_study(ScalingStudy::Lemma21, &cfg).is_err());
    }

    #[test]
    fn gradient_norm_slopes() {
        for p in [1.0, 2.0, 8.0] {
            let mut cfg = ScalingConfig::new(pattern(), vec![0.2, 0.1, 0.05, 0.025]);
            cfg.p = p;
            let r = run_scaling_study(ScalingStudy::Lemma21, &cfg).unwrap();
            assert!(r.within(0.1), "p = {p}: {} vs {}", r.slope, r.predicted);
        }
    }

    #[test]
    fn tails_scale_inversely_with_eps() {
        let cfg = ScalingConfig::new(pattern(), vec![0.02, 0.01, 0.005]);
        for w in [ScalingStudy::ShockTail, ScalingStudy::ContactTail] {
            let r = run_scaling_study(w, &cfg).unwrap();
            assert!(r.within(0.05), "{w}: {}", r.slope);
        }
    }
}

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::envelope;
use super::report::MacroSnapshot;
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::gas::GasState;
use crate::kinetic::{micro_distance, moments, run, KineticConfig, MacroFields};
use crate::numerics::fit_line;
use crate::par::{try_map_range, Execution};
use crate::riemann::euler_solution;

const SWEEP_KEYS: &[&str] = &["eps_list", "T", "n_snapshots", "refine_check"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Shared kinetic settings; `eps` is overridden per run, `h` and
    /// `t_end` are the sweep's `h` and `T`.
    pub kinetic: KineticConfig,
    pub eps_list: Vec<f64>,
    /// Measurement times per run, evenly spaced on `[h, T]`, minus one.
    pub n_snapshots: usize,
    /// Re-run the smallest ε on a doubled grid and compare sups.
    pub refine_check: bool,
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_kv(&KeyValues::from_file(path)?)
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let allowed: Vec<&str> = crate::kinetic::KINETIC_KEYS.iter().chain(SWEEP_KEYS).copied().collect();
        kv.reject_unknown(&allowed)?;
        if kv.raw("t_end").is_some() && kv.raw("T").is_some() {
            return Err(Error::Config("give either T or t_end, not both".into()));
        }
        let eps_list = kv
            .list("eps_list")?
            .ok_or_else(|| Error::Config("missing key eps_list".into()))?;
        let mut kinetic = KineticConfig::from_kv(kv)?;
        kinetic.t_end = kv.get("T")?.unwrap_or(kinetic.t_end);
        kinetic.eps = *eps_list.last().unwrap_or(&kinetic.eps);
        let cfg = Self {
            kinetic,
            eps_list,
            n_snapshots: kv.get_or("n_snapshots", 4)?,
            refine_check: kv.flag("refine_check", true)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn h(&self) -> f64 {
        self.kinetic.h
    }

    pub fn t_end(&self) -> f64 {
        self.kinetic.t_end
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.eps_list;
        if e.len() < 3 {
            return Err(Error::Config(format!("eps_list needs at least 3 values for a fit (got {})", e.len())));
        }
        if e.iter().any(|&v| !(v > 0.0)) || e.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("eps_list must be positive and strictly decreasing".into()));
        }
        if !(self.h() > 0.0 && self.h() < self.t_end()) {
            return Err(Error::Config(format!("need 0 < h < T (h = {}, T = {})", self.h(), self.t_end())));
        }
        if self.n_snapshots == 0 {
            return Err(Error::Config("n_snapshots must be positive".into()));
        }
        // profile resolution rule: dm <= min(σ, √ε)/10 at the smallest ε
        let k = self.run_config(*e.last().unwrap());
        k.validate()?;
        let pattern = k.pattern()?;
        let rho_max = [pattern.left, pattern.mid_star, pattern.mid_upper, pattern.right]
            .iter()
            .map(|s| s.rho())
            .fold(0.0, f64::max);
        let dx = (k.x_span.1 - k.x_span.0) / k.n_x as f64;
        let eps = k.eps;
        let need = eps.powf(0.2).min(eps.sqrt()) / 10.0;
        if rho_max * dx > need {
            return Err(Error::Config(format!(
                "grid too coarse: mass spacing {:.3e} exceeds min(σ, √ε)/10 = {need:.3e}",
                rho_max * dx
            )));
        }
        for &eps in e {
            self.run_config(eps).check_domain(&pattern)?;
        }
        Ok(())
    }

    /// Measurement times on `[h, T]`.
    pub fn times(&self) -> Vec<f64> {
        let (h, t) = (self.h(), self.t_end());
        let n = self.n_snapshots;
        (0..=n).map(|k| if k == n { t } else { h + (t - h) * k as f64 / n as f64 }).collect()
    }

    /// Kinetic configuration of the run at `eps`.
    pub fn run_config(&self, eps: f64) -> KineticConfig {
        KineticConfig {
            eps,
            snapshots: self.times(),
            ..self.kinetic.clone()
        }
    }
}

/// Whether `(t, x)` lies in `Σ_{h,T}` (Lagrangian `x`).
pub fn in_sigma(t: f64, x: f64, h: f64, t_end: f64, s3: f64) -> bool {
    t >= h && t <= t_end && x.abs() >= h && (x - s3 * t).abs() >= h
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    /// Sup over `Σ_{h,T}` of the distance to the inviscid Maxwellian.
    pub sup_error: f64,
    /// Largest over the snapshots of the `L²(dm)` distance on `Σ_{h,T}`.
    pub l2_error: f64,
    /// Same measurements against the composite-profile Maxwellian.
    pub sup_error_composite: f64,
    pub l2_error_composite: f64,
    pub envelope_ratio: f64,
    pub n_x: usize,
    pub n_xi: usize,
    /// Cell-time samples inside `Σ_{h,T}`.
    pub samples: usize,
    /// Wall-clock seconds; not serialized so reports stay deterministic.
    #[serde(skip)]
    pub runtime_s: f64,
}

impl PartialEq for SweepRow {
    fn eq(&self, o: &Self) -> bool {
        self.eps == o.eps
            && self.sup_error == o.sup_error
            && self.l2_error == o.l2_error
            && self.sup_error_composite == o.sup_error_composite
            && self.l2_error_composite == o.l2_error_composite
            && self.envelope_ratio == o.envelope_ratio
            && self.n_x == o.n_x
            && self.n_xi == o.n_xi
            && self.samples == o.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    /// OLS slope of `ln sup_error` against `ln ε`.
    pub order: f64,
    pub intercept: f64,
    /// RMS residual of the fit.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub eps: f64,
    pub n_x: usize,
    pub sup_error: f64,
    pub sup_error_refined: f64,
    pub relative_change: f64,
}

impl Refinement {
    pub fn passed(&self) -> bool {
        self.relative_change < 0.05
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fit: Option<SweepFit>,
    /// max/min of the envelope ratios.
    pub envelope_spread: Option<f64>,
    pub refinement: Option<Refinement>,
}

impl SweepResult {
    fn assemble(rows: Vec<SweepRow>, refinement: Option<Refinement>) -> Self {
        let positive = rows.len() >= 3 && rows.iter().all(|r| r.sup_error > 0.0);
        let fit = positive
            .then(|| {
                let x: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
                let y: Vec<f64> = rows.iter().map(|r| r.sup_error.ln()).collect();
                fit_line(&x, &y).ok()
            })
            .flatten()
            .map(|f| SweepFit {
                order: f.slope,
                intercept: f.intercept,
                residual: f.residual,
            });
        let envelope_spread = positive.then(|| {
            let r = rows.iter().map(|r| r.envelope_ratio);
            r.clone().fold(0.0, f64::max) / r.fold(f64::INFINITY, f64::min)
        });
        Self {
            rows,
            fit,
            envelope_spread,
            refinement,
        }
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error)
    }

    /// Whether every composite-reference error is at most the inviscid one.
    pub fn composite_helps(&self) -> bool {
        self.rows.iter().all(|r| r.sup_error_composite <= r.sup_error)
    }

    pub fn accepted(&self) -> bool {
        self.refinement.is_none_or(|r| r.passed())
    }
}

/// Full output of one ε run.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub row: SweepRow,
    pub snapshots: Vec<MacroSnapshot>,
}

fn measure(cfg: &SweepConfig, eps: f64, n_x: usize, exec: Execution) -> Result<SweepRun> {
    let clock = Instant::now();
    let k = KineticConfig { n_x, ..cfg.run_config(eps) };
    let (initial, pattern) = k.initial_state(exec)?;
    let composite = k.composite(&pattern, exec)?;
    let star = k.star(&pattern);
    let states = run(&initial, k.t_end, &k.snapshots, k.cfl)?;
    let (h, t_end) = (cfg.h(), cfg.t_end());
    let mut row = SweepRow {
        eps,
        sup_error: 0.0,
        l2_error: 0.0,
        sup_error_composite: 0.0,
        l2_error_composite: 0.0,
        envelope_ratio: 0.0,
        n_x,
        n_xi: k.n_xi,
        samples: 0,
        runtime_s: 0.0,
    };
    let mut snapshots = Vec::with_capacity(states.len());
    for st in &states {
        let t = st.time;
        let mc = st.mass_coordinates();
        let inviscid = reference(&mc, |m| euler_solution(&pattern, t, m));
        let smooth = reference(&mc, |m| {
            let s = composite.state(t, m);
            GasState { u2: 0.0, u3: 0.0, ..s }
        });
        let d_inv = micro_distance(st, &inviscid, &star)?;
        let d_cmp = micro_distance(st, &smooth, &star)?;
        let own = moments(st)?;
        let (mut l2_inv, mut l2_cmp) = (0.0, 0.0);
        for (i, &m) in mc.iter().enumerate() {
            if !in_sigma(t, m, h, t_end, pattern.s3) {
                continue;
            }
            assert!(t >= h && m.abs() >= h && (m - pattern.s3 * t).abs() >= h);
            let dm = own.rho[i] * st.x_grid.dx;
            row.sup_error = row.sup_error.max(d_inv[i]);
            row.sup_error_composite = row.sup_error_composite.max(d_cmp[i]);
            l2_inv += d_inv[i] * d_inv[i] * dm;
            l2_cmp += d_cmp[i] * d_cmp[i] * dm;
            row.samples += 1;
        }
        row.l2_error = row.l2_error.max(l2_inv.sqrt());
        row.l2_error_composite = row.l2_error_composite.max(l2_cmp.sqrt());
        snapshots.push(MacroSnapshot::from_state(st, &star)?);
    }
    row.envelope_ratio = row.sup_error / envelope(eps);
    row.runtime_s = clock.elapsed().as_secs_f64();
    Ok(SweepRun { row, snapshots })
}

fn reference(mass: &[f64], f: impl Fn(f64) -> GasState) -> MacroFields {
    let states: Vec<GasState> = mass.iter().map(|&m| f(m)).collect();
    MacroFields::from_states(&states)
}

/// Runs the kinetic solver for every ε (concurrently under
/// [`Execution::Parallel`]) and measures the distance to the inviscid
/// Riemann Maxwellian over `Σ_{h,T}`.
pub fn run_convergence_sweep(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    Ok(run_convergence_sweep_detailed(cfg, exec)?.0)
}

/// [`run_convergence_sweep`] that also returns the per-ε snapshots.
pub fn run_convergence_sweep_detailed(cfg: &SweepConfig, exec: Execution) -> Result<(SweepResult, Vec<SweepRun>)> {
    cfg.validate()?;
    let n_x = cfg.kinetic.n_x;
    let runs = try_map_range(exec, cfg.eps_list.len(), |i| measure(cfg, cfg.eps_list[i], n_x, exec))?;
    let refinement = if cfg.refine_check {
        let last = runs.last().expect("validated non-empty");
        let fine = measure(cfg, last.row.eps, 2 * n_x, exec)?;
        Some(Refinement {
            eps: last.row.eps,
            n_x,
            sup_error: last.row.sup_error,
            sup_error_refined: fine.row.sup_error,
            relative_change: (fine.row.sup_error - last.row.sup_error).abs() / fine.row.sup_error,
        })
    } else {
        None
    };
    let rows = runs.iter().map(|r| r.row.clone()).collect();
    Ok((SweepResult::assemble(rows, refinement), runs))
}

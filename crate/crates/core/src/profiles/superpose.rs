//! Assembly of the composite profile from its wave components.

use serde::{Deserialize, Serialize};

use super::hyperbolic::{
    build_hyperbolic_wave_I, build_hyperbolic_wave_II, CompositeBar, GaussianModelSource,
    HyperbolicWaveField, WaveIIOptions, WaveIOptions,
};
use super::{
    ContactProfile, FieldSlice, Fields, RarefactionProfile, ShockProfile, SpaceTimeField, Transport,
};
use crate::error::{Error, Result};
use crate::gas::GasState;
use crate::numerics::UniformGrid;
use crate::par::Execution;
use crate::riemann::WavePattern;

/// Per-wave `V` components of one assembled time level.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub t: f64,
    pub v_r1: Vec<f64>,
    pub d1: Vec<f64>,
    pub v_cd: Vec<f64>,
    pub v_s3: Vec<f64>,
    pub b1: Vec<f64>,
}

impl Components {
    pub fn columns(&self) -> [(&'static str, &[f64]); 5] {
        [
            ("V_R1", &self.v_r1),
            ("d1", &self.d1),
            ("V_CD", &self.v_cd),
            ("V_S3", &self.v_s3),
            ("b1", &self.b1),
        ]
    }
}

fn check_grid(name: &str, a: &SpaceTimeField, b: &SpaceTimeField) -> Result<()> {
    if a.x_grid != b.x_grid || a.slices.len() != b.slices.len() {
        return Err(Error::Precondition(format!("{name} is not on the rarefaction grid")));
    }
    if a.slices.iter().zip(&b.slices).any(|(s, r)| s.t != r.t) {
        return Err(Error::Precondition(format!("{name} has different time levels")));
    }
    Ok(())
}

/// Superposes rarefaction, contact and shock fields with the optional
/// correction waves, time level by time level.
///
/// `d_i` and `d_ii` are sampled at the field's grid points and times, so
/// they may live on their own grids.
pub fn superpose(
    rar: &SpaceTimeField,
    d_i: Option<&HyperbolicWaveField>,
    contact: &SpaceTimeField,
    shock: &SpaceTimeField,
    d_ii: Option<&HyperbolicWaveField>,
    pattern: &WavePattern,
) -> Result<(SpaceTimeField, Vec<Components>)> {
    check_grid("contact field", rar, contact)?;
    check_grid("shock field", rar, shock)?;
    let g = &rar.x_grid;
    let (ms, mu) = (&pattern.mid_star, &pattern.mid_upper);
    let sub = [ms.v + mu.v, ms.u1 + mu.u1, ms.total_energy() + mu.total_energy()];
    let mut slices = Vec::with_capacity(rar.slices.len());
    let mut comps = Vec::with_capacity(rar.slices.len());
    for ((r, c), s) in rar.slices.iter().zip(&contact.slices).zip(&shock.slices) {
        let t = r.t;
        let (r, c, s) = (&r.values, &c.values, &s.values);
        let mut f = Fields::zeros(g.n);
        let mut comp = Components {
            t,
            ..Default::default()
        };
        for i in 0..g.n {
            let x = g.x(i);
            let d = d_i.map_or(vec![0.0; 3], |w| w.sample(t, x));
            let b = d_ii.map_or(vec![0.0; 5], |w| w.sample(t, x));
            let v = r.v[i] + d[0] + c.v[i] + s.v[i] - sub[0] + b[0];
            let u1 = r.u1[i] + d[1] + c.u1[i] + s.u1[i] - sub[1] + b[1];
            let e = r.e[i] + d[2] + c.e[i] + s.e[i] - sub[2] + b[4];
            let (u2, u3) = (c.u2[i] + b[2], c.u3[i] + b[3]);
            f.v[i] = v;
            f.u1[i] = u1;
            f.u2[i] = u2;
            f.u3[i] = u3;
            f.e[i] = e;
            f.theta[i] = e - 0.5 * (u1 * u1 + u2 * u2 + u3 * u3);
            comp.v_r1.push(r.v[i]);
            comp.d1.push(d[0]);
            comp.v_cd.push(c.v[i]);
            comp.v_s3.push(s.v[i]);
            comp.b1.push(b[0]);
        }
        f.check_positive()?;
        slices.push(FieldSlice::from_values(t, f, g));
        comps.push(comp);
    }
    Ok((
        SpaceTimeField {
            x_grid: g.clone(),
            slices,
        },
        comps,
    ))
}

/// Which pieces of the composite profile to build.
#[derive(Debug, Clone)]
pub struct CompositeOptions {
    pub eps: f64,
    /// Rarefaction smoothing scale; `ε^{1/5}` when `None`.
    pub sigma: Option<f64>,
    pub h: f64,
    pub t_end: f64,
    pub transport: Transport,
    pub wave_i: bool,
    pub wave_ii: bool,
    /// Lagrangian interval carrying the correction waves.
    pub span: (f64, f64),
    pub cfl: f64,
    pub exec: Execution,
}

impl CompositeOptions {
    pub fn new(eps: f64, h: f64, t_end: f64) -> Self {
        Self {
            eps,
            sigma: None,
            h,
            t_end,
            transport: Transport::default(),
            wave_i: false,
            wave_ii: false,
            span: (-2.0, 2.0),
            cfl: 0.9,
            exec: Execution::default(),
        }
    }
}

/// The composite approximate solution, evaluable anywhere in `[h, T]`.
#[derive(Debug, Clone)]
pub struct CompositeProfile {
    pub pattern: WavePattern,
    pub eps: f64,
    pub rarefaction: RarefactionProfile,
    pub contact: ContactProfile,
    pub shock: ShockProfile,
    pub wave_i: Option<HyperbolicWaveField>,
    pub wave_ii: Option<HyperbolicWaveField>,
}

impl CompositeProfile {
    pub fn build(pattern: &WavePattern, opts: &CompositeOptions) -> Result<Self> {
        if !(opts.eps > 0.0) {
            return Err(Error::Precondition(format!("eps must be positive (got {})", opts.eps)));
        }
        let sigma = opts.sigma.unwrap_or(opts.eps.powf(0.2));
        let rarefaction = RarefactionProfile::new(pattern, sigma);
        let contact = ContactProfile::new(pattern, &opts.transport)?;
        let shock = ShockProfile::new(pattern, &opts.transport)?;
        let max_dx = (sigma / 10.0).min(opts.eps.sqrt() / 10.0);
        let grid = UniformGrid::with_max_spacing(opts.span.0, opts.span.1, max_dx)?;
        let wave_i = if opts.wave_i {
            Some(build_hyperbolic_wave_I(
                &rarefaction,
                &WaveIOptions {
                    eps: opts.eps,
                    h: opts.h,
                    t_end: opts.t_end,
                    grid: grid.clone(),
                    transport: opts.transport,
                    cfl: opts.cfl,
                    exec: opts.exec,
                },
            )?)
        } else {
            None
        };
        // the model source scales with the contact strength
        let wave_ii = if opts.wave_ii && pattern.strengths.contact > 0.0 {
            let bar = CompositeBar {
                pattern,
                eps: opts.eps,
                rarefaction: &rarefaction,
                contact: &contact,
                shock: &shock,
                wave_i: wave_i.as_ref(),
            };
            let tail = contact.solution.gaussian_tail()?;
            let src = GaussianModelSource::new(
                pattern.strengths.contact,
                opts.eps,
                tail.c_minus.min(tail.c_plus),
            );
            Some(build_hyperbolic_wave_II(
                &bar,
                &src,
                &WaveIIOptions {
                    h: opts.h,
                    t_end: opts.t_end,
                    grid,
                    cfl: opts.cfl,
                    exec: opts.exec,
                },
            )?)
        } else {
            None
        };
        Ok(Self {
            pattern: *pattern,
            eps: opts.eps,
            rarefaction,
            contact,
            shock,
            wave_i,
            wave_ii,
        })
    }

    fn bar(&self) -> CompositeBar<'_> {
        CompositeBar {
            pattern: &self.pattern,
            eps: self.eps,
            rarefaction: &self.rarefaction,
            contact: &self.contact,
            shock: &self.shock,
            wave_i: self.wave_i.as_ref(),
        }
    }

    /// Composite state at `(t, x)` in Lagrangian coordinates.
    pub fn state(&self, t: f64, x: f64) -> GasState {
        let bar = self.bar().state(t, x);
        let b = self
            .wave_ii
            .as_ref()
            .map_or(vec![0.0; 5], |w| w.sample(t, x));
        let (u1, u2, u3) = (bar.u1 + b[1], b[2], b[3]);
        let e = bar.total_energy() + b[4];
        GasState {
            v: bar.v + b[0],
            u1,
            u2,
            u3,
            theta: e - 0.5 * (u1 * u1 + u2 * u2 + u3 * u3),
        }
    }

    /// Assembled field on `grid` at time `t` with its per-wave components.
    pub fn field(&self, t: f64, grid: &UniformGrid, exec: Execution) -> Result<(SpaceTimeField, Components)> {
        let rar = self.rarefaction.field(t, grid, exec);
        let cd = self.contact.field(self.eps, t, grid, exec);
        let s3 = self.shock.field(self.eps, t, grid, exec);
        let (f, mut comps) = superpose(
            &rar,
            self.wave_i.as_ref(),
            &cd,
            &s3,
            self.wave_ii.as_ref(),
            &self.pattern,
        )?;
        Ok((f, comps.remove(0)))
    }
}

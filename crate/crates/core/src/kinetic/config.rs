use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Boundary, ReducedKineticState, VelocityGrid};
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::gas::GasState;
use crate::numerics::UniformGrid;
use crate::par::Execution;
use crate::profiles::{lagrangian_to_eulerian, CompositeOptions, CompositeProfile, Transport};
use crate::riemann::{solve_riemann, WavePattern};

/// Initial data of a kinetic run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    /// Maxwellian of the sharp Riemann data at `t = 0`.
    A,
    /// Maxwellian of the composite profile at `t = h`.
    B,
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(InitMode::A),
            "B" | "b" => Ok(InitMode::B),
            other => Err(Error::Config(format!("init_mode must be A or B (got {other:?})"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticConfig {
    pub left: GasState,
    pub right: GasState,
    pub eps: f64,
    pub n_x: usize,
    pub n_xi: usize,
    /// Eulerian domain.
    pub x_span: (f64, f64),
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub init_mode: InitMode,
    pub cfl: f64,
    pub transport: Transport,
    /// Start time of option B.
    pub h: f64,
    /// Include the hyperbolic correction waves in the option B profile.
    pub wave_i: bool,
    pub wave_ii: bool,
    /// `θ★ / θ*` of the global Maxwellian weighting the distance.
    pub star_theta_factor: f64,
}

pub(crate) const KINETIC_KEYS: &[&str] = &[
    "left", "right", "eps", "n_x", "n_xi", "x_span", "t_end", "snapshots", "init_mode", "cfl", "mu0",
    "prandtl", "h", "wave_i", "wave_ii", "star_theta_factor",
];

impl KineticConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let kv = KeyValues::from_file(path)?;
        kv.reject_unknown(KINETIC_KEYS)?;
        Self::from_kv(&kv)
    }

    /// Reads the kinetic keys, ignoring any others.
    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let span = kv.list("x_span")?.unwrap_or_else(|| vec![-1.5, 1.5]);
        if span.len() != 2 || !(span[1] > span[0]) {
            return Err(Error::Config("x_span: expected two increasing values".into()));
        }
        let cfg = Self {
            left: kv.state("left")?.ok_or_else(|| Error::Config("missing key left".into()))?,
            right: kv.state("right")?.ok_or_else(|| Error::Config("missing key right".into()))?,
            eps: kv.get_or("eps", 0.01)?,
            n_x: kv.get_or("n_x", 2000)?,
            n_xi: kv.get_or("n_xi", 128)?,
            x_span: (span[0], span[1]),
            t_end: kv.get_or("t_end", 0.5)?,
            snapshots: kv.list("snapshots")?.unwrap_or_default(),
            init_mode: kv.get_or("init_mode", InitMode::B)?,
            cfl: kv.get_or("cfl", 0.9)?,
            transport: Transport {
                mu0: kv.get_or("mu0", 1.0)?,
                prandtl: kv.get_or("prandtl", 1.0)?,
            },
            h: kv.get_or("h", 0.1)?,
            wave_i: kv.flag("wave_i", true)?,
            wave_ii: kv.flag("wave_ii", true)?,
            star_theta_factor: kv.get_or("star_theta_factor", 0.75)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive (got {})", self.eps)));
        }
        if self.n_x < 4 {
            return Err(Error::Config("n_x must be at least 4".into()));
        }
        if !(self.h > 0.0) || (self.init_mode == InitMode::B && !(self.t_end >= self.h)) {
            return Err(Error::Config(format!("need 0 < h <= t_end (h = {}, t_end = {})", self.h, self.t_end)));
        }
        if !(self.star_theta_factor > 0.5 && self.star_theta_factor < 1.0) {
            return Err(Error::Config(format!(
                "star_theta_factor must lie in (0.5, 1) (got {})",
                self.star_theta_factor
            )));
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("snapshots must increase".into()));
        }
        Ok(())
    }

    pub fn start_time(&self) -> f64 {
        match self.init_mode {
            InitMode::A => 0.0,
            InitMode::B => self.h,
        }
    }

    /// Global Maxwellian state: `mid_star` with a scaled temperature.
    pub fn star(&self, pattern: &WavePattern) -> GasState {
        GasState {
            theta: self.star_theta_factor * pattern.mid_star.theta,
            ..pattern.mid_star
        }
    }

    /// Checks that no wave reaches the outflow boundaries before `t_end`.
    pub fn check_domain(&self, pattern: &WavePattern) -> Result<()> {
        let sound = |s: &GasState| (10.0 * s.theta / 9.0).sqrt();
        let head = (pattern.left.u1 - sound(&pattern.left)) * self.t_end;
        let front = pattern.eulerian_shock_speed() * self.t_end;
        let mut margin = 10.0 * (self.eps * self.t_end).sqrt();
        if self.init_mode == InitMode::B {
            margin += 5.0 * self.eps.powf(0.2);
        }
        if self.x_span.0 > head.min(0.0) - margin || self.x_span.1 < front.max(0.0) + margin {
            return Err(Error::Config(format!(
                "x_span ({}, {}) must contain [{:.3}, {:.3}] for waves to stay clear of the boundaries",
                self.x_span.0,
                self.x_span.1,
                head.min(0.0) - margin,
                front.max(0.0) + margin
            )));
        }
        Ok(())
    }

    pub fn pattern(&self) -> Result<WavePattern> {
        solve_riemann(&self.left, &self.right)
    }

    fn grid(&self) -> Result<UniformGrid> {
        // cell centres
        let dx = (self.x_span.1 - self.x_span.0) / self.n_x as f64;
        UniformGrid::new(self.x_span.0 + 0.5 * dx, self.x_span.1 - 0.5 * dx, self.n_x)
    }

    /// Composite profile used by option B and as a reference.
    pub fn composite(&self, pattern: &WavePattern, exec: Execution) -> Result<CompositeProfile> {
        let mut opts = CompositeOptions::new(self.eps, self.h, self.t_end.max(self.h * (1.0 + 1e-9)));
        opts.transport = self.transport;
        opts.wave_i = self.wave_i;
        opts.wave_ii = self.wave_ii;
        opts.span = self.mass_span(pattern);
        opts.exec = exec;
        CompositeProfile::build(pattern, &opts)
    }

    /// Lagrangian interval covering the Eulerian domain over the run.
    pub fn mass_span(&self, pattern: &WavePattern) -> (f64, f64) {
        let rho_max = [pattern.left, pattern.mid_star, pattern.mid_upper, pattern.right]
            .iter()
            .map(|s| s.rho())
            .fold(0.0, f64::max);
        let reach = self.x_span.0.abs().max(self.x_span.1.abs()) + self.t_end * 3.0;
        let l = rho_max * reach + 0.5;
        (-l, l)
    }

    /// Initial kinetic state at [`Self::start_time`].
    pub fn initial_state(&self, exec: Execution) -> Result<(ReducedKineticState, WavePattern)> {
        let pattern = self.pattern()?;
        let grid = self.grid()?;
        let face_left = self.x_span.0;
        let (states, mass_left) = match self.init_mode {
            InitMode::A => {
                let states: Vec<GasState> = (0..grid.n)
                    .map(|i| if grid.x(i) < 0.0 { pattern.left } else { pattern.right })
                    .collect();
                let m = if face_left < 0.0 {
                    face_left * pattern.left.rho()
                } else {
                    face_left * pattern.right.rho()
                };
                (states, m)
            }
            InitMode::B => {
                let prof = self.composite(&pattern, exec)?;
                let (lo, hi) = self.mass_span(&pattern);
                let dm = (self.eps / 8.0).min(self.eps.powf(0.2) / 20.0);
                let mgrid = UniformGrid::with_max_spacing(lo, hi, dm)?;
                let (field, _) = prof.field(self.h, &mgrid, exec)?;
                let (_, map) = lagrangian_to_eulerian(&field, self.h, pattern.mid_star.u1 * self.h)?;
                let states: Vec<GasState> = (0..grid.n)
                    .map(|i| {
                        let s = prof.state(self.h, map.to_lagrangian(grid.x(i)));
                        GasState { u2: 0.0, u3: 0.0, ..s }
                    })
                    .collect();
                (states, map.to_lagrangian(face_left))
            }
        };
        let vgrid = VelocityGrid::covering(&states, self.n_xi)?;
        let mut st = ReducedKineticState::from_states(grid, vgrid, &states, self.eps, Boundary::Outflow)?;
        st.time = self.start_time();
        st.transport = self.transport;
        st.mass_left = mass_left;
        st.exec = exec;
        Ok((st, pattern))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "left = 1, 0, 1\nright = 1.1, -0.15, 0.85\neps = 0.02\nn_x = 200\nn_xi = 64\nt_end = 0.3\n";

    #[test]
    fn defaults_and_round_trip() {
        let kv: KeyValues = TEXT.parse().unwrap();
        let cfg = KineticConfig::from_kv(&kv).unwrap();
        assert_eq!(cfg.init_mode, InitMode::B);
        assert_eq!(cfg.x_span, (-1.5, 1.5));
        assert!(kv.reject_unknown(KINETIC_KEYS).is_ok());
        let bad: KeyValues = format!("{TEXT}init_mode = C\n").parse().unwrap();
        assert!(KineticConfig::from_kv(&bad).is_err());
    }

    #[test]
    fn option_b_starts_from_the_composite_profile() {
        let kv: KeyValues = format!("{TEXT}wave_ii = false\n").parse().unwrap();
        let cfg = KineticConfig::from_kv(&kv).unwrap();
        let (st, p) = cfg.initial_state(Execution::Parallel).unwrap();
        assert_eq!(st.time, cfg.h);
        let m = super::super::moments(&st).unwrap();
        // cell densities agree with the profile at the cells' own mass coordinates
        let prof = cfg.composite(&p, Execution::Parallel).unwrap();
        let mc = st.mass_coordinates();
        for i in (0..st.n_cells()).step_by(7) {
            let want = prof.state(cfg.h, mc[i]).rho();
            assert!((m.rho[i] - want).abs() < 1e-3 * want, "cell {i}: {} vs {want}", m.rho[i]);
        }
        // the contact particle sits at mass zero near X = u*·h
        let k = mc.iter().position(|&x| x >= 0.0).unwrap();
        assert!((st.x_grid.x(k) - p.mid_star.u1 * cfg.h).abs() < 2.0 * st.x_grid.dx);
    }

    #[test]
    fn option_a_is_sharp() {
        let kv: KeyValues = format!("{TEXT}init_mode = A\n").parse().unwrap();
        let cfg = KineticConfig::from_kv(&kv).unwrap();
        let (st, p) = cfg.initial_state(Execution::Sequential).unwrap();
        assert_eq!(st.time, 0.0);
        let m = super::super::moments(&st).unwrap();
        let half = st.n_cells() / 2;
        assert!((m.theta[half - 1] - p.left.theta).abs() < 1e-8);
        assert!((m.theta[half] - p.right.theta).abs() < 1e-8);
        assert!((st.mass_coordinates()[half] - 0.5 * st.x_grid.dx * p.right.rho()).abs() < 1e-8);
    }
}

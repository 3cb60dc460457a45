//! Semi-Lagrangian solver for diagonal linear hyperbolic systems
//!
//! ```text
//! D_j,t + (λ_j D_j)_x = S_j + Σ_k C_jk D_k,
//! ```
//!
//! integrated along `dx/dt = λ_j` with a Heun predictor–corrector and
//! monotone cubic interpolation at the feet of the characteristics.

use crate::error::{Error, Result};
use crate::numerics::{monotone_cubic_uniform, UniformGrid};
use crate::par::{map_range, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From the first time level with zero data.
    Forward,
    /// From the last time level with zero data.
    Backward,
}

/// Coefficients of the diagonal system on one time level, indexed by grid
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCoefficients<const N: usize> {
    pub speed: Vec<[f64; N]>,
    pub speed_x: Vec<[f64; N]>,
    pub source: Vec<[f64; N]>,
    pub coupling: Vec<[[f64; N]; N]>,
}

impl<const N: usize> LevelCoefficients<N> {
    pub fn zeros(n: usize) -> Self {
        Self {
            speed: vec![[0.0; N]; n],
            speed_x: vec![[0.0; N]; n],
            source: vec![[0.0; N]; n],
            coupling: vec![[[0.0; N]; N]; n],
        }
    }

    /// Right-hand side along the `j`-characteristic at grid point `i`.
    #[inline]
    fn along(&self, i: usize, j: usize, d: &[f64; N]) -> f64 {
        let mut f = self.source[i][j] - self.speed_x[i][j] * d[j];
        for (k, dk) in d.iter().enumerate() {
            f += self.coupling[i][j][k] * dk;
        }
        f
    }
}

/// A diagonal system sampled on `times × grid`.
#[derive(Debug, Clone)]
pub struct DiagonalSystem<const N: usize> {
    pub grid: UniformGrid,
    pub times: Vec<f64>,
    pub levels: Vec<LevelCoefficients<N>>,
}

impl<const N: usize> DiagonalSystem<N> {
    pub fn max_speed(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.speed.iter().flatten())
            .fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    fn check_cfl(&self) -> Result<()> {
        let lam = self.max_speed();
        for w in self.times.windows(2) {
            let dt = w[1] - w[0];
            if !(dt > 0.0) {
                return Err(Error::Precondition("time levels must increase".into()));
            }
            let limit = self.grid.dx / lam.max(1e-300);
            if dt > limit * (1.0 + 1e-9) {
                return Err(Error::Cfl { dt, limit });
            }
        }
        Ok(())
    }

    /// Solves for the components in `group`, starting from zero at the
    /// first (forward) or last (backward) level. Other components are read
    /// from `sol`, which is indexed `[level][point]` and updated in place.
    pub fn solve_group(
        &self,
        dir: Direction,
        group: &[usize],
        sol: &mut [Vec<[f64; N]>],
        exec: Execution,
    ) -> Result<()> {
        let nt = self.times.len();
        if sol.len() != nt || sol.iter().any(|s| s.len() != self.grid.n) {
            return Err(Error::Precondition("solution array does not match the grid".into()));
        }
        if self.levels.len() != nt {
            return Err(Error::Precondition("one coefficient level per time required".into()));
        }
        self.check_cfl()?;
        let start = match dir {
            Direction::Forward => 0,
            Direction::Backward => nt - 1,
        };
        for p in sol[start].iter_mut() {
            for &j in group {
                p[j] = 0.0;
            }
        }
        let sgn = match dir {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        let steps: Vec<(usize, usize)> = match dir {
            Direction::Forward => (0..nt - 1).map(|n| (n, n + 1)).collect(),
            Direction::Backward => (1..nt).rev().map(|n| (n, n - 1)).collect(),
        };
        let g = &self.grid;
        for (o, w) in steps {
            let dt = (self.times[w] - self.times[o]).abs();
            let lo = &self.levels[o];
            let lw = &self.levels[w];
            let old = &sol[o];
            // per-component arrays of the old data and of the forcing
            let d_old: Vec<Vec<f64>> = (0..N).map(|j| old.iter().map(|p| p[j]).collect()).collect();
            let f_old: Vec<Vec<f64>> = (0..N)
                .map(|j| {
                    if group.contains(&j) {
                        (0..g.n).map(|i| lo.along(i, j, &old[i])).collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            let speed_old: Vec<Vec<f64>> = (0..N).map(|j| lo.speed.iter().map(|s| s[j]).collect()).collect();
            let known = &sol[w];
            let new: Vec<[f64; N]> = map_range(exec, g.n, |i| {
                let x = g.x(i);
                let mut pred = known[i];
                let mut base = [0.0; N];
                let mut f0 = [0.0; N];
                for &j in group {
                    let lw_ = lw.speed[i][j];
                    let xm = x - sgn * dt * lw_;
                    let lam = 0.5 * (lw_ + interp_linear(g, &speed_old[j], xm));
                    let xf = x - sgn * dt * lam;
                    base[j] = monotone_cubic_uniform(g, &d_old[j], xf);
                    f0[j] = interp_linear(g, &f_old[j], xf);
                    pred[j] = base[j] + sgn * dt * f0[j];
                }
                let mut out = known[i];
                for &j in group {
                    let f1 = lw.along(i, j, &pred);
                    out[j] = base[j] + sgn * 0.5 * dt * (f0[j] + f1);
                }
                out
            });
            sol[w] = new;
        }
        Ok(())
    }
}

#[inline]
fn interp_linear(g: &UniformGrid, y: &[f64], x: f64) -> f64 {
    let s = ((x - g.start) / g.dx).clamp(0.0, (g.n - 1) as f64);
    let i = (s.floor() as usize).min(g.n - 2);
    let f = s - i as f64;
    y[i] + f * (y[i + 1] - y[i])
}

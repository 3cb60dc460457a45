use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasState, R_GAS};

/// Uniform `ξ₁` grid with trapezoidal weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n_xi: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Half-width of the velocity window in thermal speeds.
pub const THERMAL_SPAN: f64 = 8.0;

impl VelocityGrid {
    pub fn new(xi_min: f64, xi_max: f64, n_xi: usize) -> Result<Self> {
        if n_xi < 8 || !(xi_max > xi_min) || !xi_min.is_finite() || !xi_max.is_finite() {
            return Err(Error::Config(format!(
                "velocity grid needs n_xi >= 8 and xi_min < xi_max (got {n_xi}, [{xi_min}, {xi_max}])"
            )));
        }
        let d = (xi_max - xi_min) / (n_xi - 1) as f64;
        let nodes = (0..n_xi).map(|k| xi_min + d * k as f64).collect();
        let mut weights = vec![d; n_xi];
        weights[0] *= 0.5;
        weights[n_xi - 1] *= 0.5;
        Ok(Self {
            xi_min,
            xi_max,
            n_xi,
            nodes,
            weights,
        })
    }

    /// Grid covering `u ± 8√(Rθ)` of every state, validated against all of
    /// them.
    pub fn covering(states: &[GasState], n_xi: usize) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Precondition("no states to cover".into()));
        }
        let lo = states
            .iter()
            .map(|s| s.u1 - THERMAL_SPAN * (R_GAS * s.theta).sqrt())
            .fold(f64::INFINITY, f64::min);
        let hi = states
            .iter()
            .map(|s| s.u1 + THERMAL_SPAN * (R_GAS * s.theta).sqrt())
            .fold(f64::NEG_INFINITY, f64::max);
        let g = Self::new(lo, hi, n_xi)?;
        for s in states {
            g.validate(s)?;
        }
        Ok(g)
    }

    /// Symmetric grid `u ± 8√(Rθ)`.
    pub fn centered(u: f64, theta: f64, n_xi: usize) -> Result<Self> {
        let w = THERMAL_SPAN * (R_GAS * theta).sqrt();
        Self::new(u - w, u + w, n_xi)
    }

    pub fn spacing(&self) -> f64 {
        (self.xi_max - self.xi_min) / (self.n_xi - 1) as f64
    }

    pub fn max_speed(&self) -> f64 {
        self.xi_min.abs().max(self.xi_max.abs())
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Checks that the first five normalized moments of the Maxwellian of
    /// `state` are reproduced to 1e-8.
    pub fn validate(&self, state: &GasState) -> Result<()> {
        let c = (R_GAS * state.theta).sqrt();
        if state.u1 - THERMAL_SPAN * c < self.xi_min - 1e-12 || state.u1 + THERMAL_SPAN * c > self.xi_max + 1e-12 {
            return Err(Error::Config(format!(
                "velocity grid [{}, {}] does not cover u ± 8√(Rθ) for u = {}, θ = {}",
                self.xi_min, self.xi_max, state.u1, state.theta
            )));
        }
        let exact = [1.0, 0.0, 1.0, 0.0, 3.0];
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt() / c;
        for (k, want) in exact.iter().enumerate() {
            let got: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&xi, w)| {
                    let z = (xi - state.u1) / c;
                    w * norm * (-0.5 * z * z).exp() * z.powi(k as i32)
                })
                .sum();
            let err = (got - want).abs() / want.abs().max(1.0);
            if err > 1e-8 {
                return Err(Error::Config(format!(
                    "velocity quadrature misses moment {k} by {err:e} (θ = {}); increase n_xi",
                    state.theta
                )));
            }
        }
        Ok(())
    }
}

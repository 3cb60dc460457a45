//! Components of the composite approximate wave pattern and their assembly.
//!
//! All builders work in the Lagrangian mass coordinate `x` with the contact
//! at `x = 0`. Fields are sampled on a [`UniformGrid`].

mod characteristics;
mod contact;
mod coords;
mod hyperbolic;
mod rarefaction;
mod shock;
mod superpose;

pub use characteristics::{Direction, DiagonalSystem, LevelCoefficients};
pub use contact::{
    build_contact_profile, ContactProfile, ContactWaveSolution, GaussianTail, NonFluidCoefficients,
    ZeroNonFluid,
};
pub use coords::{eulerian_to_lagrangian, lagrangian_to_eulerian, EulerianMap};
pub use hyperbolic::{
    build_hyperbolic_wave_I, build_hyperbolic_wave_II, CompositeBar, GaussianModelSource,
    BarParts, HyperbolicWaveField, SourceProvider, WaveIOptions, WaveIIOptions, ZeroSource,
};
pub use rarefaction::{
    build_rarefaction_profile, burgers_smooth, burgers_smooth_derivs, RarefactionProfile,
};
pub use shock::{build_shock_profile, ShockProfile};
pub use superpose::{superpose, Components, CompositeOptions, CompositeProfile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasState, R_GAS};
use crate::numerics::{diff1, diff2, UniformGrid};

/// Temperature-dependent transport coefficients `μ = μ0 √θ`,
/// `κ = (5/2) R μ / Pr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transport {
    pub mu0: f64,
    pub prandtl: f64,
}

impl Default for Transport {
    fn default() -> Self {
        Self {
            mu0: 1.0,
            prandtl: 1.0,
        }
    }
}

impl Transport {
    #[inline]
    pub fn mu(&self, theta: f64) -> f64 {
        self.mu0 * theta.sqrt()
    }

    #[inline]
    pub fn dmu(&self, theta: f64) -> f64 {
        0.5 * self.mu0 / theta.sqrt()
    }

    #[inline]
    pub fn kappa(&self, theta: f64) -> f64 {
        2.5 * R_GAS * self.mu(theta) / self.prandtl
    }

    #[inline]
    pub fn dkappa(&self, theta: f64) -> f64 {
        2.5 * R_GAS * self.dmu(theta) / self.prandtl
    }
}

/// The six primitive-plus-energy components of a profile on one time level.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fields {
    pub v: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub u3: Vec<f64>,
    pub theta: Vec<f64>,
    pub e: Vec<f64>,
}

impl Fields {
    pub fn zeros(n: usize) -> Self {
        Self {
            v: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            u3: vec![0.0; n],
            theta: vec![0.0; n],
            e: vec![0.0; n],
        }
    }

    pub fn constant(state: &GasState, n: usize) -> Self {
        Self {
            v: vec![state.v; n],
            u1: vec![state.u1; n],
            u2: vec![state.u2; n],
            u3: vec![state.u3; n],
            theta: vec![state.theta; n],
            e: vec![state.total_energy(); n],
        }
    }

    /// Builds fields from primitives, filling `E = θ + |U|²/2`.
    pub fn from_primitive(v: Vec<f64>, u1: Vec<f64>, u2: Vec<f64>, u3: Vec<f64>, theta: Vec<f64>) -> Self {
        let e = (0..v.len())
            .map(|i| theta[i] + 0.5 * (u1[i] * u1[i] + u2[i] * u2[i] + u3[i] * u3[i]))
            .collect();
        Self {
            v,
            u1,
            u2,
            u3,
            theta,
            e,
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn state(&self, i: usize) -> GasState {
        GasState {
            v: self.v[i],
            u1: self.u1[i],
            u2: self.u2[i],
            u3: self.u3[i],
            theta: self.theta[i],
        }
    }

    fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        Self {
            v: f(&self.v),
            u1: f(&self.u1),
            u2: f(&self.u2),
            u3: f(&self.u3),
            theta: f(&self.theta),
            e: f(&self.e),
        }
    }

    pub fn components(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("V", &self.v),
            ("U1", &self.u1),
            ("U2", &self.u2),
            ("U3", &self.u3),
            ("Theta", &self.theta),
            ("E", &self.e),
        ]
    }

    /// Largest `|E − θ − |U|²/2|` over the grid.
    pub fn energy_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let k = 0.5 * (self.u1[i].powi(2) + self.u2[i].powi(2) + self.u3[i].powi(2));
                (self.e[i] - self.theta[i] - k).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn check_positive(&self) -> Result<()> {
        for (field, data) in [("V", &self.v), ("Theta", &self.theta)] {
            if let Some((index, &value)) = data.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
                return Err(Error::Positivity { field, index, value });
            }
        }
        Ok(())
    }
}

/// One time level of a profile with its first and second `x`-derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSlice {
    pub t: f64,
    pub values: Fields,
    pub dx: Fields,
    pub dxx: Fields,
}

impl FieldSlice {
    /// Derivatives by centered differences.
    pub fn from_values(t: f64, values: Fields, grid: &UniformGrid) -> Self {
        let dx = values.map(|y| diff1(y, grid.dx));
        let dxx = values.map(|y| diff2(y, grid.dx));
        Self { t, values, dx, dxx }
    }
}

/// A profile component sampled on a uniform `x` grid at one or more times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub x_grid: UniformGrid,
    pub slices: Vec<FieldSlice>,
}

impl SpaceTimeField {
    pub fn single(x_grid: UniformGrid, slice: FieldSlice) -> Self {
        Self {
            x_grid,
            slices: vec![slice],
        }
    }

    pub fn t_grid(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.t).collect()
    }

    /// The first slice; most builders produce a single time level.
    pub fn slice(&self) -> &FieldSlice {
        &self.slices[0]
    }

    pub fn validate(&self) -> Result<()> {
        self.slices.iter().try_for_each(|s| s.values.check_positive())
    }
}

/// Values and derivatives of a smooth profile at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProfilePoint {
    pub v: [f64; 3],
    pub u1: [f64; 3],
    pub theta: [f64; 3],
}

impl ProfilePoint {
    pub fn state(&self) -> GasState {
        GasState {
            v: self.v[0],
            u1: self.u1[0],
            u2: 0.0,
            u3: 0.0,
            theta: self.theta[0],
        }
    }
}

/// Collects sampled points into a slice, deriving `E` and its derivatives.
pub(crate) fn slice_from_points(t: f64, pts: &[ProfilePoint]) -> FieldSlice {
    let n = pts.len();
    let col = |f: &dyn Fn(&ProfilePoint) -> f64| pts.iter().map(f).collect::<Vec<f64>>();
    let values = Fields::from_primitive(
        col(&|p| p.v[0]),
        col(&|p| p.u1[0]),
        vec![0.0; n],
        vec![0.0; n],
        col(&|p| p.theta[0]),
    );
    let mut dx = Fields::zeros(n);
    let mut dxx = Fields::zeros(n);
    for (i, p) in pts.iter().enumerate() {
        dx.v[i] = p.v[1];
        dx.u1[i] = p.u1[1];
        dx.theta[i] = p.theta[1];
        dx.e[i] = p.theta[1] + p.u1[0] * p.u1[1];
        dxx.v[i] = p.v[2];
        dxx.u1[i] = p.u1[2];
        dxx.theta[i] = p.theta[2];
        dxx.e[i] = p.theta[2] + p.u1[1] * p.u1[1] + p.u1[0] * p.u1[2];
    }
    FieldSlice { t, values, dx, dxx }
}

//! Monatomic ideal gas in Lagrangian coordinates with gas constant R = 2/3,
//! so that the internal energy equals the temperature and `p = 2θ/(3v)`.

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gas constant.
pub const R_GAS: f64 = 2.0 / 3.0;

/// Fluid state in Lagrangian variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    /// Specific volume.
    pub v: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub theta: f64,
}

impl GasState {
    pub fn new(v: f64, u1: f64, theta: f64) -> Result<Self> {
        Self::new_3d(v, u1, 0.0, 0.0, theta)
    }

    pub fn new_3d(v: f64, u1: f64, u2: f64, u3: f64, theta: f64) -> Result<Self> {
        let s = Self { v, u1, u2, u3, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) || !(self.theta > 0.0) || !self.u1.is_finite() {
            return Err(Error::Domain(format!(
                "state needs v > 0 and theta > 0 (v = {}, theta = {})",
                self.v, self.theta
            )));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        1.0 / self.v
    }

    pub fn pressure(&self) -> f64 {
        2.0 * self.theta / (3.0 * self.v)
    }

    pub fn internal_energy(&self) -> f64 {
        self.theta
    }

    pub fn speed_sq(&self) -> f64 {
        self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3
    }

    /// Total energy per unit mass, `θ + |u|²/2`.
    pub fn total_energy(&self) -> f64 {
        self.theta + 0.5 * self.speed_sq()
    }

    pub fn entropy(&self) -> f64 {
        self.theta.ln() + R_GAS * self.v.ln()
    }

    /// The (v, u1, θ) triple, used for strengths and distances.
    pub fn vut(&self) -> [f64; 3] {
        [self.v, self.u1, self.theta]
    }

    /// Euclidean distance in (v, u1, θ).
    pub fn distance(&self, other: &GasState) -> f64 {
        let a = self.vut();
        let b = other.vut();
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

pub fn pressure(v: f64, theta: f64) -> Result<f64> {
    check_positive(v, theta)?;
    Ok(2.0 * theta / (3.0 * v))
}

/// Entropy `ln θ + (2/3) ln v`, normalised so that `s(1, 1) = 0`.
pub fn entropy(v: f64, theta: f64) -> Result<f64> {
    check_positive(v, theta)?;
    Ok(theta.ln() + R_GAS * v.ln())
}

fn check_positive(v: f64, theta: f64) -> Result<()> {
    if !(v > 0.0) || !(theta > 0.0) {
        return Err(Error::Domain(format!(
            "v and theta must be positive (v = {v}, theta = {theta})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    One,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Lagrangian,
    Eulerian,
}

/// Lagrangian sound speed `√(10θ)/(3v)`.
#[inline]
pub fn lagrangian_sound_speed(v: f64, theta: f64) -> f64 {
    (10.0 * theta).sqrt() / (3.0 * v)
}

/// Characteristic speed of the acoustic families.
pub fn char_speed(state: &GasState, family: Family, frame: Frame) -> f64 {
    let sign = match family {
        Family::One => -1.0,
        Family::Three => 1.0,
    };
    match frame {
        Frame::Lagrangian => sign * lagrangian_sound_speed(state.v, state.theta),
        Frame::Eulerian => state.u1 + sign * (10.0 * state.theta).sqrt() / 3.0,
    }
}

/// Size of the linearised system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSize {
    /// Unknowns (v, u1, E).
    ThreeByThree,
    /// Unknowns (v, u1, u2, u3, E).
    FiveByFive,
}

/// Eigen-decomposition of a flux Jacobian with `L·A·R = diag(λ)` and `L·R = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem<const N: usize> {
    pub lambdas: [f64; N],
    /// Rows are left eigenvectors.
    pub left: SMatrix<f64, N, N>,
    /// Columns are right eigenvectors.
    pub right: SMatrix<f64, N, N>,
}

pub type Eigensystem3 = Eigensystem<3>;
pub type Eigensystem5 = Eigensystem<5>;

/// Partial derivatives of `p(v, u, E) = (2E − |u|²)/(3v)` at a state.
struct PressureGradient {
    p: f64,
    dv: f64,
    du: [f64; 3],
    de: f64,
}

fn pressure_gradient(s: &GasState) -> PressureGradient {
    let p = s.pressure();
    let k = 2.0 / (3.0 * s.v);
    PressureGradient {
        p,
        dv: -p / s.v,
        du: [-k * s.u1, -k * s.u2, -k * s.u3],
        de: k,
    }
}

/// Flux Jacobian of the Lagrangian Euler system `(−u1, p, p u1)` in
/// conserved variables (v, u1, E).
pub fn flux_jacobian3(s: &GasState) -> SMatrix<f64, 3, 3> {
    let g = pressure_gradient(s);
    let u = s.u1;
    SMatrix::<f64, 3, 3>::new(
        0.0, -1.0, 0.0,
        g.dv, g.du[0], g.de,
        u * g.dv, g.p + u * g.du[0], u * g.de,
    )
}

/// Flux Jacobian in (v, u1, u2, u3, E); the transverse momentum rows vanish.
pub fn flux_jacobian5(s: &GasState) -> SMatrix<f64, 5, 5> {
    let g = pressure_gradient(s);
    let u = s.u1;
    let mut a = SMatrix::<f64, 5, 5>::zeros();
    a[(0, 1)] = -1.0;
    a[(1, 0)] = g.dv;
    a[(1, 1)] = g.du[0];
    a[(1, 2)] = g.du[1];
    a[(1, 3)] = g.du[2];
    a[(1, 4)] = g.de;
    a[(4, 0)] = u * g.dv;
    a[(4, 1)] = g.p + u * g.du[0];
    a[(4, 2)] = u * g.du[1];
    a[(4, 3)] = u * g.du[2];
    a[(4, 4)] = u * g.de;
    a
}

fn unit_scale_and_sign(col: &[f64]) -> f64 {
    let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
    let first = col
        .iter()
        .copied()
        .find(|v| v.abs() > 1e-14 * norm)
        .unwrap_or(1.0);
    norm * first.signum()
}

/// Rescales column `j` of `right` to unit norm with a positive leading entry,
/// compensating in row `j` of `left` so that `L·R = I` is preserved.
fn normalize_pair<const N: usize>(
    left: &mut SMatrix<f64, N, N>,
    right: &mut SMatrix<f64, N, N>,
    j: usize,
) {
    let col: Vec<f64> = right.column(j).iter().copied().collect();
    let alpha = unit_scale_and_sign(&col);
    for i in 0..N {
        right[(i, j)] /= alpha;
        left[(j, i)] *= alpha;
    }
}

/// Analytic eigensystem of the 3×3 Jacobian. Eigenvalues ascend as
/// `(−c, 0, c)` with `c` the Lagrangian sound speed; right eigenvectors have
/// unit norm and a positive first nonzero entry, and `L = R⁻¹`.
pub fn eigensystem3(s: &GasState) -> Result<Eigensystem3> {
    s.validate()?;
    let g = pressure_gradient(s);
    let c = lagrangian_sound_speed(s.v, s.theta);
    let u = s.u1;
    let acoustic = |lam: f64| [g.dv, lam - u * g.de, g.de];
    let l1 = acoustic(-c);
    let l3 = acoustic(c);
    let l2 = [g.p, -u, 1.0];
    let raw = SMatrix::<f64, 3, 3>::from_row_slice(&[
        l1[0], l1[1], l1[2], l2[0], l2[1], l2[2], l3[0], l3[1], l3[2],
    ]);
    let mut right = raw
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular left eigenvector matrix".into()))?;
    let mut left = raw;
    for j in 0..3 {
        normalize_pair(&mut left, &mut right, j);
    }
    Ok(Eigensystem {
        lambdas: [-c, 0.0, c],
        left,
        right,
    })
}

/// Eigensystem of the 5×5 Jacobian. The zero eigenvalue has multiplicity
/// three with left eigenvectors fixed as `(P, −U1, 0, 0, 1)`, `e3`, `e4`;
/// the acoustic right eigenvectors are unit-normalised.
pub fn eigensystem5(s: &GasState) -> Result<Eigensystem5> {
    s.validate()?;
    let g = pressure_gradient(s);
    let c = lagrangian_sound_speed(s.v, s.theta);
    let u = s.u1;
    let acoustic = |lam: f64| [g.dv, lam - u * g.de, g.du[1], g.du[2], g.de];
    let l1 = acoustic(-c);
    let l3 = acoustic(c);
    #[rustfmt::skip]
    let mut left = SMatrix::<f64, 5, 5>::from_row_slice(&[
        l1[0], l1[1], l1[2], l1[3], l1[4],
        g.p,   -u,    0.0,   0.0,   1.0,
        0.0,   0.0,   1.0,   0.0,   0.0,
        0.0,   0.0,   0.0,   1.0,   0.0,
        l3[0], l3[1], l3[2], l3[3], l3[4],
    ]);
    let mut right = left
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular left eigenvector matrix".into()))?;
    normalize_pair(&mut left, &mut right, 0);
    normalize_pair(&mut left, &mut right, 4);
    Ok(Eigensystem {
        lambdas: [-c, 0.0, 0.0, 0.0, c],
        left,
        right,
    })
}

/// Dimension-erased eigensystem, as returned by
/// [`flux_jacobian_eigensystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct DynEigensystem {
    pub lambdas: Vec<f64>,
    pub left: nalgebra::DMatrix<f64>,
    pub right: nalgebra::DMatrix<f64>,
    pub jacobian: nalgebra::DMatrix<f64>,
}

pub fn flux_jacobian_eigensystem(state: &GasState, system: SystemSize) -> Result<DynEigensystem> {
    fn erase<const N: usize>(e: Eigensystem<N>, a: SMatrix<f64, N, N>) -> DynEigensystem {
        DynEigensystem {
            lambdas: e.lambdas.to_vec(),
            left: nalgebra::DMatrix::from_iterator(N, N, e.left.iter().copied()),
            right: nalgebra::DMatrix::from_iterator(N, N, e.right.iter().copied()),
            jacobian: nalgebra::DMatrix::from_iterator(N, N, a.iter().copied()),
        }
    }
    Ok(match system {
        SystemSize::ThreeByThree => erase(eigensystem3(state)?, flux_jacobian3(state)),
        SystemSize::FiveByFive => erase(eigensystem5(state)?, flux_jacobian5(state)),
    })
}

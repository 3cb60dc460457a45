//! Viscous contact wave from the self-similar nonlinear diffusion problem
//! `−(η/2)Θ̂′ = (a(Θ̂)Θ̂′)′`, `Θ̂(±∞) = θ±`, `a(θ) = 9p₊κ(θ)/(10θ)`.

use serde::{Deserialize, Serialize};

use super::{slice_from_points, ProfilePoint, SpaceTimeField, Transport};
use crate::error::{Error, Result};
use crate::gas::GasState;
use crate::numerics::{fit_line, hermite, rk4_step, UniformGrid};
use crate::par::{map_range, Execution};
use crate::riemann::WavePattern;

/// Optional forcing `A(η)` of the linear non-fluid temperature correction
/// `(aψ)′ = −(η/2)ψ′ − (3/5)A(η)`.
pub trait NonFluidCoefficients: Sync {
    fn forcing(&self, eta: f64, theta_hat: f64, theta_hat_prime: f64) -> f64;
}

/// All closure coefficients zero, so the correction vanishes.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNonFluid;

impl NonFluidCoefficients for ZeroNonFluid {
    fn forcing(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// Solution of the self-similar contact problem on a symmetric `η` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactWaveSolution {
    pub eta_grid: UniformGrid,
    pub theta_hat: Vec<f64>,
    pub theta_hat_prime: Vec<f64>,
    /// `ψ(η)`; the correction field is `√ε ψ(η)/√(1+t)`.
    pub theta_nf: Option<Vec<f64>>,
    pub p_plus: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    /// Flux `q = a(Θ̂)Θ̂′`.
    pub flux: Vec<f64>,
    pub transport: Transport,
}

/// Gaussian decay rates of `|Θ̂′|` in `η²` on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTail {
    pub c_minus: f64,
    pub c_plus: f64,
    pub r2_minus: f64,
    pub r2_plus: f64,
}

impl ContactWaveSolution {
    pub fn a(&self, theta: f64) -> f64 {
        diffusivity(&self.transport, self.p_plus, theta)
    }

    /// Largest residual of the first-order system on the grid, using
    /// fourth-order centered differences.
    pub fn ode_residual(&self) -> f64 {
        let h = self.eta_grid.dx;
        let n = self.eta_grid.n;
        let d4 = |y: &[f64], i: usize| (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
        (2..n - 2)
            .map(|i| {
                let eta = self.eta_grid.x(i);
                let a = self.a(self.theta_hat[i]);
                let q = self.flux[i];
                let r1 = d4(&self.theta_hat, i) - q / a;
                let r2 = d4(&self.flux, i) + 0.5 * eta * q / a;
                r1.abs().max(r2.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Fits `ln|Θ̂′|` against `η²` over `3√a± ≤ |η| ≤ 8√a±`.
    pub fn gaussian_tail(&self) -> Result<GaussianTail> {
        let side = |sign: f64, theta: f64| -> Result<(f64, f64)> {
            let w = self.a(theta).sqrt();
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for i in 0..self.eta_grid.n {
                let eta = self.eta_grid.x(i);
                let d = self.theta_hat_prime[i].abs();
                if eta * sign >= 3.0 * w && eta * sign <= 8.0 * w && d > 1e-280 {
                    xs.push(eta * eta);
                    ys.push(d.ln());
                }
            }
            let fit = fit_line(&xs, &ys)?;
            Ok((-fit.slope, fit.r_squared))
        };
        let (c_minus, r2_minus) = side(-1.0, self.theta_minus)?;
        let (c_plus, r2_plus) = side(1.0, self.theta_plus)?;
        Ok(GaussianTail {
            c_minus,
            c_plus,
            r2_minus,
            r2_plus,
        })
    }

    /// `[Θ̂, Θ̂′, Θ̂″]` at `η` by cubic Hermite interpolation of the grid data.
    pub fn eval(&self, eta: f64) -> [f64; 3] {
        let g = &self.eta_grid;
        let n = g.n;
        if eta <= g.start {
            return [self.theta_hat[0], 0.0, 0.0];
        }
        if eta >= g.end() {
            return [self.theta_hat[n - 1], 0.0, 0.0];
        }
        let i = (((eta - g.start) / g.dx).floor() as usize).min(n - 2);
        let (x0, x1) = (g.x(i), g.x(i + 1));
        let th = hermite(
            x0,
            x1,
            self.theta_hat[i],
            self.theta_hat[i + 1],
            self.theta_hat_prime[i],
            self.theta_hat_prime[i + 1],
            eta,
        );
        let dd = |k: usize| self.second_derivative(k);
        let thp = hermite(
            x0,
            x1,
            self.theta_hat_prime[i],
            self.theta_hat_prime[i + 1],
            dd(i),
            dd(i + 1),
            eta,
        );
        let s = (eta - x0) / g.dx;
        [th, thp, (1.0 - s) * dd(i) + s * dd(i + 1)]
    }

    fn second_derivative(&self, k: usize) -> f64 {
        let eta = self.eta_grid.x(k);
        let th = self.theta_hat[k];
        let q = self.flux[k];
        let a = self.a(th);
        let qp = -0.5 * eta * q / a;
        let ap = diffusivity_prime(&self.transport, self.p_plus, th);
        let thp = q / a;
        (qp - ap * thp * thp) / a
    }

    fn psi(&self, eta: f64) -> f64 {
        match &self.theta_nf {
            None => 0.0,
            Some(p) => {
                let g = &self.eta_grid;
                let s = ((eta - g.start) / g.dx).clamp(0.0, (g.n - 1) as f64);
                let i = (s.floor() as usize).min(g.n - 2);
                p[i] + (s - i as f64) * (p[i + 1] - p[i])
            }
        }
    }
}

fn diffusivity(tr: &Transport, p: f64, theta: f64) -> f64 {
    0.9 * p * tr.kappa(theta) / theta
}

fn diffusivity_prime(tr: &Transport, p: f64, theta: f64) -> f64 {
    0.9 * p * (tr.dkappa(theta) * theta - tr.kappa(theta)) / (theta * theta)
}

const STEPS_PER_SIDE: usize = 3000;

/// Integrates `(Θ, q, η)` from `η = 0` to `±L`; returns the samples in the
/// direction of integration including the start.
fn shoot(tr: &Transport, p: f64, theta0: f64, q0: f64, l: f64, sign: f64) -> Vec<[f64; 3]> {
    let h = sign * l / STEPS_PER_SIDE as f64;
    let rhs = |y: &[f64; 3]| {
        let a = diffusivity(tr, p, y[0].max(1e-12));
        [y[1] / a, -0.5 * y[2] * y[1] / a, 1.0]
    };
    let mut out = Vec::with_capacity(STEPS_PER_SIDE + 1);
    let mut y = [theta0, q0, 0.0];
    out.push(y);
    for _ in 0..STEPS_PER_SIDE {
        y = rk4_step(&rhs, y, h);
        out.push(y);
    }
    out
}

/// Solves the self-similar problem by two-parameter shooting from `η = 0`.
pub fn solve_self_similar(
    theta_minus: f64,
    theta_plus: f64,
    p_plus: f64,
    transport: &Transport,
    nonfluid: Option<&dyn NonFluidCoefficients>,
) -> Result<ContactWaveSolution> {
    if !(theta_minus > 0.0 && theta_plus > 0.0 && p_plus > 0.0) {
        return Err(Error::Domain("contact wave needs positive temperatures and pressure".into()));
    }
    let a_max = diffusivity(transport, p_plus, theta_minus).max(diffusivity(transport, p_plus, theta_plus));
    let l = 14.0 * a_max.sqrt();
    let ends = |th0: f64, q0: f64| {
        let r = shoot(transport, p_plus, th0, q0, l, 1.0);
        let lft = shoot(transport, p_plus, th0, q0, l, -1.0);
        [r[STEPS_PER_SIDE][0] - theta_plus, lft[STEPS_PER_SIDE][0] - theta_minus]
    };
    let dtheta = theta_plus - theta_minus;
    let a_mid = diffusivity(transport, p_plus, 0.5 * (theta_minus + theta_plus));
    let mut x = [
        0.5 * (theta_minus + theta_plus),
        a_mid * dtheta / (2.0 * (std::f64::consts::PI * a_mid).sqrt()),
    ];
    let scale = theta_minus.max(theta_plus);
    let mut converged = dtheta == 0.0;
    let mut iterations = 0;
    while !converged && iterations < 50 {
        iterations += 1;
        let f = ends(x[0], x[1]);
        if f[0].abs().max(f[1].abs()) < 1e-13 * scale {
            converged = true;
            break;
        }
        let h0 = 1e-7 * scale;
        let h1 = 1e-7 * (x[1].abs() + 1e-3 * scale);
        let f0 = ends(x[0] + h0, x[1]);
        let f1 = ends(x[0], x[1] + h1);
        let j = [
            [(f0[0] - f[0]) / h0, (f1[0] - f[0]) / h1],
            [(f0[1] - f[1]) / h0, (f1[1] - f[1]) / h1],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Numerical("singular shooting jacobian".into()));
        }
        let dx0 = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dx1 = (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        // damp steps that would push the midpoint temperature out of range
        let mut lambda = 1.0;
        while lambda > 1e-4 {
            let t0 = x[0] - lambda * dx0;
            if t0 > 0.0 && t0.is_finite() {
                break;
            }
            lambda *= 0.5;
        }
        x = [x[0] - lambda * dx0, x[1] - lambda * dx1];
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "contact wave shooting".into(),
            iterations,
        });
    }
    let right = shoot(transport, p_plus, x[0], x[1], l, 1.0);
    let left = shoot(transport, p_plus, x[0], x[1], l, -1.0);
    let mut samples: Vec<[f64; 3]> = left.into_iter().rev().collect();
    samples.extend_from_slice(&right[1..]);
    let eta_grid = UniformGrid::new(-l, l, samples.len())?;
    let theta_hat: Vec<f64> = samples.iter().map(|y| y[0]).collect();
    let flux: Vec<f64> = samples.iter().map(|y| y[1]).collect();
    let theta_hat_prime = theta_hat
        .iter()
        .zip(&flux)
        .map(|(&th, &q)| q / diffusivity(transport, p_plus, th))
        .collect::<Vec<_>>();
    let theta_nf = nonfluid.map(|nf| {
        solve_nonfluid(&eta_grid, &theta_hat, &theta_hat_prime, |th| diffusivity(transport, p_plus, th), nf)
    });
    Ok(ContactWaveSolution {
        eta_grid,
        theta_hat,
        theta_hat_prime,
        theta_nf,
        p_plus,
        theta_minus,
        theta_plus,
        flux,
        transport: *transport,
    })
}

/// `z = aψ′`, `z′ = −(η/(2a))z − (3/5)A`, integrated from the left end with
/// `z = ψ = 0` (Heun's method on the stored grid).
fn solve_nonfluid(
    grid: &UniformGrid,
    theta: &[f64],
    dtheta: &[f64],
    a: impl Fn(f64) -> f64,
    nf: &dyn NonFluidCoefficients,
) -> Vec<f64> {
    let h = grid.dx;
    let rhs = |i: usize, z: f64| {
        let eta = grid.x(i);
        let ai = a(theta[i]);
        (-0.5 * eta * z / ai - 0.6 * nf.forcing(eta, theta[i], dtheta[i]), z / ai)
    };
    let mut psi = vec![0.0; grid.n];
    let mut z = 0.0;
    for i in 0..grid.n - 1 {
        let (dz0, dp0) = rhs(i, z);
        let zp = z + h * dz0;
        let (dz1, dp1) = rhs(i + 1, zp);
        z += 0.5 * h * (dz0 + dz1);
        psi[i + 1] = psi[i] + 0.5 * h * (dp0 + dp1);
    }
    psi
}

/// Contact wave between `mid_star` and `mid_upper`, evaluable at any
/// `(ε, t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactProfile {
    pub solution: ContactWaveSolution,
    pub u_contact: f64,
}

impl ContactProfile {
    pub fn new(pattern: &WavePattern, transport: &Transport) -> Result<Self> {
        Self::with_nonfluid(pattern, transport, None)
    }

    pub fn with_nonfluid(
        pattern: &WavePattern,
        transport: &Transport,
        nonfluid: Option<&dyn NonFluidCoefficients>,
    ) -> Result<Self> {
        let (lo, hi) = (pattern.mid_star, pattern.mid_upper);
        let (pl, pu) = (lo.pressure(), hi.pressure());
        if (pl - pu).abs() > 1e-9 * pl.max(pu) {
            return Err(Error::Precondition(format!(
                "contact pressures differ: {pl} vs {pu}"
            )));
        }
        let p_plus = 0.5 * (pl + pu);
        let solution = solve_self_similar(lo.theta, hi.theta, p_plus, transport, nonfluid)?;
        Ok(Self {
            solution,
            u_contact: 0.5 * (lo.u1 + hi.u1),
        })
    }

    /// Exact Navier–Stokes-level fields at `(t, x)` for Knudsen number `eps`.
    pub fn point(&self, eps: f64, t: f64, x: f64) -> ProfilePoint {
        let sol = &self.solution;
        let p = sol.p_plus;
        let s = (eps * (1.0 + t)).sqrt();
        let eta = x / s;
        let [th, thp, thpp] = sol.eval(eta);
        let a = sol.a(th);
        let q = a * thp;
        let qp = -0.5 * eta * q / a;
        let ap = diffusivity_prime(&sol.transport, p, th);
        let qpp = -0.5 * q / a - 0.5 * eta * (qp / a - q * ap * thp / (a * a));
        let nf = eps.sqrt() * sol.psi(eta) / (1.0 + t).sqrt();
        let theta = th + nf;
        let c = 2.0 / (3.0 * p);
        ProfilePoint {
            v: [c * th, c * thp / s, c * thpp / (s * s)],
            u1: [
                self.u_contact + c * eps * q / s,
                c * eps * qp / (s * s),
                c * eps * qpp / (s * s * s),
            ],
            theta: [theta, thp / s, thpp / (s * s)],
        }
    }

    pub fn field(&self, eps: f64, t: f64, grid: &UniformGrid, exec: Execution) -> SpaceTimeField {
        let pts = map_range(exec, grid.n, |i| self.point(eps, t, grid.x(i)));
        SpaceTimeField::single(grid.clone(), slice_from_points(t, &pts))
    }

    pub fn state_at(&self, eps: f64, t: f64, x: f64) -> GasState {
        self.point(eps, t, x).state()
    }
}

/// Contact wave field at time `t` together with its self-similar solution.
pub fn build_contact_profile(
    pattern: &WavePattern,
    eps: f64,
    t: f64,
    x_grid: &UniformGrid,
    transport: &Transport,
) -> Result<(SpaceTimeField, ContactWaveSolution)> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be positive (got {eps})")));
    }
    let prof = ContactProfile::new(pattern, transport)?;
    let field = prof.field(eps, t, x_grid, Execution::default());
    Ok((field, prof.solution))
}

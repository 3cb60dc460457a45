//! Navier–Stokes traveling wave for the 3-shock.
//!
//! With `η = x − s₃t` and `ζ = η/ε`, integrating the conservation laws once
//! leaves a planar system in `(V, Θ)` that is independent of `ε`:
//!
//! ```text
//! V′ = −(3V/(4μs)) [s²(V − v₋) + P − p₋]
//! Θ′ =  (Vs/κ)     [−(Θ − θ₋) + (s²/2)(V − v₋)² − p₋(V − v₋)]
//! ```
//!
//! and `U = u₋ − s(V − v₋)`. Here `−` is the post-shock state `mid_upper`.

use super::{slice_from_points, ProfilePoint, SpaceTimeField, Transport};
use crate::error::{Error, Result};
use crate::gas::GasState;
use crate::numerics::{hermite, rk4_step, UniformGrid};
use crate::par::{map_range, Execution};
use crate::riemann::WavePattern;

#[derive(Debug, Clone, PartialEq)]
pub struct ShockProfile {
    pub minus: GasState,
    pub plus: GasState,
    pub s: f64,
    pub transport: Transport,
    /// Trajectory samples `(ζ, V, Θ)` with increasing `ζ`, recentred.
    zeta: Vec<f64>,
    states: Vec<[f64; 2]>,
    /// Tail models `end + offset·exp(rate·(ζ − anchor))` on each side.
    left_tail: Tail,
    right_tail: Tail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tail {
    end: [f64; 2],
    anchor: f64,
    offset: [f64; 2],
    rate: f64,
}

impl Tail {
    fn eval(&self, zeta: f64) -> [f64; 2] {
        let f = (self.rate * (zeta - self.anchor)).exp();
        [self.end[0] + self.offset[0] * f, self.end[1] + self.offset[1] * f]
    }
}

struct Rhs {
    v0: f64,
    th0: f64,
    p0: f64,
    s: f64,
    tr: Transport,
}

impl Rhs {
    fn eval(&self, y: &[f64; 2]) -> [f64; 2] {
        let (v, th) = (y[0], y[1]);
        let s = self.s;
        let dv = v - self.v0;
        let p = 2.0 * th / (3.0 * v);
        [
            -0.75 * v / (self.tr.mu(th) * s) * (s * s * dv + p - self.p0),
            v * s / self.tr.kappa(th) * (-(th - self.th0) + 0.5 * s * s * dv * dv - self.p0 * dv),
        ]
    }

    /// Newton polish of an equilibrium, so the integration can reach it in
    /// floating point.
    fn refine_root(&self, mut y: [f64; 2]) -> [f64; 2] {
        for _ in 0..8 {
            let f = self.eval(&y);
            let j = self.jacobian(&y);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 {
                break;
            }
            y[0] -= (j[1][1] * f[0] - j[0][1] * f[1]) / det;
            y[1] -= (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        }
        y
    }

    fn jacobian(&self, y: &[f64; 2]) -> [[f64; 2]; 2] {
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-7 * y[k].abs().max(1e-3);
            let mut a = *y;
            let mut b = *y;
            a[k] += h;
            b[k] -= h;
            let (fa, fb) = (self.eval(&a), self.eval(&b));
            for i in 0..2 {
                j[i][k] = (fa[i] - fb[i]) / (2.0 * h);
            }
        }
        j
    }
}

/// Eigenvalues (ascending) and eigenvectors of a real 2×2 matrix with real
/// spectrum.
fn eig2(j: [[f64; 2]; 2]) -> Result<[(f64, [f64; 2]); 2]> {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        return Err(Error::Numerical("complex eigenvalues at shock end state".into()));
    }
    let r = disc.sqrt();
    let vec_for = |mu: f64| {
        let a = [j[0][1], mu - j[0][0]];
        let b = [mu - j[1][1], j[1][0]];
        let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    let (m1, m2) = (0.5 * tr - r, 0.5 * tr + r);
    Ok([(m1, vec_for(m1)), (m2, vec_for(m2))])
}

impl ShockProfile {
    pub fn new(pattern: &WavePattern, transport: &Transport) -> Result<Self> {
        let minus = pattern.mid_upper;
        let plus = pattern.right;
        let s = pattern.s3;
        let delta = pattern.strengths.shock;
        let rhs = Rhs {
            v0: minus.v,
            th0: minus.theta,
            p0: minus.pressure(),
            s,
            tr: *transport,
        };
        let ym = [minus.v, minus.theta];
        let yp = [plus.v, plus.theta];
        if delta <= 1e-14 {
            let flat = Tail {
                end: ym,
                anchor: 0.0,
                offset: [0.0; 2],
                rate: 0.0,
            };
            return Ok(Self {
                minus,
                plus,
                s,
                transport: *transport,
                zeta: vec![-1.0, 1.0],
                states: vec![ym, ym],
                left_tail: flat,
                right_tail: flat,
            });
        }
        let fp = rhs.eval(&yp);
        let scale = (plus.v + plus.theta) * 1e-9;
        if fp[0].abs() > scale || fp[1].abs() > scale {
            return Err(Error::Inadmissible(format!(
                "end states are not Rankine–Hugoniot consistent (residual {fp:?})"
            )));
        }
        let em = eig2(rhs.jacobian(&ym))?;
        let ep = eig2(rhs.jacobian(&yp))?;
        let saddle_minus = em[0].0 < 0.0 && em[1].0 > 0.0;
        let saddle_plus = ep[0].0 < 0.0 && ep[1].0 > 0.0;
        // integrate away from the saddle towards the node
        let (ys, yn, (mu_s, mut e), forward, node_eigs) = if saddle_minus && !saddle_plus {
            (ym, yp, em[1], true, ep)
        } else if saddle_plus && !saddle_minus {
            (yp, ym, ep[0], false, em)
        } else {
            return Err(Error::Numerical("shock end states are not saddle/node".into()));
        };
        let yn = rhs.refine_root(yn);
        if (e[0] > 0.0) != (yn[0] > ys[0]) {
            e = [-e[0], -e[1]];
        }
        let d0 = 1e-6 * delta;
        let start = [ys[0] + d0 * e[0], ys[1] + d0 * e[1]];
        let fastest = em
            .iter()
            .chain(ep.iter())
            .map(|(m, _)| m.abs())
            .fold(0.0, f64::max);
        let h = if forward { 0.02 } else { -0.02 } / fastest;
        let (vlo, vhi) = (ym[0].min(yp[0]), ym[0].max(yp[0]));
        let (tlo, thi) = (ym[1].min(yp[1]), ym[1].max(yp[1]));
        let (bv, bt) = (vhi - vlo, thi - tlo);
        let f = |y: &[f64; 2]| rhs.eval(y);
        let mut zeta = vec![0.0];
        let mut states = vec![start];
        let mut y = start;
        let mut z = 0.0;
        let tol = 1e-12 * (1.0 + delta);
        let max_steps = 2_000_000;
        loop {
            y = rk4_step(&f, y, h);
            z += h;
            if !(y[0].is_finite() && y[1].is_finite())
                || y[0] < vlo - 0.5 * bv
                || y[0] > vhi + 0.5 * bv
                || y[1] < tlo - 0.5 * bt
                || y[1] > thi + 0.5 * bt
            {
                return Err(Error::Numerical(
                    "shock manifold integration left the admissible box".into(),
                ));
            }
            zeta.push(z);
            states.push(y);
            if (y[0] - yn[0]).abs() < tol && (y[1] - yn[1]).abs() < tol {
                break;
            }
            if zeta.len() > max_steps {
                return Err(Error::NoConvergence {
                    what: "shock profile integration".into(),
                    iterations: max_steps,
                });
            }
        }
        if !forward {
            zeta.reverse();
            states.reverse();
        }
        // slow node eigenvalue governs the far tail on the node side
        let slow = if node_eigs[0].0.abs() < node_eigs[1].0.abs() {
            node_eigs[0].0
        } else {
            node_eigs[1].0
        };
        let n = zeta.len();
        let (first, last) = (states[0], states[n - 1]);
        let tail_from = |end: [f64; 2], at: [f64; 2], anchor: f64, rate: f64| Tail {
            end,
            anchor,
            offset: [at[0] - end[0], at[1] - end[1]],
            rate,
        };
        let (mut left_tail, mut right_tail) = if forward {
            (
                tail_from(ys, first, zeta[0], mu_s),
                tail_from(yn, last, zeta[n - 1], slow),
            )
        } else {
            (
                tail_from(yn, first, zeta[0], slow),
                tail_from(ys, last, zeta[n - 1], mu_s),
            )
        };
        let mut prof = Self {
            minus,
            plus,
            s,
            transport: *transport,
            zeta,
            states,
            left_tail,
            right_tail,
        };
        // recentre so that V passes the midpoint volume at ζ = 0
        let vmid = 0.5 * (minus.v + plus.v);
        let k = prof
            .states
            .windows(2)
            .position(|w| (w[0][0] - vmid) * (w[1][0] - vmid) <= 0.0)
            .ok_or_else(|| Error::Numerical("shock profile misses the midpoint volume".into()))?;
        let (mut a, mut b) = (prof.zeta[k], prof.zeta[k + 1]);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if (prof.eval_zeta(m)[0] - vmid) * (prof.eval_zeta(a)[0] - vmid) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let shift = 0.5 * (a + b);
        prof.zeta.iter_mut().for_each(|z| *z -= shift);
        left_tail.anchor -= shift;
        right_tail.anchor -= shift;
        prof.left_tail = left_tail;
        prof.right_tail = right_tail;
        Ok(prof)
    }

    fn rhs(&self) -> Rhs {
        Rhs {
            v0: self.minus.v,
            th0: self.minus.theta,
            p0: self.minus.pressure(),
            s: self.s,
            tr: self.transport,
        }
    }

    /// `(V, Θ)` at the scaled coordinate `ζ = η/ε`.
    pub fn eval_zeta(&self, zeta: f64) -> [f64; 2] {
        let n = self.zeta.len();
        if zeta <= self.zeta[0] {
            return self.left_tail.eval(zeta);
        }
        if zeta >= self.zeta[n - 1] {
            return self.right_tail.eval(zeta);
        }
        let i = match self.zeta.binary_search_by(|z| z.partial_cmp(&zeta).unwrap()) {
            Ok(i) => return self.states[i],
            Err(i) => i - 1,
        };
        let rhs = self.rhs();
        let (a, b) = (self.states[i], self.states[i + 1]);
        let (fa, fb) = (rhs.eval(&a), rhs.eval(&b));
        let (z0, z1) = (self.zeta[i], self.zeta[i + 1]);
        [
            hermite(z0, z1, a[0], b[0], fa[0], fb[0], zeta),
            hermite(z0, z1, a[1], b[1], fa[1], fb[1], zeta),
        ]
    }

    /// Values and `x`-derivatives at `(t, x)` for Knudsen number `eps`.
    pub fn point(&self, eps: f64, t: f64, x: f64) -> ProfilePoint {
        let zeta = (x - self.s * t) / eps;
        let y = self.eval_zeta(zeta);
        let rhs = self.rhs();
        let d1 = rhs.eval(&y);
        let h = 1e-4 / (1.0 + d1[0].abs().max(d1[1].abs()));
        let ya = [y[0] + h * d1[0], y[1] + h * d1[1]];
        let yb = [y[0] - h * d1[0], y[1] - h * d1[1]];
        let (fa, fb) = (rhs.eval(&ya), rhs.eval(&yb));
        let d2 = [(fa[0] - fb[0]) / (2.0 * h), (fa[1] - fb[1]) / (2.0 * h)];
        let (e1, e2) = (1.0 / eps, 1.0 / (eps * eps));
        let m = &self.minus;
        ProfilePoint {
            v: [y[0], d1[0] * e1, d2[0] * e2],
            u1: [
                m.u1 - self.s * (y[0] - m.v),
                -self.s * d1[0] * e1,
                -self.s * d2[0] * e2,
            ],
            theta: [y[1], d1[1] * e1, d2[1] * e2],
        }
    }

    pub fn field(&self, eps: f64, t: f64, grid: &UniformGrid, exec: Execution) -> SpaceTimeField {
        let pts = map_range(exec, grid.n, |i| self.point(eps, t, grid.x(i)));
        SpaceTimeField::single(grid.clone(), slice_from_points(t, &pts))
    }

    /// Decay rates in `ζ` of the two tails (negative on the left side means
    /// growth towards the shock).
    pub fn tail_rates(&self) -> (f64, f64) {
        (self.left_tail.rate, self.right_tail.rate)
    }
}

/// Shock profile field at time `t`.
pub fn build_shock_profile(
    pattern: &WavePattern,
    eps: f64,
    t: f64,
    x_grid: &UniformGrid,
    transport: &Transport,
) -> Result<SpaceTimeField> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be positive (got {eps})")));
    }
    let prof = ShockProfile::new(pattern, transport)?;
    Ok(prof.field(eps, t, x_grid, Execution::default()))
}

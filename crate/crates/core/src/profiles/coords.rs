//! Lagrangian mass coordinate `x` ↔ Eulerian position `X`.
//!
//! `dX = V dx` at fixed time. The map is anchored by the Eulerian position of
//! the mass point `x = 0` (the contact particle, which moves with `u*`).

use super::{FieldSlice, Fields, SpaceTimeField};
use crate::error::{Error, Result};
use crate::numerics::{hermite, UniformGrid};

/// Position map at one time together with the uniform Eulerian grid used for
/// resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianMap {
    pub lagrangian: UniformGrid,
    /// `X` at every Lagrangian node.
    pub position: Vec<f64>,
    /// `V = dX/dx` at every Lagrangian node.
    pub v: Vec<f64>,
    pub eulerian: UniformGrid,
}

/// Index of the interval of the increasing sequence `xs` containing `t`.
fn interval(xs: &[f64], t: f64) -> usize {
    xs.partition_point(|&v| v <= t).clamp(1, xs.len() - 1) - 1
}

/// Cubic Hermite with the slopes limited to keep each interval monotone.
fn monotone_hermite(x0: f64, x1: f64, y0: f64, y1: f64, mut d0: f64, mut d1: f64, t: f64) -> f64 {
    let delta = (y1 - y0) / (x1 - x0);
    if delta == 0.0 {
        return y0;
    }
    if d0 * delta < 0.0 {
        d0 = 0.0;
    }
    if d1 * delta < 0.0 {
        d1 = 0.0;
    }
    let (a, b) = (d0 / delta, d1 / delta);
    let r = a * a + b * b;
    if r > 9.0 {
        let tau = 3.0 / r.sqrt();
        d0 = tau * a * delta;
        d1 = tau * b * delta;
    }
    hermite(x0, x1, y0, y1, d0, d1, t)
}

impl EulerianMap {
    /// Integrates `V` in the mass coordinate with the end-corrected
    /// trapezoidal rule.
    pub fn new(grid: &UniformGrid, v: &[f64], v_x: &[f64], anchor: f64) -> Result<Self> {
        if v.len() != grid.n || v_x.len() != grid.n {
            return Err(Error::Precondition("specific volume not on the grid".into()));
        }
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
            return Err(Error::Positivity { field: "V", index, value });
        }
        let h = grid.dx;
        let mut pos = vec![0.0; grid.n];
        for i in 0..grid.n - 1 {
            pos[i + 1] = pos[i] + 0.5 * h * (v[i] + v[i + 1]) - h * h / 12.0 * (v_x[i + 1] - v_x[i]);
        }
        if pos.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Numerical("position map is not monotone".into()));
        }
        // position of x = 0 fixed to the anchor
        let x0 = Self::hermite_at(grid, &pos, v, 0.0);
        pos.iter_mut().for_each(|p| *p += anchor - x0);
        let eulerian = UniformGrid::new(pos[0], pos[grid.n - 1], grid.n)?;
        Ok(Self {
            lagrangian: grid.clone(),
            position: pos,
            v: v.to_vec(),
            eulerian,
        })
    }

    fn hermite_at(grid: &UniformGrid, pos: &[f64], v: &[f64], x: f64) -> f64 {
        let s = ((x - grid.start) / grid.dx).floor();
        let i = (s.max(0.0) as usize).min(grid.n - 2);
        let x0 = grid.x(i);
        hermite(x0, x0 + grid.dx, pos[i], pos[i + 1], v[i], v[i + 1], x)
    }

    /// `X(x)`, extended linearly with the end volumes outside the grid.
    pub fn to_eulerian(&self, x: f64) -> f64 {
        let g = &self.lagrangian;
        if x <= g.start {
            return self.position[0] + self.v[0] * (x - g.start);
        }
        if x >= g.end() {
            return self.position[g.n - 1] + self.v[g.n - 1] * (x - g.end());
        }
        Self::hermite_at(g, &self.position, &self.v, x)
    }

    /// `x(X)`: Newton on the Hermite position map, bracketed by its interval.
    pub fn to_lagrangian(&self, pos: f64) -> f64 {
        let g = &self.lagrangian;
        let n = g.n;
        if pos <= self.position[0] {
            return g.start + (pos - self.position[0]) / self.v[0];
        }
        if pos >= self.position[n - 1] {
            return g.end() + (pos - self.position[n - 1]) / self.v[n - 1];
        }
        let i = interval(&self.position, pos);
        let (mut lo, mut hi) = (g.x(i), g.x(i + 1));
        let mut x = lo + (hi - lo) * (pos - self.position[i]) / (self.position[i + 1] - self.position[i]);
        for _ in 0..60 {
            let f = Self::hermite_at(g, &self.position, &self.v, x) - pos;
            if f.abs() < 1e-15 * (1.0 + pos.abs()) {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let s = ((x - g.start) / g.dx).floor().clamp(0.0, (n - 2) as f64) as usize;
            // derivative of the Hermite segment
            let t = (x - g.x(s)) / g.dx;
            let (p0, p1, v0, v1) = (self.position[s], self.position[s + 1], self.v[s], self.v[s + 1]);
            let d = (6.0 * t * t - 6.0 * t) * (p0 - p1) / g.dx
                + (3.0 * t * t - 4.0 * t + 1.0) * v0
                + (3.0 * t * t - 2.0 * t) * v1;
            let xn = x - f / d;
            x = if d > 0.0 && xn > lo && xn < hi { xn } else { 0.5 * (lo + hi) };
        }
        x
    }
}

fn resample(
    src_nodes: &[f64],
    values: &Fields,
    derivs: &Fields,
    dst: &[f64],
) -> Fields {
    let comp = |y: &[f64], d: &[f64]| -> Vec<f64> {
        dst.iter()
            .map(|&t| {
                if t <= src_nodes[0] {
                    return y[0];
                }
                let n = src_nodes.len();
                if t >= src_nodes[n - 1] {
                    return y[n - 1];
                }
                let i = interval(src_nodes, t);
                monotone_hermite(src_nodes[i], src_nodes[i + 1], y[i], y[i + 1], d[i], d[i + 1], t)
            })
            .collect()
    };
    Fields {
        v: comp(&values.v, &derivs.v),
        u1: comp(&values.u1, &derivs.u1),
        u2: comp(&values.u2, &derivs.u2),
        u3: comp(&values.u3, &derivs.u3),
        theta: comp(&values.theta, &derivs.theta),
        e: comp(&values.e, &derivs.e),
    }
}

fn scale(f: &Fields, w: &[f64]) -> Fields {
    let m = |y: &[f64]| y.iter().zip(w).map(|(a, b)| a * b).collect();
    Fields {
        v: m(&f.v),
        u1: m(&f.u1),
        u2: m(&f.u2),
        u3: m(&f.u3),
        theta: m(&f.theta),
        e: m(&f.e),
    }
}

fn select(field: &SpaceTimeField, t: f64) -> Result<&FieldSlice> {
    field
        .slices
        .iter()
        .find(|s| (s.t - t).abs() <= 1e-12 * (1.0 + t.abs()))
        .ok_or_else(|| Error::Precondition(format!("no slice at t = {t}")))
}

/// Resamples the slice at time `t` onto a uniform Eulerian grid. `anchor` is
/// the Eulerian position of the mass point `x = 0`.
pub fn lagrangian_to_eulerian(
    field: &SpaceTimeField,
    t: f64,
    anchor: f64,
) -> Result<(SpaceTimeField, EulerianMap)> {
    let s = select(field, t)?;
    let g = &field.x_grid;
    let map = EulerianMap::new(g, &s.values.v, &s.dx.v, anchor)?;
    let inv_v: Vec<f64> = s.values.v.iter().map(|v| 1.0 / v).collect();
    let dxe = scale(&s.dx, &inv_v);
    let values = resample(&map.position, &s.values, &dxe, &map.eulerian.points());
    let out = FieldSlice::from_values(t, values, &map.eulerian);
    Ok((SpaceTimeField::single(map.eulerian.clone(), out), map))
}

/// Inverse of [`lagrangian_to_eulerian`]: resamples an Eulerian slice back
/// onto the Lagrangian grid of `map`.
pub fn eulerian_to_lagrangian(field: &SpaceTimeField, t: f64, map: &EulerianMap) -> Result<SpaceTimeField> {
    let s = select(field, t)?;
    if field.x_grid != map.eulerian {
        return Err(Error::Precondition("field is not on the map's Eulerian grid".into()));
    }
    let nodes = field.x_grid.points();
    let dst: Vec<f64> = (0..map.lagrangian.n).map(|i| map.position[i]).collect();
    let values = resample(&nodes, &s.values, &s.dx, &dst);
    let out = FieldSlice::from_values(t, values, &map.lagrangian);
    Ok(SpaceTimeField::single(map.lagrangian.clone(), out))
}

use serde::{Deserialize, Serialize};

use super::{conservative_maxwellian, primitive, raw_moments, VelocityGrid};
use crate::error::{Error, Result};
use crate::gas::{GasState, R_GAS};
use crate::numerics::UniformGrid;
use crate::par::{try_for_each_chunk_pair_mut, Execution};
use crate::profiles::Transport;

/// Largest transport CFL number accepted by [`step`].
pub const MAX_CFL: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Zero-gradient ghost cells.
    Outflow,
    Periodic,
}

/// Chu-reduced distributions on a cell-centred grid, stored `[cell][ξ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedKineticState {
    pub x_grid: UniformGrid,
    pub vgrid: VelocityGrid,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub eps: f64,
    pub time: f64,
    pub transport: Transport,
    pub boundary: Boundary,
    /// Lagrangian mass coordinate of the left boundary face.
    pub mass_left: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl ReducedKineticState {
    /// Local Maxwellians of the given states, one per cell.
    pub fn from_states(
        x_grid: UniformGrid,
        vgrid: VelocityGrid,
        states: &[GasState],
        eps: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        if states.len() != x_grid.n {
            return Err(Error::Precondition(format!(
                "{} states for {} cells",
                states.len(),
                x_grid.n
            )));
        }
        if !(eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive (got {eps})")));
        }
        let nv = vgrid.n_xi;
        let mut g = vec![0.0; x_grid.n * nv];
        let mut h = vec![0.0; x_grid.n * nv];
        for (i, s) in states.iter().enumerate() {
            s.validate()?;
            // discrete moments equal the continuous ones
            let rho = s.rho();
            let target = [rho, rho * s.u1, rho * (s.u1 * s.u1 + 3.0 * R_GAS * s.theta)];
            super::conservative_maxwellian(
                &vgrid,
                rho,
                s.u1,
                s.theta,
                target,
                &mut g[i * nv..(i + 1) * nv],
                &mut h[i * nv..(i + 1) * nv],
            );
        }
        Ok(Self {
            x_grid,
            vgrid,
            g,
            h,
            eps,
            time: 0.0,
            transport: Transport::default(),
            boundary,
            mass_left: 0.0,
            exec: Execution::default(),
        })
    }

    pub fn n_cells(&self) -> usize {
        self.x_grid.n
    }

    /// Largest stable time step at the given CFL number.
    pub fn max_dt(&self, cfl: f64) -> f64 {
        cfl * self.x_grid.dx / self.vgrid.max_speed()
    }

    /// Discrete totals of mass, momentum and energy.
    pub fn totals(&self) -> [f64; 3] {
        let vg = &self.vgrid;
        let nv = vg.n_xi;
        let mut t = [0.0; 3];
        for i in 0..self.x_grid.n {
            for k in 0..nv {
                let (xi, w) = (vg.nodes[k], vg.weights[k]);
                let (g, h) = (self.g[i * nv + k], self.h[i * nv + k]);
                t[0] += w * g;
                t[1] += w * xi * g;
                t[2] += 0.5 * w * (xi * xi * g + h);
            }
        }
        t.map(|v| v * self.x_grid.dx)
    }

    /// Lagrangian mass coordinate of every cell centre.
    pub fn mass_coordinates(&self) -> Vec<f64> {
        let nv = self.vgrid.n_xi;
        let dx = self.x_grid.dx;
        let mut m = self.mass_left;
        (0..self.x_grid.n)
            .map(|i| {
                let rho = self.vgrid.integrate(&self.g[i * nv..(i + 1) * nv]);
                let c = m + 0.5 * rho * dx;
                m += rho * dx;
                c
            })
            .collect()
    }

    /// Reduced entropy `∫∫ (2g ln g − g ln h) dξ₁ dx` (the slab reduction of
    /// `∫ f ln f` up to terms fixed by the mass).
    pub fn entropy(&self) -> f64 {
        let vg = &self.vgrid;
        let nv = vg.n_xi;
        let mut s = 0.0;
        for i in 0..self.x_grid.n {
            for k in 0..nv {
                let (g, h) = (self.g[i * nv + k], self.h[i * nv + k]);
                if g > 0.0 && h > 0.0 {
                    s += vg.weights[k] * (2.0 * g * g.ln() - g * h.ln());
                }
            }
        }
        s * self.x_grid.dx
    }

    fn check_positive(&self) -> Result<()> {
        for (field, data) in [("g", &self.g), ("h", &self.h)] {
            if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
                return Err(Error::Positivity { field, index, value });
            }
        }
        Ok(())
    }
}

#[inline(always)]
fn minmod(a: f64, b: f64) -> f64 {
    0.5 * (a.signum() + b.signum()) * a.abs().min(b.abs())
}

/// One transport sub-step of length `dt` for `q` (MUSCL with minmod slopes,
/// upwind fluxes with the second-order time correction). Returns the mass
/// flux through the left boundary face when `q` is `g`.
fn transport(q: &mut [f64], grid: &UniformGrid, vg: &VelocityGrid, bc: Boundary, dt: f64, exec: Execution) -> f64 {
    let n = grid.n as isize;
    let nv = vg.n_xi;
    let lam = dt / grid.dx;
    let idx = |i: isize| -> usize {
        match bc {
            Boundary::Outflow => i.clamp(0, n - 1) as usize,
            Boundary::Periodic => i.rem_euclid(n) as usize,
        }
    };
    // nodes are sorted, so upwinding switches once
    let split = vg.nodes.partition_point(|&xi| xi < 0.0);
    let src: &[f64] = q;
    // face j sits between cells j − 1 and j
    let mut faces = vec![0.0; (grid.n + 1) * nv];
    crate::par::for_each_chunk_mut(exec, &mut faces, nv, |j, face| {
        let j = j as isize;
        let (l, r) = (idx(j - 1) * nv, idx(j) * nv);
        let (ll, rr) = (idx(j - 2) * nv, idx(j + 1) * nv);
        let (q_ll, q_l, q_r, q_rr) = (&src[ll..ll + nv], &src[l..l + nv], &src[r..r + nv], &src[rr..rr + nv]);
        for k in 0..split {
            let xi = vg.nodes[k];
            let s = minmod(q_r[k] - q_l[k], q_rr[k] - q_r[k]);
            face[k] = xi * (q_r[k] - 0.5 * (1.0 + xi * lam) * s);
        }
        for k in split..nv {
            let xi = vg.nodes[k];
            let s = minmod(q_l[k] - q_ll[k], q_r[k] - q_l[k]);
            face[k] = xi * (q_l[k] + 0.5 * (1.0 - xi * lam) * s);
        }
    });
    let left_flux = vg.integrate(&faces[..nv]);
    crate::par::for_each_chunk_mut(exec, q, nv, |i, cell| {
        let (lo, hi) = (&faces[i * nv..(i + 1) * nv], &faces[(i + 1) * nv..(i + 2) * nv]);
        for k in 0..nv {
            cell[k] -= lam * (hi[k] - lo[k]);
        }
    });
    left_flux
}

/// Exact relaxation toward the conservative local Maxwellian of each cell.
fn relax(state: &mut ReducedKineticState, dt: f64) -> Result<()> {
    let vg = state.vgrid.clone();
    let nv = vg.n_xi;
    let (eps, tr) = (state.eps, state.transport);
    try_for_each_chunk_pair_mut(state.exec, &mut state.g, &mut state.h, nv, |i, g, h| {
        let target = raw_moments(&vg, g, h);
        let (rho, u, th) = primitive(target);
        if !(rho > 0.0) || !(th > 0.0) {
            return Err(Error::CorruptedState {
                cell: i,
                what: format!("rho = {rho}, theta = {th}"),
            });
        }
        let tau = eps * tr.mu(th) / (rho * R_GAS * th);
        let a = (-dt / tau).exp();
        if a == 1.0 {
            return Ok(());
        }
        SCRATCH.with(|buf| {
            let mut buf = buf.borrow_mut();
            buf.resize(2 * nv, 0.0);
            let (gm, hm) = buf.split_at_mut(nv);
            conservative_maxwellian(&vg, rho, u, th, target, gm, hm);
            for k in 0..nv {
                g[k] = gm[k] + (g[k] - gm[k]) * a;
                h[k] = hm[k] + (h[k] - hm[k]) * a;
            }
        });
        Ok(())
    })
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Vec<f64>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Strang-split step: half transport, exact relaxation, half transport.
pub fn step(state: &mut ReducedKineticState, dt: f64) -> Result<()> {
    let limit = state.max_dt(MAX_CFL);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    let half = 0.5 * dt;
    let (grid, vg, bc, exec) = (state.x_grid.clone(), state.vgrid.clone(), state.boundary, state.exec);
    let f1 = transport(&mut state.g, &grid, &vg, bc, half, exec);
    transport(&mut state.h, &grid, &vg, bc, half, exec);
    relax(state, dt)?;
    let f2 = transport(&mut state.g, &grid, &vg, bc, half, exec);
    transport(&mut state.h, &grid, &vg, bc, half, exec);
    state.mass_left -= half * (f1 + f2);
    state.time += dt;
    state.check_positive()
}

/// Advances to `t_end` at the CFL bound, returning a copy at every snapshot
/// time (or the final state when `snapshot_times` is empty).
pub fn run(initial: &ReducedKineticState, t_end: f64, snapshot_times: &[f64], cfl: f64) -> Result<Vec<ReducedKineticState>> {
    if !(cfl > 0.0 && cfl <= MAX_CFL) {
        return Err(Error::Config(format!("cfl must lie in (0, {MAX_CFL}] (got {cfl})")));
    }
    if t_end < initial.time {
        return Err(Error::Precondition(format!(
            "t_end = {t_end} precedes the state time {}",
            initial.time
        )));
    }
    let mut targets: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t <= t_end).collect();
    if targets.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("snapshot times must be sorted".into()));
    }
    let only_final = targets.is_empty();
    if only_final {
        targets.push(t_end);
    }
    let mut state = initial.clone();
    let mut out = Vec::with_capacity(targets.len());
    let dt_max = state.max_dt(cfl);
    for &target in &targets {
        while target - state.time > 1e-12 * (1.0 + target.abs()) {
            let dt = dt_max.min(target - state.time);
            step(&mut state, dt)?;
        }
        out.push(state.clone());
    }
    if !only_final {
        while t_end - state.time > 1e-12 * (1.0 + t_end.abs()) {
            let dt = dt_max.min(t_end - state.time);
            step(&mut state, dt)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::moments;

    fn periodic_state(n: usize, eps: f64) -> ReducedKineticState {
        let grid = UniformGrid::new(0.0, 1.0, n).unwrap();
        let states: Vec<GasState> = (0..n)
            .map(|i| {
                let x = grid.x(i);
                let s = (2.0 * std::f64::consts::PI * x).sin();
                GasState::new(1.0 / (1.0 + 0.3 * s), 0.2 * s, 1.0 + 0.2 * s).unwrap()
            })
            .collect();
        let vg = VelocityGrid::covering(&states, 96).unwrap();
        ReducedKineticState::from_states(grid, vg, &states, eps, Boundary::Periodic).unwrap()
    }

    #[test]
    fn uniform_maxwellian_is_a_fixed_point() {
        let grid = UniformGrid::new(-1.0, 1.0, 40).unwrap();
        let s = GasState::new(0.8, 0.3, 1.2).unwrap();
        let vg = VelocityGrid::covering(&[s], 128).unwrap();
        let mut st = ReducedKineticState::from_states(grid, vg, &vec![s; 40], 1e-3, Boundary::Outflow).unwrap();
        let before = st.clone();
        let dt = st.max_dt(0.9);
        for _ in 0..20 {
            step(&mut st, dt).unwrap();
        }
        let diff = st.g.iter().zip(&before.g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let peak = before.g.iter().fold(0.0_f64, |a, &b| a.max(b));
        assert!(diff <= 1e-14 * peak, "{diff}");
    }

    #[test]
    fn periodic_conservation_per_step() {
        let mut st = periodic_state(100, 0.01);
        let dt = st.max_dt(0.9);
        let mut prev = st.totals();
        for _ in 0..200 {
            step(&mut st, dt).unwrap();
            let now = st.totals();
            for c in 0..3 {
                let scale = prev[c].abs().max(prev[0]);
                assert!((now[c] - prev[c]).abs() < 1e-12 * scale, "component {c}");
            }
            prev = now;
        }
    }

    #[test]
    fn stiff_limit_projects_onto_maxwellian() {
        let mut st = periodic_state(20, 1e-14);
        // perturb away from equilibrium, then one step with a tiny τ
        let nv = st.vgrid.n_xi;
        for k in 0..nv {
            st.h[k] *= 1.5;
        }
        relax(&mut st, 1e-3).unwrap();
        let m = moments(&st).unwrap();
        let (gm, hm) = crate::kinetic::reduced_maxwellian(m.rho[0], m.u1[0], m.theta[0], &st.vgrid).unwrap();
        let peak = gm.iter().fold(0.0_f64, |a, &b| a.max(b));
        for k in 0..nv {
            assert!((st.g[k] - gm[k]).abs() < 1e-8 * peak);
            assert!((st.h[k] - hm[k]).abs() < 1e-8 * peak);
        }
    }

    #[test]
    fn free_transport_moves_pulse_with_mean_velocity() {
        let grid = UniformGrid::new(-2.0, 2.0, 800).unwrap();
        let vg = VelocityGrid::new(-4.0, 4.0, 33).unwrap();
        let nv = vg.n_xi;
        let mut st = ReducedKineticState {
            x_grid: grid.clone(),
            vgrid: vg.clone(),
            g: vec![0.0; grid.n * nv],
            h: vec![0.0; grid.n * nv],
            eps: f64::INFINITY,
            time: 0.0,
            transport: Transport::default(),
            boundary: Boundary::Outflow,
            mass_left: 0.0,
            exec: Execution::Parallel,
        };
        let (g0, h0) = crate::kinetic::reduced_maxwellian(1.0, 0.5, 0.05, &vg).unwrap();
        for i in 0..grid.n {
            let x = grid.x(i);
            let bump = (-(x / 0.15).powi(2)).exp();
            for k in 0..nv {
                st.g[i * nv + k] = bump * g0[k];
                st.h[i * nv + k] = bump * h0[k];
            }
        }
        let centre = |s: &ReducedKineticState| {
            let (mut m, mut mx) = (0.0, 0.0);
            for i in 0..grid.n {
                let rho = vg.integrate(&s.g[i * nv..(i + 1) * nv]);
                m += rho;
                mx += rho * grid.x(i);
            }
            (m * grid.dx, mx / m)
        };
        let (m0, c0) = centre(&st);
        let mean_u = {
            let t = st.totals();
            t[1] / t[0]
        };
        let out = run(&st, 1.0, &[], 0.9).unwrap();
        let (m1, c1) = centre(&out[0]);
        assert!((m1 - m0).abs() < 1e-12 * m0);
        assert!((c1 - c0 - mean_u).abs() < 2e-3, "{} vs {}", c1 - c0, mean_u);
    }

    #[test]
    fn relaxation_does_not_increase_entropy() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut st = periodic_state(8, 0.05);
            // random positive mixture of Maxwellians per cell
            let nv = st.vgrid.n_xi;
            for i in 0..st.x_grid.n {
                let (ga, ha) = crate::kinetic::reduced_maxwellian(
                    rng.gen_range(0.5..1.5),
                    rng.gen_range(-0.5..0.5),
                    rng.gen_range(0.5..1.5),
                    &st.vgrid,
                )
                .unwrap();
                let lam: f64 = rng.gen_range(0.0..1.0);
                let th_scale: f64 = rng.gen_range(0.3..2.0);
                for k in 0..nv {
                    st.g[i * nv + k] = (1.0 - lam) * st.g[i * nv + k] + lam * ga[k];
                    st.h[i * nv + k] = ((1.0 - lam) * st.h[i * nv + k] + lam * ha[k]) * th_scale;
                }
            }
            let mut last = st.entropy();
            for _ in 0..5 {
                relax(&mut st, 0.01).unwrap();
                let now = st.entropy();
                assert!(now <= last + 1e-12 * last.abs().max(1.0), "{now} > {last}");
                last = now;
            }
        }
    }

    #[test]
    fn positivity_over_long_run() {
        let mut st = periodic_state(60, 0.02);
        let dt = st.max_dt(0.9);
        for _ in 0..1000 {
            step(&mut st, dt).unwrap();
        }
        assert!(st.g.iter().chain(&st.h).all(|&v| v >= 0.0));
    }

    #[test]
    fn cfl_violation_and_trivial_run() {
        let mut st = periodic_state(10, 0.01);
        let lim = st.max_dt(MAX_CFL);
        assert!(matches!(step(&mut st, 2.0 * lim), Err(Error::Cfl { .. })));
        let out = run(&st, st.time, &[], 0.5).unwrap();
        assert_eq!(out[0], st);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut a = periodic_state(50, 0.01);
        let mut b = a.clone();
        a.exec = Execution::Sequential;
        b.exec = Execution::Parallel;
        let dt = a.max_dt(0.9);
        for _ in 0..10 {
            step(&mut a, dt).unwrap();
            step(&mut b, dt).unwrap();
        }
        assert_eq!(a.g, b.g);
        assert_eq!(a.h, b.h);
    }
}

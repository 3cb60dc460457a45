use hydrolimit::kinetic::{moments, run, Boundary, ReducedKineticState, VelocityGrid};
use hydrolimit::numerics::UniformGrid;
use hydrolimit::GasState;

fn smooth(n: usize, eps: f64) -> ReducedKineticState {
    let grid = UniformGrid::new(0.0, 1.0, n).unwrap();
    let states: Vec<GasState> = (0..n)
        .map(|i| {
            let s = (2.0 * std::f64::consts::PI * grid.x(i)).sin();
            GasState::new(1.0 / (1.0 + 0.2 * s), 0.1 * s, 1.0 + 0.1 * s).unwrap()
        })
        .collect();
    let vg = VelocityGrid::new(-6.0, 6.0, 96).unwrap();
    ReducedKineticState::from_states(grid, vg, &states, eps, Boundary::Periodic).unwrap()
}

fn density(n: usize, eps: f64, t: f64) -> Vec<f64> {
    let fin = run(&smooth(n, eps), t, &[], 0.5).unwrap().pop().unwrap();
    moments(&fin).unwrap().rho
}

/// Averages pairs of fine cells onto the next coarser grid.
fn coarsen(fine: &[f64]) -> Vec<f64> {
    fine.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

#[test]
fn self_convergence_is_at_least_first_order() {
    let (eps, t) = (0.05, 0.2);
    let r1 = density(64, eps, t);
    let r2 = density(128, eps, t);
    let r4 = density(256, eps, t);
    let e12 = l1(&r1, &coarsen(&r2));
    let e24 = l1(&r2, &coarsen(&r4));
    let order = (e12 / e24).log2();
    assert!(order >= 1.0, "order {order} ({e12:.3e}, {e24:.3e})");
}

#[test]
fn solutions_are_cauchy_in_eps() {
    let t = 0.2;
    let eps = [0.04, 0.02, 0.01, 0.005];
    let rho: Vec<Vec<f64>> = eps.iter().map(|&e| density(128, e, t)).collect();
    let gaps: Vec<f64> = rho.windows(2).map(|w| l1(&w[0], &w[1])).collect();
    for g in gaps.windows(2) {
        assert!(g[1] < g[0], "gaps {gaps:?}");
    }
}

//! Macro–micro decomposition `f = P₀f + P₁f` on a 3-D tensor quadrature.

use super::VelocityGrid;
use crate::error::{Error, Result};
use crate::gas::{GasState, R_GAS};

/// Tensor-product rule with a per-axis [`VelocityGrid`] centred on the state.
#[derive(Debug, Clone)]
pub struct TensorQuadrature {
    pub axes: [VelocityGrid; 3],
}

impl TensorQuadrature {
    pub fn around(state: &GasState, n_per_axis: usize) -> Result<Self> {
        let u = [state.u1, state.u2, state.u3];
        let axes = [0, 1, 2].map(|d| VelocityGrid::centered(u[d], state.theta, n_per_axis));
        let [a, b, c] = axes;
        Ok(Self { axes: [a?, b?, c?] })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n_xi).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node and weight of flat index `i` (last axis fastest).
    pub fn node(&self, i: usize) -> ([f64; 3], f64) {
        let [a, b, c] = &self.axes;
        let k = i % c.n_xi;
        let j = (i / c.n_xi) % b.n_xi;
        let l = i / (c.n_xi * b.n_xi);
        (
            [a.nodes[l], b.nodes[j], c.nodes[k]],
            a.weights[l] * b.weights[j] * c.weights[k],
        )
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        (0..self.len()).map(|i| self.node(i).1 * f[i]).sum()
    }
}

/// Projections of a sampled distribution together with the basis used.
#[derive(Debug, Clone)]
pub struct MacroMicro {
    pub quadrature: TensorQuadrature,
    pub maxwellian: Vec<f64>,
    /// `χ₀ … χ₄` at every node.
    pub basis: [Vec<f64>; 5],
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

impl MacroMicro {
    /// `⟨χᵢ, χⱼ⟩ = ∫ χᵢχⱼ / M dξ`.
    pub fn gram(&self) -> [[f64; 5]; 5] {
        let mut g = [[0.0; 5]; 5];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.inner(&self.basis[i], &self.basis[j]);
            }
        }
        g
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.quadrature.len())
            .map(|i| {
                let m = self.maxwellian[i];
                if m > 0.0 {
                    self.quadrature.node(i).1 * a[i] * b[i] / m
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `∫ φₖ f dξ` for the collision invariants `1, ξ₁, ξ₂, ξ₃, |ξ|²/2`.
    pub fn invariant_moments(&self, f: &[f64]) -> [f64; 5] {
        let mut m = [0.0; 5];
        for (i, fi) in f.iter().enumerate() {
            let (xi, w) = self.quadrature.node(i);
            let phi = [1.0, xi[0], xi[1], xi[2], 0.5 * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])];
            for k in 0..5 {
                m[k] += w * phi[k] * fi;
            }
        }
        m
    }
}

/// Projects `f` onto the span of the collision invariants at the local
/// Maxwellian of `state`.
pub fn macro_micro_project(f: &dyn Fn([f64; 3]) -> f64, state: &GasState, n_per_axis: usize) -> Result<MacroMicro> {
    state.validate()?;
    let quadrature = TensorQuadrature::around(state, n_per_axis)?;
    let (rho, rt) = (state.rho(), R_GAS * state.theta);
    let u = [state.u1, state.u2, state.u3];
    let norm = rho / (2.0 * std::f64::consts::PI * rt).powf(1.5);
    let n = quadrature.len();
    let mut maxwellian = vec![0.0; n];
    let mut basis: [Vec<f64>; 5] = Default::default();
    basis.iter_mut().for_each(|b| b.resize(n, 0.0));
    let mut fs = vec![0.0; n];
    for i in 0..n {
        let (xi, _) = quadrature.node(i);
        let c = [xi[0] - u[0], xi[1] - u[1], xi[2] - u[2]];
        let c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
        let m = norm * (-0.5 * c2 / rt).exp();
        maxwellian[i] = m;
        basis[0][i] = m / rho.sqrt();
        for d in 0..3 {
            basis[d + 1][i] = c[d] * m / (rt * rho).sqrt();
        }
        basis[4][i] = (c2 / rt - 3.0) * m / (6.0 * rho).sqrt();
        fs[i] = f(xi);
    }
    let mut out = MacroMicro {
        quadrature,
        maxwellian,
        basis,
        p0: vec![0.0; n],
        p1: Vec::new(),
    };
    let gram = out.gram();
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (v - want).abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "basis Gram entry ({i}, {j}) = {v}; quadrature too coarse"
                )));
            }
        }
    }
    let coeffs: Vec<f64> = out.basis.iter().map(|b| out.inner(&fs, b)).collect();
    for i in 0..n {
        out.p0[i] = (0..5).map(|j| coeffs[j] * out.basis[j][i]).sum();
    }
    out.p1 = fs.iter().zip(&out.p0).map(|(a, b)| a - b).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maxwellian(s: GasState) -> impl Fn([f64; 3]) -> f64 {
        move |xi: [f64; 3]| {
            let rt = R_GAS * s.theta;
            let c2 = (xi[0] - s.u1).powi(2) + (xi[1] - s.u2).powi(2) + (xi[2] - s.u3).powi(2);
            s.rho() / (2.0 * std::f64::consts::PI * rt).powf(1.5) * (-0.5 * c2 / rt).exp()
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        let s = GasState::new_3d(0.7, 0.3, -0.1, 0.2, 1.4).unwrap();
        let mm = macro_micro_project(&maxwellian(s), &s, 32).unwrap();
        let g = mm.gram();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[i][j] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn maxwellian_is_its_own_macro_part() {
        let s = GasState::new(1.3, -0.2, 0.8).unwrap();
        let mm = macro_micro_project(&maxwellian(s), &s, 32).unwrap();
        let peak = mm.maxwellian.iter().fold(0.0_f64, |a, &b| a.max(b));
        for i in 0..mm.quadrature.len() {
            assert!((mm.p0[i] - mm.maxwellian[i]).abs() < 1e-8 * peak);
            assert!(mm.p1[i].abs() < 1e-8 * peak);
        }
    }

    #[test]
    fn micro_part_carries_no_invariant_moments() {
        let s = GasState::new(1.0, 0.1, 1.0).unwrap();
        let m = maxwellian(s);
        let rt = R_GAS * s.theta;
        // odd cubic (heat-flux-like) plus an even quadratic perturbation
        let f = |xi: [f64; 3]| {
            let c = (xi[0] - s.u1) / rt.sqrt();
            m(xi) * (1.0 + 0.3 * (c * c * c - 3.0 * c) + 0.2 * c * c + 0.1 * xi[1] * xi[2])
        };
        let mm = macro_micro_project(&f, &s, 32).unwrap();
        let mom = mm.invariant_moments(&mm.p1);
        assert!(mom.iter().all(|v| v.abs() < 1e-8), "{mom:?}");
        // the heat-flux part survives in P₁
        let q: f64 = (0..mm.quadrature.len())
            .map(|i| {
                let (xi, w) = mm.quadrature.node(i);
                w * (xi[0] - s.u1).powi(3) * mm.p1[i]
            })
            .sum();
        assert!(q.abs() > 1e-2);
    }
}

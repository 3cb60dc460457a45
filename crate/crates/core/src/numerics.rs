//! Small numerical building blocks shared by the wave builders and solvers.

use crate::error::{Error, Result};

/// Uniform one-dimensional grid `x_i = start + i*dx`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub dx: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 || !(end > start) {
            return Err(Error::Precondition(format!(
                "grid needs n >= 2 and end > start (got n={n}, [{start}, {end}])"
            )));
        }
        Ok(Self {
            start,
            dx: (end - start) / (n - 1) as f64,
            n,
        })
    }

    /// Grid over `[start, end]` with spacing at most `max_dx`.
    pub fn with_max_spacing(start: f64, end: f64, max_dx: f64) -> Result<Self> {
        let n = ((end - start) / max_dx).ceil() as usize + 1;
        Self::new(start, end, n.max(2))
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dx
    }

    pub fn end(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Bisection on a bracketing interval. `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "bisection interval [{a}, {b}] does not bracket a root ({fa:e}, {fb:e})"
        )));
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NoConvergence {
        what: "bisection".into(),
        iterations: max_iter,
    })
}

/// Newton iteration safeguarded by a bracket: any Newton step leaving the
/// current bracket is replaced by a bisection step.
pub fn safeguarded_newton<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!(
            "newton bracket [{lo}, {hi}] does not bracket a root"
        )));
    }
    let increasing = fhi > 0.0;
    let mut x = 0.5 * (lo + hi);
    let mut step_old = hi - lo;
    let mut step = step_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..max_iter {
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == increasing {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        // bisect when Newton leaves the bracket or converges too slowly
        if !newton.is_finite() || newton <= lo || newton >= hi || (2.0 * fx).abs() > (step_old * dfx).abs() {
            step_old = step;
            step = 0.5 * (hi - lo);
            x = lo + step;
        } else {
            step_old = step;
            step = fx / dfx;
            x = newton;
        }
        if step.abs() <= tol * (1.0 + x.abs()) || hi - lo <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            return Ok(x);
        }
        (fx, dfx) = f(x);
    }
    Err(Error::NoConvergence {
        what: "safeguarded newton".into(),
        iterations: max_iter,
    })
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Precondition("pchip needs >= 2 matching points".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("pchip abscissae must increase strictly".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    /// Evaluates the interpolant; constant extrapolation outside the data.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        hermite(
            self.x[i],
            self.x[i + 1],
            self.y[i],
            self.y[i + 1],
            self.d[i],
            self.d[i + 1],
            t,
        )
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[inline]
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = x1 - x0;
    let s = (t - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Monotone cubic interpolation of uniformly spaced samples at arbitrary
/// abscissa, with the end values held outside the grid.
pub fn monotone_cubic_uniform(grid: &UniformGrid, y: &[f64], t: f64) -> f64 {
    let n = grid.n;
    let s = (t - grid.start) / grid.dx;
    if s <= 0.0 {
        return y[0];
    }
    if s >= (n - 1) as f64 {
        return y[n - 1];
    }
    let i = (s.floor() as usize).min(n - 2);
    let slope = |k: usize| -> f64 {
        // limited centered slope (Fritsch–Butland harmonic mean)
        if k == 0 {
            return (y[1] - y[0]) / grid.dx;
        }
        if k == n - 1 {
            return (y[n - 1] - y[n - 2]) / grid.dx;
        }
        let a = (y[k] - y[k - 1]) / grid.dx;
        let b = (y[k + 1] - y[k]) / grid.dx;
        if a * b <= 0.0 {
            0.0
        } else {
            2.0 * a * b / (a + b)
        }
    };
    let x0 = grid.x(i);
    hermite(x0, x0 + grid.dx, y[i], y[i + 1], slope(i), slope(i + 1), t)
}

/// First derivative by second-order centered differences, one-sided
/// second-order stencils at the ends.
pub fn diff1(y: &[f64], dx: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            d[0] = (y[1] - y[0]) / dx;
            d[1] = d[0];
        }
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dx);
    }
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);
    d
}

/// Second derivative by centered differences, one-sided at the ends.
pub fn diff2(y: &[f64], dx: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    if n < 4 {
        return d;
    }
    let dx2 = dx * dx;
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / dx2;
    }
    d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / dx2;
    d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / dx2;
    d
}

/// Composite trapezoidal rule on uniform samples.
pub fn trapezoid(y: &[f64], dx: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => dx * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1])),
    }
}

/// Running trapezoidal integral starting at zero.
pub fn cumulative_trapezoid(y: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in y.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Discrete L^p norm on a uniform grid; `p = f64::INFINITY` gives the max.
pub fn lp_norm(y: &[f64], dx: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    (dx * y.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Precondition("line fit needs >= 2 matching points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - (intercept + slope * a)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        residual: (ss_res / nf).sqrt(),
    })
}

/// Log-log slope of `y` against `x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// One classical Runge–Kutta step for an autonomous system of size `N`.
#[inline]
pub fn rk4_step<const N: usize, F>(f: &F, y: [f64; N], h: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let add = |a: &[f64; N], b: &[f64; N], s: f64| {
        let mut o = *a;
        for i in 0..N {
            o[i] += s * b[i];
        }
        o
    };
    let k1 = f(&y);
    let k2 = f(&add(&y, &k1, 0.5 * h));
    let k3 = f(&add(&y, &k2, 0.5 * h));
    let k4 = f(&add(&y, &k3, h));
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_and_newton_find_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
        let r = safeguarded_newton(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-15, 100).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-10, 10).is_err());
    }

    #[test]
    fn pchip_reproduces_linear_and_stays_monotone() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let p = Pchip::new(x, y).unwrap();
        assert_relative_eq!(p.eval(1.234), 2.0 * 1.234 - 1.0, epsilon = 1e-12);

        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.25 - 5.0).collect();
        let y: Vec<f64> = x.iter().map(|v| if *v < 0.0 { 0.0 } else { 1.0 }).collect();
        let p = Pchip::new(x, y).unwrap();
        let mut prev = -1.0;
        for k in 0..1000 {
            let v = p.eval(-5.0 + k as f64 * 0.00975);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn finite_differences_are_second_order() {
        let err = |n: usize| {
            let g = UniformGrid::new(0.0, 1.0, n).unwrap();
            let y: Vec<f64> = g.points().iter().map(|x| x.sin()).collect();
            let d = diff1(&y, g.dx);
            g.points()
                .iter()
                .zip(&d)
                .map(|(x, v)| (x.cos() - v).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(51) / err(101)).log2();
        assert!(order > 1.9, "order {order}");
    }

    #[test]
    fn fit_recovers_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        let f = loglog_slope(&x, &y).unwrap();
        assert_relative_eq!(f.slope, -0.5, epsilon = 1e-12);
        assert!(f.r_squared > 0.999_999);
    }
}

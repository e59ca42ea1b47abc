#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use vlasov_qmc::model::{InitialCondition, PhaseSpaceDomain, Species};
use vlasov_qmc::pic::SplinePoissonSolver;
use vlasov_qmc::spectral::{SpectralSolver, SpectralState};

/// Plasma dispersion function by integrating `Z' = -2 (1 + z Z)` from
/// `Z(0) = i sqrt(pi)` along the straight segment to `zeta` (RK4).
pub fn plasma_z(zeta: Complex64) -> Complex64 {
    let steps = 4000;
    let h = 1.0 / steps as f64;
    let rhs = |s: f64, z: Complex64| zeta * (-2.0) * (Complex64::new(1.0, 0.0) + zeta * s * z);
    let mut z = Complex64::new(0.0, std::f64::consts::PI.sqrt());
    for n in 0..steps {
        let s = n as f64 * h;
        let k1 = rhs(s, z);
        let k2 = rhs(s + 0.5 * h, z + k1 * (0.5 * h));
        let k3 = rhs(s + 0.5 * h, z + k2 * (0.5 * h));
        let k4 = rhs(s + h, z + k3 * h);
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    z
}

/// Least damped Langmuir root `omega` of `1 + (1 + zeta Z(zeta)) / k^2 = 0`,
/// `zeta = omega / (sqrt 2 k)`, by the secant method.
pub fn landau_root(k: f64, guess: Complex64) -> Complex64 {
    let eps = |w: Complex64| {
        let zeta = w / (2f64.sqrt() * k);
        Complex64::new(1.0, 0.0) + (Complex64::new(1.0, 0.0) + zeta * plasma_z(zeta)) / (k * k)
    };
    let mut w0 = guess;
    let mut w1 = guess + Complex64::new(0.01, -0.01);
    let mut f0 = eps(w0);
    for _ in 0..100 {
        let f1 = eps(w1);
        if f1.norm() < 1e-13 {
            break;
        }
        let w2 = w1 - f1 * (w1 - w0) / (f1 - f0);
        w0 = w1;
        f0 = f1;
        w1 = w2;
    }
    w1
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Indices of strict local maxima of `y`.
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect()
}

/// Damping rate from the peaks of a field-energy trace inside `[t_lo, t_hi]`
/// (field energy decays like `exp(-2 gamma t)`).
pub fn damping_rate(t: &[f64], energy: &[f64], t_lo: f64, t_hi: f64) -> f64 {
    let peaks: Vec<usize> = local_maxima(energy)
        .into_iter()
        .filter(|&i| t[i] >= t_lo && t[i] <= t_hi)
        .collect();
    let x: Vec<f64> = peaks.iter().map(|&i| t[i]).collect();
    let y: Vec<f64> = peaks.iter().map(|&i| energy[i].ln()).collect();
    -0.5 * linear_fit(&x, &y).0
}

/// Centred cubic B-spline of unit spacing.
fn bspline(s: f64) -> f64 {
    let a = s.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else if a < 2.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        0.0
    }
}

/// Load vector of `q cos(kx)` by 5-point Gauss-Legendre per unit sub-interval.
fn cosine_load(n: usize, length: f64, q: f64) -> Vec<f64> {
    let nodes = [
        (0.0, 128.0 / 225.0),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let h = length / n as f64;
    let k = 2.0 * PI / length;
    (0..n)
        .map(|i| {
            let mut sum = 0.0;
            for seg in -2..2 {
                for (z, w) in nodes {
                    let s = seg as f64 + 0.5 + 0.5 * z;
                    let x = (i as f64 + s) * h;
                    sum += 0.5 * w * h * bspline(s) * q * (k * x).cos();
                }
            }
            sum
        })
        .collect()
}

/// Knot and sup-norm field errors of the spline Poisson solve of `-phi'' = q cos x`.
pub fn fem_errors(n: usize) -> (f64, f64) {
    let length = 2.0 * PI;
    let d = PhaseSpaceDomain::new(0.0, length, -1.0, 1.0).unwrap();
    let solver = SplinePoissonSolver::new(d, n, Species::ELECTRON).unwrap();
    let q = -1.0;
    let field = solver.solve(&cosine_load(n, length, q), 0.0);
    // -phi'' = q cos x  =>  E = q sin x.
    let knot = (0..n)
        .map(|i| {
            let x = i as f64 * solver.dx;
            (field.eval_e(x) - q * x.sin()).abs()
        })
        .fold(0.0, f64::max);
    let fine = 64 * n;
    let sup = (0..fine)
        .map(|i| {
            let x = (i as f64 + 0.5) * length / fine as f64;
            (field.eval_e(x) - q * x.sin()).abs()
        })
        .fold(0.0, f64::max);
    (knot, sup)
}


/// L2 errors of the split-step solver for nonlinear Landau at `t = 2` and
/// the given steps, against a run with an eighth of the smallest step.
pub fn split_step_errors(dts: &[f64]) -> Vec<f64> {
    let ic = InitialCondition::landau();
    let domain = ic.domain(6.5);
    let init = SpectralState::from_initial(&ic, domain, 32, 64).unwrap();
    let solver = SpectralSolver::for_state(&init, Species::ELECTRON).unwrap().with_filter(false);
    let horizon = 2.0;
    let evolve = |dt: f64| {
        let mut s = init.clone();
        for _ in 0..(horizon / dt).round() as usize {
            solver.step(&mut s, dt);
        }
        s
    };
    let finest = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference = evolve(finest / 8.0);
    dts.iter()
        .map(|&dt| {
            let s = evolve(dt);
            let sq: f64 = s.values.iter().zip(&reference.values).map(|(a, b)| (a - b).powi(2)).sum();
            (sq * s.dx() * s.dv()).sqrt()
        })
        .collect()
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

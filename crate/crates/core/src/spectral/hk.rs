use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::model::GriddedDensity;
use crate::par;

/// Spectral x-derivative of an x-major `nx * nv` array (periodic in x).
fn spectral_dx(values: &[f64], nx: usize, nv: usize, length: f64) -> Vec<f64> {
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nx);
    let inv = planner.plan_fft_inverse(nx);
    let base = 2.0 * PI / length;
    let cols = par::map_range(nv, |j| {
        let mut buf: Vec<Complex64> = (0..nx).map(|i| Complex64::new(values[i * nv + j], 0.0)).collect();
        fwd.process(&mut buf);
        for (m, c) in buf.iter_mut().enumerate() {
            let k = if nx % 2 == 0 && m == nx / 2 {
                0.0
            } else if m < nx.div_ceil(2) {
                base * m as f64
            } else {
                base * (m as f64 - nx as f64)
            };
            *c *= Complex64::new(0.0, k / nx as f64);
        }
        inv.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect::<Vec<f64>>()
    });
    let mut out = vec![0.0; nx * nv];
    for (j, col) in cols.iter().enumerate() {
        for (i, &d) in col.iter().enumerate() {
            out[i * nv + j] = d;
        }
    }
    out
}

const CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const ONE_SIDED: [[f64; 5]; 2] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
];

/// Fourth-order finite-difference v-derivative of one row.
fn fd_dv(row: &[f64], dv: f64, periodic: bool, out: &mut [f64]) {
    let n = row.len();
    let h = 12.0 * dv;
    for j in 0..n {
        out[j] = if periodic {
            (0..5)
                .map(|s| CENTRAL[s] * row[(j + n + s - 2) % n])
                .sum::<f64>()
                / h
        } else if j < 2 {
            (0..5).map(|s| ONE_SIDED[j][s] * row[s]).sum::<f64>() / h
        } else if j + 2 >= n {
            let b = n - 1 - j;
            -(0..5).map(|s| ONE_SIDED[b][s] * row[n - 1 - s]).sum::<f64>() / h
        } else {
            (0..5).map(|s| CENTRAL[s] * row[j + s - 2]).sum::<f64>() / h
        };
    }
}

fn variation(values: &[f64], nx: usize, nv: usize, dx: f64, dv: f64, length: f64, periodic_v: bool) -> f64 {
    let fx = spectral_dx(values, nx, nv, length);
    let weight = |j: usize| {
        if !periodic_v && (j == 0 || j == nv - 1) {
            0.5
        } else {
            1.0
        }
    };
    let rows = par::map_range(nx, |i| {
        let row = &values[i * nv..(i + 1) * nv];
        let row_x = &fx[i * nv..(i + 1) * nv];
        let mut fv = vec![0.0; nv];
        let mut fxv = vec![0.0; nv];
        fd_dv(row, dv, periodic_v, &mut fv);
        fd_dv(row_x, dv, periodic_v, &mut fxv);
        (0..nv)
            .map(|j| weight(j) * (row_x[j].abs() + fv[j].abs() + fxv[j].abs()))
            .sum::<f64>()
    });
    rows.into_iter().sum::<f64>() * dx * dv
}

/// Hardy-Krause variation of a grid that is periodic in both directions.
pub fn hk_variation_grid(values: &[f64], nx: usize, nv: usize, dx: f64, dv: f64) -> f64 {
    assert_eq!(values.len(), nx * nv);
    assert!(nv >= 5, "need at least 5 v nodes");
    variation(values, nx, nv, dx, dv, dx * nx as f64, true)
}

/// Hardy-Krause variation of an endpoint-inclusive gridded density.
pub fn hk_variation_gridded(g: &GriddedDensity) -> f64 {
    assert!(g.nv >= 5, "need at least 5 v nodes");
    variation(&g.values, g.nx, g.nv, g.dx(), g.dv(), g.domain.length(), false)
}

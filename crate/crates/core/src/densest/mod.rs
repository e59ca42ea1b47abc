//! Density reconstruction from markers on a bilinear (linear-spline tensor)
//! basis: orthogonal series estimation and ridge-regularized interpolation.

mod basis;
mod ridge;

pub use basis::{osde_linear, LinearSplineBasis2D};
pub use ridge::{bilinear_ridge_fit, default_ridge_lambda, BandCholesky};

/// Relative damping `|1 - sinc(kh/2)^(m+1)|` of Fourier mode `k` by a
/// degree-`m` B-spline on a grid of step `h`.
pub fn spline_mode_error(k: f64, h: f64, m: u32) -> f64 {
    let z = 0.5 * k * h;
    let sinc = if z == 0.0 { 1.0 } else { z.sin() / z };
    (1.0 - sinc.powi(m as i32 + 1)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_error_constants() {
        assert!((spline_mode_error(2.0, 1.0, 1) - 0.2919).abs() < 5e-5);
        assert!((spline_mode_error(2.0, 1.0 / 32.0, 1) - 3.2548e-4).abs() < 5e-9);
        assert_eq!(spline_mode_error(0.0, 0.3, 3), 0.0);
    }
}

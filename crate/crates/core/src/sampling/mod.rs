//! Inverse-transform sampling.
//!
//! [`BilinearSampler`] implements the exact two-dimensional Rosenblatt
//! transform of a bilinear gridded density (marginal in x, then the
//! conditional in v). [`its_tensor_product`] samples the analytic initial
//! conditions one dimension at a time.

mod bilinear;
mod tensor;

pub use bilinear::{
    forward_cdf, rosenblatt_sample, sample_conditional_v, sample_marginal_x, BilinearSampler,
    PiecewiseLinearCdf,
};
pub use tensor::{its_tensor_product, uniform_sample, MixtureVelocityCdf, SpatialCdf};

/// Solves `h * (g0 t + (g1 - g0) t^2 / 2) = r` for `t` in `[0, 1]`.
///
/// This is the inverse of the cumulative mass of a linear density running
/// from `g0` to `g1` across a cell of width `h`.
#[inline]
pub(crate) fn invert_linear_cell(g0: f64, g1: f64, h: f64, r: f64) -> f64 {
    let r = r.max(0.0) / h;
    let dg = g1 - g0;
    let t = if dg.abs() < 1e-14 * g0.abs().max(g1.abs()).max(1.0) {
        if g0 > 0.0 {
            r / g0
        } else {
            0.0
        }
    } else {
        // rationalised closed form; equal to (-g0 + sqrt(g0^2 + 2 dg r)) / dg
        let disc = (g0 * g0 + 2.0 * dg * r).max(0.0);
        let den = g0 + disc.sqrt();
        if den > 0.0 {
            2.0 * r / den
        } else {
            0.0
        }
    };
    t.clamp(0.0, 1.0)
}

/// Cumulative mass `h * (g0 (t - t^2/2) + g1 t^2 / 2)` of a linear cell.
#[inline]
pub(crate) fn linear_cell_mass(g0: f64, g1: f64, h: f64, t: f64) -> f64 {
    h * (g0 * (t - 0.5 * t * t) + g1 * 0.5 * t * t)
}

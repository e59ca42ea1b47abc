use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::SpectralState;
use crate::error::{Error, Result};
use crate::model::GriddedDensity;
use crate::par;

/// Trigonometric interpolation of each contiguous line of length `n` onto
/// `factor * n` equispaced points (`factor >= 2`). An even-length Nyquist coefficient is
/// split evenly between the two fine-grid modes so the result stays real.
fn refine_lines(data: &[f64], n: usize, factor: usize) -> Vec<f64> {
    let big = n * factor;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(big);
    let lines = data.len() / n;
    let mut out = vec![0.0; lines * big];
    let scale = 1.0 / n as f64;
    par::for_each_chunk_mut(&mut out, big, |line, target| {
        let mut buf: Vec<Complex64> = data[line * n..(line + 1) * n]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fwd.process(&mut buf);
        let mut wide = vec![Complex64::new(0.0, 0.0); big];
        let half = n / 2;
        for m in 0..n.div_ceil(2) {
            wide[m] = buf[m];
        }
        for m in (half + 1)..n {
            wide[m + big - n] = buf[m];
        }
        if n % 2 == 0 {
            wide[half] = buf[half] * 0.5;
            wide[big - half] = buf[half] * 0.5;
        }
        inv.process(&mut wide);
        for (t, c) in target.iter_mut().zip(&wide) {
            *t = c.re * scale;
        }
    });
    out
}

fn transpose(src: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

/// Zero-padded spectral interpolation of `s` onto `(n_pad nx) x (n_pad nv)`
/// periodic nodes, returned with the `v = v_max` endpoint appended so the
/// result has `n_pad nv + 1` velocity nodes.
pub fn zero_pad(s: &SpectralState, n_pad: usize) -> Result<GriddedDensity> {
    if n_pad == 0 {
        return Err(Error::InvalidInput("n_pad must be at least 1".into()));
    }
    if n_pad == 1 {
        return Ok(s.to_gridded());
    }
    let fine_v = refine_lines(&s.values, s.nv, n_pad);
    let nvf = s.nv * n_pad;
    let by_v = transpose(&fine_v, s.nx, nvf);
    let fine = refine_lines(&by_v, s.nx, n_pad);
    let nxf = s.nx * n_pad;
    let fine = transpose(&fine, nvf, nxf);
    let padded = SpectralState::new(s.domain, nxf, nvf, fine, s.t)?;
    Ok(padded.to_gridded())
}

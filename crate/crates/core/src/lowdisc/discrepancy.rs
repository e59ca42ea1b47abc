//! Exact star discrepancy in two dimensions.
//!
//! `D* = sup_B |area(B) - #(P in B)/n|` over anchored boxes `B = [0,a) x [0,b)`
//! and their closures. The supremum of the excess `count/n - ab` is attained
//! on closed boxes whose corner coordinates are point coordinates; the
//! supremum of the deficit `ab - count/n` is approached by open boxes whose
//! corner coordinates are point coordinates or 1. Sweeping the first
//! coordinate while keeping the second coordinates of the swept points in a
//! sorted vector visits every such corner in `O(n^2)` time.

use super::PointSet2D;
use crate::error::{Error, Result};
use crate::model::{ParticleEnsemble, PhaseSpaceDomain};
use crate::par;

/// Sweep positions handled by one parallel task.
const SWEEP_CHUNK: usize = 64;

/// Exact star discrepancy. Coordinates may lie anywhere in `[0, 1]`.
pub fn star_discrepancy(ps: &PointSet2D) -> Result<f64> {
    star_discrepancy_of(&ps.points)
}

fn star_discrepancy_of(points: &[(f64, f64)]) -> Result<f64> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));

    // sweep positions: distinct first coordinates, then 1
    let mut stops: Vec<(f64, usize, usize)> = Vec::new(); // (a, start, end) of points with u == a
    let mut i = 0;
    while i < n {
        let a = pts[i].0;
        let mut j = i;
        while j < n && pts[j].0 == a {
            j += 1;
        }
        stops.push((a, i, j));
        i = j;
    }
    if stops.last().is_none_or(|s| s.0 < 1.0) {
        stops.push((1.0, n, n));
    }

    let inv_n = 1.0 / n as f64;
    let n_chunks = stops.len().div_ceil(SWEEP_CHUNK);
    let best = par::max_range(n_chunks, |c| {
        let chunk = &stops[c * SWEEP_CHUNK..((c + 1) * SWEEP_CHUNK).min(stops.len())];
        // second coordinates of points strictly left of the first stop
        let mut w: Vec<f64> = pts[..chunk[0].1].iter().map(|p| p.1).collect();
        w.sort_by(f64::total_cmp);
        let mut best = 0.0f64;
        for &(a, start, end) in chunk {
            best = best.max(open_deficit(&w, a, inv_n));
            for p in &pts[start..end] {
                let pos = w.partition_point(|&x| x <= p.1);
                w.insert(pos, p.1);
            }
            if end > start {
                best = best.max(closed_excess(&w, a, inv_n));
            }
        }
        best
    });
    Ok(best.min(1.0))
}

/// max over b in W u {1} of `a b - #{w < b} / n`.
fn open_deficit(w: &[f64], a: f64, inv_n: f64) -> f64 {
    let mut best = a * 1.0 - w.len() as f64 * inv_n;
    let mut k = 0;
    while k < w.len() {
        let b = w[k];
        best = best.max(a * b - k as f64 * inv_n);
        while k < w.len() && w[k] == b {
            k += 1;
        }
    }
    best
}

/// max over b in W of `#{w <= b} / n - a b`.
fn closed_excess(w: &[f64], a: f64, inv_n: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    while k < w.len() {
        let b = w[k];
        while k < w.len() && w[k] == b {
            k += 1;
        }
        best = best.max(k as f64 * inv_n - a * b);
    }
    best
}

/// Discrepancy of the markers inside a window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowDiscrepancy {
    pub d_star: f64,
    /// Markers inside the window.
    pub n_in_window: usize,
    /// Markers actually used (after subsampling to the cap).
    pub n_used: usize,
}

/// Star discrepancy of the markers in `window`, rescaled to the unit square.
///
/// The window is half-open, `[x_min, x_max) x [v_min, v_max)`. When more than
/// `cap` markers fall inside, every `n/cap`-th one (by index) is used.
pub fn star_discrepancy_in_window(
    e: &ParticleEnsemble,
    window: &PhaseSpaceDomain,
    cap: Option<usize>,
) -> Result<WindowDiscrepancy> {
    let sx = 1.0 / window.length();
    let sv = 1.0 / window.v_width();
    let inside: Vec<(f64, f64)> = e
        .x
        .iter()
        .zip(&e.v)
        .filter(|(x, v)| {
            **x >= window.x_min && **x < window.x_max && **v >= window.v_min && **v < window.v_max
        })
        .map(|(x, v)| {
            (
                ((x - window.x_min) * sx).min(1.0),
                ((v - window.v_min) * sv).min(1.0),
            )
        })
        .collect();
    let n_in = inside.len();
    if n_in == 0 {
        return Err(Error::EmptyPointSet);
    }
    let used: Vec<(f64, f64)> = match cap {
        Some(c) if c > 0 && n_in > c => (0..c).map(|i| inside[i * n_in / c]).collect(),
        _ => inside,
    };
    Ok(WindowDiscrepancy {
        d_star: star_discrepancy_of(&used)?,
        n_in_window: n_in,
        n_used: used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_centre_point() {
        let ps = PointSet2D::new(vec![(0.5, 0.5)]).unwrap();
        assert!((star_discrepancy(&ps).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn two_diagonal_points() {
        let ps = PointSet2D::new(vec![(0.25, 0.25), (0.75, 0.75)]).unwrap();
        assert!((star_discrepancy(&ps).unwrap() - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn point_near_far_corner() {
        let d = 1e-9;
        let ps = PointSet2D::new(vec![(1.0 - d, 1.0 - d)]).unwrap();
        assert!(star_discrepancy(&ps).unwrap() > 1.0 - 3e-9);
    }

    #[test]
    fn empty_set() {
        assert!(matches!(
            star_discrepancy(&PointSet2D::default()),
            Err(Error::EmptyPointSet)
        ));
    }

    #[test]
    fn duplicated_points() {
        let ps = PointSet2D::new(vec![(0.5, 0.5), (0.5, 0.5)]).unwrap();
        assert!((star_discrepancy(&ps).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn window_without_markers() {
        let e = ParticleEnsemble::new(vec![5.0], vec![5.0], vec![1.0], vec![1.0]).unwrap();
        let w = PhaseSpaceDomain::new(0.0, 2.0, -1.0, 1.0).unwrap();
        assert!(matches!(
            star_discrepancy_in_window(&e, &w, None),
            Err(Error::EmptyPointSet)
        ));
    }
}

use super::basis::LinearSplineBasis2D;
use crate::error::{Error, Result};
use crate::model::GriddedDensity;

/// Cholesky factor of a symmetric positive definite band matrix, stored
/// row-wise as `band[r * (hb + 1) + (c + hb - r)]` for `r - hb <= c <= r`.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    hb: usize,
    band: Vec<f64>,
}

impl BandCholesky {
    /// Lower band of `a` (same layout as the factor) with half-bandwidth `hb`.
    /// Fails with `SingularSystem` when a pivot drops below
    /// `1e-13 * max diagonal`.
    pub fn factor(n: usize, hb: usize, mut band: Vec<f64>) -> Result<Self> {
        let w = hb + 1;
        assert_eq!(band.len(), n * w);
        let max_diag = (0..n).map(|r| band[r * w + hb]).fold(0.0, f64::max);
        let floor = 1e-13 * max_diag;
        for r in 0..n {
            let lo = r.saturating_sub(hb);
            for c in lo..=r {
                let c_lo = c.saturating_sub(hb).max(lo);
                let mut s = band[r * w + (c + hb - r)];
                for k in c_lo..c {
                    s -= band[r * w + (k + hb - r)] * band[c * w + (k + hb - c)];
                }
                if c == r {
                    if !(s > floor) {
                        return Err(Error::SingularSystem);
                    }
                    band[r * w + hb] = s.sqrt();
                } else {
                    band[r * w + (c + hb - r)] = s / band[c * w + hb];
                }
            }
        }
        Ok(BandCholesky { n, hb, band })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, hb, w) = (self.n, self.hb, self.hb + 1);
        let mut y = b.to_vec();
        for r in 0..n {
            let lo = r.saturating_sub(hb);
            let mut s = y[r];
            for k in lo..r {
                s -= self.band[r * w + (k + hb - r)] * y[k];
            }
            y[r] = s / self.band[r * w + hb];
        }
        for r in (0..n).rev() {
            let mut s = y[r];
            for k in (r + 1)..n.min(r + hb + 1) {
                s -= self.band[k * w + (r + hb - k)] * y[k];
            }
            y[r] = s / self.band[r * w + hb];
        }
        y
    }
}

/// Position of x node `i` in the interleaved order `0, n-1, 1, n-2, ...`
/// that keeps periodic neighbours at most two blocks apart.
fn interleave(i: usize, n: usize) -> usize {
    if i <= (n - 1) / 2 {
        2 * i
    } else {
        2 * (n - 1 - i) + 1
    }
}

struct Normal {
    hb: usize,
    band: Vec<f64>,
    rhs: Vec<f64>,
    perm: Vec<usize>,
}

fn assemble(xs: &[f64], vs: &[f64], values: &[f64], basis: &LinearSplineBasis2D) -> Normal {
    let nv = basis.nv;
    let n = basis.len();
    let perm: Vec<usize> = (0..n).map(|k| interleave(k / nv, basis.nx) * nv + k % nv).collect();
    let hb = 2 * nv + 1;
    let w = hb + 1;
    let mut band = vec![0.0; n * w];
    let mut rhs = vec![0.0; n];
    for s in 0..xs.len() {
        let Some(sup) = basis.support(xs[s], vs[s]) else {
            continue;
        };
        for &(a, ba) in &sup {
            let ra = perm[a];
            rhs[ra] += ba * values[s];
            for &(b, bb) in &sup {
                let rb = perm[b];
                if rb <= ra {
                    band[ra * w + (rb + hb - ra)] += ba * bb;
                }
            }
        }
    }
    Normal { hb, band, rhs, perm }
}

/// `1e-8` times the largest diagonal entry of the normal matrix.
pub fn default_ridge_lambda(xs: &[f64], vs: &[f64], basis: &LinearSplineBasis2D) -> f64 {
    let values = vec![0.0; xs.len()];
    let nrm = assemble(xs, vs, &values, basis);
    let w = nrm.hb + 1;
    let max_diag = (0..basis.len()).map(|r| nrm.band[r * w + nrm.hb]).fold(0.0, f64::max);
    1e-8 * max_diag
}

/// Least-squares fit of bilinear coefficients to `(x, v, value)` samples
/// with ridge penalty `lambda |c|^2`, via banded normal equations.
pub fn bilinear_ridge_fit(
    xs: &[f64],
    vs: &[f64],
    values: &[f64],
    basis: &LinearSplineBasis2D,
    lambda: f64,
) -> Result<GriddedDensity> {
    if xs.len() != vs.len() || xs.len() != values.len() {
        return Err(Error::InvalidInput("sample columns differ in length".into()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("ridge weight must be nonnegative, got {lambda}")));
    }
    if lambda == 0.0 && xs.len() < basis.len() {
        return Err(Error::InvalidInput(format!(
            "{} samples for {} unknowns needs a positive ridge weight",
            xs.len(),
            basis.len()
        )));
    }
    let mut nrm = assemble(xs, vs, values, basis);
    let w = nrm.hb + 1;
    for r in 0..basis.len() {
        nrm.band[r * w + nrm.hb] += lambda;
    }
    let chol = BandCholesky::factor(basis.len(), nrm.hb, nrm.band)?;
    let sol = chol.solve(&nrm.rhs);
    let coeffs = nrm.perm.iter().map(|&p| sol[p]).collect();
    basis.to_gridded(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhaseSpaceDomain;

    #[test]
    fn interleave_is_a_permutation() {
        for n in 2..9 {
            let mut seen: Vec<usize> = (0..n).map(|i| interleave(i, n)).collect();
            seen.sort();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
            for i in 0..n {
                let a = interleave(i, n) as i64;
                let b = interleave((i + 1) % n, n) as i64;
                assert!((a - b).abs() <= 2);
            }
        }
    }

    #[test]
    fn band_cholesky_solves_tridiagonal() {
        let n = 6;
        let mut band = vec![0.0; n * 2];
        for r in 0..n {
            band[r * 2 + 1] = 4.0;
            if r > 0 {
                band[r * 2] = -1.0;
            }
        }
        let chol = BandCholesky::factor(n, 1, band).unwrap();
        let x = chol.solve(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        for r in 0..n {
            let mut ax = 4.0 * x[r];
            if r > 0 {
                ax -= x[r - 1];
            }
            if r + 1 < n {
                ax -= x[r + 1];
            }
            assert!((ax - (r + 1) as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn nodes_are_interpolated() {
        let d = PhaseSpaceDomain::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let b = LinearSplineBasis2D::new(d, 4, 3).unwrap();
        let (mut xs, mut vs, mut vals) = (vec![], vec![], vec![]);
        for i in 0..4 {
            for j in 0..3 {
                xs.push(i as f64 * 0.25);
                vs.push(j as f64 * 0.5);
                vals.push((i * 3 + j) as f64 - 2.5);
            }
        }
        let g = bilinear_ridge_fit(&xs, &vs, &vals, &b, 0.0).unwrap();
        for (a, z) in g.values.iter().zip(&vals) {
            assert!((a - z).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_without_ridge() {
        let d = PhaseSpaceDomain::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let b = LinearSplineBasis2D::new(d, 4, 3).unwrap();
        let xs = vec![0.1; 20];
        let vs = vec![0.2; 20];
        let vals = vec![1.0; 20];
        assert!(matches!(bilinear_ridge_fit(&xs, &vs, &vals, &b, 0.0), Err(Error::SingularSystem)));
        assert!(bilinear_ridge_fit(&xs, &vs, &vals, &b, 1e-6).is_ok());
        assert!(bilinear_ridge_fit(&xs[..3], &vs[..3], &vals[..3], &b, 0.0).is_err());
    }
}

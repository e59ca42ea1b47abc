use super::{invert_linear_cell, linear_cell_mass};
use crate::error::{Error, Result};
use crate::lowdisc::PointSet2D;
use crate::model::{GriddedDensity, ParticleEnsemble};
use crate::par;

/// Piecewise-linear density on uniformly spaced nodes `x0 + i h`, together
/// with its trapezoid partial sums. The nodes need not be normalized; the
/// CDF is divided by the total mass.
#[derive(Clone, Debug)]
pub struct PiecewiseLinearCdf {
    x0: f64,
    h: f64,
    nodes: Vec<f64>,
    cum: Vec<f64>,
}

impl PiecewiseLinearCdf {
    pub fn new(x0: f64, h: f64, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || !(h > 0.0) {
            return Err(Error::InvalidInput("need at least one cell of positive width".into()));
        }
        if nodes.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::InvalidInput("density nodes must be nonnegative".into()));
        }
        let cum = partial_sums(&nodes, h);
        if !(cum[cum.len() - 1] > 0.0) {
            return Err(Error::AllZeroDensity);
        }
        Ok(PiecewiseLinearCdf { x0, h, nodes, cum })
    }

    pub fn total(&self) -> f64 {
        self.cum[self.cum.len() - 1]
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Trapezoid partial sums, `cum[i]` = mass left of node `i`.
    pub fn partial_sums(&self) -> &[f64] {
        &self.cum
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = ((x - self.x0) / self.h).clamp(0.0, self.cells() as f64);
        let i = (s.floor() as usize).min(self.cells() - 1);
        let t = s - i as f64;
        (self.cum[i] + linear_cell_mass(self.nodes[i], self.nodes[i + 1], self.h, t)) / self.total()
    }

    /// Smallest-cell inversion: the cell is the largest `i` whose partial
    /// sum is strictly below `u * total`.
    pub fn invert(&self, u: f64) -> f64 {
        let target = u.clamp(0.0, 1.0) * self.total();
        let i = self
            .cum
            .partition_point(|&c| c < target)
            .saturating_sub(1)
            .min(self.cells() - 1);
        let t = invert_linear_cell(self.nodes[i], self.nodes[i + 1], self.h, target - self.cum[i]);
        self.x0 + (i as f64 + t) * self.h
    }
}

fn partial_sums(nodes: &[f64], h: f64) -> Vec<f64> {
    let mut cum = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in nodes.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * h;
        cum.push(acc);
    }
    cum
}

/// Exact inverse transform sampler for a bilinear sampling density that is
/// periodic in x and bounded in v.
#[derive(Clone, Debug)]
pub struct BilinearSampler {
    g: GriddedDensity,
    /// x-marginal at the `nx + 1` nodes (the last repeats the first).
    marginal_x: PiecewiseLinearCdf,
    /// Per-column v partial sums, `nx * nv`, row-major.
    cum_v: Vec<f64>,
}

impl BilinearSampler {
    /// `g` must be nonnegative with unit trapezoid mass (see
    /// [`crate::model::normalize_to_sampling_density`]).
    pub fn new(g: GriddedDensity) -> Result<Self> {
        if g.values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("sampling density must be nonnegative".into()));
        }
        let mass = g.trapezoid_mass();
        if !(mass > 0.0) {
            return Err(Error::AllZeroDensity);
        }
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "sampling density has mass {mass}, expected 1"
            )));
        }
        let (nx, nv) = (g.nx, g.nv);
        let dv = g.dv();
        let mut cum_v = Vec::with_capacity(nx * nv);
        let mut col = Vec::with_capacity(nx + 1);
        for i in 0..nx {
            let c = partial_sums(g.row(i), dv);
            col.push(c[nv - 1]);
            cum_v.extend(c);
        }
        col.push(col[0]);
        let marginal_x = PiecewiseLinearCdf::new(g.domain.x_min, g.dx(), col)?;
        Ok(BilinearSampler {
            g,
            marginal_x,
            cum_v,
        })
    }

    pub fn density(&self) -> &GriddedDensity {
        &self.g
    }

    /// `g_X` at the x nodes, including the repeated periodic node.
    pub fn marginal_nodes(&self) -> &[f64] {
        &self.marginal_x.nodes
    }

    /// Trapezoid partial sums of the x-marginal.
    pub fn cumulative_x(&self) -> &[f64] {
        self.marginal_x.partial_sums()
    }

    #[inline]
    fn cum_v(&self, i: usize, j: usize) -> f64 {
        self.cum_v[(i % self.g.nx) * self.g.nv + j]
    }

    /// Cell and offset of x, clamped to `[x_min, x_max]` (no wrap, so the
    /// right end maps to the end of the last cell).
    #[inline]
    fn locate_x(&self, x: f64) -> (usize, f64) {
        let s = ((x - self.g.domain.x_min) / self.g.dx()).clamp(0.0, self.g.nx as f64);
        let i = (s.floor() as usize).min(self.g.nx - 1);
        (i, s - i as f64)
    }

    /// Bilinear value of the sampling density.
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let (i, a) = self.locate_x(x);
        let (j, b) = self.g.locate_v(v);
        let c0 = (1.0 - b) * self.g.at(i, j) + b * self.g.at(i, j + 1);
        let c1 = (1.0 - b) * self.g.at(i + 1, j) + b * self.g.at(i + 1, j + 1);
        (1.0 - a) * c0 + a * c1
    }

    /// Marginal density `g_X(x)`.
    pub fn marginal(&self, x: f64) -> f64 {
        let (i, a) = self.locate_x(x);
        let n = &self.marginal_x.nodes;
        (1.0 - a) * n[i] + a * n[i + 1]
    }

    pub fn sample_x(&self, u_x: f64) -> f64 {
        self.marginal_x.invert(u_x)
    }

    pub fn sample_v(&self, x: f64, u_v: f64) -> Result<f64> {
        let (i, a) = self.locate_x(x);
        let total = self.marginal(x);
        if !(total > 0.0) {
            return Err(Error::ZeroConditional { x });
        }
        let nv = self.g.nv;
        let target = u_v.clamp(0.0, 1.0) * total;
        let delta = |j: usize| (1.0 - a) * self.cum_v(i, j) + a * self.cum_v(i + 1, j);
        // count of j with delta(j) < target; delta is nondecreasing in j
        let (mut lo, mut hi) = (0usize, nv);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if delta(mid) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let j = lo.saturating_sub(1).min(nv - 2);
        let gamma = |j: usize| (1.0 - a) * self.g.at(i, j) + a * self.g.at(i + 1, j);
        let t = invert_linear_cell(gamma(j), gamma(j + 1), self.g.dv(), target - delta(j));
        Ok(self.g.domain.v_min + (j as f64 + t) * self.g.dv())
    }

    /// `(G_X(x), G_{V | X = x}(v))`.
    pub fn forward(&self, x: f64, v: f64) -> (f64, f64) {
        let u_x = self.marginal_x.cdf(x);
        let (i, a) = self.locate_x(x);
        let total = self.marginal(x);
        if !(total > 0.0) {
            return (u_x, 0.0);
        }
        let (j, b) = self.g.locate_v(v);
        let gamma = |j: usize| (1.0 - a) * self.g.at(i, j) + a * self.g.at(i + 1, j);
        let delta = (1.0 - a) * self.cum_v(i, j) + a * self.cum_v(i + 1, j);
        let u_v = (delta + linear_cell_mass(gamma(j), gamma(j + 1), self.g.dv(), b)) / total;
        (u_x, u_v.clamp(0.0, 1.0))
    }
}

pub fn sample_marginal_x(s: &BilinearSampler, u_x: f64) -> f64 {
    s.sample_x(u_x)
}

pub fn sample_conditional_v(s: &BilinearSampler, x: f64, u_v: f64) -> Result<f64> {
    s.sample_v(x, u_v)
}

pub fn forward_cdf(s: &BilinearSampler, x: f64, v: f64) -> (f64, f64) {
    s.forward(x, v)
}

/// Maps uniform pairs through the inverse Rosenblatt transform.
///
/// `g_like` holds the bilinear sampling density at each marker; `f_like`
/// is initialised to the same value (unit weights) for the caller to
/// overwrite. Positions are wrapped into `[x_min, x_max)`.
pub fn rosenblatt_sample(s: &BilinearSampler, pairs: &PointSet2D) -> Result<ParticleEnsemble> {
    if pairs.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let dom = s.g.domain;
    let samples: Vec<Result<(f64, f64, f64)>> = par::map_range(pairs.len(), |k| {
        let (u, w) = pairs.points[k];
        let x = s.sample_x(u);
        let v = s.sample_v(x, w)?;
        Ok((dom.wrap_x(x), v, s.eval(x, v)))
    });
    let n = samples.len();
    let (mut xs, mut vs, mut gs) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for r in samples {
        let (x, v, g) = r?;
        xs.push(x);
        vs.push(v);
        gs.push(g);
    }
    ParticleEnsemble::new(xs, vs, gs.clone(), gs)
}

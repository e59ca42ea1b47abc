use crate::model::ParticleEnsemble;
use crate::par;

/// `H_T = (1/2n) sum v_k^2 w_k`.
pub fn kinetic_energy(e: &ParticleEnsemble) -> f64 {
    let n = e.len();
    if n == 0 {
        return 0.0;
    }
    0.5 * par::sum_range(n, |k| e.v[k] * e.v[k] * e.w[k]) / n as f64
}

/// `M = (1/n) sum w_k`.
pub fn total_mass(e: &ParticleEnsemble) -> f64 {
    let n = e.len();
    if n == 0 {
        return 0.0;
    }
    par::sum_range(n, |k| e.w[k]) / n as f64
}

/// `(1/n) sum v_k w_k`.
pub fn momentum(e: &ParticleEnsemble) -> f64 {
    let n = e.len();
    if n == 0 {
        return 0.0;
    }
    par::sum_range(n, |k| e.v[k] * e.w[k]) / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    /// Fraction of markers with `f_like <= 0`, left out of the sum.
    pub skipped_fraction: f64,
}

/// `S = (1/n) sum f_k ln(f_k) / g_k` over markers with `f_k > 0`.
pub fn discrete_entropy(e: &ParticleEnsemble) -> EntropyEstimate {
    let n = e.len();
    if n == 0 {
        return EntropyEstimate {
            value: 0.0,
            skipped_fraction: 0.0,
        };
    }
    let value = par::sum_range(n, |k| {
        let f = e.f_like[k];
        if f > 0.0 {
            f * f.ln() / e.g_like[k]
        } else {
            0.0
        }
    }) / n as f64;
    let skipped = e.f_like.iter().filter(|&&f| !(f > 0.0)).count();
    EntropyEstimate {
        value,
        skipped_fraction: skipped as f64 / n as f64,
    }
}

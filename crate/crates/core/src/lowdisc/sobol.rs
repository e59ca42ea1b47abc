//! Two-dimensional Sobol sequence.
//!
//! Dimension 1 is the base-2 van der Corput sequence. Dimension 2 uses the
//! primitive polynomial `x + 1` (degree 1, `a = 0`) with initial direction
//! number `m_1 = 1`, the first non-trivial entry of the Joe & Kuo direction
//! number tables (new-joe-kuo-6.21201, line "2 1 0 1"). Points are produced
//! in Gray-code order (Antonov-Saleev), which is the ordering used by the
//! Bratley-Fox implementation.

const BITS: usize = 32;

/// `(s, a, m_1..m_s)` for dimension 2.
pub const SOBOL_DIM2_INIT: (u32, u32, [u32; 1]) = (1, 0, [1]);

const fn direction_numbers_dim1() -> [u32; BITS] {
    let mut v = [0u32; BITS];
    let mut k = 0;
    while k < BITS {
        v[k] = 1u32 << (BITS - 1 - k);
        k += 1;
    }
    v
}

const fn direction_numbers_dim2() -> [u32; BITS] {
    // degree-1 recurrence: m_k = 2 m_{k-1} xor m_{k-1}
    let mut m = [0u64; BITS];
    m[0] = SOBOL_DIM2_INIT.2[0] as u64;
    let mut k = 1;
    while k < BITS {
        m[k] = (m[k - 1] << 1) ^ m[k - 1];
        k += 1;
    }
    let mut v = [0u32; BITS];
    let mut k = 0;
    while k < BITS {
        v[k] = (m[k] << (BITS - 1 - k)) as u32;
        k += 1;
    }
    v
}

const V1: [u32; BITS] = direction_numbers_dim1();
const V2: [u32; BITS] = direction_numbers_dim2();

/// Point with Gray-code index `index` (index 0 is the origin).
#[inline]
pub fn sobol_point(index: u64) -> (f64, f64) {
    let mut gray = (index ^ (index >> 1)) as u32;
    let (mut a, mut b) = (0u32, 0u32);
    let mut k = 0;
    while gray != 0 {
        if gray & 1 == 1 {
            a ^= V1[k];
            b ^= V2[k];
        }
        gray >>= 1;
        k += 1;
    }
    const SCALE: f64 = 1.0 / (1u64 << 32) as f64;
    (a as f64 * SCALE, b as f64 * SCALE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_direction_numbers() {
        // m = 1, 3, 5, 15, 17, 51
        let m: Vec<u32> = (0..6).map(|k| V2[k] >> (BITS - 1 - k)).collect();
        assert_eq!(m, vec![1, 3, 5, 15, 17, 51]);
    }

    #[test]
    fn origin_at_index_zero() {
        assert_eq!(sobol_point(0), (0.0, 0.0));
    }
}

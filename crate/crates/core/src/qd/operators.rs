use rand::Rng;

use crate::scalar::Scalar;

/// Distribution index for polynomial mutation.
pub const DEFAULT_ETA: f64 = 20.0;

/// Bounded polynomial mutation of one gene for a given uniform draw `u`.
///
/// `u = 0.5` is the identity; values toward 0 or 1 push the gene toward the
/// lower or upper bound. The result is clamped into `[lower, upper]`.
pub fn mutate_gene<T: Scalar>(gene: T, u: f64, eta: f64, lower: f64, upper: f64) -> T {
    let x = gene.widen();
    let range = upper - lower;
    if range <= 0.0 {
        return gene;
    }
    let exponent = 1.0 / (eta + 1.0);
    let delta_q = if u < 0.5 {
        let from_lower = 1.0 - (x - lower) / range;
        let val = 2.0 * u + (1.0 - 2.0 * u) * from_lower.powf(eta + 1.0);
        val.powf(exponent) - 1.0
    } else {
        let from_upper = 1.0 - (upper - x) / range;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * from_upper.powf(eta + 1.0);
        1.0 - val.powf(exponent)
    };
    T::narrow((x + delta_q * range).clamp(lower, upper))
}

/// Mutates each gene independently with probability `rate`, on [-1, 1].
///
/// Per gene the generator is drawn once for the rate test and, if mutating,
/// once more for the polynomial draw.
pub fn polynomial_mutation<T: Scalar, R: Rng + ?Sized>(genes: &mut [T], rate: f64, eta: f64, rng: &mut R) {
    for gene in genes.iter_mut() {
        if rng.random::<f64>() < rate {
            let u = rng.random::<f64>();
            *gene = mutate_gene(*gene, u, eta, -1.0, 1.0);
        }
    }
}

/// Swaps tails after `cut`. Panics unless `0 < cut < len`.
pub fn single_point_crossover<T: Copy, const N: usize>(a: &[T; N], b: &[T; N], cut: usize) -> ([T; N], [T; N]) {
    assert!(cut > 0 && cut < N, "cut {cut} outside 1..{N}");
    let mut first = *a;
    let mut second = *b;
    first[cut..].copy_from_slice(&b[cut..]);
    second[cut..].copy_from_slice(&a[cut..]);
    (first, second)
}

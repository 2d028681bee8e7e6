//! Scalar math on top of `libm`, seed mixing and a small quadrature rule.
//!
//! Everything numeric in the crate goes through these wrappers so that the
//! results do not depend on whether `std` happens to be linked.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Golden-ratio increment of SplitMix64.
pub const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// First multiplier of the SplitMix64 finalizer.
pub const SPLITMIX_MUL1: u64 = 0xBF58_476D_1CE4_E5B9;
/// Second multiplier of the SplitMix64 finalizer.
pub const SPLITMIX_MUL2: u64 = 0x94D0_49BB_1331_11EB;

/// Derives the seed of stream `index` from `master`.
///
/// ```text
/// z = master + (index + 1) * 0x9E3779B97F4A7C15        (wrapping)
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9              (wrapping)
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB              (wrapping)
/// seed = z ^ (z >> 31)
/// ```
///
/// This is one SplitMix64 step taken at position `index + 1` of the sequence
/// started at `master`, so distinct indices give decorrelated 64-bit seeds.
#[inline]
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(SPLITMIX_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(SPLITMIX_MUL1);
    z = (z ^ (z >> 27)).wrapping_mul(SPLITMIX_MUL2);
    z ^ (z >> 31)
}

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let m = if intervals % 2 == 1 { intervals + 1 } else { intervals.max(2) };
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

#![allow(dead_code)]

use lassolab_core::{generate, DesignFamily, DesignMatrix};
use proptest::prelude::*;

pub fn family() -> impl Strategy<Value = DesignFamily> {
    prop_oneof![
        Just(DesignFamily::Orthonormal),
        (0.0..0.97f64).prop_map(|r| DesignFamily::Equicorrelated { r }),
        (-0.95..0.95f64).prop_map(|r| DesignFamily::Ar1 { r }),
        (1usize..4, 0.0..0.3f64).prop_map(|(blocks, jitter)| DesignFamily::DuplicatedBlocks { blocks, jitter }),
        (0.6..2.0f64, 0.5..2.0f64).prop_map(|(m, c)| DesignFamily::SpikedDecay { m, c }),
    ]
}

/// A normalized design with n ≥ p.
pub fn design(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = DesignMatrix> {
    (family(), p, any::<u64>()).prop_map(|(fam, p, seed)| {
        let fam = match fam {
            DesignFamily::DuplicatedBlocks { blocks, jitter } => DesignFamily::DuplicatedBlocks { blocks: blocks.min(p), jitter },
            f => f,
        };
        generate(fam, 3 * p + 10, p, seed).unwrap().normalize().unwrap()
    })
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

//! Shared inputs of the benchmarks.

use darp_core::gen::{random_instance, GenParams};
use darp_core::DarpInstance;

/// Generated instance shaped like the a-series: `n` requests, `n / 8`
/// vehicles, capacity 3 and a horizon growing with `n`.
pub fn a_like(n: usize, seed: u64) -> DarpInstance {
    let p = GenParams {
        n,
        vehicles: (n / 8).max(1),
        capacity: 3,
        horizon: 480.0 + 10.0 * n as f64,
        ..GenParams::default()
    };
    random_instance(&p, seed)
}

/// Sizes used across the benchmarks.
pub const SIZES: [usize; 3] = [16, 32, 48];

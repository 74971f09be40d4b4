//! Inputs shared by the benchmarks.

use cubeorder::oracle::random_pointset;
use cubeorder::{decompose, PointSet};

/// `m` random points in `[0, side - 1]^n`, fixed by `seed`.
pub fn scattered(n: usize, m: u64, side: u64, seed: u64) -> PointSet {
    random_pointset(n, m, side - 1, seed).expect("benchmark inputs fit their box")
}

/// Side `K + 1` of the smallest cube holding `I_n(m)`.
pub fn cube_side(n: usize, m: u64) -> u64 {
    decompose(n, m).map_or(1, |d| d.side + 1)
}

//! Overflow-checked integer helpers shared by the order and projection code.

use crate::error::{Error, Result};

pub(crate) fn pow(base: u64, exp: usize) -> Option<u64> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

/// `(k+1)^i * k^(n-i)`, the size of the closed segment with `i` long edges.
pub(crate) fn box_size(n: usize, k: u64, i: usize) -> Option<u64> {
    debug_assert!(i <= n);
    pow(k.checked_add(1)?, i)?.checked_mul(pow(k, n - i)?)
}

/// Largest `k` with `k^n <= m`, found by integer bisection.
pub(crate) fn nth_root_floor(m: u64, n: usize) -> u64 {
    if n == 1 || m < 2 {
        return m;
    }
    let (mut lo, mut hi) = (1u64, m);
    // lo^n <= m < (hi+1)^n
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match pow(mid, n) {
            Some(v) if v <= m => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

pub(crate) fn checked(v: Option<u64>, what: &'static str) -> Result<u64> {
    v.ok_or(Error::Overflow(what))
}

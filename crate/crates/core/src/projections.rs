//! Projection profiles of point sets and the extremal values
//! `sigma_n(m)` (hyperplane projections) and `lambda_n(m)` (axis projections).
//!
//! Index conventions differ on purpose: the hyperplane recursion uses the
//! decomposition with `i` in `[0, n-1]`, while the axis formula `nK + i`
//! lets `i` reach `n`.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::arith::{box_size, checked, pow};
use crate::error::{Error, Result};
use crate::order::decompose_unchecked;
use crate::point::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Projections onto the coordinate hyperplanes (`sigma`).
    Hyperplane,
    /// Projections onto the coordinate axes (`lambda`).
    Axis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionProfile {
    pub kind: ProfileKind,
    pub n: usize,
    pub size: u64,
    pub per_axis: Vec<u64>,
    pub total: u64,
}

impl ProjectionProfile {
    fn from_counts(kind: ProfileKind, a: &PointSet, per_axis: Vec<u64>) -> Self {
        let total = per_axis.iter().sum();
        ProjectionProfile { kind, n: a.dim(), size: a.len() as u64, per_axis, total }
    }
}

pub fn profile(kind: ProfileKind, a: &PointSet) -> ProjectionProfile {
    match kind {
        ProfileKind::Hyperplane => sigma_profile(a),
        ProfileKind::Axis => lambda_profile(a),
    }
}

/// `|pi_i(A)|` for every axis: the number of distinct points left after
/// deleting coordinate `i`.
pub fn sigma_profile(a: &PointSet) -> ProjectionProfile {
    let per_axis = (0..a.dim())
        .map(|i| {
            let proj: HashSet<Vec<u64>> = a
                .iter()
                .map(|p| {
                    let mut c = p.coords().to_vec();
                    c.remove(i);
                    c
                })
                .collect();
            proj.len() as u64
        })
        .collect();
    ProjectionProfile::from_counts(ProfileKind::Hyperplane, a, per_axis)
}

/// `|rho_i(A)|` for every axis: the number of distinct values of coordinate `i`.
pub fn lambda_profile(a: &PointSet) -> ProjectionProfile {
    let per_axis = (0..a.dim()).map(|i| a.iter().map(|p| p.coords()[i]).collect::<HashSet<_>>().len() as u64).collect();
    ProjectionProfile::from_counts(ProfileKind::Axis, a, per_axis)
}

/// `sigma_n` of the closed segment `(K+1)^i K^(n-i)`, as the sum of its face
/// areas `i (K+1)^(i-1) K^(n-i) + (n-i) (K+1)^i K^(n-i-1)`.
pub fn sigma_closed(n: usize, side: u64, faces: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if faces >= n {
        return Err(Error::OutOfRange { what: "face count", detail: format!("{faces} not in [0, {}]", n - 1) });
    }
    if side == 0 {
        return Err(Error::OutOfRange { what: "cube side", detail: "must be at least 1".into() });
    }
    let long =
        if faces == 0 { Some(0) } else { box_size(n - 1, side, faces - 1).and_then(|v| v.checked_mul(faces as u64)) };
    let short = box_size(n - 1, side, faces).and_then(|v| v.checked_mul((n - faces) as u64));
    checked(long.zip(short).and_then(|(a, b)| a.checked_add(b)), "sigma of a closed segment")
}

/// `sigma_n(m)`, the hyperplane projection sum of `I_n(m)`.
pub fn sigma_segment(n: usize, m: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut total = 0u64;
    let (mut n, mut m) = (n, m);
    loop {
        if m == 0 {
            return Ok(total);
        }
        if n == 1 {
            return checked(total.checked_add(1), "sigma");
        }
        let d = decompose_unchecked(n, m);
        total = checked(total.checked_add(sigma_closed(n, d.side, d.faces)?), "sigma")?;
        n -= 1;
        m = d.remainder;
    }
}

/// `lambda_n(m) = nK + i` with `i` the least index in `[0, n]` such that
/// `m <= (K+1)^i K^(n-i)`.
pub fn lambda_segment(n: usize, m: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if m == 0 {
        return Ok(0);
    }
    if n == 1 {
        return Ok(m);
    }
    let side = decompose_unchecked(n, m).side;
    let faces = (0..=n).find(|&i| box_size(n, side, i).is_none_or(|b| m <= b)).expect("(K+1)^n > m");
    checked(side.checked_mul(n as u64).and_then(|v| v.checked_add(faces as u64)), "lambda")
}

pub fn segment_value(kind: ProfileKind, n: usize, m: u64) -> Result<u64> {
    match kind {
        ProfileKind::Hyperplane => sigma_segment(n, m),
        ProfileKind::Axis => lambda_segment(n, m),
    }
}

/// Compares `sigma_n(m)^n` with `n^n m^(n-1)`, the integer form of
/// `sigma_n(m) >= n m^(1 - 1/n)`.
pub fn lw_agm_compare(n: usize, m: u64) -> Result<Ordering> {
    if m == 0 {
        return Ok(Ordering::Equal);
    }
    let sigma = sigma_segment(n, m)? as u128;
    let p = |b: u128, e: usize| -> Result<u128> {
        b.checked_pow(u32::try_from(e).map_err(|_| Error::Overflow("exponent"))?)
            .ok_or(Error::Overflow("projection bound"))
    };
    let lhs = p(sigma, n)?;
    let rhs = p(n as u128, n)?.checked_mul(p(m as u128, n - 1)?).ok_or(Error::Overflow("projection bound"))?;
    Ok(lhs.cmp(&rhs))
}

pub fn lw_agm_holds(n: usize, m: u64) -> Result<bool> {
    Ok(lw_agm_compare(n, m)? != Ordering::Less)
}

/// Whether `m` is a perfect `n`-th power (`m >= 1`).
pub fn is_perfect_power(n: usize, m: u64) -> bool {
    m >= 1 && pow(decompose_unchecked(n, m).side, n) == Some(m)
}

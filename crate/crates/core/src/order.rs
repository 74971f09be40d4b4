//! The cube order on N0^n.
//!
//! Initial segments fill N0^n cube by cube: once `[0, K-1]^n` is full, the
//! faces `x_{i+1} = K` (with `x_1..x_i <= K` and `x_{i+2}..x_n <= K-1`) are
//! completed one after another for `i = 0..n-1`. Inside a face the points
//! follow the `(n-1)`-dimensional cube order on the remaining axes, kept in
//! their original relative order. Everything here is exact integer
//! arithmetic; nothing ever takes a floating-point root.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::arith::{box_size, checked, nth_root_floor};
use crate::error::{Error, Result};
use crate::point::{Point, PointSet};

/// Default limit on the number of points [`initial_segment`] will materialize.
pub const DEFAULT_SEGMENT_CAP: u64 = 1_000_000;

/// The split `m = (K+1)^i K^(n-i) + R` with `K^n <= m < (K+1)^n`,
/// `0 <= i < n` and `0 <= R < (K+1)^i K^(n-1-i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeDecomposition {
    /// `K`, the side of the largest cube contained in the segment.
    pub side: u64,
    /// `i`, the number of completed faces on top of that cube.
    pub faces: usize,
    /// `R`, the length of the partial face.
    pub remainder: u64,
}

impl CubeDecomposition {
    /// Size of the closed block `(K+1)^i K^(n-i)`.
    pub fn block(&self, n: usize) -> u64 {
        box_size(n, self.side, self.faces).expect("block never exceeds m")
    }
}

/// Sizes of the hulls of `I_n(m)`: the longest closed initial segment
/// (strictly) inside it and the shortest one (strictly) containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullSizes {
    pub interior: u64,
    pub strict_interior: u64,
    pub closure: u64,
    pub strict_closure: u64,
    pub boundary: u64,
    pub strict_boundary: u64,
}

fn check_same_dim(x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(())
}

/// Compares two points in cube order.
///
/// `x` precedes `y` when, at the largest level `l0` whose level sets
/// `{j : x_j = l0}` and `{j : y_j = l0}` differ, the largest index `j` in
/// their symmetric difference has `x_j < y_j = l0`.
pub fn cube_cmp(x: &Point, y: &Point) -> Result<Ordering> {
    check_same_dim(x, y)?;
    Ok(cube_cmp_unchecked(x, y))
}

pub(crate) fn cube_cmp_unchecked(x: &Point, y: &Point) -> Ordering {
    let (x, y) = (x.coords(), y.coords());
    let mut level = x.iter().chain(y).copied().max();
    while let Some(l) = level {
        for j in (0..x.len()).rev() {
            match (x[j] == l, y[j] == l) {
                (true, false) => return Ordering::Greater,
                (false, true) => return Ordering::Less,
                _ => {}
            }
        }
        level = x.iter().chain(y).copied().filter(|&v| v < l).max();
    }
    Ordering::Equal
}

/// Compares two points by their cube-order ranks.
pub fn cmp_by_rank(x: &Point, y: &Point) -> Result<Ordering> {
    check_same_dim(x, y)?;
    Ok(rank(x)?.cmp(&rank(y)?))
}

/// Position of `x` in the cube order of N0^n, counting from 0.
pub fn rank(x: &Point) -> Result<u64> {
    rank_coords(x.coords())
}

fn rank_coords(x: &[u64]) -> Result<u64> {
    let Some(&top) = x.iter().max() else { return Ok(0) };
    if top == 0 {
        return Ok(0);
    }
    // The point sits on face `j` of the shell around [0, top-1]^n, where `j`
    // is the last axis attaining the maximum.
    let j = x.iter().rposition(|&v| v == top).expect("max is attained");
    let block = checked(box_size(x.len(), top, j), "rank")?;
    let mut rest = x.to_vec();
    rest.remove(j);
    checked(block.checked_add(rank_coords(&rest)?), "rank")
}

/// The point of rank `m` in N0^n.
pub fn unrank(n: usize, m: u64) -> Result<Point> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(Point::from_vec(unrank_coords(n, m)))
}

fn unrank_coords(n: usize, m: u64) -> Vec<u64> {
    if n == 0 {
        debug_assert_eq!(m, 0);
        return Vec::new();
    }
    if m == 0 {
        return vec![0; n];
    }
    let d = decompose_unchecked(n, m);
    let mut coords = unrank_coords(n - 1, d.remainder);
    coords.insert(d.faces, d.side);
    coords
}

/// `I_n(m)`, the first `m` points of N0^n, refusing more than
/// [`DEFAULT_SEGMENT_CAP`] points.
pub fn initial_segment(n: usize, m: u64) -> Result<PointSet> {
    initial_segment_capped(n, m, DEFAULT_SEGMENT_CAP)
}

pub fn initial_segment_capped(n: usize, m: u64, cap: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if m > cap {
        return Err(Error::CapExceeded { requested: m, cap });
    }
    let points = (0..m).map(|k| Point::from_vec(unrank_coords(n, k))).collect();
    Ok(PointSet::from_sorted(n, points))
}

/// Splits `m >= 1` as `(K+1)^i K^(n-i) + R`.
pub fn decompose(n: usize, m: u64) -> Result<CubeDecomposition> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if m == 0 {
        return Err(Error::ZeroSize { what: "decompose" });
    }
    Ok(decompose_unchecked(n, m))
}

pub(crate) fn decompose_unchecked(n: usize, m: u64) -> CubeDecomposition {
    let side = nth_root_floor(m, n);
    // box_size(n, side, 0) = side^n <= m; grow i while the next block still fits.
    let mut faces = 0;
    while faces + 1 < n && box_size(n, side, faces + 1).is_some_and(|b| b <= m) {
        faces += 1;
    }
    let block = box_size(n, side, faces).expect("side^n <= m");
    CubeDecomposition { side, faces, remainder: m - block }
}

/// Whether `I_n(m)` is a box `[0,K]^i x [0,K-1]^(n-i)`.
pub fn is_closed(n: usize, m: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(m == 0 || decompose_unchecked(n, m).remainder == 0)
}

/// Largest closed size strictly below `m >= 1`.
pub(crate) fn prev_closed(n: usize, m: u64) -> u64 {
    debug_assert!(m >= 1);
    let d = decompose_unchecked(n, m);
    if d.remainder > 0 {
        d.block(n)
    } else if d.faces > 0 {
        box_size(n, d.side, d.faces - 1).expect("smaller than m")
    } else if d.side == 1 {
        0
    } else {
        box_size(n, d.side - 1, n - 1).expect("smaller than m")
    }
}

/// Smallest closed size strictly above `m`.
pub(crate) fn next_closed(n: usize, m: u64) -> Result<u64> {
    if m == 0 {
        return Ok(1);
    }
    let d = decompose_unchecked(n, m);
    let next = if d.faces + 1 < n {
        box_size(n, d.side, d.faces + 1)
    } else {
        d.side.checked_add(1).and_then(|k| box_size(n, k, 0))
    };
    checked(next, "next closed segment")
}

pub fn hull_sizes(n: usize, m: u64) -> Result<HullSizes> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if m == 0 {
        return Err(Error::ZeroSize { what: "hull_sizes" });
    }
    let closed = decompose_unchecked(n, m).remainder == 0;
    let strict_interior = prev_closed(n, m);
    let strict_closure = next_closed(n, m)?;
    let (interior, closure) = if closed { (m, m) } else { (strict_interior, strict_closure) };
    Ok(HullSizes {
        interior,
        strict_interior,
        closure,
        strict_closure,
        boundary: m - interior,
        strict_boundary: m - strict_interior,
    })
}

/// Edge lengths of the closed segment of size `m`, longest first, or `None`
/// when `I_n(m)` is not closed.
pub fn closed_edges(n: usize, m: u64) -> Option<Vec<u64>> {
    if m == 0 {
        return Some(vec![0; n]);
    }
    let d = decompose_unchecked(n, m);
    (d.remainder == 0).then(|| {
        let mut e = vec![d.side + 1; d.faces];
        e.resize(n, d.side);
        e
    })
}

/// Extent of `I_n(m)` along the first axis, which is also the largest edge
/// of its closure.
pub fn leading_edge(n: usize, m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let d = decompose_unchecked(n, m);
    if d.faces > 0 || d.remainder > 0 {
        d.side + 1
    } else {
        d.side
    }
}

/// Relabels each axis's used values onto `0..s_j` preserving their order.
pub fn compress(a: &PointSet) -> PointSet {
    let supports: Vec<Vec<u64>> = (0..a.dim())
        .map(|j| {
            let mut v: Vec<u64> = a.iter().map(|p| p.coords()[j]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let points = a
        .iter()
        .map(|p| {
            let c = p
                .coords()
                .iter()
                .zip(&supports)
                .map(|(v, s)| s.binary_search(v).expect("value in support") as u64)
                .collect();
            Point::from_vec(c)
        })
        .collect();
    PointSet::from_distinct(a.dim(), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[u64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    const I2_10: [[u64; 2]; 10] = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [2, 1], [0, 2], [1, 2], [2, 2], [3, 0]];

    const I3_17: [[u64; 3]; 17] = [
        [0, 0, 0],
        [1, 0, 0],
        [0, 1, 0],
        [1, 1, 0],
        [0, 0, 1],
        [1, 0, 1],
        [0, 1, 1],
        [1, 1, 1],
        [2, 0, 0],
        [2, 1, 0],
        [2, 0, 1],
        [2, 1, 1],
        [0, 2, 0],
        [1, 2, 0],
        [0, 2, 1],
        [1, 2, 1],
        [2, 2, 0],
    ];

    #[test]
    fn comparator_examples() {
        assert_eq!(cube_cmp(&pt(&[1, 0]), &pt(&[0, 1])), Ok(Ordering::Less));
        assert_eq!(cube_cmp(&pt(&[2, 1]), &pt(&[0, 2])), Ok(Ordering::Less));
        assert_eq!(cube_cmp(&pt(&[3, 1, 2]), &pt(&[3, 1, 2])), Ok(Ordering::Equal));
        assert!(matches!(cube_cmp(&pt(&[1]), &pt(&[1, 0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn displayed_segments_match() {
        for (k, c) in I2_10.iter().enumerate() {
            assert_eq!(unrank(2, k as u64).unwrap(), pt(c));
            assert_eq!(rank(&pt(c)).unwrap(), k as u64);
        }
        for (k, c) in I3_17.iter().enumerate() {
            assert_eq!(unrank(3, k as u64).unwrap(), pt(c));
        }
        let seg = initial_segment(3, 17).unwrap();
        assert_eq!(seg.to_coords(), I3_17.iter().map(|c| c.to_vec()).collect::<Vec<_>>());
        // listed orders are themselves increasing under the direct comparator
        for w in I3_17.windows(2) {
            assert_eq!(cube_cmp(&pt(&w[0]), &pt(&w[1])), Ok(Ordering::Less));
        }
    }

    #[test]
    fn unrank_and_rank_examples() {
        assert_eq!(unrank(2, 9).unwrap(), pt(&[3, 0]));
        assert_eq!(unrank(3, 16).unwrap(), pt(&[2, 2, 0]));
        assert_eq!(unrank(5, 0).unwrap(), pt(&[0; 5]));
        assert_eq!(rank(&pt(&[3, 0])), Ok(9));
        assert_eq!(rank(&pt(&[0, 0, 1])), Ok(4));
        assert_eq!(rank(&pt(&[0, 0, 0, 0])), Ok(0));
        assert_eq!(unrank(0, 3), Err(Error::ZeroDimension));
    }

    #[test]
    fn rank_overflow_is_reported() {
        assert_eq!(rank(&pt(&[u64::MAX, 0])), Err(Error::Overflow("rank")));
    }

    #[test]
    fn segment_edge_cases() {
        assert!(initial_segment(4, 0).unwrap().is_empty());
        assert!(matches!(initial_segment_capped(2, 11, 10), Err(Error::CapExceeded { requested: 11, cap: 10 })));
        assert_eq!(initial_segment(0, 1), Err(Error::ZeroDimension));
    }

    #[test]
    fn decompose_examples() {
        let d = |side, faces, remainder| CubeDecomposition { side, faces, remainder };
        assert_eq!(decompose(3, 17), Ok(d(2, 1, 5)));
        assert_eq!(decompose(3, 8), Ok(d(2, 0, 0)));
        assert_eq!(decompose(2, 10), Ok(d(3, 0, 1)));
        assert_eq!(decompose(3, 0), Err(Error::ZeroSize { what: "decompose" }));
    }

    #[test]
    fn decompose_near_u64_max() {
        let m = u64::MAX;
        let d = decompose(2, m).unwrap();
        assert_eq!(d.side, 4_294_967_295);
        assert_eq!(d.block(2) + d.remainder, m);
    }

    #[test]
    fn closedness_examples() {
        assert_eq!(is_closed(3, 12), Ok(true));
        assert_eq!(is_closed(3, 17), Ok(false));
        assert_eq!(is_closed(2, 1), Ok(true));
        assert_eq!(is_closed(2, 0), Ok(true));
    }

    #[test]
    fn hull_examples() {
        let h = hull_sizes(3, 17).unwrap();
        assert_eq!((h.interior, h.strict_boundary), (12, 5));
        assert_eq!((h.closure, h.strict_closure), (18, 18));
        // closed sizes in dimension 3 start 1, 2, 4, 8, 12, ...
        let h = hull_sizes(3, 8).unwrap();
        assert_eq!((h.interior, h.strict_interior, h.boundary, h.strict_boundary), (8, 4, 0, 4));
        assert_eq!((h.closure, h.strict_closure), (8, 12));
        let h = hull_sizes(1, 5).unwrap();
        assert_eq!((h.interior, h.strict_interior, h.strict_closure), (5, 4, 6));
        let h = hull_sizes(4, 1).unwrap();
        assert_eq!((h.strict_interior, h.strict_boundary), (0, 1));
        assert!(hull_sizes(2, 0).is_err());
    }

    #[test]
    fn hull_sizes_match_enumerated_closed_sizes() {
        for n in 1..=4usize {
            let closed: Vec<u64> = (0..=700).filter(|&m| is_closed(n, m).unwrap()).collect();
            for m in 1..=600u64 {
                let h = hull_sizes(n, m).unwrap();
                assert_eq!(h.interior, *closed.iter().filter(|&&c| c <= m).max().unwrap());
                assert_eq!(h.strict_interior, *closed.iter().filter(|&&c| c < m).max().unwrap());
                assert_eq!(h.closure, *closed.iter().find(|&&c| c >= m).unwrap());
                assert_eq!(h.strict_closure, *closed.iter().find(|&&c| c > m).unwrap());
                assert!(h.strict_boundary >= 1);
                assert_eq!(h.boundary == 0, is_closed(n, m).unwrap());
            }
        }
    }

    #[test]
    fn leading_edge_is_first_axis_extent() {
        for n in 1..=4usize {
            let seg = initial_segment(n, 400).unwrap();
            for m in 1..=400u64 {
                let extent = seg.points()[..m as usize].iter().map(|p| p.coords()[0]).max().unwrap() + 1;
                assert_eq!(leading_edge(n, m), extent, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn compress_examples() {
        let a = PointSet::from_coords(2, vec![vec![5, 5], vec![5, 7], vec![9, 5], vec![9, 7]]).unwrap();
        let want = PointSet::from_coords(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(compress(&a), want);
        assert_eq!(compress(&want), want);
        let b = PointSet::from_coords(2, vec![vec![0, 100], vec![100, 0]]).unwrap();
        assert_eq!(compress(&b).to_coords(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn rank_unrank_round_trip() {
        for n in 1..=5usize {
            for m in 0..=10_000u64 {
                assert_eq!(rank(&unrank(n, m).unwrap()), Ok(m));
            }
        }
    }

    #[test]
    fn prefix_property() {
        for n in 1..=4usize {
            let big = initial_segment(n, 2001).unwrap();
            for m in [0u64, 1, 2, 7, 100, 999, 2000] {
                let small = initial_segment(n, m).unwrap();
                assert!(small.iter().all(|p| big.contains(p)));
                assert_eq!(&big.points()[..m as usize], small.points());
                assert_eq!(big.points()[m as usize], unrank(n, m).unwrap());
            }
        }
    }

    #[test]
    fn closed_segments_are_boxes() {
        for n in 1..=4usize {
            for m in 1..=2000u64 {
                let Some(edges) = closed_edges(n, m) else { continue };
                let seg = initial_segment(n, m).unwrap();
                assert_eq!(edges.iter().product::<u64>(), m);
                assert!(edges.windows(2).all(|w| w[0] >= w[1]));
                assert!(seg.iter().all(|p| p.coords().iter().zip(&edges).all(|(c, e)| c < e)));
            }
        }
    }

    #[test]
    fn segment_is_block_plus_translated_face() {
        for n in 2..=4usize {
            for m in 1..=2000u64 {
                let d = decompose(n, m).unwrap();
                let block = d.block(n);
                let mut expected: Vec<Point> = initial_segment(n, block).unwrap().points().to_vec();
                for p in initial_segment(n - 1, d.remainder).unwrap().iter() {
                    expected.push(p.with_axis(d.faces, d.side));
                }
                let expected = PointSet::new(n, expected).unwrap();
                assert_eq!(initial_segment(n, m).unwrap(), expected, "n={n} m={m}");
            }
        }
    }

    fn point_strategy(n: usize) -> impl Strategy<Value = Point> {
        proptest::collection::vec(0u64..=6, n).prop_map(|c| Point::new(c).unwrap())
    }

    proptest! {
        #[test]
        fn comparator_agrees_with_rank((x, y, z) in (1usize..=5).prop_flat_map(|n| (point_strategy(n), point_strategy(n), point_strategy(n)))) {
            let xy = cube_cmp(&x, &y).unwrap();
            prop_assert_eq!(xy, cmp_by_rank(&x, &y).unwrap());
            prop_assert_eq!(cube_cmp(&y, &x).unwrap(), xy.reverse());
            prop_assert_eq!(xy == Ordering::Equal, x == y);
            let yz = cube_cmp(&y, &z).unwrap();
            if xy != Ordering::Greater && yz != Ordering::Greater {
                prop_assert_ne!(cube_cmp(&x, &z).unwrap(), Ordering::Greater);
            }
        }

        #[test]
        fn unrank_inverts_rank(x in (1usize..=5).prop_flat_map(point_strategy)) {
            prop_assert_eq!(unrank(x.dim(), rank(&x).unwrap()).unwrap(), x);
        }

        #[test]
        fn sorting_by_comparator_matches_sorting_by_rank(pts in (1usize..=4).prop_flat_map(|n| proptest::collection::vec(point_strategy(n), 0..30))) {
            let mut a = pts.clone();
            a.sort_by(|x, y| cube_cmp(x, y).unwrap());
            let mut b = pts;
            b.sort_by_key(|x| rank(x).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}

//! Independent ground truth: exhaustive search over all `m`-subsets of a box
//! and exhaustive or seeded-random checks of the inequalities and identities
//! around `sigma_n` and `lambda_n`.
//!
//! The search visits subsets in colexicographic order of the cells' cube
//! ranks. Work is split by the largest chosen cell; partial results are
//! collected in split order and merged left to right, so every result is
//! independent of the number of threads.

mod laws;

pub use laws::{
    check_idt, check_lambda_closed_form, check_lambda_increment, check_lambda_laws, check_lambda_restate, check_lw_agm,
    check_restate, check_subadditivity, random_lower_bound_suite, random_pointset, random_restate_suite, RandomSuite,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::cube_cmp_unchecked;
use crate::point::{Point, PointSet};
use crate::projections::{lambda_profile, segment_value, ProfileKind};

pub const DEFAULT_BUDGET: u128 = 100_000_000;
pub const DEFAULT_WITNESS_CAP: usize = 8;
/// Largest number of cells a search box may have.
pub const MAX_BOX_CELLS: u64 = 1 << 20;
const VIOLATION_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest admissible number of candidate subsets.
    pub budget: u128,
    pub witness_cap: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { budget: DEFAULT_BUDGET, witness_cap: DEFAULT_WITNESS_CAP, threads: None }
    }
}

impl OracleConfig {
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::OutOfRange { what: "threads", detail: e.to_string() })?;
                Ok(pool.install(f))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub kind: ProfileKind,
    pub n: usize,
    pub m: u64,
    #[serde(rename = "box")]
    pub box_sides: Vec<u64>,
    pub min_value: u64,
    pub minimiser_count: u64,
    /// The first minimisers in enumeration order, up to the witness cap.
    pub witnesses: Vec<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: String,
    pub domain: String,
    pub cases_checked: u64,
    pub violation_count: u64,
    /// The first violations found, in checking order.
    pub violations: Vec<String>,
}

impl LawReport {
    pub fn new(law: &str, domain: impl Into<String>) -> Self {
        LawReport {
            law: law.to_string(),
            domain: domain.into(),
            cases_checked: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub(crate) fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases_checked += 1;
        if !ok {
            self.fail(describe());
        }
    }

    pub(crate) fn fail(&mut self, what: String) {
        self.violation_count += 1;
        if self.violations.len() < VIOLATION_CAP {
            self.violations.push(what);
        }
    }

    /// Appends the counts and violations of `other`, which must come later
    /// in checking order.
    pub(crate) fn absorb(&mut self, other: LawReport) {
        self.cases_checked += other.cases_checked;
        self.violation_count += other.violation_count;
        let room = VIOLATION_CAP - self.violations.len();
        self.violations.extend(other.violations.into_iter().take(room));
    }
}

/// `C(n, k)`, or `None` past `u128`.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // exact at every step: acc = C(n - k + j, j) before the update
        acc = acc.checked_mul((n - k + j + 1) as u128)? / (j as u128 + 1);
    }
    Some(acc)
}

/// The cells of a box in cube order, with the projection counters each cell
/// touches.
struct Grid {
    n: usize,
    cells: Vec<Point>,
    /// `keys[c * n + j]`: counter hit by cell `c` on axis `j`.
    keys: Vec<u32>,
    counters: usize,
}

impl Grid {
    fn new(kind: ProfileKind, sides: &[u64]) -> Result<Grid> {
        let n = sides.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(j) = sides.iter().position(|&s| s == 0) {
            return Err(Error::OutOfRange { what: "box", detail: format!("side {j} is zero") });
        }
        let total = sides
            .iter()
            .try_fold(1u64, |acc, &s| acc.checked_mul(s))
            .filter(|&t| t <= MAX_BOX_CELLS)
            .ok_or_else(|| Error::OutOfRange { what: "box", detail: format!("more than {MAX_BOX_CELLS} cells") })?;

        let mut cells = Vec::with_capacity(total as usize);
        let mut c = vec![0u64; n];
        for _ in 0..total {
            cells.push(Point::new(c.clone())?);
            for (x, &s) in c.iter_mut().zip(sides) {
                *x += 1;
                if *x < s {
                    break;
                }
                *x = 0;
            }
        }
        cells.sort_by(cube_cmp_unchecked);

        // per-axis offsets into one flat counter array
        let widths: Vec<u64> = (0..n)
            .map(|j| match kind {
                ProfileKind::Hyperplane => total / sides[j],
                ProfileKind::Axis => sides[j],
            })
            .collect();
        let offsets: Vec<u64> = widths.iter().scan(0, |acc, &w| Some(std::mem::replace(acc, *acc + w))).collect();
        let mut keys = Vec::with_capacity(cells.len() * n);
        for p in &cells {
            let x = p.coords();
            for j in 0..n {
                let local = match kind {
                    ProfileKind::Hyperplane => (0..n).filter(|&q| q != j).fold(0, |acc, q| acc * sides[q] + x[q]),
                    ProfileKind::Axis => x[j],
                };
                keys.push((offsets[j] + local) as u32);
            }
        }
        Ok(Grid { n, cells, keys, counters: widths.iter().sum::<u64>() as usize })
    }

    fn subset(&self, chosen: &[usize]) -> PointSet {
        PointSet::from_distinct(self.n, chosen.iter().map(|&c| self.cells[c].clone()).collect())
    }
}

struct Walker<'g> {
    grid: &'g Grid,
    counts: Vec<u32>,
    value: u64,
    chosen: Vec<usize>,
}

impl<'g> Walker<'g> {
    fn new(grid: &'g Grid) -> Self {
        Walker { grid, counts: vec![0; grid.counters], value: 0, chosen: Vec::new() }
    }

    fn push(&mut self, c: usize) {
        let n = self.grid.n;
        for &k in &self.grid.keys[c * n..(c + 1) * n] {
            let slot = &mut self.counts[k as usize];
            if *slot == 0 {
                self.value += 1;
            }
            *slot += 1;
        }
        self.chosen.push(c);
    }

    fn pop(&mut self) {
        let n = self.grid.n;
        let c = self.chosen.pop().expect("pop after push");
        for &k in &self.grid.keys[c * n..(c + 1) * n] {
            let slot = &mut self.counts[k as usize];
            *slot -= 1;
            if *slot == 0 {
                self.value -= 1;
            }
        }
    }

    /// Chooses `r` more cells below `upper`, smallest first, so the chosen
    /// stack (largest cell first) runs through colex order.
    fn walk<S>(&mut self, r: usize, upper: usize, state: &mut S, leaf: &impl Fn(&mut S, u64, &[usize])) {
        if r == 0 {
            leaf(state, self.value, &self.chosen);
            return;
        }
        for c in r - 1..upper {
            self.push(c);
            self.walk(r - 1, c, state, leaf);
            self.pop();
        }
    }
}

/// Runs `leaf` on every `m`-subset of the box, in parallel over the largest
/// cell, and merges the per-split states in colex order.
fn enumerate<S, L, M>(
    kind: ProfileKind,
    sides: &[u64],
    m: u64,
    cfg: &OracleConfig,
    init: impl Fn() -> S + Sync,
    leaf: L,
    merge: M,
) -> Result<S>
where
    S: Send,
    L: Fn(&mut S, u64, &[usize]) + Sync,
    M: Fn(S, S) -> S,
{
    let grid = Grid::new(kind, sides)?;
    let cells = grid.cells.len() as u64;
    if m > cells {
        return Err(Error::OutOfRange { what: "m", detail: format!("{m} exceeds the {cells} cells of the box") });
    }
    let needed = binomial(cells, m).unwrap_or(u128::MAX);
    if needed > cfg.budget {
        return Err(Error::BudgetExceeded { needed, budget: cfg.budget });
    }
    let m = m as usize;
    if m == 0 {
        let mut s = init();
        leaf(&mut s, 0, &[]);
        return Ok(s);
    }
    let parts: Vec<S> = cfg.install(|| {
        (m - 1..grid.cells.len())
            .into_par_iter()
            .map(|top| {
                let mut w = Walker::new(&grid);
                let mut s = init();
                w.push(top);
                w.walk(m - 1, top, &mut s, &leaf);
                s
            })
            .collect()
    })?;
    Ok(parts.into_iter().reduce(merge).unwrap_or_else(init))
}

#[derive(Debug)]
struct Best {
    min: u64,
    count: u64,
    witnesses: Vec<Vec<usize>>,
}

/// Exact minimum of the chosen profile total over all `m`-subsets of the box
/// `[0, s_1 - 1] x ... x [0, s_n - 1]`.
pub fn brute_force_min(kind: ProfileKind, n: usize, m: u64, sides: &[u64], cfg: &OracleConfig) -> Result<OracleResult> {
    if sides.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sides.len() });
    }
    let cap = cfg.witness_cap;
    let best = enumerate(
        kind,
        sides,
        m,
        cfg,
        || Best { min: u64::MAX, count: 0, witnesses: Vec::new() },
        |b: &mut Best, value, chosen| {
            if value < b.min {
                *b = Best { min: value, count: 0, witnesses: Vec::new() };
            }
            if value == b.min {
                b.count += 1;
                if b.witnesses.len() < cap {
                    b.witnesses.push(chosen.to_vec());
                }
            }
        },
        |a, b| match a.min.cmp(&b.min) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                let mut witnesses = a.witnesses;
                witnesses.extend(b.witnesses);
                witnesses.truncate(cap);
                Best { min: a.min, count: a.count + b.count, witnesses }
            }
        },
    )?;
    let grid = Grid::new(kind, sides)?;
    Ok(OracleResult {
        kind,
        n,
        m,
        box_sides: sides.to_vec(),
        min_value: best.min,
        minimiser_count: best.count,
        witnesses: best.witnesses.iter().map(|w| grid.subset(w).to_coords()).collect(),
    })
}

/// Per-axis support sizes of `a` when `a` is the full product of its
/// supports.
pub fn is_cartesian_product(a: &PointSet) -> Option<Vec<u64>> {
    if a.is_empty() {
        return None;
    }
    let sizes = lambda_profile(a).per_axis;
    let product = sizes.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s))?;
    (product == a.len() as u64).then_some(sizes)
}

/// Checks that every minimiser of size `(K+1)^i K^(n-i)` in the box is a
/// product of `i` factors of size `K+1` and `n - i` of size `K`, and that the
/// minimum equals the segment value.
pub fn check_stability(
    kind: ProfileKind,
    n: usize,
    k: u64,
    i: usize,
    sides: &[u64],
    cfg: &OracleConfig,
) -> Result<LawReport> {
    let law = match kind {
        ProfileKind::Hyperplane => "stability",
        ProfileKind::Axis => "lambda_stability",
    };
    if k == 0 || i > n {
        return Err(Error::OutOfRange {
            what: "K, i",
            detail: format!("need K >= 1 and i <= n, got K = {k}, i = {i}"),
        });
    }
    let m = crate::arith::checked(crate::arith::box_size(n, k, i), "closed size")?;
    let mut report = LawReport::new(law, format!("n={n}, K={k}, i={i}, m={m}, box={sides:?}"));
    let min = brute_force_min(kind, n, m, sides, &OracleConfig { witness_cap: 0, ..cfg.clone() })?;
    let expected_value = segment_value(kind, n, m)?;
    report.check(min.min_value == expected_value, || {
        format!("box minimum {} differs from segment value {expected_value}", min.min_value)
    });

    let mut expected: Vec<u64> = (0..n).map(|j| if j < i { k + 1 } else { k }).collect();
    expected.sort_unstable();
    let grid = Grid::new(kind, sides)?;
    let target = min.min_value;
    let part = enumerate(
        kind,
        sides,
        m,
        cfg,
        || LawReport::new(law, ""),
        |r: &mut LawReport, value, chosen| {
            if value != target {
                return;
            }
            let a = grid.subset(chosen);
            let factors = is_cartesian_product(&a).map(|mut f| {
                f.sort_unstable();
                f
            });
            r.check(factors.as_ref() == Some(&expected), || {
                format!("minimiser {:?} has factors {factors:?}", a.to_coords())
            });
        },
        |mut a, b| {
            a.absorb(b);
            a
        },
    )?;
    report.absorb(part);
    if report.cases_checked != min.minimiser_count + 1 {
        report.fail(format!("visited {} minimisers, expected {}", report.cases_checked - 1, min.minimiser_count));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::initial_segment;
    use crate::projections::{lambda_segment, sigma_segment};

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(27, 5), Some(80_730));
        assert_eq!(binomial(16, 8), Some(12_870));
        assert_eq!(binomial(5, 7), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert!(binomial(1000, 500).is_none());
    }

    #[test]
    fn spec_examples() {
        let r = brute_force_min(ProfileKind::Hyperplane, 2, 3, &[3, 3], &cfg()).unwrap();
        assert_eq!(r.min_value, 4);
        let r = brute_force_min(ProfileKind::Hyperplane, 3, 5, &[3, 3, 3], &cfg()).unwrap();
        assert_eq!(r.min_value, 10);
        let r = brute_force_min(ProfileKind::Axis, 2, 4, &[4, 4], &cfg()).unwrap();
        assert_eq!(r.min_value, 4);
    }

    #[test]
    fn counts_match_hand_enumeration() {
        // pairs in a 3x3 grid sharing a row or a column
        let r = brute_force_min(ProfileKind::Hyperplane, 2, 2, &[3, 3], &cfg()).unwrap();
        assert_eq!((r.min_value, r.minimiser_count), (3, 18));
        // lambda of a pair is 3 exactly when the points share a coordinate
        let r = brute_force_min(ProfileKind::Axis, 2, 2, &[3, 3], &cfg()).unwrap();
        assert_eq!((r.min_value, r.minimiser_count), (3, 18));
        let r = brute_force_min(ProfileKind::Hyperplane, 1, 4, &[6], &cfg()).unwrap();
        assert_eq!((r.min_value, r.minimiser_count), (1, 15));
    }

    #[test]
    fn witnesses_come_in_colex_order() {
        let r =
            brute_force_min(ProfileKind::Hyperplane, 2, 3, &[3, 3], &OracleConfig { witness_cap: 2, ..cfg() }).unwrap();
        assert_eq!(r.witnesses.len(), 2);
        assert_eq!(r.witnesses[0], initial_segment(2, 3).unwrap().to_coords());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let one =
            brute_force_min(ProfileKind::Hyperplane, 3, 6, &[3, 3, 3], &OracleConfig { threads: Some(1), ..cfg() })
                .unwrap();
        let four =
            brute_force_min(ProfileKind::Hyperplane, 3, 6, &[3, 3, 3], &OracleConfig { threads: Some(4), ..cfg() })
                .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn empty_and_full_subsets() {
        let r = brute_force_min(ProfileKind::Hyperplane, 2, 0, &[2, 2], &cfg()).unwrap();
        assert_eq!((r.min_value, r.minimiser_count), (0, 1));
        let r = brute_force_min(ProfileKind::Hyperplane, 2, 6, &[2, 3], &cfg()).unwrap();
        assert_eq!((r.min_value, r.minimiser_count), (5, 1));
    }

    #[test]
    fn refusals() {
        let small = OracleConfig { budget: 1000, ..cfg() };
        assert!(matches!(
            brute_force_min(ProfileKind::Hyperplane, 2, 8, &[4, 4], &small),
            Err(Error::BudgetExceeded { needed: 12_870, budget: 1000 })
        ));
        assert!(brute_force_min(ProfileKind::Hyperplane, 2, 10, &[3, 3], &cfg()).is_err());
        assert!(brute_force_min(ProfileKind::Hyperplane, 3, 2, &[3, 3], &cfg()).is_err());
        assert!(brute_force_min(ProfileKind::Hyperplane, 2, 2, &[3, 0], &cfg()).is_err());
    }

    #[test]
    fn small_boxes_agree_with_formulas() {
        for m in 1..=8 {
            let r = brute_force_min(ProfileKind::Hyperplane, 2, m, &[4, 4], &cfg()).unwrap();
            assert_eq!(r.min_value, sigma_segment(2, m).unwrap(), "m = {m}");
            let r = brute_force_min(ProfileKind::Axis, 2, m, &[4, 4], &cfg()).unwrap();
            assert_eq!(r.min_value, lambda_segment(2, m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn products() {
        let a = PointSet::from_coords(2, vec![vec![0, 1], vec![0, 5], vec![2, 1], vec![2, 5]]).unwrap();
        assert_eq!(is_cartesian_product(&a), Some(vec![2, 2]));
        assert_eq!(is_cartesian_product(&initial_segment(2, 3).unwrap()), None);
        assert_eq!(is_cartesian_product(&initial_segment(3, 1).unwrap()), Some(vec![1, 1, 1]));
        assert_eq!(is_cartesian_product(&initial_segment(3, 12).unwrap()), Some(vec![3, 2, 2]));
        assert_eq!(is_cartesian_product(&PointSet::empty(2).unwrap()), None);
    }

    #[test]
    fn stability_examples() {
        let r = check_stability(ProfileKind::Hyperplane, 2, 2, 0, &[4, 4], &cfg()).unwrap();
        assert!(r.passed(), "{r:?}");
        // every pair of rows times every pair of columns
        assert_eq!(r.cases_checked, 1 + 36);
        let r = check_stability(ProfileKind::Hyperplane, 2, 3, 1, &[4, 4], &cfg()).unwrap();
        assert!(r.passed(), "{r:?}");
        // 4x3 or 3x4: drop one of four rows or one of four columns
        assert_eq!(r.cases_checked, 1 + 8);
    }

    #[test]
    fn stability_in_a_box_of_side_k_plus_2() {
        // 9 points in a 5x5 box: every minimiser is a 3x3 grid
        let r = check_stability(ProfileKind::Hyperplane, 2, 3, 0, &[5, 5], &cfg()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.cases_checked, 1 + 10 * 10);
    }

    #[test]
    fn non_closed_sizes_have_non_product_minimisers() {
        let r = check_stability(ProfileKind::Hyperplane, 2, 1, 1, &[3, 3], &cfg()).unwrap();
        assert!(r.passed());
        let report = brute_force_min(ProfileKind::Hyperplane, 2, 3, &[3, 3], &cfg()).unwrap();
        let non_products = report
            .witnesses
            .iter()
            .filter(|w| is_cartesian_product(&PointSet::from_coords(2, (*w).clone()).unwrap()).is_none())
            .count();
        assert!(non_products > 0);
    }

    #[test]
    fn reports_serialize() {
        let r = brute_force_min(ProfileKind::Axis, 2, 2, &[2, 2], &cfg()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["box"], serde_json::json!([2, 2]));
        assert_eq!(json["kind"], "axis");
        let back: OracleResult = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}

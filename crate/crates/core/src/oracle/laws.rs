use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::LawReport;
use crate::error::{Error, Result};
use crate::order::{initial_segment, is_closed, prev_closed, unrank};
use crate::point::PointSet;
use crate::projections::{
    is_perfect_power, lambda_profile, lambda_segment, lw_agm_compare, sigma_profile, sigma_segment,
};
use crate::rearrange::{rearrange_to_segment, validate_trace};

fn sigma_table(n: usize, m_max: u64) -> Result<Vec<u64>> {
    (0..=m_max).map(|m| sigma_segment(n, m)).collect()
}

fn lambda_table(n: usize, m_max: u64) -> Result<Vec<u64>> {
    (0..=m_max).map(|m| lambda_segment(n, m)).collect()
}

/// The three subadditivity laws, with every argument at most
/// `m_max`. Part iii needs `n >= 2` and is left out otherwise.
pub fn check_subadditivity(n: usize, m_max: u64) -> Result<Vec<LawReport>> {
    let s = sigma_table(n, m_max)?;
    let closed: Vec<u64> = (0..=m_max).filter(|&l| is_closed(n, l).unwrap_or(false)).collect();

    let mut i = LawReport::new("sub_i", format!("n={n}, l1<=m1<=m2<=l2<={m_max}, l2 closed"));
    for &l2 in &closed {
        for m2 in 0..=l2 {
            // l1 = m1 + m2 - l2 >= 0
            for m1 in l2 - m2..=m2 {
                let l1 = m1 + m2 - l2;
                let (lhs, rhs) = (s[l1 as usize] + s[l2 as usize], s[m1 as usize] + s[m2 as usize]);
                i.check(lhs <= rhs, || format!("l=({l1},{l2}) m=({m1},{m2}): {lhs} > {rhs}"));
            }
        }
    }

    let mut ii = LawReport::new("sub_ii", format!("n={n}, m1,m2>=1, m1+m2<={m_max}"));
    for m1 in 1..m_max {
        for m2 in m1..=m_max - m1 {
            let (lhs, rhs) = (s[(m1 + m2) as usize], s[m1 as usize] + s[m2 as usize]);
            ii.check(lhs < rhs, || format!("m=({m1},{m2}): {lhs} >= {rhs}"));
        }
    }

    let mut reports = vec![i, ii];
    if n >= 2 {
        let lower = sigma_table(n - 1, m_max)?;
        let mut iii = LawReport::new("sub_iii", format!("n={n}, 1<=m<={m_max}"));
        for m in 1..=m_max as usize {
            iii.check(s[m] > lower[m], || format!("m={m}: sigma_n {} <= sigma_(n-1) {}", s[m], lower[m]));
        }
        reports.push(iii);
    }
    Ok(reports)
}

/// Stack of slabs, slab `k` being the `(n-1)`-dimensional initial segment of
/// size `parts[k]`.
fn slab_witness(n: usize, parts: &[u64]) -> Result<PointSet> {
    let top = parts.iter().copied().max().unwrap_or(0);
    let base = initial_segment(n - 1, top)?;
    let points = parts
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| base.points()[..s as usize].iter().map(move |p| p.with_axis(n - 1, k as u64)))
        .collect();
    PointSet::new(n, points)
}

fn restate_case(n: usize, parts: &[u64], report: &mut LawReport) -> Result<()> {
    let total: u64 = parts.iter().sum();
    let rhs =
        parts.iter().map(|&p| sigma_segment(n - 1, p)).sum::<Result<u64>>()? + parts.iter().copied().max().unwrap_or(0);
    let lhs = sigma_segment(n, total)?;
    report.check(lhs <= rhs, || format!("n={n} parts={parts:?}: sigma_n(sum) {lhs} > {rhs}"));
    let witness = sigma_profile(&slab_witness(n, parts)?).total;
    report.check(witness == rhs, || format!("n={n} parts={parts:?}: slab witness has sigma {witness}, expected {rhs}"));
    Ok(())
}

/// The slab inequality for one tuple of slab sizes, together with the exact
/// value of the slab witness.
pub fn check_restate(n: usize, parts: &[u64]) -> Result<LawReport> {
    if n < 2 {
        return Err(Error::OutOfRange { what: "n", detail: "the slab inequality needs n >= 2".into() });
    }
    let mut report = LawReport::new("restate", format!("n={n}, parts={parts:?}"));
    restate_case(n, parts, &mut report)?;
    Ok(report)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Seeded random tuples with `n` in `[2, n_max]`, `1..=s_max` parts and parts
/// in `[0, part_max]`.
pub fn random_restate_suite(trials: u64, n_max: usize, s_max: usize, part_max: u64, seed: u64) -> Result<LawReport> {
    if n_max < 2 || s_max == 0 {
        return Err(Error::OutOfRange { what: "restate suite", detail: "need n_max >= 2 and s_max >= 1".into() });
    }
    let domain = format!("{trials} tuples, n in [2,{n_max}], s in [1,{s_max}], parts in [0,{part_max}], seed {seed}");
    let parts: Vec<LawReport> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let n = rng.gen_range(2..=n_max);
            let s = rng.gen_range(1..=s_max);
            let tuple: Vec<u64> = (0..s).map(|_| rng.gen_range(0..=part_max)).collect();
            let mut r = LawReport::new("restate", "");
            if let Err(e) = restate_case(n, &tuple, &mut r) {
                r.fail(format!("n={n} parts={tuple:?}: {e}"));
            }
            r
        })
        .collect();
    let mut report = LawReport::new("restate", domain);
    parts.into_iter().for_each(|p| report.absorb(p));
    Ok(report)
}

/// `sigma_n(m) = sigma_n(strict interior) + sigma_(n-1)(strict boundary)` for
/// `2 <= m <= m_max`, and the excess of exactly 1 at `m = 1`. Up to
/// `direct_max` the strict boundary is also cut out of the materialized
/// segment and measured.
pub fn check_idt(n: usize, m_max: u64, direct_max: u64) -> Result<LawReport> {
    if n < 2 {
        return Err(Error::OutOfRange { what: "n", detail: "the boundary identity needs n >= 2".into() });
    }
    let mut report = LawReport::new("idt", format!("n={n}, 1<=m<={m_max}, materialized up to {direct_max}"));
    let s = sigma_table(n, m_max)?;
    let lower = sigma_table(n - 1, m_max)?;
    for m in 1..=m_max {
        let inner = prev_closed(n, m);
        let rhs = s[inner as usize] + lower[(m - inner) as usize];
        let excess = u64::from(m == 1);
        report.check(s[m as usize] == rhs + excess, || format!("m={m}: {} vs {rhs} + {excess}", s[m as usize]));
    }

    let direct_max = direct_max.min(m_max);
    let segment = initial_segment(n, direct_max)?;
    for m in 2..=direct_max {
        let inner = prev_closed(n, m) as usize;
        let pts = &segment.points()[..m as usize];
        let whole = sigma_profile(&PointSet::from_sorted(n, pts.to_vec())).total;
        let core = sigma_profile(&PointSet::from_sorted(n, pts[..inner].to_vec())).total;
        let rim = &pts[inner..];
        // the rim sits on the face of the interior box just past its extent
        let extent = lambda_profile(&PointSet::from_sorted(n, pts[..inner].to_vec())).per_axis;
        let Some(axis) = (0..n).find(|&j| rim.iter().all(|p| p.coords()[j] == extent[j])) else {
            report.fail(format!("m={m}: strict boundary is not flat"));
            continue;
        };
        let flat = PointSet::new(n - 1, rim.iter().map(|p| p.without_axis(axis)).collect())?;
        let is_segment = flat == initial_segment(n - 1, flat.len() as u64)?;
        let rim_sigma = sigma_profile(&flat).total;
        report.check(is_segment && whole == core + rim_sigma, || {
            format!("m={m}: direct {whole} vs {core} + {rim_sigma} (boundary is a segment: {is_segment})")
        });
    }
    Ok(report)
}

/// `sigma_n(m)^n >= n^n m^(n-1)`, with equality exactly when `m` is a perfect
/// `n`-th power (or zero).
pub fn check_lw_agm(n: usize, m_max: u64) -> Result<LawReport> {
    let mut report = LawReport::new("lw_agm", format!("n={n}, 0<=m<={m_max}"));
    for m in 0..=m_max {
        let cmp = lw_agm_compare(n, m)?;
        let power = m == 0 || is_perfect_power(n, m);
        let expected = if power { Ordering::Equal } else { Ordering::Greater };
        report.check(cmp == expected, || format!("m={m}: comparison {cmp:?}, perfect power {power}"));
    }
    Ok(report)
}

/// `lambda_n(m+1) - lambda_n(m)` is 1 when `I_n(m)` is closed and 0 otherwise,
/// for `1 <= m <= m_max`.
pub fn check_lambda_increment(n: usize, m_max: u64) -> Result<LawReport> {
    let l = lambda_table(n, m_max + 1)?;
    let mut report = LawReport::new("hz19", format!("n={n}, 1<=m<={m_max}"));
    for m in 1..=m_max {
        let step = l[m as usize + 1] - l[m as usize];
        let closed = is_closed(n, m)?;
        report.check(step == u64::from(closed), || format!("m={m}: increment {step}, closed {closed}"));
    }
    Ok(report)
}

/// `lambda_n(s m) <= lambda_(n-1)(m) + s` for `1 <= m <= m_max`, `1 <= s <= s_max`.
pub fn check_lambda_restate(n: usize, m_max: u64, s_max: u64) -> Result<LawReport> {
    if n < 2 {
        return Err(Error::OutOfRange { what: "n", detail: "needs n >= 2".into() });
    }
    let mut report = LawReport::new("lambda_restate", format!("n={n}, 1<=m<={m_max}, 1<=s<={s_max}"));
    for m in 1..=m_max {
        let lower = lambda_segment(n - 1, m)?;
        for s in 1..=s_max {
            let lhs = lambda_segment(n, s * m)?;
            report.check(lhs <= lower + s, || format!("m={m} s={s}: {lhs} > {lower} + {s}"));
        }
    }
    Ok(report)
}

/// `lambda_segment` against the axis supports of `I_n(m)`, grown one point at
/// a time.
pub fn check_lambda_closed_form(n: usize, m_max: u64) -> Result<LawReport> {
    let mut report = LawReport::new("lambda_closed_form", format!("n={n}, 0<=m<={m_max}"));
    let mut seen: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); n];
    for m in 0..=m_max {
        if m > 0 {
            let p = unrank(n, m - 1)?;
            for (axis, &c) in seen.iter_mut().zip(p.coords()) {
                axis.insert(c);
            }
        }
        let direct: u64 = seen.iter().map(|s| s.len() as u64).sum();
        let formula = lambda_segment(n, m)?;
        report.check(direct == formula, || format!("m={m}: direct {direct}, formula {formula}"));
    }
    Ok(report)
}

/// The increment law, the slab bound and the closed form, all up to `m_max`.
pub fn check_lambda_laws(n: usize, m_max: u64, s_max: u64) -> Result<Vec<LawReport>> {
    let mut reports = vec![check_lambda_increment(n, m_max)?, check_lambda_closed_form(n, m_max)?];
    if n >= 2 {
        reports.push(check_lambda_restate(n, m_max, s_max)?);
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSuite {
    pub trials: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub size_max: u64,
    pub coord_max: u64,
    pub seed: u64,
}

impl RandomSuite {
    pub fn sample(&self, trial: u64) -> PointSet {
        let mut rng = trial_rng(self.seed, trial);
        let n = rng.gen_range(self.n_min..=self.n_max);
        let room = (self.coord_max + 1).checked_pow(n as u32).unwrap_or(u64::MAX);
        let m = rng.gen_range(1..=self.size_max.min(room));
        draw_points(&mut rng, n, m, self.coord_max)
    }
}

fn draw_points(rng: &mut ChaCha8Rng, n: usize, m: u64, coord_max: u64) -> PointSet {
    let mut pts = BTreeSet::new();
    while (pts.len() as u64) < m {
        pts.insert((0..n).map(|_| rng.gen_range(0..=coord_max)).collect::<Vec<_>>());
    }
    PointSet::from_coords(n, pts.into_iter().collect()).expect("distinct points of one dimension")
}

/// `m` distinct points drawn uniformly from `[0, coord_max]^n`.
pub fn random_pointset(n: usize, m: u64, coord_max: u64, seed: u64) -> Result<PointSet> {
    let room = (coord_max + 1).checked_pow(n as u32).unwrap_or(u64::MAX);
    if n == 0 || m > room {
        return Err(Error::OutOfRange {
            what: "random set",
            detail: format!("{m} points do not fit in [0,{coord_max}]^{n}"),
        });
    }
    Ok(draw_points(&mut trial_rng(seed, 0), n, m, coord_max))
}

/// Random sets against both lower bounds, plus a full rearrangement of each
/// with its trace checked. Returns the `sigma`, `lambda` and `rearrange`
/// reports in that order.
pub fn random_lower_bound_suite(suite: &RandomSuite) -> Result<Vec<LawReport>> {
    if suite.n_min == 0 || suite.n_min > suite.n_max || suite.size_max == 0 {
        return Err(Error::OutOfRange {
            what: "random suite",
            detail: "need 1 <= n_min <= n_max and size_max >= 1".into(),
        });
    }
    let domain = format!(
        "{} sets, n in [{},{}], 1<=|A|<={}, coords<={}, seed {}",
        suite.trials, suite.n_min, suite.n_max, suite.size_max, suite.coord_max, suite.seed
    );
    let parts: Vec<[LawReport; 3]> = (0..suite.trials)
        .into_par_iter()
        .map(|t| {
            let a = suite.sample(t);
            let (n, m) = (a.dim(), a.len() as u64);
            let mut r = [LawReport::new("", ""), LawReport::new("", ""), LawReport::new("", "")];
            let sigma = sigma_profile(&a).total;
            let lambda = lambda_profile(&a).total;
            match (sigma_segment(n, m), lambda_segment(n, m)) {
                (Ok(sb), Ok(lb)) => {
                    r[0].check(sigma >= sb, || format!("trial {t}: sigma {sigma} < {sb}"));
                    r[1].check(lambda >= lb, || format!("trial {t}: lambda {lambda} < {lb}"));
                }
                (Err(e), _) | (_, Err(e)) => r[0].fail(format!("trial {t}: {e}")),
            }
            match rearrange_to_segment(&a) {
                Ok(trace) => {
                    let problems = validate_trace(&trace);
                    r[2].check(problems.is_empty(), || {
                        format!("trial {t} {:?}: {}", a.to_coords(), problems.join("; "))
                    });
                }
                Err(e) => r[2].fail(format!("trial {t} {:?}: {e}", a.to_coords())),
            }
            r
        })
        .collect();
    let mut reports = [
        LawReport::new("random_sigma_bound", domain.clone()),
        LawReport::new("random_lambda_bound", domain.clone()),
        LawReport::new("random_rearrange", domain),
    ];
    for trial in parts {
        for (acc, r) in reports.iter_mut().zip(trial) {
            acc.absorb(r);
        }
    }
    Ok(reports.into())
}

//! Constructive rearrangement of an arbitrary finite set into the initial
//! segment of the same size.
//!
//! The pipeline works on concrete point sets and records every intermediate
//! set together with its hyperplane projection sum. After the first
//! normalization every set it handles is a *stack*: slab `k` (the points
//! with last coordinate `k`) is the `(n-1)`-dimensional initial segment of
//! size `s_k`, with `s_0 >= s_1 >= ... >= s_{H-1} > 0`. The moves are
//!
//! 1. sort slabs by size, replace each by an initial segment (recursively),
//!    and swap the first and last axes while the stack is taller than the
//!    leading edge `K` of its bottom slab;
//! 2. give every slab below the top the interior of the bottom slab, either
//!    by shifting points into the top slab or, when they fit, by merging the
//!    top slab into a lower one (a strict improvement);
//! 3. while `K > H`, cut the part of the stack lying outside the strict
//!    interior of the bottom slab and lay it down as a new top slab;
//! 4. once `K = H`, close the stack into the initial segment.
//!
//! Whenever the set is an initial segment after relabelling the axes, the
//! relabelling is applied and the pipeline stops.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{compress, hull_sizes, initial_segment, is_closed, leading_edge, next_closed, prev_closed, rank};
use crate::point::{Point, PointSet};
use crate::projections::{lambda_profile, sigma_profile, sigma_segment};

/// A horizontal slice of a set: the points with last coordinate `level`,
/// viewed in their hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slab {
    pub level: u64,
    pub body: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub label: String,
    pub set: PointSet,
    pub sigma: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RearrangeTrace {
    pub input: PointSet,
    pub steps: Vec<TraceStep>,
    pub final_set: PointSet,
    /// Number of pipeline moves performed.
    pub iterations: u64,
    /// `sigma(input) * (H + K + 1)` for the compressed input, where `H` is its
    /// number of slabs and `K` its largest axis extent.
    pub iteration_bound: u64,
}

/// One serialized trace entry; `points` is `None` when elided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub label: String,
    pub size: u64,
    pub sigma: u64,
    pub points: Option<Vec<Vec<u64>>>,
}

impl RearrangeTrace {
    /// Entries for serialization, dropping point lists of sets larger than
    /// `elide_above`.
    pub fn entries(&self, elide_above: Option<usize>) -> Vec<TraceEntry> {
        self.steps
            .iter()
            .map(|s| TraceEntry {
                label: s.label.clone(),
                size: s.set.len() as u64,
                sigma: s.sigma,
                points: match elide_above {
                    Some(limit) if s.set.len() > limit => None,
                    _ => Some(s.set.to_coords()),
                },
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldStatus {
    /// Another fold may follow (`K > H`).
    Folded,
    /// The set is now the initial segment.
    Finished,
    /// `K = H`; only the final closing step remains.
    Square,
}

/// Splits a set of dimension `n >= 2` into slabs, lowest level first.
pub fn slab_decomposition(a: &PointSet) -> Result<Vec<Slab>> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::Precondition { step: "slab decomposition", detail: "dimension must be at least 2".into() });
    }
    if a.is_empty() {
        return Err(Error::Precondition { step: "slab decomposition", detail: "set is empty".into() });
    }
    let mut by_level: BTreeMap<u64, Vec<Point>> = BTreeMap::new();
    for p in a {
        by_level.entry(p.coords()[n - 1]).or_default().push(p.without_axis(n - 1));
    }
    Ok(by_level.into_iter().map(|(level, pts)| Slab { level, body: PointSet::from_distinct(n - 1, pts) }).collect())
}

/// Slab sizes of a stack in dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Stack {
    n: usize,
    sizes: Vec<u64>,
}

impl Stack {
    fn height(&self) -> u64 {
        self.sizes.len() as u64
    }

    /// `K`: the extent of the bottom slab along the first axis.
    fn base_edge(&self) -> u64 {
        leading_edge(self.n - 1, self.sizes[0])
    }

    fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }

    fn to_set(&self) -> Result<PointSet> {
        let base = initial_segment(self.n - 1, self.sizes[0])?;
        let points = self
            .sizes
            .iter()
            .enumerate()
            .flat_map(|(level, &s)| base.points()[..s as usize].iter().map(move |p| p.with_axis(p.dim(), level as u64)))
            .collect();
        Ok(PointSet::from_distinct(self.n, points))
    }

    /// Recognizes a set that already is a stack.
    fn from_set(a: &PointSet) -> Result<Option<Stack>> {
        let slabs = slab_decomposition(a)?;
        let mut sizes = Vec::with_capacity(slabs.len());
        for (k, slab) in slabs.iter().enumerate() {
            let s = slab.body.len() as u64;
            if slab.level != k as u64 || sizes.last().is_some_and(|&prev| prev < s) {
                return Ok(None);
            }
            if slab.body != initial_segment(a.dim() - 1, s)? {
                return Ok(None);
            }
            sizes.push(s);
        }
        Ok(Some(Stack { n: a.dim(), sizes }))
    }

    fn require(a: &PointSet, step: &'static str) -> Result<Stack> {
        if a.dim() < 2 || a.len() < 2 {
            return Err(Error::Precondition { step, detail: "needs dimension >= 2 and at least 2 points".into() });
        }
        Stack::from_set(a)?.ok_or_else(|| Error::Precondition {
            step,
            detail: "slabs must be initial segments at levels 0..H-1 with non-increasing sizes".into(),
        })
    }
}

fn invariant(step: &str, detail: impl Into<String>) -> Error {
    Error::Invariant { step: step.to_string(), detail: detail.into() }
}

/// Collects the trace and enforces cardinality, sigma monotonicity and the
/// iteration bound.
struct Run {
    n: usize,
    m: u64,
    target: PointSet,
    steps: Vec<TraceStep>,
    iterations: u64,
    bound: u64,
}

impl Run {
    fn new(a: &PointSet) -> Result<Run> {
        let target = initial_segment(a.dim(), a.len() as u64)?;
        Ok(Run { n: a.dim(), m: a.len() as u64, target, steps: Vec::new(), iterations: 0, bound: u64::MAX })
    }

    fn sigma(&self) -> u64 {
        self.steps.last().map_or(u64::MAX, |s| s.sigma)
    }

    /// Appends `set` unless it equals the previous entry; returns its sigma.
    fn record(&mut self, label: impl Into<String>, set: PointSet) -> Result<u64> {
        let label = label.into();
        if set.len() as u64 != self.m || set.dim() != self.n {
            return Err(invariant(
                &label,
                format!("size {} in dimension {}, expected {} in {}", set.len(), set.dim(), self.m, self.n),
            ));
        }
        let sigma = sigma_profile(&set).total;
        if let Some(last) = self.steps.last() {
            if last.set == set {
                return Ok(sigma);
            }
            if sigma > last.sigma {
                return Err(invariant(&label, format!("sigma increased from {} to {sigma}", last.sigma)));
            }
        }
        self.steps.push(TraceStep { label, set, sigma });
        Ok(sigma)
    }

    fn record_strict(&mut self, label: impl Into<String>, set: PointSet) -> Result<()> {
        let label = label.into();
        let before = self.sigma();
        let after = self.record(label.clone(), set)?;
        if after >= before {
            return Err(invariant(&label, format!("expected a strict decrease, sigma {before} -> {after}")));
        }
        Ok(())
    }

    fn tick(&mut self, step: &str) -> Result<()> {
        self.iterations += 1;
        if self.iterations > self.bound {
            return Err(invariant(step, format!("iteration bound {} exceeded", self.bound)));
        }
        Ok(())
    }

    fn current(&self) -> &PointSet {
        &self.steps.last().expect("trace starts with the input").set
    }

    fn finished(&self) -> bool {
        self.steps.last().is_some_and(|s| s.set == self.target)
    }

    /// Applies the lexicographically least axis relabelling that turns `a`
    /// into the target, if there is one.
    fn try_relabel(&mut self, a: &PointSet, label: &str) -> Result<bool> {
        match relabelling_to_segment(a)? {
            Some(perm) => {
                let set = a.permute_axes(&perm)?;
                let ident: Vec<usize> = (0..self.n).collect();
                let label = if perm == ident { label.to_string() } else { format!("{label}, axes {perm:?}") };
                self.record(label, set)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// The lexicographically least permutation `p` with
/// `a.permute_axes(p) == I_n(|a|)`.
pub fn relabelling_to_segment(a: &PointSet) -> Result<Option<Vec<usize>>> {
    let n = a.dim();
    let target = initial_segment(n, a.len() as u64)?;
    let want = lambda_profile(&target).per_axis;
    let have = lambda_profile(a).per_axis;
    for perm in (0..n).permutations(n) {
        if perm.iter().enumerate().any(|(j, &src)| have[src] != want[j]) {
            continue;
        }
        if a.permute_axes(&perm)? == target {
            return Ok(Some(perm));
        }
    }
    Ok(None)
}

/// Drives the whole pipeline. The last trace entry is `I_n(|A|)`.
pub fn rearrange_to_segment(a: &PointSet) -> Result<RearrangeTrace> {
    let mut run = Run::new(a)?;
    run.record("input", a.clone())?;
    if !run.finished() {
        let c = compress(a);
        let sigma = run.record("compress", c.clone())?;
        let (n, m) = (run.n, run.m);
        run.bound = iteration_bound(&c, sigma);
        if n == 1 || m <= 1 {
            let t = run.target.clone();
            run.record("base case", t)?;
        } else if !run.finished() {
            drive(&mut run, c)?;
        }
    }
    if !run.finished() {
        return Err(invariant("final", "pipeline ended away from the initial segment"));
    }
    Ok(RearrangeTrace {
        input: a.clone(),
        final_set: run.target.clone(),
        steps: run.steps,
        iterations: run.iterations,
        iteration_bound: run.bound,
    })
}

fn iteration_bound(c: &PointSet, sigma: u64) -> u64 {
    let n = c.dim();
    let height = c.iter().map(|p| p.coords()[n - 1]).max().map_or(0, |h| h + 1);
    let extent = lambda_profile(c).per_axis.into_iter().max().unwrap_or(0);
    sigma.saturating_mul(height + extent + 1)
}

fn drive(run: &mut Run, start: PointSet) -> Result<()> {
    let mut set = start;
    'restart: loop {
        let stack = step1(run, set)?;
        let (mut stack, merged) = step2(run, stack)?;
        if merged {
            set = stack.to_set()?;
            continue 'restart;
        }
        loop {
            if run.finished() {
                return Ok(());
            }
            let (k, h) = (stack.base_edge(), stack.height());
            let cur = stack.to_set()?;
            let label = if k == h { "step 4: trivial exit" } else { "step 3: trivial exit" };
            if run.try_relabel(&cur, label)? {
                return Ok(());
            }
            if k < h {
                set = cur;
                continue 'restart;
            }
            if k == h {
                return step4(run, &stack);
            }
            match step3(run, stack)? {
                Fold::Finished => return Ok(()),
                Fold::Next { stack: next, merged: true } => {
                    set = next.to_set()?;
                    continue 'restart;
                }
                Fold::Next { stack: next, .. } => stack = next,
            }
        }
    }
}

fn step1(run: &mut Run, mut a: PointSet) -> Result<Stack> {
    let n = run.n;
    loop {
        run.tick("step 1")?;
        let mut slabs = slab_decomposition(&a)?;
        // stable: equal sizes keep their level order
        slabs.sort_by_key(|s| Reverse(s.body.len()));
        let permuted: Vec<Point> = slabs
            .iter()
            .enumerate()
            .flat_map(|(k, s)| s.body.iter().map(move |p| p.with_axis(n - 1, k as u64)))
            .collect();
        run.record("step 1: permute slabs", PointSet::from_distinct(n, permuted))?;

        let mut sizes = Vec::with_capacity(slabs.len());
        for slab in &slabs {
            let sub = rearrange_to_segment(&slab.body)?;
            sizes.push(sub.final_set.len() as u64);
        }
        let stack = Stack { n, sizes };
        run.record("step 1: slabs to initial segments", stack.to_set()?)?;

        let (k, h) = (stack.base_edge(), stack.height());
        if k >= h {
            return Ok(stack);
        }
        a = stack.to_set()?.swap_axes(0, n - 1)?;
        run.record("step 1: swap axes X1 and Xn", a.clone())?;
        let new_height = slab_decomposition(&a)?.len() as u64;
        if new_height >= h {
            return Err(invariant("step 1", format!("axis swap did not lower the height ({h} -> {new_height})")));
        }
    }
}

/// Returns the aligned stack and whether a merge (strict improvement) fired,
/// in which case the pipeline restarts.
fn step2(run: &mut Run, mut stack: Stack) -> Result<(Stack, bool)> {
    let n = stack.n;
    let interior = hull_sizes(n - 1, stack.sizes[0])?.interior;
    loop {
        let h = stack.sizes.len();
        let Some(k) = (1..h.saturating_sub(1)).find(|&k| stack.sizes[k] < interior) else {
            return Ok((stack, false));
        };
        run.tick("step 2")?;
        let top = stack.sizes[h - 1];
        if stack.sizes[k] + top <= interior {
            stack.sizes[k] += top;
            stack.sizes.pop();
            run.record_strict(format!("step 2: merge top slab into slab {k}"), stack.to_set()?)?;
            return Ok((stack, true));
        }
        let deficient = |s: &Stack| (1..s.sizes.len().saturating_sub(1)).filter(|&j| s.sizes[j] < interior).count();
        let before = deficient(&stack);
        stack.sizes[h - 1] = top + stack.sizes[k] - interior;
        stack.sizes[k] = interior;
        run.record(format!("step 2: transfer from top slab to slab {k}"), stack.to_set()?)?;
        if deficient(&stack) >= before {
            return Err(invariant("step 2", "transfer did not reduce the number of deficient slabs"));
        }
    }
}

enum Fold {
    Finished,
    Next { stack: Stack, merged: bool },
}

/// Moves the points of levels `0..levels` lying outside `I_{n-1}(keep)` into
/// a single new slab, rearranging them as an `(n-1)`-dimensional set first.
fn cut_vertical_slab(stack: &Stack, keep: u64, levels: usize) -> Result<u64> {
    let n = stack.n;
    let set = stack.to_set()?;
    let mut cut = Vec::new();
    for p in &set {
        let c = p.coords();
        if (c[n - 1] as usize) < levels && rank(&p.without_axis(n - 1))? >= keep {
            cut.push(p.clone());
        }
    }
    if cut.is_empty() {
        return Ok(0);
    }
    let Some(axis) = (0..n - 1).find(|&j| cut.iter().all(|p| p.coords()[j] == cut[0].coords()[j])) else {
        return Err(invariant("step 3", "cut-off part does not lie in a coordinate hyperplane"));
    };
    let flat = PointSet::from_distinct(n - 1, cut.iter().map(|p| p.without_axis(axis)).collect());
    let sub = rearrange_to_segment(&flat)?;
    Ok(sub.final_set.len() as u64)
}

fn step3(run: &mut Run, stack: Stack) -> Result<Fold> {
    run.tick("step 3")?;
    let n = stack.n;
    let (k, h) = (stack.base_edge(), stack.height());
    if k < h {
        return Err(Error::Precondition { step: "step 3", detail: format!("K = {k} < H = {h}") });
    }
    let strict_interior = prev_closed(n - 1, stack.sizes[0]);
    let top = *stack.sizes.last().expect("non-empty stack");

    let (next, label) = if top >= strict_interior {
        let cut = cut_vertical_slab(&stack, strict_interior, h as usize)?;
        let mut sizes = vec![strict_interior; h as usize];
        sizes.push(cut);
        if cut == 0 || (h + 1 < k && cut >= strict_interior) {
            return Err(invariant("step 3", format!("first case cut {cut} vs strict interior {strict_interior}")));
        }
        (Stack { n, sizes }, "step 3: first case")
    } else {
        let cut = cut_vertical_slab(&stack, strict_interior, h as usize - 1)?;
        if cut == 0 || cut >= strict_interior {
            return Err(invariant("step 3", format!("second case cut {cut} vs strict interior {strict_interior}")));
        }
        let mut sizes = vec![strict_interior; h as usize - 1];
        sizes.extend(if cut > top { [cut, top] } else { [top, cut] });
        (Stack { n, sizes }, "step 3: second case")
    };
    if next.total() != run.m {
        return Err(invariant(label, "fold changed the number of points"));
    }
    if next.base_edge() > k || next.height() != h + 1 {
        return Err(invariant(
            label,
            format!("measure: (K, H) went ({k}, {h}) -> ({}, {})", next.base_edge(), next.height()),
        ));
    }
    let set = next.to_set()?;
    run.record(label, set.clone())?;
    if run.try_relabel(&set, &format!("{label}, relabelled to the initial segment"))? {
        return Ok(Fold::Finished);
    }
    if label.ends_with("second case") {
        let (aligned, merged) = step2(run, next)?;
        return Ok(Fold::Next { stack: aligned, merged });
    }
    Ok(Fold::Next { stack: next, merged: false })
}

fn step4(run: &mut Run, stack: &Stack) -> Result<()> {
    run.tick("step 4")?;
    let (n, m) = (stack.n, run.m);
    let (k, h) = (stack.base_edge(), stack.height());
    if k != h {
        return Err(Error::Precondition { step: "step 4", detail: format!("K = {k} differs from H = {h}") });
    }
    if run.try_relabel(&stack.to_set()?, "step 4: trivial exit")? {
        return Ok(());
    }
    let interior = hull_sizes(n - 1, stack.sizes[0])?.interior;
    let top = *stack.sizes.last().expect("non-empty stack");
    let target = run.target.clone();

    if top >= interior {
        // H translates of the interior form a closed box; the rest hangs on
        // one of its largest faces.
        let block = h * interior;
        let cut = cut_vertical_slab(stack, interior, h as usize)?;
        if !is_closed(n, block)? || cut == 0 || block + cut != m || hull_sizes(n, m)?.interior != block {
            return Err(invariant(
                "step 4",
                format!("first case: block {block} + remainder {cut} is not a face split of {m}"),
            ));
        }
        run.record("step 4: first case", target)?;
        return Ok(());
    }

    // K-1 translates of the interior, the top slab, and the vertical remainder.
    let block = (k - 1) * interior;
    let cut = cut_vertical_slab(stack, interior, h as usize - 1)?;
    if !is_closed(n, block)? || cut == 0 || block + cut + top != m {
        return Err(invariant("step 4", format!("second case: block {block}, remainder {cut}, top {top}, m {m}")));
    }
    let face = next_closed(n, block)? - block;
    let (small, large) = if cut <= top { (cut, top) } else { (top, cut) };
    if face <= large {
        return Err(invariant("step 4", format!("face {face} not larger than {large}")));
    }
    if face >= small + large {
        run.record_strict("step 4: second case, merged into one face", target)?;
    } else {
        let rest = small + large - face;
        if !(0 < rest && rest < face) {
            return Err(invariant("step 4", format!("second case leftover {rest} vs face {face}")));
        }
        run.record("step 4: second case", target)?;
    }
    Ok(())
}

/// Step 1 alone: slabs sorted and replaced by initial segments, axes swapped
/// until the stack is no taller than its leading edge.
pub fn step1_normalize(a: &PointSet) -> Result<PointSet> {
    if a.dim() < 2 || a.len() < 2 {
        return Err(Error::Precondition {
            step: "step 1",
            detail: "needs dimension >= 2 and at least 2 points".into(),
        });
    }
    let mut run = Run::new(a)?;
    run.record("input", a.clone())?;
    step1(&mut run, a.clone())?.to_set()
}

/// Step 2 alone, restarting after every merge until all slabs below the top
/// share the interior of the bottom slab.
pub fn step2_align_interiors(a: &PointSet) -> Result<PointSet> {
    let mut stack = Stack::require(a, "step 2")?;
    let mut run = Run::new(a)?;
    run.record("input", a.clone())?;
    loop {
        let (next, merged) = step2(&mut run, stack)?;
        if !merged {
            return next.to_set();
        }
        stack = step1(&mut run, next.to_set()?)?;
    }
}

/// One fold of step 3. The input must be a stack with `K >= H`.
pub fn step3_fold(a: &PointSet) -> Result<(PointSet, FoldStatus)> {
    let stack = Stack::require(a, "step 3")?;
    let mut run = Run::new(a)?;
    run.record("input", a.clone())?;
    let (k, h) = (stack.base_edge(), stack.height());
    if k < h {
        return Err(Error::Precondition { step: "step 3", detail: format!("K = {k} < H = {h}") });
    }
    if run.try_relabel(a, "step 3: trivial exit")? {
        return Ok((run.current().clone(), FoldStatus::Finished));
    }
    if k == h {
        return Ok((a.clone(), FoldStatus::Square));
    }
    let status = match step3(&mut run, stack)? {
        Fold::Finished => FoldStatus::Finished,
        Fold::Next { stack, .. } if stack.base_edge() == stack.height() => FoldStatus::Square,
        Fold::Next { .. } => FoldStatus::Folded,
    };
    Ok((run.current().clone(), status))
}

/// Step 4 alone. The input must be a stack with `K = H`; the result is the
/// initial segment.
pub fn step4_finalize(a: &PointSet) -> Result<PointSet> {
    let stack = Stack::require(a, "step 4")?;
    let mut run = Run::new(a)?;
    run.record("input", a.clone())?;
    step4(&mut run, &stack)?;
    Ok(run.current().clone())
}

/// Checks the invariants a finished trace must satisfy; returns a list of
/// problems (empty when the trace is sound).
pub fn validate_trace(trace: &RearrangeTrace) -> Vec<String> {
    let mut problems = Vec::new();
    let n = trace.input.dim();
    let m = trace.input.len() as u64;
    for w in trace.steps.windows(2) {
        if w[1].sigma > w[0].sigma {
            problems.push(format!("sigma increased at {:?}: {} -> {}", w[1].label, w[0].sigma, w[1].sigma));
        }
    }
    for s in &trace.steps {
        if s.set.len() as u64 != m {
            problems.push(format!("size changed at {:?}", s.label));
        }
        if sigma_profile(&s.set).total != s.sigma {
            problems.push(format!("recorded sigma is stale at {:?}", s.label));
        }
    }
    match initial_segment(n, m) {
        Ok(seg) if seg == trace.final_set && trace.steps.last().is_some_and(|s| s.set == seg) => {}
        Ok(_) => problems.push("trace does not end at the initial segment".into()),
        Err(e) => problems.push(e.to_string()),
    }
    match sigma_segment(n, m) {
        Ok(v) if trace.steps.last().is_some_and(|s| s.sigma == v) => {}
        _ => problems.push("final sigma differs from the recursion".into()),
    }
    if trace.iterations > trace.iteration_bound {
        problems.push(format!("{} iterations exceed the bound {}", trace.iterations, trace.iteration_bound));
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, pts: &[&[u64]]) -> PointSet {
        PointSet::from_coords(n, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn stack(n: usize, sizes: &[u64]) -> PointSet {
        Stack { n, sizes: sizes.to_vec() }.to_set().unwrap()
    }

    fn sigma(a: &PointSet) -> u64 {
        sigma_profile(a).total
    }

    #[test]
    fn slab_examples() {
        let s = slab_decomposition(&set(2, &[&[0, 0], &[1, 0], &[0, 2]])).unwrap();
        assert_eq!(s.iter().map(|s| (s.level, s.body.len())).collect::<Vec<_>>(), vec![(0, 2), (2, 1)]);
        let s = slab_decomposition(&initial_segment(3, 17).unwrap()).unwrap();
        assert_eq!(s.iter().map(|s| (s.level, s.body.len())).collect::<Vec<_>>(), vec![(0, 9), (1, 8)]);
        assert_eq!(slab_decomposition(&set(3, &[&[4, 1, 7], &[0, 0, 7]])).unwrap().len(), 1);
        assert!(slab_decomposition(&set(1, &[&[3]])).is_err());
    }

    #[test]
    fn step1_examples() {
        let a = set(2, &[&[0, 0], &[2, 3], &[5, 1]]);
        assert_eq!(sigma(&a), 6);
        let b = step1_normalize(&a).unwrap();
        assert_eq!(sigma(&b), 4);
        assert!(Stack::from_set(&b).unwrap().is_some());

        let seg = initial_segment(3, 23).unwrap();
        assert_eq!(step1_normalize(&seg).unwrap(), seg);

        let grid = set(2, &[&[5, 5], &[5, 7], &[9, 5], &[9, 7]]);
        let b = step1_normalize(&grid).unwrap();
        assert_eq!(b, initial_segment(2, 4).unwrap());
        assert_eq!(sigma(&b), 4);
    }

    #[test]
    fn step2_merges_when_top_fits() {
        let a = stack(3, &[9, 4, 3]);
        let b = step2_align_interiors(&a).unwrap();
        assert_eq!(b, stack(3, &[9, 7]));
        assert!(sigma(&b) < sigma(&a));
    }

    #[test]
    fn step2_transfers_otherwise() {
        // interior of I_2(9) is 9 and 6 + 6 > 9, so slab 1 fills up and the top keeps 3
        let b = step2_align_interiors(&stack(3, &[9, 6, 6])).unwrap();
        assert_eq!(b, stack(3, &[9, 9, 3]));
        assert!(sigma(&b) <= sigma(&stack(3, &[9, 6, 6])));
    }

    #[test]
    fn step2_fixed_points() {
        let a = stack(3, &[9, 9, 2]);
        assert_eq!(step2_align_interiors(&a).unwrap(), a);
        let b = stack(3, &[9, 1]);
        assert_eq!(step2_align_interiors(&b).unwrap(), b);
        assert!(step2_align_interiors(&set(2, &[&[0, 0], &[3, 3]])).is_err());
    }

    #[test]
    fn step3_examples() {
        let (b, status) = step3_fold(&stack(3, &[5])).unwrap();
        assert_eq!(b, stack(3, &[4, 1]));
        assert_eq!(status, FoldStatus::Finished);

        let boxed = stack(3, &[6, 6]);
        let (b, status) = step3_fold(&boxed).unwrap();
        assert_eq!(status, FoldStatus::Finished);
        assert_eq!(b, initial_segment(3, 12).unwrap());

        let tall = stack(2, &[3, 3, 3, 3]);
        assert!(matches!(step3_fold(&tall), Err(Error::Precondition { .. })));
    }

    #[test]
    fn step3_keeps_sigma() {
        let a = stack(2, &[5, 5]);
        let (b, status) = step3_fold(&a).unwrap();
        assert_eq!(b, stack(2, &[4, 4, 2]));
        assert_eq!(status, FoldStatus::Folded);
        assert_eq!(sigma(&b), sigma(&a));
    }

    #[test]
    fn step4_examples() {
        assert_eq!(step4_finalize(&stack(3, &[4, 4])).unwrap(), initial_segment(3, 8).unwrap());
        let seg = stack(2, &[3, 3, 1]);
        assert_eq!(step4_finalize(&seg).unwrap(), initial_segment(2, 7).unwrap());
        assert!(matches!(step4_finalize(&stack(3, &[5])), Err(Error::Precondition { .. })));
    }

    #[test]
    fn pipeline_examples() {
        let a = set(2, &[&[0, 0], &[2, 3], &[5, 1]]);
        let t = rearrange_to_segment(&a).unwrap();
        assert_eq!(t.final_set, initial_segment(2, 3).unwrap());
        assert_eq!(t.steps.first().unwrap().sigma, 6);
        assert_eq!(t.steps.last().unwrap().sigma, 4);
        assert!(validate_trace(&t).is_empty(), "{:?}", validate_trace(&t));

        let seg = initial_segment(3, 29).unwrap();
        let t = rearrange_to_segment(&seg).unwrap();
        assert_eq!(t.steps.len(), 1);
    }

    #[test]
    fn pipeline_on_large_random_cube_subset() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut pts = std::collections::BTreeSet::new();
        while pts.len() < 1000 {
            pts.insert((0..3).map(|_| rng.gen_range(0..16u64)).collect::<Vec<_>>());
        }
        let a = PointSet::from_coords(3, pts.into_iter().collect()).unwrap();
        let t = rearrange_to_segment(&a).unwrap();
        assert!(validate_trace(&t).is_empty(), "{:?}", validate_trace(&t));
        assert_eq!(t.steps.last().unwrap().sigma, sigma_segment(3, 1000).unwrap());
    }

    #[test]
    fn trace_entries_elide_large_sets() {
        let t = rearrange_to_segment(&set(2, &[&[0, 0], &[2, 3], &[5, 1]])).unwrap();
        assert!(t.entries(Some(2)).iter().all(|e| e.points.is_none()));
        assert!(t.entries(None).iter().all(|e| e.points.as_ref().is_some_and(|p| p.len() == 3)));
    }

    #[test]
    fn relabelling_is_lexicographically_least() {
        // I_2(2) swapped: {(0,0),(0,1)} needs axes [1, 0]
        let a = set(2, &[&[0, 0], &[0, 1]]);
        assert_eq!(relabelling_to_segment(&a).unwrap(), Some(vec![1, 0]));
        // a 2x2x1 box in 3d matches I_3(4) with either of two relabellings
        let b = set(3, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 1, 1]]);
        assert_eq!(relabelling_to_segment(&b).unwrap(), Some(vec![1, 2, 0]));
    }

    fn random_set() -> impl Strategy<Value = PointSet> {
        (2usize..=4).prop_flat_map(|n| {
            proptest::collection::btree_set(proptest::collection::vec(0u64..=15, n), 1..=40)
                .prop_map(move |s| PointSet::from_coords(n, s.into_iter().collect()).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn traces_are_sound(a in random_set()) {
            let t = rearrange_to_segment(&a).unwrap();
            prop_assert!(validate_trace(&t).is_empty(), "{:?}", validate_trace(&t));
            prop_assert!(sigma(&a) >= sigma_segment(a.dim(), a.len() as u64).unwrap());
            let again = rearrange_to_segment(&t.final_set).unwrap();
            prop_assert_eq!(again.steps.len(), 1);
        }
    }
}

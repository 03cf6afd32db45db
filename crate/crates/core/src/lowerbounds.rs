//! Checkable lower-bound certificates and binary-scheme impossibility scans.

use crate::error::{input, Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::scalar::Scalar;
use crate::schemes::{mixture_moments, PlanComponent};
use rayon::prelude::*;
use std::collections::HashMap;

/// Slacks of one deterministic labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelingSlack<T> {
    /// `(θ, Δ_θ(s))` for every distinct value in the labeling, sorted by `θ`.
    pub deltas: Vec<(T, T)>,
    pub norm1: T,
}

impl<T: Scalar> LabelingSlack<T> {
    pub fn delta(&self, theta: &T) -> Option<&T> {
        self.deltas.iter().find(|(t, _)| t == theta).map(|(_, d)| d)
    }
}

/// `Δ_θ(s) = Σ_{v : s_v = θ} ((Ws)_v − 1)` for the point mass at `s`.
pub fn slack_of_labeling<T: Scalar>(g: &WeightedGraph, s: &[T]) -> Result<LabelingSlack<T>> {
    if s.len() != g.n() {
        return input(format!("labeling has {} entries, graph has {} vertices", s.len(), g.n()));
    }
    let load = g.apply(s);
    let mut deltas: Vec<(T, T)> = Vec::new();
    for (v, theta) in s.iter().enumerate() {
        let d = load[v].clone() - T::one();
        match deltas.iter_mut().find(|(t, _)| t == theta) {
            Some(entry) => entry.1 = entry.1.clone() + d,
            None => deltas.push((theta.clone(), d)),
        }
    }
    deltas.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let norm1 = s.iter().fold(T::zero(), |a, x| a + x.clone());
    Ok(LabelingSlack { deltas, norm1 })
}

/// Test function `f` on a finite grid with constant `C`: if `∥s∥₁ ≥ Σ_θ f(θ)Δ_θ(s) + C` for all
/// labelings over the grid, every persuasive scheme over the grid costs at least `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate<T> {
    pub grid: Vec<T>,
    /// `f` evaluated on `grid`, aligned by index.
    pub f: Vec<T>,
    pub c_bound: T,
}

impl<T: Scalar> DualCertificate<T> {
    pub fn new(grid: Vec<T>, f: Vec<T>, c_bound: T) -> Result<Self> {
        if grid.is_empty() || grid.len() != f.len() {
            return input("certificate grid and f must be nonempty and aligned");
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return input("certificate grid must be strictly increasing");
        }
        if grid.iter().any(|x| *x < T::zero() || *x > T::one()) {
            return input("certificate grid must lie in [0, 1]");
        }
        if let Some(i) = grid.iter().position(|x| x.is_zero()) {
            if f[i] < T::zero() {
                return input("f(0) must be nonnegative");
            }
        }
        Ok(Self { grid, f, c_bound })
    }

    /// `f(θ) = high` for `θ ≥ threshold` and `low` below it.
    pub fn step(grid: Vec<T>, threshold: &T, high: T, low: T, c_bound: T) -> Result<Self> {
        let f = grid.iter().map(|x| if x >= threshold { high.clone() } else { low.clone() }).collect();
        Self::new(grid, f, c_bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateOutcome<T> {
    /// Every labeling satisfies the inequality; `tightest` is `min_s (∥s∥₁ − Σ f Δ)`.
    Certified { lower_bound: T, tightest: T, labelings: u64 },
    /// First violating labeling in lexicographic grid order.
    Violation { labeling: Vec<T>, lhs: T, rhs: T },
}

/// Enumeration limit for exhaustive certificate checks.
pub const ENUMERATION_CAP: u64 = 10_000_000;

fn enumeration_size(base: usize, n: usize) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total
            .checked_mul(base as u64)
            .filter(|t| *t <= ENUMERATION_CAP)
            .ok_or_else(|| Error::Capacity(format!("{base}^{n} labelings exceed {ENUMERATION_CAP}")))?;
    }
    Ok(total)
}

struct Enumerator<T> {
    grid: Vec<T>,
    adjacency: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> Enumerator<T> {
    fn new(g: &WeightedGraph, grid: Vec<T>) -> Self {
        let w = g.edge_weights::<T>();
        let adjacency = (0..g.n())
            .map(|v| g.neighbors(v).iter().map(|&(u, e)| (u, w[e].clone())).collect())
            .collect();
        Self { grid, adjacency }
    }

    /// `∥s∥₁` and the per-grid-index slack for labeling `idx`.
    fn evaluate(&self, idx: &[usize], deltas: &mut [T]) -> T {
        deltas.iter_mut().for_each(|d| *d = T::zero());
        let mut norm = T::zero();
        for (v, &i) in idx.iter().enumerate() {
            let mut load = self.grid[i].clone() - T::one();
            for (u, w) in &self.adjacency[v] {
                let su = &self.grid[idx[*u]];
                if !su.is_zero() {
                    load = load + w.clone() * su.clone();
                }
            }
            deltas[i] = deltas[i].clone() + load;
            norm = norm + self.grid[i].clone();
        }
        norm
    }

    /// Calls `visit` on every labeling whose first `prefix.len()` entries equal `prefix`,
    /// in lexicographic order, until it returns false.
    fn walk(&self, n: usize, prefix: &[usize], mut visit: impl FnMut(&[usize], &[T], &T) -> bool) {
        let base = self.grid.len();
        let mut idx = vec![0usize; n];
        idx[..prefix.len()].copy_from_slice(prefix);
        let mut deltas = vec![T::zero(); base];
        loop {
            let norm = self.evaluate(&idx, &mut deltas);
            if !visit(&idx, &deltas, &norm) {
                return;
            }
            let mut pos = n;
            loop {
                if pos == prefix.len() {
                    return;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < base {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    fn prefixes(&self, n: usize) -> Vec<Vec<usize>> {
        let base = self.grid.len();
        let mut depth = 0;
        let mut count = 1usize;
        while depth < n && count < 256 {
            depth += 1;
            count *= base;
        }
        let mut out = vec![Vec::new()];
        for _ in 0..depth {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..base).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Checks the certificate inequality on every labeling in `grid^V`.
pub fn verify_certificate_exhaustive<T: Scalar>(
    g: &WeightedGraph,
    cert: &DualCertificate<T>,
) -> Result<CertificateOutcome<T>> {
    let n = g.n();
    let labelings = enumeration_size(cert.grid.len(), n)?;
    let en = Enumerator::new(g, cert.grid.clone());
    let shard_results: Vec<(Option<(Vec<usize>, T, T)>, Option<T>)> = en
        .prefixes(n)
        .par_iter()
        .map(|prefix| {
            let mut tightest: Option<T> = None;
            let mut violation = None;
            en.walk(n, prefix, |idx, deltas, norm| {
                let weighted = deltas
                    .iter()
                    .zip(&cert.f)
                    .fold(T::zero(), |a, (d, f)| a + d.clone() * f.clone());
                let room = norm.clone() - weighted.clone();
                if tightest.as_ref().map_or(true, |t| room < *t) {
                    tightest = Some(room);
                }
                let rhs = weighted + cert.c_bound.clone();
                if !norm.ge_tol(&rhs) {
                    violation = Some((idx.to_vec(), norm.clone(), rhs));
                    return false;
                }
                true
            });
            (violation, tightest)
        })
        .collect();
    let mut tightest: Option<T> = None;
    for (violation, t) in shard_results {
        if let Some((idx, lhs, rhs)) = violation {
            let labeling = idx.iter().map(|&i| cert.grid[i].clone()).collect();
            return Ok(CertificateOutcome::Violation { labeling, lhs, rhs });
        }
        if let Some(t) = t {
            if tightest.as_ref().map_or(true, |b| t < *b) {
                tightest = Some(t);
            }
        }
    }
    Ok(CertificateOutcome::Certified {
        lower_bound: cert.c_bound.clone(),
        tightest: tightest.expect("at least one labeling"),
        labelings,
    })
}

/// Result of searching the step family `f = high·1{θ ≥ t} + low·1{θ < t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSearch {
    pub threshold: f64,
    pub high: f64,
    pub low: f64,
    /// Largest constant found for this `(t, high, low)`, before certification.
    pub c_bound: f64,
}

/// Coarse-to-fine grid search over step test functions with `f(0) = low ≥ 0`.
///
/// Labelings are collapsed to their distinct `(∥s∥₁, Σ_{θ≥t}Δ_θ, Σ_{θ<t}Δ_θ)` triples first. The
/// returned constant is only a candidate; certify it with [`verify_certificate_exhaustive`].
pub fn search_step_certificate(g: &WeightedGraph, grid: &[f64]) -> Result<StepSearch> {
    let n = g.n();
    enumeration_size(grid.len(), n)?;
    let en = Enumerator::new(g, grid.to_vec());
    let mut best: Option<StepSearch> = None;
    for &t in grid.iter().filter(|&&t| t > 0.0) {
        let high: Vec<bool> = grid.iter().map(|&x| x >= t).collect();
        let triples: Vec<HashMap<(u64, u64), f64>> = en
            .prefixes(n)
            .par_iter()
            .map(|prefix| {
                let mut seen: HashMap<(u64, u64), f64> = HashMap::new();
                en.walk(n, prefix, |_, deltas, norm| {
                    let (mut h, mut l) = (0.0, 0.0);
                    for (i, d) in deltas.iter().enumerate() {
                        if high[i] {
                            h += d;
                        } else {
                            l += d;
                        }
                    }
                    let key = (h.to_bits(), l.to_bits());
                    let e = seen.entry(key).or_insert(f64::INFINITY);
                    if *norm < *e {
                        *e = *norm;
                    }
                    true
                });
                seen
            })
            .collect();
        let mut merged: HashMap<(u64, u64), f64> = HashMap::new();
        for m in triples {
            for (k, v) in m {
                let e = merged.entry(k).or_insert(f64::INFINITY);
                if v < *e {
                    *e = v;
                }
            }
        }
        let points: Vec<(f64, f64, f64)> = merged
            .into_iter()
            .map(|((h, l), norm)| (norm, f64::from_bits(h), f64::from_bits(l)))
            .collect();
        let value = |a: f64, b: f64| {
            points
                .iter()
                .map(|(norm, h, l)| norm - a * h - b * l)
                .fold(f64::INFINITY, f64::min)
        };
        let (mut ca, mut cb, mut span) = (0.0f64, 0.0f64, 64.0f64);
        let mut cv = value(ca, cb);
        for _ in 0..12 {
            let step = span / 8.0;
            for i in -8..=8 {
                for j in -8..=8 {
                    let a = ca + step * i as f64;
                    let b = (cb + step * j as f64).max(0.0);
                    let v = value(a, b);
                    if v > cv + 1e-12 {
                        (ca, cb, cv) = (a, b, v);
                    }
                }
            }
            span /= 4.0;
        }
        if best.as_ref().map_or(true, |b| cv > b.c_bound) {
            best = Some(StepSearch { threshold: t, high: ca, low: cb, c_bound: cv });
        }
    }
    best.ok_or_else(|| Error::Input("grid needs a positive value".into()))
}

/// Labeling of the clique-leaves graph seen through one uniformly chosen clique.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedLabeling<T> {
    pub x: T,
    pub y: T,
    pub alpha: Vec<T>,
}

impl<T: Scalar> ProjectedLabeling<T> {
    pub fn sum(&self) -> T {
        self.alpha.iter().fold(T::zero(), |a, x| a + x.clone())
    }
}

/// Slack increments of one projected labeling, scaled by `k²` on leaves since each clique is
/// drawn with probability `1/k²`. Returned as `(θ, increment)` sorted by `θ`.
pub fn project_clique_leaves_slacks<T: Scalar>(k: usize, pl: &ProjectedLabeling<T>) -> Result<Vec<(T, T)>> {
    if k < 2 || pl.alpha.len() != k {
        return input(format!("projected labeling needs k >= 2 leaf signals, got {}", pl.alpha.len()));
    }
    let all = [pl.x.clone(), pl.y.clone()].into_iter().chain(pl.alpha.iter().cloned());
    if all.clone().any(|v| v < T::zero() || v > T::one()) {
        return input("projected signals must lie in [0, 1]");
    }
    let half = T::one() / T::from_i64(2);
    let k2 = T::from_usize(k * k);
    let sum = pl.sum();
    let mut out: Vec<(T, T)> = Vec::new();
    let mut add = |theta: &T, d: T| match out.iter_mut().find(|(t, _)| t == theta) {
        Some(e) => e.1 = e.1.clone() + d,
        None => out.push((theta.clone(), d)),
    };
    let centers = k2.clone() * sum.clone();
    add(&pl.x, half.clone() * (pl.y.clone() + centers.clone()) - (T::one() - pl.x.clone()));
    add(&pl.y, half.clone() * (pl.x.clone() + centers) - (T::one() - pl.y.clone()));
    for a in &pl.alpha {
        let inner = half.clone() * (sum.clone() + pl.x.clone() + pl.y.clone() + a.clone()) - T::one();
        add(a, k2.clone() * inner);
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// The reduced dual-feasibility polynomial at `x = y`, with `Σα_i/(1−α_i)` lower bounded by `s`.
pub fn clique_dual_g(k: usize, x: f64, s: f64) -> f64 {
    let k = k as f64;
    (k / 8.0) * s * s - (k / 2.0 - 0.25 - (k / 4.0) * x - (k / 4.0) * x / (1.0 - x)) * s
        + (k / 2.0) * (1.0 - x)
        + x * x / (4.0 * k * (1.0 - x))
}

/// Unconstrained minimizer of [`clique_dual_g`] in `s`.
pub fn clique_dual_s_star(k: usize, x: f64) -> f64 {
    2.0 - x - x / (1.0 - x) - 1.0 / k as f64
}

/// Left minus right side of the simplified dual inequality for given `x, y, s` and
/// `A = Σα_i/(1−α_i)`.
pub fn clique_dual_margin(k: usize, x: f64, y: f64, s: f64, a: f64) -> f64 {
    let kf = k as f64;
    let lhs = kf / 2.0
        + (x * y / (8.0 * kf)) * (1.0 / (1.0 - x) + 1.0 / (1.0 - y))
        + (kf / 8.0) * s * (x / (1.0 - x) + y / (1.0 - y))
        + (kf * (s + x + y - 1.0) / 8.0) * a;
    let rhs = (3.0 * kf / 8.0 - 0.25) * s + (kf / 4.0) * (x + y);
    lhs - rhs
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualMargin {
    pub min_margin: f64,
    pub argmin: (f64, f64),
    pub points: usize,
}

/// Minimum dual margin over `grid_x × grid_s` at `x = y`, taking the worse of the uniform
/// (`Σα/(1−α) ≥ s`) and concentrated (`α = (s, 0, …)`, when `s < 1`) leaf allocations.
/// A positive minimum certifies the bound on this grid only.
pub fn verify_clique_leaves_dual(k: usize, grid_x: &[f64], grid_s: &[f64]) -> Result<DualMargin> {
    if k < 2 {
        return input("clique dual needs k >= 2");
    }
    if grid_x.is_empty() || grid_s.is_empty() {
        return input("empty grid");
    }
    if let Some(x) = grid_x.iter().find(|&&x| !(0.5..1.0).contains(&x)) {
        return input(format!("x = {x} outside [1/2, 1)"));
    }
    let top = 3.0 * k as f64;
    if let Some(s) = grid_s.iter().find(|&&s| !(0.0..=top).contains(&s)) {
        return input(format!("s = {s} outside [0, 3k]"));
    }
    let mut best = DualMargin { min_margin: f64::INFINITY, argmin: (0.0, 0.0), points: 0 };
    for &x in grid_x {
        for &s in grid_s {
            let mut m = clique_dual_margin(k, x, x, s, s);
            if s < 1.0 {
                m = m.min(clique_dual_margin(k, x, x, s, s / (1.0 - s)));
            }
            best.points += 1;
            if m < best.min_margin {
                best.min_margin = m;
                best.argmin = (x, s);
            }
        }
    }
    Ok(best)
}

/// `count` evenly spaced points on `[lo, hi)`.
pub fn half_open_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect()
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn closed_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow<T> {
    pub p: T,
    pub persuasive: bool,
    /// `(E|S|)²/E Induced(S)` of the binary scheme, if the set is not almost surely empty.
    pub cost: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryScan<T> {
    pub rows: Vec<ScanRow<T>>,
    pub all_fail: bool,
}

/// For each `p`, tests the binary persuasiveness condition on `(1−p)·set_a ⊕ p·set_b`.
pub fn binary_fail_scan<T: Scalar>(
    g: &WeightedGraph,
    set_a: &VertexSet,
    set_b: &VertexSet,
    p_grid: &[T],
) -> Result<BinaryScan<T>> {
    let mut rows = Vec::with_capacity(p_grid.len());
    for p in p_grid {
        if *p < T::zero() || *p > T::one() {
            return input(format!("mixture weight {p} outside [0, 1]"));
        }
        let parts = vec![
            (T::one() - p.clone(), PlanComponent::ExplicitSubset { set: set_a.clone(), on: T::one(), off: T::zero() }),
            (p.clone(), PlanComponent::ExplicitSubset { set: set_b.clone(), on: T::one(), off: T::zero() }),
        ];
        let mom = mixture_moments(g, &parts)?;
        let cost = mom.binary_cost();
        let persuasive = cost.is_some() && mom.binary_condition(g.n());
        rows.push(ScanRow { p: p.clone(), persuasive, cost });
    }
    let all_fail = rows.iter().all(|r| !r.persuasive);
    Ok(BinaryScan { rows, all_fail })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairScan {
    pub best_cost: Option<f64>,
    pub best: Option<(Vec<usize>, Vec<usize>, f64)>,
    pub mixtures_checked: usize,
}

/// Bounded search over binary schemes supported on two subsets, with mixture weights on `p_grid`.
/// Not exhaustive over all distributions on subsets.
pub fn binary_pair_scan(g: &WeightedGraph, p_grid: &[f64]) -> Result<PairScan> {
    let n = g.n();
    if p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return input("mixture weights must lie in [0, 1]");
    }
    if n > 12 {
        return Err(Error::Capacity(format!("pair scan limited to n <= 12, got {n}")));
    }
    let subsets: Vec<VertexSet> = (1u32..(1 << n))
        .map(|m| VertexSet::from_mask((0..n).map(|v| m >> v & 1 == 1).collect()))
        .collect();
    let results: Vec<PairScan> = (0..subsets.len())
        .into_par_iter()
        .map(|i| {
            let mut local = PairScan { best_cost: None, best: None, mixtures_checked: 0 };
            for j in i..subsets.len() {
                let scan = binary_fail_scan::<f64>(g, &subsets[i], &subsets[j], p_grid).expect("valid grid");
                for row in scan.rows {
                    local.mixtures_checked += 1;
                    if let (true, Some(c)) = (row.persuasive, row.cost) {
                        if local.best_cost.map_or(true, |b| c < b - 1e-12) {
                            local.best_cost = Some(c);
                            local.best = Some((subsets[i].ids(), subsets[j].ids(), row.p));
                        }
                    }
                }
            }
            local
        })
        .collect();
    let mut total = PairScan { best_cost: None, best: None, mixtures_checked: 0 };
    for r in results {
        total.mixtures_checked += r.mixtures_checked;
        if let Some(c) = r.best_cost {
            if total.best_cost.map_or(true, |b| c < b - 1e-12) {
                total.best_cost = Some(c);
                total.best = r.best;
            }
        }
    }
    Ok(total)
}

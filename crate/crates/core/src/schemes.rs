//! Identity-independent signaling schemes as mixtures of labeled-set generators.

use crate::error::{input, Error, Result};
use crate::graph::{cut_weight, induced_weight, NumJson, VertexSet, WeightedGraph};
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One generator in a scheme's mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanComponent<T> {
    /// Label `set` with `on`, everything else with `off`.
    ExplicitSubset { set: VertexSet, on: T, off: T },
    /// Include each vertex independently with its marginal.
    IndependentRounding { marginals: Vec<T>, on: T, off: T },
    /// Competing exponential clocks with rates `theta` on its support.
    ExponentialClocks { theta: Vec<T>, on: T, off: T },
    ConstantLabeling { labels: Vec<T> },
}

impl<T: Scalar> PlanComponent<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            PlanComponent::ExplicitSubset { .. } => "explicit_subset",
            PlanComponent::IndependentRounding { .. } => "independent_rounding",
            PlanComponent::ExponentialClocks { .. } => "exponential_clocks",
            PlanComponent::ConstantLabeling { .. } => "constant_labeling",
        }
    }

    fn vertex_count(&self) -> usize {
        match self {
            PlanComponent::ExplicitSubset { set, .. } => set.n(),
            PlanComponent::IndependentRounding { marginals, .. } => marginals.len(),
            PlanComponent::ExponentialClocks { theta, .. } => theta.len(),
            PlanComponent::ConstantLabeling { labels } => labels.len(),
        }
    }

    fn values(&self) -> Vec<T> {
        match self {
            PlanComponent::ExplicitSubset { on, off, .. }
            | PlanComponent::IndependentRounding { on, off, .. }
            | PlanComponent::ExponentialClocks { on, off, .. } => vec![on.clone(), off.clone()],
            PlanComponent::ConstantLabeling { labels } => labels.clone(),
        }
    }

    /// Same random set, relabeled.
    pub fn with_values(self, on: T, off: T) -> Result<Self> {
        Ok(match self {
            PlanComponent::ExplicitSubset { set, .. } => PlanComponent::ExplicitSubset { set, on, off },
            PlanComponent::IndependentRounding { marginals, .. } => {
                PlanComponent::IndependentRounding { marginals, on, off }
            }
            PlanComponent::ExponentialClocks { theta, .. } => PlanComponent::ExponentialClocks { theta, on, off },
            PlanComponent::ConstantLabeling { .. } => return input("constant labeling has no underlying set"),
        })
    }
}

/// Expected `|S|`, `Induced(S)` and `Cut(S, V∖S)` of a set-valued component.
#[derive(Debug, Clone, PartialEq)]
pub struct SetMoments<T> {
    pub size: T,
    pub induced: T,
    pub cut: T,
}

impl<T: Scalar> SetMoments<T> {
    fn zero() -> Self {
        Self { size: T::zero(), induced: T::zero(), cut: T::zero() }
    }

    fn add_scaled(&mut self, w: &T, other: &Self) {
        self.size = self.size.clone() + w.clone() * other.size.clone();
        self.induced = self.induced.clone() + w.clone() * other.induced.clone();
        self.cut = self.cut.clone() + w.clone() * other.cut.clone();
    }

    /// `E Induced(V∖S)` from the partition identity.
    pub fn complement_induced(&self, g: &WeightedGraph) -> T {
        let two = T::from_i64(2);
        T::from_usize(g.n()) + two.clone() * g.total_weight::<T>() - self.induced.clone() - two * self.cut.clone()
    }

    /// The two-valued persuasiveness test `E Cut / E|V∖S| ≥ E Induced / E|S|`, cross-multiplied.
    ///
    /// Vacuous when `V∖S` is empty almost surely.
    pub fn binary_condition(&self, n: usize) -> bool {
        let outside = T::from_usize(n) - self.size.clone();
        if outside.near_zero() {
            return true;
        }
        (self.cut.clone() * self.size.clone()).ge_tol(&(self.induced.clone() * outside))
    }

    /// `α = E|S| / E Induced(S)`, the only persuasive signal for the set.
    pub fn binary_alpha(&self) -> Option<T> {
        if self.induced.near_zero() {
            None
        } else {
            Some(self.size.clone() / self.induced.clone())
        }
    }

    /// `(E|S|)² / E Induced(S)`.
    pub fn binary_cost(&self) -> Option<T> {
        self.binary_alpha().map(|a| a * self.size.clone())
    }
}

/// Clock-race marginals `θ_v / (θ_v + Σ_{u ∈ N(v) ∩ supp} θ_u)`.
pub fn clock_marginals<T: Scalar>(g: &WeightedGraph, theta: &[T]) -> Vec<T> {
    (0..g.n())
        .map(|v| {
            if theta[v] <= T::zero() {
                return T::zero();
            }
            let rivals = g
                .neighbors(v)
                .iter()
                .filter(|&&(u, _)| theta[u] > T::zero())
                .fold(T::zero(), |acc, &(u, _)| acc + theta[u].clone());
            theta[v].clone() / (theta[v].clone() + rivals)
        })
        .collect()
}

/// Closed-form moments of a set-valued component.
pub fn set_moments<T: Scalar>(g: &WeightedGraph, plan: &PlanComponent<T>) -> Result<SetMoments<T>> {
    match plan {
        PlanComponent::ExplicitSubset { set, .. } => Ok(SetMoments {
            size: T::from_usize(set.len()),
            induced: induced_weight(g, set)?,
            cut: cut_weight(g, set)?,
        }),
        PlanComponent::IndependentRounding { marginals: p, .. } => {
            let size = p.iter().fold(T::zero(), |a, x| a + x.clone());
            let two = T::from_i64(2);
            let mut pairs = T::zero();
            let mut cut = T::zero();
            for (e, w) in g.edges().iter().zip(g.edge_weights::<T>()) {
                let (a, b) = (p[e.u].clone(), p[e.v].clone());
                pairs = pairs + w.clone() * a.clone() * b.clone();
                cut = cut
                    + w * (a.clone() * (T::one() - b.clone()) + b * (T::one() - a));
            }
            Ok(SetMoments { induced: size.clone() + two * pairs, size, cut })
        }
        PlanComponent::ExponentialClocks { theta, .. } => {
            if !g.is_unit() {
                return Err(Error::UnsupportedExact("exponential clocks on a weighted graph".into()));
            }
            let pi = clock_marginals(g, theta);
            let size = pi.iter().fold(T::zero(), |a, x| a + x.clone());
            let cut = (0..g.n()).fold(T::zero(), |a, v| a + pi[v].clone() * g.weighted_degree::<T>(v));
            Ok(SetMoments { induced: size.clone(), size, cut })
        }
        PlanComponent::ConstantLabeling { .. } => input("constant labeling is not set-valued"),
    }
}

/// Weighted sum of set moments over a list of `(weight, component)`.
pub fn mixture_moments<T: Scalar>(g: &WeightedGraph, parts: &[(T, PlanComponent<T>)]) -> Result<SetMoments<T>> {
    let mut total = SetMoments::zero();
    for (w, plan) in parts {
        total.add_scaled(w, &set_moments(g, plan)?);
    }
    Ok(total)
}

/// A finite mixture of generator components over a finite signal space.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingScheme<T> {
    n: usize,
    components: Vec<(T, PlanComponent<T>)>,
    space: Vec<T>,
}

fn sort_dedup<T: Scalar>(mut xs: Vec<T>) -> Vec<T> {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    xs.dedup();
    xs
}

impl<T: Scalar> SignalingScheme<T> {
    /// Validates weights and values; zero-weight components are dropped.
    pub fn new(n: usize, components: Vec<(T, PlanComponent<T>)>) -> Result<Self> {
        Self::with_space(n, components, None)
    }

    /// As [`Self::new`], with an explicitly declared signal space that must cover every emitted value.
    pub fn with_space(n: usize, components: Vec<(T, PlanComponent<T>)>, declared: Option<Vec<T>>) -> Result<Self> {
        if components.is_empty() {
            return input("scheme has no components");
        }
        let mut total = T::zero();
        for (w, plan) in &components {
            if *w < -T::tol() {
                return input(format!("negative component weight {w}"));
            }
            if plan.vertex_count() != n {
                return input(format!("{} component sized for {} vertices, graph has {n}", plan.kind(), plan.vertex_count()));
            }
            let probs: &[T] = match plan {
                PlanComponent::IndependentRounding { marginals, .. } => marginals,
                _ => &[],
            };
            if probs.iter().any(|p| *p < -T::tol() || *p > T::one() + T::tol()) {
                return input("marginal outside [0, 1]");
            }
            if let PlanComponent::ExponentialClocks { theta, .. } = plan {
                if theta.iter().any(|x| *x < T::zero()) {
                    return input("negative clock rate");
                }
            }
            total = total + w.clone();
        }
        if !total.approx_eq(&T::one()) {
            return input(format!("component weights sum to {total}, not 1"));
        }
        let components: Vec<_> = components.into_iter().filter(|(w, _)| !w.is_zero()).collect();
        let used = sort_dedup(components.iter().flat_map(|(_, p)| p.values()).collect());
        if let Some(bad) = used.iter().find(|x| **x < T::zero() || **x > T::one()) {
            return input(format!("signal {bad} outside [0, 1]"));
        }
        let space = match declared {
            None => used,
            Some(d) => {
                let d = sort_dedup(d);
                if let Some(bad) = used.iter().find(|x| !d.contains(x)) {
                    return input(format!("signal {bad} missing from the declared space"));
                }
                if let Some(bad) = d.iter().find(|x| **x < T::zero() || **x > T::one()) {
                    return input(format!("signal {bad} outside [0, 1]"));
                }
                d
            }
        };
        Ok(Self { n, components, space })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[(T, PlanComponent<T>)] {
        &self.components
    }

    pub fn space(&self) -> &[T] {
        &self.space
    }

    fn index_of(&self, x: &T) -> usize {
        self.space.iter().position(|s| s == x).expect("value validated against the space")
    }
}

fn check_graph<T>(g: &WeightedGraph, scheme: &SignalingScheme<T>) -> Result<()> {
    if g.n() != scheme.n {
        return input(format!("scheme built for {} vertices, graph has {}", scheme.n, g.n()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackEntry<T> {
    pub signal: T,
    pub contrib: T,
    pub num: T,
    pub delta: T,
    /// Standard error of `delta` for Monte Carlo reports.
    pub stderr: Option<f64>,
}

/// Per-signal `(Contrib_θ, Num_θ, Δ_θ)` with the scheme's expected cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackReport<T> {
    pub entries: Vec<SlackEntry<T>>,
    pub cost: T,
    pub method: Method,
}

impl<T: Scalar> SlackReport<T> {
    fn from_sums(space: &[T], sums: Vec<(T, T)>, method: Method, stderr: Option<Vec<f64>>) -> Self {
        let mut cost = T::zero();
        let entries = space
            .iter()
            .zip(sums)
            .enumerate()
            .map(|(i, (theta, (contrib, num)))| {
                cost = cost.clone() + theta.clone() * num.clone();
                let delta = contrib.clone() - (T::one() - theta.clone()) * num.clone();
                SlackEntry {
                    signal: theta.clone(),
                    contrib,
                    num,
                    delta,
                    stderr: stderr.as_ref().map(|s| s[i]),
                }
            })
            .collect();
        Self { entries, cost, method }
    }

    pub fn entry(&self, theta: &T) -> Option<&SlackEntry<T>> {
        self.entries.iter().find(|e| e.signal == *theta)
    }

    pub fn delta(&self, theta: &T) -> Option<&T> {
        self.entry(theta).map(|e| &e.delta)
    }

    /// Signals in the space that are emitted with probability zero.
    pub fn unrealized(&self) -> Vec<T> {
        self.entries.iter().filter(|e| e.num.near_zero()).map(|e| e.signal.clone()).collect()
    }

    pub fn total_num(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, e| a + e.num.clone())
    }

    pub fn total_delta(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, e| a + e.delta.clone())
    }

    /// Persuasive with the mode's own tolerance (zero for exact arithmetic).
    pub fn persuasive(&self) -> bool {
        is_persuasive(self, &T::tol())
    }

    pub fn to_json(&self) -> SlackReportJson {
        let (method, samples, seed) = match self.method {
            Method::Exact => ("exact", None, None),
            Method::MonteCarlo { samples, seed } => ("monte_carlo", Some(samples), Some(seed)),
        };
        SlackReportJson {
            method: method.into(),
            samples,
            seed,
            cost: NumJson::from_scalar(&self.cost),
            persuasive: self.persuasive(),
            entries: self
                .entries
                .iter()
                .map(|e| SlackEntryJson {
                    signal: NumJson::from_scalar(&e.signal),
                    contrib: NumJson::from_scalar(&e.contrib),
                    num: NumJson::from_scalar(&e.num),
                    delta: NumJson::from_scalar(&e.delta),
                    stderr: e.stderr,
                    realized: !e.num.near_zero(),
                })
                .collect(),
            unrealized: self.unrealized().iter().map(NumJson::from_scalar).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlackReportJson {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub cost: NumJson,
    pub persuasive: bool,
    pub entries: Vec<SlackEntryJson>,
    pub unrealized: Vec<NumJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlackEntryJson {
    pub signal: NumJson,
    pub contrib: NumJson,
    pub num: NumJson,
    pub delta: NumJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub realized: bool,
}

/// `Δ_θ = 0` for every realized `θ > 0` and `Δ_0 ≥ 0`, each up to `tau`.
pub fn is_persuasive<T: Scalar>(report: &SlackReport<T>, tau: &T) -> bool {
    report.entries.iter().all(|e| {
        if e.num.abs() <= *tau && e.contrib.abs() <= *tau {
            return true;
        }
        if e.signal.is_zero() {
            e.delta.clone() + tau.clone() >= T::zero()
        } else {
            e.delta.abs() <= *tau
        }
    })
}

/// Exact slacks from per-component closed-form moments.
pub fn slack_report_exact<T: Scalar>(g: &WeightedGraph, scheme: &SignalingScheme<T>) -> Result<SlackReport<T>> {
    check_graph(g, scheme)?;
    let n = T::from_usize(g.n());
    let two_m = T::from_i64(2) * g.total_weight::<T>();
    let mut sums = vec![(T::zero(), T::zero()); scheme.space.len()];
    let add = |sums: &mut Vec<(T, T)>, i: usize, contrib: T, num: T| {
        sums[i].0 = sums[i].0.clone() + contrib;
        sums[i].1 = sums[i].1.clone() + num;
    };
    for (w, plan) in &scheme.components {
        match plan {
            PlanComponent::ConstantLabeling { labels } => {
                let received = g.apply(labels);
                for v in 0..g.n() {
                    let i = scheme.index_of(&labels[v]);
                    let from_neighbors = received[v].clone() - labels[v].clone();
                    add(&mut sums, i, w.clone() * from_neighbors, w.clone());
                }
            }
            PlanComponent::ExplicitSubset { on, off, .. }
            | PlanComponent::IndependentRounding { on, off, .. }
            | PlanComponent::ExponentialClocks { on, off, .. } => {
                let mom = set_moments(g, plan)?;
                if on == off {
                    let i = scheme.index_of(on);
                    add(&mut sums, i, w.clone() * on.clone() * two_m.clone(), w.clone() * n.clone());
                    continue;
                }
                let (a, b) = (on.clone(), off.clone());
                let outside = n.clone() - mom.size.clone();
                let contrib_on = a.clone() * (mom.induced.clone() - mom.size.clone()) + b.clone() * mom.cut.clone();
                let contrib_off =
                    a * mom.cut.clone() + b * (mom.complement_induced(g) - outside.clone());
                add(&mut sums, scheme.index_of(on), w.clone() * contrib_on, w.clone() * mom.size.clone());
                add(&mut sums, scheme.index_of(off), w.clone() * contrib_off, w.clone() * outside);
            }
        }
    }
    Ok(SlackReport::from_sums(&scheme.space, sums, Method::Exact, None))
}

/// Expected cost `E∥s∥₁`.
pub fn cost<T: Scalar>(g: &WeightedGraph, scheme: &SignalingScheme<T>) -> Result<T> {
    Ok(expected_signals(g, scheme)?.into_iter().fold(T::zero(), |a, b| a + b))
}

/// `E[s_v]` for every vertex.
pub fn expected_signals<T: Scalar>(g: &WeightedGraph, scheme: &SignalingScheme<T>) -> Result<Vec<T>> {
    check_graph(g, scheme)?;
    let mut out = vec![T::zero(); g.n()];
    for (w, plan) in &scheme.components {
        let per_vertex: Vec<T> = match plan {
            PlanComponent::ConstantLabeling { labels } => labels.clone(),
            PlanComponent::ExplicitSubset { set, on, off } => {
                (0..g.n()).map(|v| if set.contains(v) { on.clone() } else { off.clone() }).collect()
            }
            PlanComponent::IndependentRounding { marginals, on, off } => mix_values(marginals, on, off),
            PlanComponent::ExponentialClocks { theta, on, off } => {
                set_moments(g, plan)?;
                mix_values(&clock_marginals(g, theta), on, off)
            }
        };
        for (o, x) in out.iter_mut().zip(per_vertex) {
            *o = o.clone() + w.clone() * x;
        }
    }
    Ok(out)
}

fn mix_values<T: Scalar>(p: &[T], on: &T, off: &T) -> Vec<T> {
    p.iter()
        .map(|x| x.clone() * on.clone() + (T::one() - x.clone()) * off.clone())
        .collect()
}

/// Sampler with float-converted parameters, shared across Monte Carlo draws.
struct Sampler {
    cumulative: Vec<f64>,
    plans: Vec<SamplePlan>,
    adjacency: Vec<Vec<usize>>,
}

enum SamplePlan {
    Fixed(Vec<usize>),
    Rounding { p: Vec<f64>, on: usize, off: usize },
    Clocks { rates: Vec<Option<Exp<f64>>>, on: usize, off: usize },
}

impl Sampler {
    fn new<T: Scalar>(g: &WeightedGraph, scheme: &SignalingScheme<T>) -> Self {
        let mut acc = 0.0;
        let mut cumulative = Vec::new();
        let mut plans = Vec::new();
        for (w, plan) in &scheme.components {
            acc += w.to_f64();
            cumulative.push(acc);
            plans.push(match plan {
                PlanComponent::ConstantLabeling { labels } => {
                    SamplePlan::Fixed(labels.iter().map(|x| scheme.index_of(x)).collect())
                }
                PlanComponent::ExplicitSubset { set, on, off } => {
                    let (a, b) = (scheme.index_of(on), scheme.index_of(off));
                    SamplePlan::Fixed((0..g.n()).map(|v| if set.contains(v) { a } else { b }).collect())
                }
                PlanComponent::IndependentRounding { marginals, on, off } => SamplePlan::Rounding {
                    p: marginals.iter().map(Scalar::to_f64).collect(),
                    on: scheme.index_of(on),
                    off: scheme.index_of(off),
                },
                PlanComponent::ExponentialClocks { theta, on, off } => SamplePlan::Clocks {
                    rates: theta
                        .iter()
                        .map(|t| {
                            let r = t.to_f64();
                            if r > 0.0 {
                                Exp::new(r).ok()
                            } else {
                                None
                            }
                        })
                        .collect(),
                    on: scheme.index_of(on),
                    off: scheme.index_of(off),
                },
            });
        }
        let adjacency = (0..g.n()).map(|v| g.neighbors(v).iter().map(|&(u, _)| u).collect()).collect();
        Self { cumulative, plans, adjacency }
    }

    fn draw(&self, rng: &mut impl Rng, out: &mut Vec<usize>) {
        let u: f64 = rng.gen::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let c = self.cumulative.iter().position(|&x| u < x).unwrap_or(self.plans.len() - 1);
        out.clear();
        match &self.plans[c] {
            SamplePlan::Fixed(idx) => out.extend_from_slice(idx),
            SamplePlan::Rounding { p, on, off } => {
                out.extend(p.iter().map(|&q| if rng.gen::<f64>() < q { *on } else { *off }));
            }
            SamplePlan::Clocks { rates, on, off } => {
                let clocks: Vec<f64> = rates
                    .iter()
                    .map(|r| r.as_ref().map_or(f64::INFINITY, |d| d.sample(rng)))
                    .collect();
                out.extend((0..clocks.len()).map(|v| {
                    let wins = clocks[v].is_finite()
                        && self.adjacency[v].iter().all(|&u| clocks[v] < clocks[u]);
                    if wins {
                        *on
                    } else {
                        *off
                    }
                }));
            }
        }
    }
}

/// One labeling drawn from the scheme: a component by weight, then its random set.
pub fn sample_labeling<T: Scalar>(g: &WeightedGraph, scheme: &SignalingScheme<T>, rng: &mut impl Rng) -> Result<Vec<T>> {
    check_graph(g, scheme)?;
    let mut idx = Vec::with_capacity(g.n());
    Sampler::new(g, scheme).draw(rng, &mut idx);
    Ok(idx.into_iter().map(|i| scheme.space[i].clone()).collect())
}

/// Deterministic per-shard seed.
pub fn derive_seed(master: u64, shard: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(master ^ splitmix(shard.wrapping_add(1)))
}

const SHARDS: usize = 16;

#[derive(Clone)]
struct Moments {
    delta: Vec<f64>,
    delta_sq: Vec<f64>,
    contrib: Vec<f64>,
    num: Vec<f64>,
}

/// Monte Carlo slack estimate with per-signal standard errors; deterministic given `seed`.
pub fn slack_report_mc<T: Scalar>(
    g: &WeightedGraph,
    scheme: &SignalingScheme<T>,
    samples: usize,
    seed: u64,
) -> Result<SlackReport<f64>> {
    check_graph(g, scheme)?;
    if samples == 0 {
        return input("Monte Carlo needs at least one sample");
    }
    let sampler = Sampler::new(g, scheme);
    let values: Vec<f64> = scheme.space.iter().map(Scalar::to_f64).collect();
    let k = values.len();
    let weights: Vec<Vec<(usize, f64)>> = (0..g.n())
        .map(|v| g.neighbors(v).iter().map(|&(u, e)| (u, f64::from_ratio(&g.edges()[e].w))).collect())
        .collect();
    let shards = SHARDS.min(samples);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = samples / shards + usize::from(s < samples % shards);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, s as u64));
            let mut acc = Moments { delta: vec![0.0; k], delta_sq: vec![0.0; k], contrib: vec![0.0; k], num: vec![0.0; k] };
            let mut idx = Vec::with_capacity(g.n());
            let (mut c, mut m) = (vec![0.0; k], vec![0.0; k]);
            for _ in 0..count {
                sampler.draw(&mut rng, &mut idx);
                c.iter_mut().for_each(|x| *x = 0.0);
                m.iter_mut().for_each(|x| *x = 0.0);
                for v in 0..idx.len() {
                    let i = idx[v];
                    m[i] += 1.0;
                    c[i] += weights[v].iter().map(|&(u, w)| w * values[idx[u]]).sum::<f64>();
                }
                for i in 0..k {
                    let d = c[i] - (1.0 - values[i]) * m[i];
                    acc.delta[i] += d;
                    acc.delta_sq[i] += d * d;
                    acc.contrib[i] += c[i];
                    acc.num[i] += m[i];
                }
            }
            acc
        })
        .collect();
    let mut total = Moments { delta: vec![0.0; k], delta_sq: vec![0.0; k], contrib: vec![0.0; k], num: vec![0.0; k] };
    for p in parts {
        for i in 0..k {
            total.delta[i] += p.delta[i];
            total.delta_sq[i] += p.delta_sq[i];
            total.contrib[i] += p.contrib[i];
            total.num[i] += p.num[i];
        }
    }
    let nf = samples as f64;
    let stderr = (0..k)
        .map(|i| {
            if samples < 2 {
                return 0.0;
            }
            let mean = total.delta[i] / nf;
            let var = ((total.delta_sq[i] - nf * mean * mean) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        })
        .collect();
    let sums = (0..k).map(|i| (total.contrib[i] / nf, total.num[i] / nf)).collect();
    Ok(SlackReport::from_sums(&values, sums, Method::MonteCarlo { samples, seed }, Some(stderr)))
}

/// Serialized scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeJson {
    pub space: Vec<NumJson>,
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub weight: NumJson,
    #[serde(flatten)]
    pub plan: PlanJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanJson {
    ExplicitSubset { set: Vec<usize>, on: NumJson, off: NumJson },
    IndependentRounding { marginals: Vec<NumJson>, on: NumJson, off: NumJson },
    ExponentialClocks { theta: Vec<NumJson>, on: NumJson, off: NumJson },
    ConstantLabeling { labels: Vec<NumJson> },
}

fn nums<T: Scalar>(xs: &[T]) -> Vec<NumJson> {
    xs.iter().map(NumJson::from_scalar).collect()
}

fn parse_nums<T: Scalar>(xs: &[NumJson]) -> Result<Vec<T>> {
    xs.iter().map(NumJson::to_scalar).collect()
}

impl<T: Scalar> SignalingScheme<T> {
    pub fn to_json(&self) -> SchemeJson {
        let components = self
            .components
            .iter()
            .map(|(w, plan)| ComponentJson {
                weight: NumJson::from_scalar(w),
                plan: match plan {
                    PlanComponent::ExplicitSubset { set, on, off } => PlanJson::ExplicitSubset {
                        set: set.ids(),
                        on: NumJson::from_scalar(on),
                        off: NumJson::from_scalar(off),
                    },
                    PlanComponent::IndependentRounding { marginals, on, off } => PlanJson::IndependentRounding {
                        marginals: nums(marginals),
                        on: NumJson::from_scalar(on),
                        off: NumJson::from_scalar(off),
                    },
                    PlanComponent::ExponentialClocks { theta, on, off } => PlanJson::ExponentialClocks {
                        theta: nums(theta),
                        on: NumJson::from_scalar(on),
                        off: NumJson::from_scalar(off),
                    },
                    PlanComponent::ConstantLabeling { labels } => PlanJson::ConstantLabeling { labels: nums(labels) },
                },
            })
            .collect();
        SchemeJson { space: nums(&self.space), components }
    }

    pub fn from_json(n: usize, doc: &SchemeJson) -> Result<Self> {
        let mut components = Vec::with_capacity(doc.components.len());
        for c in &doc.components {
            let plan = match &c.plan {
                PlanJson::ExplicitSubset { set, on, off } => PlanComponent::ExplicitSubset {
                    set: VertexSet::from_ids(n, set.iter().copied())?,
                    on: on.to_scalar()?,
                    off: off.to_scalar()?,
                },
                PlanJson::IndependentRounding { marginals, on, off } => PlanComponent::IndependentRounding {
                    marginals: parse_nums(marginals)?,
                    on: on.to_scalar()?,
                    off: off.to_scalar()?,
                },
                PlanJson::ExponentialClocks { theta, on, off } => PlanComponent::ExponentialClocks {
                    theta: parse_nums(theta)?,
                    on: on.to_scalar()?,
                    off: off.to_scalar()?,
                },
                PlanJson::ConstantLabeling { labels } => PlanComponent::ConstantLabeling { labels: parse_nums(labels)? },
            };
            components.push((c.weight.to_scalar()?, plan));
        }
        Self::with_space(n, components, Some(parse_nums(&doc.space)?))
    }
}

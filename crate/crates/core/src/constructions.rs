//! Scheme constructions with closed-form parameters pinned to exact values.

use crate::benchmarks::{solve_opt, solve_opt_ir, solve_opt_stable, solve_opt_stable_capped, Solution, STABLE_CAP};
use crate::error::{input, Error, Result};
use crate::graph::{is_dominating, NumJson, VertexSet, WeightedGraph};
use crate::scalar::Scalar;
use crate::schemes::{
    mixture_moments, set_moments, slack_report_exact, PlanComponent, SetMoments, SignalingScheme, SlackReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Parameters a construction settled on, plus the branch that produced the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams<T> {
    pub branch: String,
    /// Branch the size guards alone would select, when it differs in meaning from `branch`.
    pub guard_branch: Option<String>,
    pub alpha: Option<T>,
    pub epsilon: Option<T>,
    pub p: Option<T>,
    pub q: Option<T>,
    pub kappa: Option<T>,
    pub beta: Option<T>,
    pub iota: Option<T>,
    pub gamma: Option<T>,
    pub r: Option<T>,
    /// Guaranteed cost bound stated by the construction.
    pub bound: Option<T>,
}

impl<T: Scalar> SchemeParams<T> {
    pub fn new(branch: &str) -> Self {
        Self {
            branch: branch.to_string(),
            guard_branch: None,
            alpha: None,
            epsilon: None,
            p: None,
            q: None,
            kappa: None,
            beta: None,
            iota: None,
            gamma: None,
            r: None,
            bound: None,
        }
    }

    pub fn to_json(&self) -> ParamsJson {
        let mut values = BTreeMap::new();
        let fields = [
            ("alpha", &self.alpha),
            ("epsilon", &self.epsilon),
            ("p", &self.p),
            ("q", &self.q),
            ("kappa", &self.kappa),
            ("beta", &self.beta),
            ("iota", &self.iota),
            ("gamma", &self.gamma),
            ("r", &self.r),
            ("bound", &self.bound),
        ];
        for (name, v) in fields {
            if let Some(x) = v {
                values.insert(name.to_string(), NumJson::from_scalar(x));
            }
        }
        ParamsJson { branch: self.branch.clone(), guard_branch: self.guard_branch.clone(), values }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsJson {
    pub branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard_branch: Option<String>,
    #[serde(flatten)]
    pub values: BTreeMap<String, NumJson>,
}

fn require_unit(g: &WeightedGraph) -> Result<()> {
    if g.is_unit() {
        Ok(())
    } else {
        input("construction requires a unit-weight graph")
    }
}

/// Exact slack report, failing loudly if the scheme is not persuasive.
pub fn certify<T: Scalar>(g: &WeightedGraph, scheme: &SignalingScheme<T>) -> Result<SlackReport<T>> {
    let report = slack_report_exact(g, scheme)?;
    if !report.persuasive() {
        let worst = report
            .entries
            .iter()
            .map(|e| format!("Δ[{}] = {}", e.signal, e.delta))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::Internal(format!("constructed scheme is not persuasive: {worst}")));
    }
    Ok(report)
}

/// Binary scheme over a mixture of set components, labeled with `α = E|S| / E Induced(S)`.
pub fn binary_scheme<T: Scalar>(
    g: &WeightedGraph,
    parts: Vec<(T, PlanComponent<T>)>,
) -> Result<(SignalingScheme<T>, SetMoments<T>, T)> {
    let mom = mixture_moments(g, &parts)?;
    let alpha = mom
        .binary_alpha()
        .ok_or_else(|| Error::Input("binary scheme over an almost surely empty set".into()))?;
    let off = if mom.size.approx_eq(&T::from_usize(g.n())) { alpha.clone() } else { T::zero() };
    let parts = parts
        .into_iter()
        .map(|(w, c)| Ok((w, c.with_values(alpha.clone(), off.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((SignalingScheme::new(g.n(), parts)?, mom, alpha))
}

/// Every vertex receives `n / Induced(V)`.
pub fn no_info_scheme<T: Scalar>(g: &WeightedGraph) -> Result<SignalingScheme<T>> {
    let (scheme, _, _) = binary_scheme(
        g,
        vec![(T::one(), PlanComponent::ExplicitSubset { set: VertexSet::full(g.n()), on: T::one(), off: T::zero() })],
    )?;
    Ok(scheme)
}

fn clamp_unit<T: Scalar>(theta: &[T]) -> Vec<T> {
    theta
        .iter()
        .map(|x| T::min_of(T::max_of(x.clone(), T::zero()), T::one()))
        .collect()
}

/// Dominating set from independent rounding of the fractional optimum, inflated by `ln n`,
/// repaired greedily and then pruned to a minimal dominating set. Best of eight rounds.
pub fn dominating_set_lp_rounded(g: &WeightedGraph, seed: u64) -> Result<VertexSet> {
    require_unit(g)?;
    let theta = solve_opt::<f64>(g)?.solution.theta;
    let n = g.n();
    let inflation = (n as f64).ln().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<VertexSet> = None;
    for _ in 0..8 {
        let mut set = VertexSet::empty(n);
        for (v, t) in theta.iter().enumerate() {
            if rng.gen::<f64>() < (t * inflation).min(1.0) {
                set.insert(v);
            }
        }
        greedy_repair(g, &mut set);
        prune(g, &mut set);
        if best.as_ref().map_or(true, |b| set.len() < b.len()) {
            best = Some(set);
        }
    }
    Ok(best.expect("at least one round"))
}

fn greedy_repair(g: &WeightedGraph, set: &mut VertexSet) {
    let n = g.n();
    let dominated = |set: &VertexSet, v: usize| set.contains(v) || g.neighbors(v).iter().any(|&(u, _)| set.contains(u));
    loop {
        let open: Vec<bool> = (0..n).map(|v| !dominated(set, v)).collect();
        if !open.iter().any(|&b| b) {
            return;
        }
        let gain = |v: usize| usize::from(open[v]) + g.neighbors(v).iter().filter(|&&(u, _)| open[u]).count();
        let pick = (0..n).filter(|&v| !set.contains(v)).max_by_key(|&v| (gain(v), std::cmp::Reverse(v)));
        match pick {
            Some(v) => set.insert(v),
            None => return,
        }
    }
}

fn prune(g: &WeightedGraph, set: &mut VertexSet) {
    for v in set.ids().into_iter().rev() {
        set.remove(v);
        if !is_dominating(g, set) {
            set.insert(v);
        }
    }
}

/// Greedy minimum-degree independent set together with its size guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyIndependentSet {
    pub set: VertexSet,
    /// Vertices and edges of the subgraph the set was drawn from.
    pub n_hat: usize,
    pub m_hat: usize,
    /// `min(n̂²/m̂, n̂) / 16`.
    pub size_floor: f64,
}

impl GreedyIndependentSet {
    pub fn meets_floor(&self) -> bool {
        self.set.len() as f64 + 1e-12 >= self.size_floor
    }
}

/// Repeatedly takes the vertex of smallest remaining degree in `V ∖ exclude` and deletes it
/// with its neighbors. Any positive-weight edge counts as adjacency.
pub fn maximal_independent_set(g: &WeightedGraph, exclude: &VertexSet) -> Result<GreedyIndependentSet> {
    if exclude.n() != g.n() {
        return input("exclusion set sized for a different graph");
    }
    let n = g.n();
    let mut alive: Vec<bool> = (0..n).map(|v| !exclude.contains(v)).collect();
    let n_hat = alive.iter().filter(|&&a| a).count();
    let m_hat = g.edges().iter().filter(|e| alive[e.u] && alive[e.v]).count();
    let mut degree: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().filter(|&&(u, _)| alive[u]).count())
        .collect();
    let mut set = VertexSet::empty(n);
    while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (degree[v], v)) {
        set.insert(v);
        let mut removed = vec![v];
        removed.extend(g.neighbors(v).iter().map(|&(u, _)| u).filter(|&u| alive[u]));
        for &r in &removed {
            alive[r] = false;
        }
        for &r in &removed {
            for &(u, _) in g.neighbors(r) {
                if alive[u] {
                    degree[u] -= 1;
                }
            }
        }
    }
    let nh = n_hat as f64;
    let size_floor = if m_hat == 0 { nh } else { (nh * nh / m_hat as f64).min(nh) } / 16.0;
    Ok(GreedyIndependentSet { set, n_hat, m_hat, size_floor })
}

fn extend_to_maximal(g: &WeightedGraph, base: &VertexSet) -> VertexSet {
    let blocked = VertexSet::from_mask(
        (0..g.n())
            .map(|v| base.contains(v) || g.neighbors(v).iter().any(|&(u, _)| base.contains(u)))
            .collect(),
    );
    let extra = maximal_independent_set(g, &blocked).expect("same graph").set;
    base.union(&extra)
}

/// Which candidate a size-dependent construction returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    /// Use exactly the branch chosen by the size guards.
    Guards,
    /// Build every applicable branch and keep the cheapest persuasive one.
    Cheapest,
}

const GUARD_C: f64 = 10.0;

/// Smallest `κ ≥ 0` with `κ²β(β − ι·OPT) ≥ OPT²(n − OPT + κ(n − β + ι) + 1)`, by bisection.
pub fn smallest_kappa(n: f64, opt: f64, beta: f64, iota: f64) -> Option<f64> {
    let lead = beta * (beta - iota * opt);
    if lead <= 0.0 {
        return None;
    }
    let f = |k: f64| k * k * lead - opt * opt * (n - opt + k * (n - beta + iota) + 1.0);
    if f(0.0) >= 0.0 {
        return Some(0.0);
    }
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e18 {
            return None;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Scheme with cost `O(√n · OPT)` on unit-weight graphs.
pub fn binary_unit_scheme<T: Scalar>(g: &WeightedGraph, seed: u64) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    binary_unit_scheme_with(g, seed, BranchPolicy::Cheapest)
}

pub fn binary_unit_scheme_with<T: Scalar>(
    g: &WeightedGraph,
    seed: u64,
    policy: BranchPolicy,
) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    require_unit(g)?;
    let n = g.n();
    let nf = n as f64;
    let opt = solve_opt::<T>(g)?;
    let opt_f = opt.value.to_f64();
    let ds = dominating_set_lp_rounded(g, seed)?;
    let is = maximal_independent_set(g, &ds)?.set;
    let beta = is.len();
    let iota = T::from_usize(ds.len()) / opt.value.clone();
    let guard = if opt_f > nf.sqrt() / GUARD_C {
        "i"
    } else if (beta as f64) < GUARD_C * nf.sqrt() * opt_f {
        "ii"
    } else {
        "iii"
    };

    let mut candidates: Vec<(String, SignalingScheme<T>, SchemeParams<T>, T)> = Vec::new();
    let mut push = |branch: &str, scheme: SignalingScheme<T>, mut params: SchemeParams<T>| -> Result<()> {
        let report = certify(g, &scheme)?;
        params.beta = Some(T::from_usize(beta));
        params.iota = Some(iota.clone());
        params.bound = Some(T::from_f64(GUARD_C * nf.sqrt()) * opt.value.clone());
        candidates.push((branch.to_string(), scheme, params, report.cost));
        Ok(())
    };

    if policy == BranchPolicy::Cheapest || guard == "i" {
        let scheme = no_info_scheme::<T>(g)?;
        let mut params = SchemeParams::new("i");
        params.alpha = Some(scheme.space()[0].clone());
        push("i", scheme, params)?;
    }
    if policy == BranchPolicy::Cheapest || guard == "ii" {
        let mis = extend_to_maximal(g, &is);
        let (scheme, _, alpha) = binary_scheme(
            g,
            vec![(T::one(), PlanComponent::ExplicitSubset { set: mis, on: T::one(), off: T::zero() })],
        )?;
        let mut params = SchemeParams::new("ii");
        params.alpha = Some(alpha);
        push("ii", scheme, params)?;
    }
    if policy == BranchPolicy::Cheapest || guard == "iii" {
        if let Some((scheme, params)) = mixture_branch(g, &opt.solution, &is, opt_f, beta, iota.to_f64())? {
            push("iii", scheme, params)?;
        } else if guard == "iii" {
            let mis = extend_to_maximal(g, &is);
            let (scheme, _, alpha) = binary_scheme(
                g,
                vec![(T::one(), PlanComponent::ExplicitSubset { set: mis, on: T::one(), off: T::zero() })],
            )?;
            let mut params = SchemeParams::new("iii-fallback");
            params.alpha = Some(alpha);
            push("iii-fallback", scheme, params)?;
        }
    }
    let best = candidates
        .into_iter()
        .reduce(|a, b| if b.3 < a.3 { b } else { a })
        .ok_or_else(|| Error::Internal("no candidate scheme".into()))?;
    let (branch, scheme, mut params, _) = best;
    params.branch = branch;
    params.guard_branch = Some(guard.to_string());
    Ok((scheme, params))
}

fn mixture_branch<T: Scalar>(
    g: &WeightedGraph,
    theta: &Solution<T>,
    is: &VertexSet,
    opt: f64,
    beta: usize,
    iota: f64,
) -> Result<Option<(SignalingScheme<T>, SchemeParams<T>)>> {
    let n = g.n();
    let Some(kappa) = smallest_kappa(n as f64, opt, beta as f64, iota) else {
        return Ok(None);
    };
    let rounding = PlanComponent::IndependentRounding { marginals: clamp_unit(&theta.theta), on: T::one(), off: T::zero() };
    let subset = PlanComponent::ExplicitSubset { set: is.clone(), on: T::one(), off: T::zero() };
    let parts = |p: &T| vec![(T::one() - p.clone(), rounding.clone()), (p.clone(), subset.clone())];
    let kappa_t = T::from_f64(kappa);
    let mut p = kappa_t.clone() / (T::one() + kappa_t.clone());
    if !mixture_moments(g, &parts(&p))?.binary_condition(n) {
        // The sufficient inequality did not carry over exactly; search p upward on the exact condition.
        if !mixture_moments(g, &parts(&T::one()))?.binary_condition(n) {
            return Ok(None);
        }
        let (mut lo, mut hi) = (p.to_f64(), 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mixture_moments(g, &parts(&T::from_f64(mid)))?.binary_condition(n) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        p = T::from_f64(hi);
        if !mixture_moments(g, &parts(&p))?.binary_condition(n) {
            p = T::one();
        }
    }
    let (scheme, _, alpha) = binary_scheme(g, parts(&p))?;
    let mut params = SchemeParams::new("iii");
    params.epsilon = Some(T::one() - alpha.clone());
    params.alpha = Some(alpha);
    params.p = Some(p);
    params.kappa = Some(kappa_t);
    Ok(Some((scheme, params)))
}

/// Competing exponential clocks with rates `θ`, labeled 1 on the winners.
pub fn exp_clocks_component<T: Scalar>(theta: &Solution<T>) -> PlanComponent<T> {
    PlanComponent::ExponentialClocks { theta: theta.theta.clone(), on: T::one(), off: T::zero() }
}

/// Binary scheme whose cost equals OPT^stable, from clocks on an optimal stable profile.
pub fn match_stable_scheme<T: Scalar>(g: &WeightedGraph) -> Result<SignalingScheme<T>> {
    require_unit(g)?;
    let stable = solve_opt_stable::<T>(g)?;
    let (scheme, _, _) = binary_scheme(g, vec![(T::one(), exp_clocks_component(&stable.solution))])?;
    certify(g, &scheme)?;
    Ok(scheme)
}

/// Mixture of rounding the fractional optimum and clocks on the stable optimum; beats OPT^stable.
pub fn improve_unit_scheme<T: Scalar>(g: &WeightedGraph) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    improve_unit_scheme_capped(g, STABLE_CAP)
}

/// As [`improve_unit_scheme`], with an explicit cap for the stable-optimum oracle.
pub fn improve_unit_scheme_capped<T: Scalar>(g: &WeightedGraph, cap: usize) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    require_unit(g)?;
    let opt = solve_opt::<T>(g)?;
    let stable = solve_opt_stable_capped::<T>(g, cap)?;
    if !(opt.value < stable.value) || opt.value.approx_eq(&stable.value) {
        return Err(Error::NoImprovement(format!("OPT = OPT^stable = {}", opt.value)));
    }
    let eps = improve_unit_epsilon(g.n(), &opt.value, &stable.value);
    let parts = vec![
        (eps.clone(), PlanComponent::IndependentRounding { marginals: clamp_unit(&opt.solution.theta), on: T::one(), off: T::zero() }),
        (T::one() - eps.clone(), exp_clocks_component(&stable.solution)),
    ];
    let (scheme, _, alpha) = binary_scheme(g, parts)?;
    let report = certify(g, &scheme)?;
    let bound = stable.value.clone() - eps.clone() * (stable.value.clone() - opt.value.clone());
    if !bound.ge_tol(&report.cost) || !(report.cost < stable.value) {
        return Err(Error::Internal(format!("cost {} misses bound {bound}", report.cost)));
    }
    let mut params = SchemeParams::new("mixture");
    params.epsilon = Some(eps);
    params.alpha = Some(alpha);
    params.bound = Some(bound);
    Ok((scheme, params))
}

/// `max{min{1/2, (PoS−1)/(PoS + 2n/(PoS+1))}, (PoS−1)/(PoS + n − OPT)}` with `PoS = OPT^stable/OPT`.
pub fn improve_unit_epsilon<T: Scalar>(n: usize, opt: &T, stable: &T) -> T {
    let one = T::one();
    let two = T::from_i64(2);
    let nn = T::from_usize(n);
    let pos = stable.clone() / opt.clone();
    let gap = pos.clone() - one.clone();
    let first = gap.clone() / (pos.clone() + two.clone() * nn.clone() / (pos.clone() + one.clone()));
    let half = one / two;
    let second = gap / (pos + nn - opt.clone());
    T::max_of(T::min_of(half, first), second)
}

/// Three-plan scheme: rounding of the IR optimum at `1 − ε`, the given set at `1 − ε`,
/// and the complement of the rounding at `α`.
pub fn ternary_weighted_scheme<T: Scalar>(
    g: &WeightedGraph,
    is_component: PlanComponent<T>,
    gamma: T,
) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    let n = T::from_usize(g.n());
    let is_m = set_moments(g, &is_component)?;
    if is_m.size.near_zero() {
        return input("independent-set component is empty almost surely");
    }
    if is_m.induced > (T::one() + gamma.clone()) * is_m.size.clone() + T::tol() {
        return input(format!("E Induced(S) = {} exceeds (1 + γ)·E|S| with γ = {gamma}", is_m.induced));
    }
    let ir = solve_opt_ir::<T>(g)?;
    let opt_ir = ir.value.clone();
    let theta = clamp_unit(&ir.solution.theta);
    let rounding = |on: T, off: T| PlanComponent::IndependentRounding { marginals: theta.clone(), on, off };
    let ds_m = set_moments(g, &rounding(T::one(), T::zero()))?;
    let outside_induced = ds_m.complement_induced(g);

    let fallback = |reason: &str| -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
        let scheme = no_info_scheme::<T>(g)?;
        let mut params = SchemeParams::new(reason);
        params.alpha = Some(scheme.space()[0].clone());
        params.gamma = Some(gamma.clone());
        Ok((scheme, params))
    };
    if outside_induced.near_zero() {
        return fallback("fallback-noinfo");
    }
    let two = T::from_i64(2);
    let alpha = (n.clone() - opt_ir.clone()) / outside_induced;
    let lhs = alpha.clone() * (n.clone() - two.clone() * opt_ir.clone()) - opt_ir.clone();
    if !(lhs >= alpha.clone() * n.clone() / two.clone()) {
        return fallback("fallback-noinfo");
    }
    let p = opt_ir.clone() / is_m.size.sqrt();
    let eps = (ds_m.induced.clone() - opt_ir.clone() + p.clone() * (is_m.induced.clone() - is_m.size.clone()))
        / (ds_m.induced.clone() + p.clone() * is_m.induced.clone());
    let q = (eps.clone() * n.clone()
        + (T::one() - two.clone() * eps.clone()) * opt_ir.clone()
        + p.clone() * (n.clone() - is_m.size.clone()))
        / (alpha.clone() * n / two);
    let z = T::one() + p.clone() + q.clone();
    let high = T::one() - eps.clone();
    let parts = vec![
        (T::one() / z.clone(), rounding(high.clone(), T::zero())),
        (p.clone() / z.clone(), is_component.with_values(high, T::zero())?),
        (q.clone() / z, rounding(T::zero(), alpha.clone())),
    ];
    let scheme = SignalingScheme::new(g.n(), parts)?;
    certify(g, &scheme)?;
    let mut params = SchemeParams::new("ternary");
    params.alpha = Some(alpha);
    params.epsilon = Some(eps);
    params.p = Some(p);
    params.q = Some(q);
    params.gamma = Some(gamma);
    Ok((scheme, params))
}

fn cheaper<T: Scalar>(
    g: &WeightedGraph,
    a: (SignalingScheme<T>, SchemeParams<T>),
    b: (SignalingScheme<T>, SchemeParams<T>),
) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    let ca = certify(g, &a.0)?.cost;
    let cb = certify(g, &b.0)?.cost;
    Ok(if cb < ca { b } else { a })
}

fn no_info_candidate<T: Scalar>(g: &WeightedGraph) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    let scheme = no_info_scheme::<T>(g)?;
    let mut params = SchemeParams::new("noinfo");
    params.alpha = Some(scheme.space()[0].clone());
    Ok((scheme, params))
}

/// Ternary scheme with a uniformly rounded set as the sparse component, or no-info if cheaper.
pub fn ternary_general<T: Scalar>(g: &WeightedGraph) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    let m = g.total_weight::<T>();
    let noinfo = no_info_candidate(g)?;
    if m.near_zero() {
        return Ok(noinfo);
    }
    let nf = g.n() as f64;
    let ir = solve_opt_ir::<T>(g)?.value.to_f64();
    let gamma = T::from_f64(ir.powf(2.0 / 3.0) * m.to_f64().powf(1.0 / 3.0) * nf.powf(-2.0 / 3.0));
    let r = T::min_of(gamma.clone() * T::from_usize(g.n()) / (T::from_i64(2) * m), T::one());
    if r.near_zero() {
        return Ok(noinfo);
    }
    let comp = PlanComponent::IndependentRounding { marginals: vec![r.clone(); g.n()], on: T::one(), off: T::zero() };
    let (scheme, mut params) = ternary_weighted_scheme(g, comp, gamma)?;
    params.r = Some(r);
    cheaper(g, (scheme, params), noinfo)
}

/// Ternary scheme with a greedy independent set, for graphs whose edge weights are all at least `δ`.
pub fn ternary_min_weight<T: Scalar>(g: &WeightedGraph, delta: &T) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    if let Some(w) = g.min_weight() {
        if T::from_ratio(&w) < *delta {
            return input(format!("edge weight {w} below δ = {delta}"));
        }
    }
    let is = maximal_independent_set(g, &VertexSet::empty(g.n()))?.set;
    let comp = PlanComponent::ExplicitSubset { set: is, on: T::one(), off: T::zero() };
    let ternary = ternary_weighted_scheme(g, comp, T::zero())?;
    cheaper(g, ternary, no_info_candidate(g)?)
}

/// Mixture of rounding the IR optimum at `α` with the stable optimum's constant labeling.
pub fn improve_weighted_scheme<T: Scalar>(g: &WeightedGraph) -> Result<(SignalingScheme<T>, SchemeParams<T>)> {
    let opt = solve_opt::<T>(g)?.value;
    let ir = solve_opt_ir::<T>(g)?;
    let stable = solve_opt_stable::<T>(g)?;
    let opt_ir = ir.value.clone();
    if !(opt_ir < stable.value) || opt_ir.approx_eq(&stable.value) {
        return Err(Error::NoImprovement(format!("OPT^IR = OPT^stable = {opt_ir}")));
    }
    let theta = clamp_unit(&ir.solution.theta);
    let mom = set_moments(g, &PlanComponent::IndependentRounding { marginals: theta.clone(), on: T::one(), off: T::zero() })?;
    let alpha = opt_ir.clone() / mom.induced;
    let eps = improve_weighted_epsilon(g.n(), &opt, &opt_ir, &stable.value);
    let parts = vec![
        (eps.clone(), PlanComponent::IndependentRounding { marginals: theta, on: alpha.clone(), off: T::zero() }),
        (T::one() - eps.clone(), PlanComponent::ConstantLabeling { labels: stable.solution.theta.clone() }),
    ];
    let scheme = SignalingScheme::new(g.n(), parts)?;
    let report = certify(g, &scheme)?;
    let bound = stable.value.clone() - eps.clone() * (stable.value.clone() - opt_ir);
    if !bound.ge_tol(&report.cost) || !(report.cost < stable.value) {
        return Err(Error::Internal(format!("cost {} misses bound {bound}", report.cost)));
    }
    let mut params = SchemeParams::new("mixture");
    params.alpha = Some(alpha);
    params.epsilon = Some(eps);
    params.bound = Some(bound);
    Ok((scheme, params))
}

/// `(PoS−1) / (PoS−1 + OPT^IR(n − OPT^IR + 1)/(OPT^IR + 1))` with `PoS = OPT^stable/OPT`.
pub fn improve_weighted_epsilon<T: Scalar>(n: usize, opt: &T, opt_ir: &T, stable: &T) -> T {
    let one = T::one();
    let gap = stable.clone() / opt.clone() - one.clone();
    let spread = opt_ir.clone() * (T::from_usize(n) - opt_ir.clone() + one.clone()) / (opt_ir.clone() + one);
    gap.clone() / (gap + spread)
}

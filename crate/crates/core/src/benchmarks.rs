//! Workload benchmarks OPT, OPT^IR, OPT^stable and solution predicates.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::lp::{lp_minimize, solve, LinearProgram, LpOutcome, Sense};
use crate::scalar::Scalar;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

/// Default vertex cap for the exponential stable-solution oracle.
pub const STABLE_CAP: usize = 16;

/// A per-vertex contribution vector `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub theta: Vec<T>,
}

impl<T: Scalar> Solution<T> {
    pub fn new(theta: Vec<T>) -> Self {
        Self { theta }
    }

    pub fn norm1(&self) -> T {
        self.theta.iter().fold(T::zero(), |acc, x| acc + x.clone())
    }

    /// Sorted ids with `θ_v > 0`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.theta.len()).filter(|&v| self.theta[v] > T::tol()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.theta.iter().map(Scalar::to_f64).collect()
    }
}

/// Optimum of a covering LP together with the dual witness `φ` (`Wφ ≤ 1`, `φ ≥ 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark<T> {
    pub value: T,
    pub solution: Solution<T>,
    pub dual: Vec<T>,
}

fn covering_lp<T: Scalar>(g: &WeightedGraph, capped: bool) -> Result<Benchmark<T>> {
    // Solved through its packing dual, whose origin is feasible:
    // max 1ᵀφ − [capped] 1ᵀψ  s.t.  Wφ − [capped] ψ ≤ 1,  φ, ψ ≥ 0.
    // The primal θ is read off the row multipliers.
    let n = g.n();
    let w = g.dense::<T>();
    let vars = if capped { 2 * n } else { n };
    let mut objective = vec![-T::one(); n];
    if capped {
        objective.extend(std::iter::repeat(T::one()).take(n));
    }
    let mut lp = LinearProgram::new(objective);
    for (v, row) in w.into_iter().enumerate() {
        let mut coeffs = row;
        if capped {
            coeffs.resize(vars, T::zero());
            coeffs[n + v] = -T::one();
        }
        lp.push(coeffs, Sense::Le, T::one());
    }
    let sol = lp_minimize(&lp)?;
    let theta: Vec<T> = sol.duals.iter().map(|y| -y.clone()).collect();
    let solution = Solution::new(theta);
    Ok(Benchmark { value: solution.norm1(), solution, dual: sol.point[..n].to_vec() })
}

/// `min 1ᵀθ` subject to `Wθ ≥ 1`, `θ ≥ 0`.
pub fn solve_opt<T: Scalar>(g: &WeightedGraph) -> Result<Benchmark<T>> {
    covering_lp(g, false)
}

/// `min 1ᵀθ` subject to `Wθ ≥ 1`, `0 ≤ θ ≤ 1`.
pub fn solve_opt_ir<T: Scalar>(g: &WeightedGraph) -> Result<Benchmark<T>> {
    covering_lp(g, true)
}

/// Objective of the packing dual at `φ`, or `None` when `φ` is not dual feasible.
pub fn dual_value<T: Scalar>(g: &WeightedGraph, phi: &[T]) -> Option<T> {
    if phi.len() != g.n() || phi.iter().any(|x| *x < -T::tol()) {
        return None;
    }
    let load = g.apply(phi);
    if load.iter().any(|x| *x > T::one() + T::tol()) {
        return None;
    }
    Some(phi.iter().fold(T::zero(), |acc, x| acc + x.clone()))
}

/// Best stable solution found by support enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct StableOptimum<T> {
    pub value: T,
    pub solution: Solution<T>,
    pub supports_checked: usize,
}

fn support_lp<T: Scalar>(w: &[Vec<T>], mask: u64) -> Result<Option<Vec<T>>> {
    let n = w.len();
    let ids: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
    let mut lp = LinearProgram::new(vec![T::one(); ids.len()]);
    for (v, row) in w.iter().enumerate() {
        let coeffs: Vec<T> = ids.iter().map(|&u| row[u].clone()).collect();
        let sense = if mask >> v & 1 == 1 { Sense::Eq } else { Sense::Ge };
        lp.push(coeffs, sense, T::one());
    }
    Ok(match solve(&lp)? {
        LpOutcome::Optimal(s) => {
            let mut theta = vec![T::zero(); n];
            for (x, &u) in s.point.into_iter().zip(&ids) {
                theta[u] = x;
            }
            Some(theta)
        }
        _ => None,
    })
}

fn dominated_by(g: &WeightedGraph, mask: u64) -> bool {
    (0..g.n()).all(|v| mask >> v & 1 == 1 || g.neighbors(v).iter().any(|&(u, _)| mask >> u & 1 == 1))
}

/// Exact OPT^stable by enumerating supports `T ⊆ V`.
///
/// Every support is screened with a float LP; supports within `1e-6` of the float optimum are
/// re-solved in `T`. Ties go to the lexicographically smallest support.
pub fn solve_opt_stable_capped<T: Scalar>(g: &WeightedGraph, cap: usize) -> Result<StableOptimum<T>> {
    let n = g.n();
    if n > cap || n > 63 {
        return Err(Error::Capacity(format!("stable oracle limited to n <= {cap}, got {n}")));
    }
    let wf = g.dense::<f64>();
    let masks: Vec<u64> = (1..(1u64 << n)).filter(|&m| dominated_by(g, m)).collect();
    let screened: Vec<(f64, u64)> = masks
        .par_iter()
        .filter_map(|&m| match support_lp::<f64>(&wf, m) {
            Ok(Some(theta)) => Some(Ok((theta.iter().sum::<f64>(), m))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(best_float) = screened.iter().map(|p| p.0).reduce(f64::min) else {
        return Err(Error::NoStableFound);
    };
    let w = g.dense::<T>();
    let mut best: Option<(T, Vec<usize>, Vec<T>)> = None;
    for &(value, mask) in &screened {
        if value > best_float + 1e-6 {
            continue;
        }
        let Some(theta) = support_lp::<T>(&w, mask)? else {
            continue;
        };
        let sol = Solution::new(theta);
        let (val, support) = (sol.norm1(), sol.support());
        let better = match &best {
            None => true,
            Some((bv, bs, _)) => {
                if val.approx_eq(bv) {
                    support < *bs
                } else {
                    val < *bv
                }
            }
        };
        if better {
            best = Some((val, support, sol.theta));
        }
    }
    let (value, _, theta) = best.ok_or(Error::NoStableFound)?;
    let solution = Solution::new(theta);
    if !is_stable(g, &solution) || solution.theta.iter().any(|x| *x > T::one() + T::tol()) {
        return Err(Error::Internal("stable oracle returned an unstable profile".into()));
    }
    Ok(StableOptimum { value, solution, supports_checked: masks.len() })
}

pub fn solve_opt_stable<T: Scalar>(g: &WeightedGraph) -> Result<StableOptimum<T>> {
    solve_opt_stable_capped(g, STABLE_CAP)
}

/// `Wθ ≥ 1` and `θ ≥ 0` within tolerance.
pub fn is_feasible<T: Scalar>(g: &WeightedGraph, sol: &Solution<T>) -> bool {
    sol.theta.len() == g.n()
        && sol.theta.iter().all(|x| x.ge_tol(&T::zero()))
        && g.apply(&sol.theta).iter().all(|u| u.ge_tol(&T::one()))
}

/// `θ ≤ 1` coordinate-wise.
pub fn is_ir<T: Scalar>(sol: &Solution<T>) -> bool {
    sol.theta.iter().all(|x| T::one().ge_tol(x))
}

/// Feasible and every positive contributor is tight.
pub fn is_stable<T: Scalar>(g: &WeightedGraph, sol: &Solution<T>) -> bool {
    if !is_feasible(g, sol) {
        return false;
    }
    let load = g.apply(&sol.theta);
    sol.theta
        .iter()
        .zip(&load)
        .all(|(x, u)| x.near_zero() || u.approx_eq(&T::one()))
}

/// `∥Wθ∥₁ − n`.
pub fn wastefulness_gap<T: Scalar>(g: &WeightedGraph, sol: &Solution<T>) -> Result<T> {
    if !is_feasible(g, sol) {
        return Err(Error::Input("wastefulness is defined for feasible solutions".into()));
    }
    let total = g.apply(&sol.theta).into_iter().fold(T::zero(), |a, b| a + b);
    Ok(total - T::from_usize(g.n()))
}

/// Summary of all three benchmarks.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub n: usize,
    pub opt: String,
    pub opt_ir: String,
    pub opt_stable: Option<String>,
    pub pos: Option<String>,
    pub stable_status: String,
    pub witnesses: Witnesses,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witnesses {
    pub opt: Vec<String>,
    pub opt_ir: Vec<String>,
    pub opt_stable: Option<Vec<String>>,
    pub opt_dual: Vec<String>,
}

fn strings<T: Scalar>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

pub fn benchmark_report<T: Scalar>(g: &WeightedGraph, cap: usize) -> Result<BenchmarkReport> {
    let opt = solve_opt::<T>(g)?;
    let ir = solve_opt_ir::<T>(g)?;
    let (opt_stable, pos, status, witness) = match solve_opt_stable_capped::<T>(g, cap) {
        Ok(st) => {
            let pos = st.value.clone() / opt.value.clone();
            (Some(st.value.to_string()), Some(pos.to_string()), "found", Some(strings(&st.solution.theta)))
        }
        Err(Error::Capacity(_)) => (None, None, "over cap", None),
        Err(Error::NoStableFound) => (None, None, "none found", None),
        Err(e) => return Err(e),
    };
    Ok(BenchmarkReport {
        n: g.n(),
        opt: opt.value.to_string(),
        opt_ir: ir.value.to_string(),
        opt_stable,
        pos,
        stable_status: status.to_string(),
        witnesses: Witnesses {
            opt: strings(&opt.solution.theta),
            opt_ir: strings(&ir.solution.theta),
            opt_stable: witness,
            opt_dual: strings(&opt.dual),
        },
    })
}

/// Exact-rational benchmark triple used by constructions that need all three values.
pub fn exact_triple(g: &WeightedGraph) -> Result<(BigRational, BigRational, BigRational)> {
    let opt = solve_opt::<BigRational>(g)?.value;
    let ir = solve_opt_ir::<BigRational>(g)?.value;
    let st = solve_opt_stable::<BigRational>(g)?.value;
    Ok((opt, ir, st))
}

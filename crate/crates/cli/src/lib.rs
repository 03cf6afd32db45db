//! Experiment harness around `persuade_core`: graph generation, benchmark and
//! construction commands, certificate checks and family sweeps.

pub mod commands;
pub mod error;
pub mod sweep;

pub use error::{CliError, CliResult};

use persuade_core::constructions::{
    binary_unit_scheme, certify, improve_unit_scheme, improve_weighted_scheme, match_stable_scheme, no_info_scheme,
    ternary_general, ternary_min_weight, SchemeParams,
};
use persuade_core::graph::{
    gen_centers_light_clique, gen_clique_leaves, gen_double_star, gen_k_star_clique, gen_triangle_centers,
    WeightedGraph,
};
use persuade_core::scalar::Scalar;
use persuade_core::schemes::{SignalingScheme, SlackReport};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Float,
    Rational,
}

impl FromStr for Mode {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            _ => Err(CliError::Input(format!("unknown mode `{s}`"))),
        }
    }
}

/// Parameterized graph families; the size parameter is passed separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    DoubleStar,
    /// `stars` stars with clique-connected centers; the size parameter is n.
    KStarClique { stars: usize },
    TriangleCenters,
    CliqueLeaves,
    /// Size parameter is n.
    LightClique,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::DoubleStar => "double-star".into(),
            Family::KStarClique { stars } => format!("k-star-clique:{stars}"),
            Family::TriangleCenters => "triangle-centers".into(),
            Family::CliqueLeaves => "clique-leaves".into(),
            Family::LightClique => "light-clique".into(),
        }
    }
}

impl FromStr for Family {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "double-star" => Ok(Family::DoubleStar),
            "triangle-centers" => Ok(Family::TriangleCenters),
            "clique-leaves" => Ok(Family::CliqueLeaves),
            "light-clique" => Ok(Family::LightClique),
            _ => {
                let stars = s
                    .strip_prefix("k-star-clique:")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| CliError::Input(format!("unknown family `{s}`")))?;
                Ok(Family::KStarClique { stars })
            }
        }
    }
}

pub fn family_graph(family: &Family, size: usize) -> CliResult<WeightedGraph> {
    Ok(match family {
        Family::DoubleStar => gen_double_star(size)?,
        Family::KStarClique { stars } => gen_k_star_clique(*stars, size)?,
        Family::TriangleCenters => gen_triangle_centers(size)?,
        Family::CliqueLeaves => gen_clique_leaves(size)?,
        Family::LightClique => gen_centers_light_clique(size)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeName {
    NoInfo,
    BinaryUnit,
    MatchStable,
    ImproveUnit,
    Ternary,
    TernaryMinWeight,
    ImproveWeighted,
}

impl SchemeName {
    pub const ALL: [SchemeName; 7] = [
        SchemeName::NoInfo,
        SchemeName::BinaryUnit,
        SchemeName::MatchStable,
        SchemeName::ImproveUnit,
        SchemeName::Ternary,
        SchemeName::TernaryMinWeight,
        SchemeName::ImproveWeighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeName::NoInfo => "noinfo",
            SchemeName::BinaryUnit => "binary-unit",
            SchemeName::MatchStable => "match-stable",
            SchemeName::ImproveUnit => "improve-unit",
            SchemeName::Ternary => "ternary",
            SchemeName::TernaryMinWeight => "ternary-minw",
            SchemeName::ImproveWeighted => "improve-weighted",
        }
    }

    /// Weighted-graph constructions are measured against the IR optimum.
    pub fn uses_ir_benchmark(self) -> bool {
        matches!(self, SchemeName::Ternary | SchemeName::TernaryMinWeight | SchemeName::ImproveWeighted)
    }

    pub fn randomized(self) -> bool {
        self == SchemeName::BinaryUnit
    }
}

impl FromStr for SchemeName {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        SchemeName::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown scheme `{s}`")))
    }
}

/// A certified construction.
#[derive(Debug, Clone)]
pub struct Built<T> {
    pub scheme: SignalingScheme<T>,
    pub report: SlackReport<T>,
    pub params: SchemeParams<T>,
}

/// Runs the named construction and certifies it with the exact slack check.
/// `delta` overrides the minimum edge weight used by `ternary-minw`.
pub fn build_scheme<T: Scalar>(g: &WeightedGraph, name: SchemeName, seed: u64, delta: Option<T>) -> CliResult<Built<T>> {
    let (scheme, params) = match name {
        SchemeName::NoInfo => (no_info_scheme::<T>(g)?, SchemeParams::new("noinfo")),
        SchemeName::BinaryUnit => binary_unit_scheme::<T>(g, seed)?,
        SchemeName::MatchStable => (match_stable_scheme::<T>(g)?, SchemeParams::new("match-stable")),
        SchemeName::ImproveUnit => improve_unit_scheme::<T>(g)?,
        SchemeName::Ternary => ternary_general::<T>(g)?,
        SchemeName::TernaryMinWeight => {
            let delta = match delta {
                Some(d) => d,
                None => {
                    let w = g.min_weight().ok_or_else(|| CliError::Input("graph has no edges".into()))?;
                    T::from_ratio(&w)
                }
            };
            ternary_min_weight::<T>(g, &delta)?
        }
        SchemeName::ImproveWeighted => improve_weighted_scheme::<T>(g)?,
    };
    let report = certify(g, &scheme)?;
    Ok(Built { scheme, report, params })
}

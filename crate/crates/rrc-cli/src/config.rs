//! Run configuration: a JSON document validated against the module
//! preconditions before dispatch. Unknown keys are rejected so stale or
//! misspelled fixtures fail loudly.

use std::path::PathBuf;

use serde::Deserialize;

use rrc::curvature::{
    make_random_class_profile_with_amplitude, Family, ManifoldModel, RicClassParams,
};

fn default_steps() -> usize {
    rrc::candle::DEFAULT_STEPS
}

fn default_grid_points() -> usize {
    rrc::comparison::DEFAULT_R_GRID
}

fn default_nodes() -> usize {
    129
}

fn default_amplitude() -> f64 {
    1.0
}

/// Top-level run configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldSpec,
    /// Class parameters (ρ, κ); required by `classify`, `compare`,
    /// `extremal`, and by `random_class` manifolds.
    #[serde(default)]
    pub params: Option<ParamsSpec>,
    /// Geodesic length / comparison radius.
    pub r: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output path; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Sweep settings, required by the `sweep` subcommand.
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub rho: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub command: SweepCommand,
    pub seed_count: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Classify,
    Candle,
    Compare,
    Extremal,
}

/// Manifold description.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    /// Constant sectional curvature `kappa`, dimension `n`.
    Constant { kappa: f64, n: usize },
    /// Rank-one symmetric space of real dimension `n` (`family` one of
    /// R, C, H, O), optionally rescaled.
    RankOne {
        family: FamilySpec,
        n: usize,
        #[serde(default)]
        scale: Option<f64>,
    },
    /// Seeded random geodesic profile satisfying the class hypothesis of
    /// `params` by construction; `nodes` controls the sampling density and
    /// `amplitude` the perturbation strength.
    RandomClass {
        n: usize,
        #[serde(default = "default_nodes")]
        nodes: usize,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum FamilySpec {
    R,
    C,
    H,
    O,
}

impl From<FamilySpec> for Family {
    fn from(f: FamilySpec) -> Family {
        match f {
            FamilySpec::R => Family::R,
            FamilySpec::C => Family::C,
            FamilySpec::H => Family::H,
            FamilySpec::O => Family::O,
        }
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
        if !config.r.is_finite() || config.r <= 0.0 {
            anyhow::bail!(
                "config field `r` must be positive and finite, got {}",
                config.r
            );
        }
        Ok(config)
    }

    pub fn params(&self) -> anyhow::Result<RicClassParams> {
        let p = self
            .params
            .ok_or_else(|| anyhow::anyhow!("this command requires the `params` config field"))?;
        Ok(RicClassParams::new(p.rho, p.kappa)?)
    }

    /// Builds the manifold model; `random_class` draws from `params` with
    /// this config's seed.
    pub fn model(&self) -> anyhow::Result<ManifoldModel> {
        match &self.manifold {
            ManifoldSpec::Constant { kappa, n } => Ok(ManifoldModel::constant(*kappa, *n)?),
            ManifoldSpec::RankOne { family, n, scale } => Ok(match scale {
                Some(s) => ManifoldModel::rank_one_scaled((*family).into(), *n, *s)?,
                None => ManifoldModel::rank_one((*family).into(), *n)?,
            }),
            ManifoldSpec::RandomClass {
                n,
                nodes,
                amplitude,
            } => {
                let params = self.params()?;
                let profile = make_random_class_profile_with_amplitude(
                    *n, &params, self.r, self.seed, *nodes, *amplitude,
                )?;
                Ok(ManifoldModel::explicit(profile))
            }
        }
    }
}

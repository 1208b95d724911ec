//! Correlation kernels and partial cross mapping.
//!
//! Partial cross mapping asks whether the skill of reconstructing a putative cause `X1`
//! from the embedding of a putative effect `X2` survives once the part of that skill
//! routed through a set of intermediate variables is partialled out:
//!
//! * apparent score: `rho_all = |corr(X1, X1_hat[X2])|`
//! * direct score: `rho_direct = |parcorr(X1, X1_hat[X2] | X1_hat[Conds_hat[X2]])|`
//!
//! and the link is called direct when `gamma = rho_direct / rho_all` reaches a threshold.

use serde::{Deserialize, Serialize};

use crate::crossmap::SimplexMap;
use crate::embedding::{
    build_delay_embedding, build_multivariate_embedding, stack_delay_vectors, EmbedParams,
    Embedding, TimeSeries,
};
use crate::error::{Error, Result};

const SINGULAR_EPS: f64 = 1e-12;

fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

/// Pearson product-moment correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::data(format!(
            "correlation needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::degenerate("correlation needs at least two samples"));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(Error::degenerate("zero-variance series"));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// First-order partial correlation of `a` and `b` given `c`.
pub fn partial_correlation(a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
    let r_ab = correlation(a, b)?;
    let r_ac = correlation(a, c)?;
    let r_bc = correlation(b, c)?;
    let den = (1.0 - r_ac * r_ac) * (1.0 - r_bc * r_bc);
    if den < SINGULAR_EPS {
        return Err(Error::SingularConditioning(format!(
            "conditioning series is collinear (r_ac = {r_ac}, r_bc = {r_bc})"
        )));
    }
    Ok(((r_ab - r_ac * r_bc) / den.sqrt()).clamp(-1.0, 1.0))
}

/// How the conditioned path carries the condition state from the effect's embedding to the
/// cause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionMapping {
    /// Every coordinate of the stacked condition embedding is cross-mapped with the
    /// effect's neighbour weights; the resulting point cloud is the source for the second
    /// hop.
    #[default]
    ProjectEmbedding,
    /// Each condition series is cross-mapped as a scalar, the reconstructions are
    /// re-embedded with the same `(tau, E)` and stacked.
    ReEmbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PCMConfig {
    pub embed: EmbedParams,
    pub gamma_star: f64,
    /// Threshold for the three-way absolute-score rule, when used.
    pub legacy_h: Option<f64>,
    #[serde(default)]
    pub condition_mapping: ConditionMapping,
}

impl PCMConfig {
    pub fn new(embed: EmbedParams, gamma_star: f64) -> Result<Self> {
        let cfg = Self {
            embed,
            gamma_star,
            legacy_h: None,
            condition_mapping: ConditionMapping::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.embed.validate()?;
        if !(self.gamma_star > 0.0 && self.gamma_star < 1.0) {
            return Err(Error::param(format!(
                "gamma* must lie in (0, 1), got {}",
                self.gamma_star
            )));
        }
        if let Some(h) = self.legacy_h {
            if !(0.0..1.0).contains(&h) {
                return Err(Error::param(format!("H must lie in [0, 1), got {h}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PCMResult {
    pub rho_all: f64,
    pub rho_direct: f64,
    pub gamma: f64,
}

impl PCMResult {
    fn from_scores(rho_all: f64, rho_direct: f64) -> Self {
        let gamma = if rho_all > 0.0 {
            rho_direct / rho_all
        } else {
            0.0
        };
        Self {
            rho_all,
            rho_direct,
            gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkLabel {
    Direct,
    Indirect,
}

/// Direct iff `gamma >= gamma_star`.
pub fn classify_link(result: &PCMResult, gamma_star: f64) -> LinkLabel {
    if result.gamma >= gamma_star {
        LinkLabel::Direct
    } else {
        LinkLabel::Indirect
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegacyLabel {
    Direct,
    IndirectOnly,
    NoCausality,
}

/// Three-way rule on absolute scores against a single threshold `h`.
pub fn classify_legacy(result: &PCMResult, h: f64) -> LegacyLabel {
    if result.rho_all < h {
        LegacyLabel::NoCausality
    } else if result.rho_direct >= h {
        LegacyLabel::Direct
    } else {
        LegacyLabel::IndirectOnly
    }
}

fn check_lengths(series: &[&TimeSeries]) -> Result<usize> {
    let len = series[0].len();
    if let Some(s) = series.iter().find(|s| s.len() != len) {
        return Err(Error::data(format!(
            "series `{}` has length {} but `{}` has length {len}",
            s.name,
            s.len(),
            series[0].name
        )));
    }
    Ok(len)
}

/// Neighbour map for the second hop of the conditioned path.
fn conditioned_map(
    effect_map: &SimplexMap,
    conds: &[TimeSeries],
    cfg: &PCMConfig,
) -> Result<SimplexMap> {
    let p = cfg.embed;
    let source = match cfg.condition_mapping {
        ConditionMapping::ProjectEmbedding => {
            let cond_emb = build_multivariate_embedding(conds, p)?;
            effect_map.project_embedding(&cond_emb)?
        }
        ConditionMapping::ReEmbed => {
            let recons = conds
                .iter()
                .map(|c| effect_map.project(c.values()))
                .collect::<Result<Vec<_>>>()?;
            if recons[0].values.len() <= p.offset() {
                return Err(Error::param(
                    "series too short to re-embed the reconstructed conditions",
                ));
            }
            let slices: Vec<&[f64]> = recons.iter().map(|r| r.values.as_slice()).collect();
            let data = stack_delay_vectors(&slices, p.tau, p.dim);
            Embedding::from_points(
                data,
                conds.len() * p.dim,
                recons[0].offset + p.offset(),
                conds.iter().map(|c| c.name.clone()).collect(),
                p,
            )?
        }
    };
    SimplexMap::with_exclusion(&source, p.k, p.exclusion_radius)
}

/// Partial cross mapping of `x1 => x2` conditioned on the set `conds`.
pub fn multi_pcm(
    x1: &TimeSeries,
    x2: &TimeSeries,
    conds: &[TimeSeries],
    cfg: &PCMConfig,
) -> Result<PCMResult> {
    cfg.validate()?;
    if conds.is_empty() {
        return Err(Error::param(
            "partial cross mapping needs at least one condition",
        ));
    }
    let mut all: Vec<&TimeSeries> = vec![x1, x2];
    all.extend(conds.iter());
    let len = check_lengths(&all)?;
    let p = cfg.embed;
    if len <= p.offset() + p.k {
        return Err(Error::param(format!(
            "series length {len} too short for tau={}, E={}, k={}",
            p.tau, p.dim, p.k
        )));
    }

    let effect_emb = build_delay_embedding(x2, p)?;
    let effect_map = SimplexMap::with_exclusion(&effect_emb, p.k, p.exclusion_radius)?;
    let apparent = effect_map.project(x1.values())?;

    let cond_map = conditioned_map(&effect_map, conds, cfg)?;
    let conditioned = cond_map.project(x1.values())?;

    let from = apparent.offset.max(conditioned.offset);
    let to = apparent.end().min(conditioned.end());
    let truth = &x1.values()[from..to];
    let a = apparent.slice(from, to);
    let c = conditioned.slice(from, to);

    let rho_all = correlation(truth, a)?.abs();
    let rho_direct = partial_correlation(truth, a, c)?.abs();
    Ok(PCMResult::from_scores(rho_all, rho_direct))
}

/// Partial cross mapping with a single condition: potential cause `x`, condition `y`,
/// potential effect `z`.
pub fn pcm_univariate(
    x: &TimeSeries,
    y: &TimeSeries,
    z: &TimeSeries,
    cfg: &PCMConfig,
) -> Result<PCMResult> {
    multi_pcm(x, z, std::slice::from_ref(y), cfg)
}

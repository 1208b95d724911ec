//! Two-phase discovery driver.
//!
//! Phase 1 runs bivariate cross mapping on every unordered pair and orients an edge toward
//! the better-reconstructed direction when the scores clear the gate. Phase 2 revisits
//! every edge that also has a mediated route in the phase-1 graph and removes it when
//! partial cross mapping conditioned on all intermediate nodes says the link is indirect.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossmap::{ccm_pair, CCMResult};
use crate::embedding::{Dataset, EmbedParams, TimeSeries};
use crate::error::{Error, Result};
use crate::graph::{CausalGraph, DEFAULT_PATH_CAP};
use crate::pcm::{classify_link, multi_pcm, ConditionMapping, LinkLabel, PCMConfig, PCMResult};

/// Default ratio threshold for the simulated benchmark systems.
pub const DEFAULT_GAMMA_STAR: f64 = 0.45;
/// Default phase-1 gate on absolute cross-map scores.
pub const DEFAULT_CCM_THRESHOLD: f64 = 0.5;

/// Which of a pair's two scores must reach the phase-1 threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairGate {
    /// The stronger direction must reach the threshold; a pair is skipped only when both
    /// scores fall below it. Unidirectional coupling leaves the reverse score near zero, so
    /// this is the rule that can recover one-way edges.
    #[default]
    Stronger,
    /// Both directions must reach the threshold.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MXMapConfig {
    pub embed: EmbedParams,
    pub ccm_threshold: f64,
    #[serde(default)]
    pub gate: PairGate,
    pub gamma_star: f64,
    /// Score differences up to this size count as ties, which yield a bidirectional edge.
    pub tie_epsilon: f64,
    #[serde(default)]
    pub condition_mapping: ConditionMapping,
    /// Cap on simple paths enumerated per edge in phase 2.
    pub path_cap: usize,
}

impl MXMapConfig {
    pub fn new(embed: EmbedParams, gamma_star: f64) -> Result<Self> {
        let cfg = Self {
            embed,
            ccm_threshold: DEFAULT_CCM_THRESHOLD,
            gate: PairGate::default(),
            gamma_star,
            tie_epsilon: 0.0,
            condition_mapping: ConditionMapping::default(),
            path_cap: DEFAULT_PATH_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for the simulated benchmark systems: `tau = 1`, `E = 4`, `k = E + 1`,
    /// `gamma* = 0.45`.
    pub fn simulated() -> Self {
        Self::new(EmbedParams::new(1, 4).expect("valid"), DEFAULT_GAMMA_STAR).expect("valid")
    }

    /// Threshold-sweep setting: `tau = 1`, `E = 7`, `k = E + 1`, `gamma* = 0.45`.
    pub fn sweep_protocol() -> Self {
        Self::new(EmbedParams::new(1, 7).expect("valid"), DEFAULT_GAMMA_STAR).expect("valid")
    }

    /// Segment-consistency protocol: `tau = 2`, `E = 6`, `k = 10`, `gamma* = 0.6`.
    pub fn segment_protocol() -> Self {
        Self::new(EmbedParams::with_k(2, 6, 10).expect("valid"), 0.6).expect("valid")
    }

    pub fn validate(&self) -> Result<()> {
        self.embed.validate()?;
        if !(0.0..=1.0).contains(&self.ccm_threshold) {
            return Err(Error::param(format!(
                "ccm threshold must lie in [0, 1], got {}",
                self.ccm_threshold
            )));
        }
        if !(self.gamma_star > 0.0 && self.gamma_star < 1.0) {
            return Err(Error::param(format!(
                "gamma* must lie in (0, 1), got {}",
                self.gamma_star
            )));
        }
        if !(self.tie_epsilon >= 0.0 && self.tie_epsilon.is_finite()) {
            return Err(Error::param(format!(
                "tie epsilon must be finite and >= 0, got {}",
                self.tie_epsilon
            )));
        }
        if self.path_cap == 0 {
            return Err(Error::param("path cap must be positive"));
        }
        Ok(())
    }

    pub fn pcm_config(&self) -> PCMConfig {
        PCMConfig {
            embed: self.embed,
            gamma_star: self.gamma_star,
            legacy_h: None,
            condition_mapping: self.condition_mapping,
        }
    }
}

/// Phase-1 outcome for one unordered pair `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub i: usize,
    pub j: usize,
    /// `None` when the pair could not be scored; see `error`.
    pub result: Option<CCMResult>,
    pub error: Option<String>,
}

/// Phase-2 outcome for one tested edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneRecord {
    pub cause: usize,
    pub effect: usize,
    pub conds: Vec<usize>,
    pub result: Option<PCMResult>,
    pub removed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryReport {
    pub phase1_graph: CausalGraph,
    pub final_graph: CausalGraph,
    pub pair_scores: Vec<PairScore>,
    pub prune_log: Vec<PruneRecord>,
}

/// Which edges a scored pair contributes.
fn orient(r: &CCMResult, cfg: &MXMapConfig) -> (bool, bool) {
    let (f, b) = (r.beta_forward.abs(), r.beta_backward.abs());
    let gated = match cfg.gate {
        PairGate::Stronger => f.max(b),
        PairGate::Both => f.min(b),
    };
    if gated < cfg.ccm_threshold {
        return (false, false);
    }
    if cfg.tie_epsilon > 0.0 && (f - b).abs() <= cfg.tie_epsilon {
        return (true, true);
    }
    (f > b, b > f)
}

fn check_dataset(data: &Dataset, cfg: &MXMapConfig) -> Result<()> {
    cfg.validate()?;
    let need = cfg.embed.offset() + cfg.embed.k + 1;
    if data.len() < need {
        return Err(Error::param(format!(
            "series length {} too short; tau={}, E={}, k={} need at least {need}",
            data.len(),
            cfg.embed.tau,
            cfg.embed.dim,
            cfg.embed.k
        )));
    }
    Ok(())
}

/// Builds the initial graph from pairwise cross-map scores. Pairs that cannot be scored are
/// logged and contribute no edge; if no pair can be scored the first error is returned.
pub fn phase1(data: &Dataset, cfg: &MXMapConfig) -> Result<(CausalGraph, Vec<PairScore>)> {
    check_dataset(data, cfg)?;
    let k = data.width();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<CCMResult>> = pairs
        .par_iter()
        .map(|&(i, j)| ccm_pair(data.variable(i), data.variable(j), cfg.embed))
        .collect();
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        if results.iter().all(|r| r.is_err()) {
            return Err(e.clone());
        }
    }
    let scores: Vec<PairScore> = pairs
        .iter()
        .zip(results)
        .map(|(&(i, j), r)| match r {
            Ok(r) => PairScore {
                i,
                j,
                result: Some(r),
                error: None,
            },
            Err(e) => PairScore {
                i,
                j,
                result: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let mut g = CausalGraph::empty(data.names());
    for s in &scores {
        if let Some(r) = &s.result {
            let (fwd, bwd) = orient(r, cfg);
            if fwd {
                g.add_edge(s.i, s.j)?;
            }
            if bwd {
                g.add_edge(s.j, s.i)?;
            }
        }
    }
    Ok((g, scores))
}

/// Prunes edges whose influence is carried by intermediate nodes. Condition sets come from
/// the input graph as given; removals are applied afterwards.
pub fn phase2(
    data: &Dataset,
    g: &CausalGraph,
    cfg: &MXMapConfig,
) -> Result<(CausalGraph, Vec<PruneRecord>)> {
    check_dataset(data, cfg)?;
    if g.names() != data.names().as_slice() {
        return Err(Error::data("graph and dataset list different variables"));
    }
    let mut candidates = Vec::new();
    for (i, j) in g.edges() {
        if g.has_indirect_path(i, j) {
            let conds: Vec<usize> = g
                .intermediate_nodes_capped(i, j, cfg.path_cap)?
                .into_iter()
                .collect();
            candidates.push((i, j, conds));
        }
    }
    let pcm_cfg = cfg.pcm_config();
    let log: Vec<PruneRecord> = candidates
        .into_par_iter()
        .map(|(i, j, conds)| {
            let cond_series: Vec<TimeSeries> =
                conds.iter().map(|&c| data.variable(c).clone()).collect();
            match multi_pcm(data.variable(i), data.variable(j), &cond_series, &pcm_cfg) {
                Ok(r) => PruneRecord {
                    cause: i,
                    effect: j,
                    conds,
                    removed: classify_link(&r, cfg.gamma_star) == LinkLabel::Indirect,
                    result: Some(r),
                    error: None,
                },
                Err(e) => PruneRecord {
                    cause: i,
                    effect: j,
                    conds,
                    result: None,
                    removed: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut pruned = g.clone();
    for rec in log.iter().filter(|r| r.removed) {
        pruned.remove_edge(rec.cause, rec.effect)?;
    }
    Ok((pruned, log))
}

/// Runs both phases.
pub fn discover(data: &Dataset, cfg: &MXMapConfig) -> Result<DiscoveryReport> {
    if data.width() < 2 {
        return Err(Error::param("discovery needs at least two variables"));
    }
    let (phase1_graph, pair_scores) = phase1(data, cfg)?;
    let (final_graph, prune_log) = phase2(data, &phase1_graph, cfg)?;
    Ok(DiscoveryReport {
        phase1_graph,
        final_graph,
        pair_scores,
        prune_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(f: f64, b: f64) -> CCMResult {
        CCMResult {
            beta_forward: f,
            beta_backward: b,
            library_length: 100,
        }
    }

    #[test]
    fn gate_and_orientation() {
        let cfg = MXMapConfig::simulated();
        assert_eq!(orient(&result(0.9, 0.6), &cfg), (true, false));
        assert_eq!(orient(&result(0.6, 0.9), &cfg), (false, true));
        assert_eq!(orient(&result(0.9, 0.1), &cfg), (true, false));
        assert_eq!(orient(&result(0.4, 0.45), &cfg), (false, false));
        assert_eq!(orient(&result(-0.9, 0.6), &cfg), (true, false));
        assert_eq!(orient(&result(0.8, 0.8), &cfg), (false, false));
    }

    #[test]
    fn both_gate_needs_two_passing_scores() {
        let mut cfg = MXMapConfig::simulated();
        cfg.gate = PairGate::Both;
        assert_eq!(orient(&result(0.9, 0.6), &cfg), (true, false));
        assert_eq!(orient(&result(0.9, 0.4), &cfg), (false, false));
    }

    #[test]
    fn ties_become_bidirectional() {
        let mut cfg = MXMapConfig::simulated();
        cfg.tie_epsilon = 0.01;
        assert_eq!(orient(&result(0.8, 0.805), &cfg), (true, true));
        assert_eq!(orient(&result(0.8, 0.9), &cfg), (false, true));
    }

    #[test]
    fn config_validation() {
        let mut cfg = MXMapConfig::simulated();
        cfg.ccm_threshold = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = MXMapConfig::simulated();
        cfg.tie_epsilon = -0.1;
        assert!(cfg.validate().is_err());
        assert!(MXMapConfig::new(EmbedParams::new(1, 3).unwrap(), 1.0).is_err());
    }

    #[test]
    fn all_pairs_failing_is_an_error() {
        let flat = |n: &str| TimeSeries::new(n, vec![0.5; 80]).unwrap();
        let d = Dataset::new(vec![flat("a"), flat("b"), flat("c")]).unwrap();
        let err = discover(&d, &MXMapConfig::simulated()).unwrap_err();
        assert!(err.is_numerical(), "{err}");
    }

    #[test]
    fn single_variable_rejected() {
        let d = Dataset::new(vec![TimeSeries::new("a", vec![0.1; 50]).unwrap()]).unwrap();
        assert!(discover(&d, &MXMapConfig::simulated()).is_err());
    }
}

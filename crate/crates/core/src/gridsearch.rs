//! Partial cross mapping over `(tau, E)` grids and ratio-threshold sweeps.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{Dataset, EmbedParams, TimeSeries};
use crate::error::{Error, Result};
use crate::graph::CausalGraph;
use crate::pcm::{classify_link, multi_pcm, ConditionMapping, LinkLabel, PCMConfig, PCMResult};
use crate::simgen::{generate, preset, NoiseConfig, PRESET_NAMES};

/// Default ratio threshold for grid labels.
pub const DEFAULT_THRESHOLD: f64 = 0.45;

/// One surface of a [`GridResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surface {
    RhoAll,
    RhoDirect,
    Ratio,
    Label,
}

impl Surface {
    pub const ALL: [Surface; 4] = [
        Surface::RhoAll,
        Surface::RhoDirect,
        Surface::Ratio,
        Surface::Label,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            Surface::RhoAll => "rho_all",
            Surface::RhoDirect => "rho_direct",
            Surface::Ratio => "ratio",
            Surface::Label => "label",
        }
    }
}

/// Scores on a `tau x E` grid. Cells that failed hold `None` and are listed in `failures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub tau_range: Vec<usize>,
    pub dim_range: Vec<usize>,
    pub threshold: f64,
    /// `cells[a][b]` is the result at `tau_range[a]`, `dim_range[b]`.
    pub cells: Vec<Vec<Option<PCMResult>>>,
    pub failures: Vec<GridFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFailure {
    pub tau: usize,
    pub dim: usize,
    pub error: String,
}

impl GridResult {
    pub fn value(&self, surface: Surface, a: usize, b: usize) -> Option<f64> {
        let r = self.cells[a][b]?;
        Some(match surface {
            Surface::RhoAll => r.rho_all,
            Surface::RhoDirect => r.rho_direct,
            Surface::Ratio => r.gamma,
            Surface::Label => match classify_link(&r, self.threshold) {
                LinkLabel::Direct => 1.0,
                LinkLabel::Indirect => 0.0,
            },
        })
    }

    pub fn label(&self, a: usize, b: usize) -> Option<LinkLabel> {
        self.cells[a][b].map(|r| classify_link(&r, self.threshold))
    }

    /// Number of cells whose label equals `expected`.
    pub fn count_label(&self, expected: LinkLabel) -> usize {
        (0..self.tau_range.len())
            .flat_map(|a| (0..self.dim_range.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| self.label(a, b) == Some(expected))
            .count()
    }

    /// Matrix CSV: rows are lags, columns embedding dimensions; failed cells are empty.
    /// Labels are written as `direct` / `indirect`.
    pub fn surface_csv(&self, surface: Surface) -> String {
        let mut out = String::from("tau\\E");
        for d in &self.dim_range {
            out.push_str(&format!(",{d}"));
        }
        out.push('\n');
        for (a, tau) in self.tau_range.iter().enumerate() {
            out.push_str(&tau.to_string());
            for b in 0..self.dim_range.len() {
                out.push(',');
                if surface == Surface::Label {
                    match self.label(a, b) {
                        Some(LinkLabel::Direct) => out.push_str("direct"),
                        Some(LinkLabel::Indirect) => out.push_str("indirect"),
                        None => {}
                    }
                } else if let Some(v) = self.value(surface, a, b) {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes `<case>_<surface>.csv` for every surface into `dir`.
    pub fn write_csvs(&self, dir: &Path, case: &str) -> Result<Vec<PathBuf>> {
        Surface::ALL
            .iter()
            .map(|&s| {
                let path = dir.join(format!("{case}_{}.csv", s.file_stem()));
                std::fs::write(&path, self.surface_csv(s))?;
                Ok(path)
            })
            .collect()
    }
}

/// Grid settings shared by every cell. `k` defaults to `E + 1` per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub tau_range: Vec<usize>,
    pub dim_range: Vec<usize>,
    pub threshold: f64,
    pub k: Option<usize>,
    pub condition_mapping: ConditionMapping,
}

impl GridSpec {
    pub fn new(tau_range: Vec<usize>, dim_range: Vec<usize>, threshold: f64) -> Self {
        Self {
            tau_range,
            dim_range,
            threshold,
            k: None,
            condition_mapping: ConditionMapping::default(),
        }
    }

    fn cell_config(&self, tau: usize, dim: usize) -> Result<PCMConfig> {
        let embed = match self.k {
            Some(k) => EmbedParams::with_k(tau, dim, k)?,
            None => EmbedParams::new(tau, dim)?,
        };
        let mut cfg = PCMConfig::new(embed, self.threshold)?;
        cfg.condition_mapping = self.condition_mapping;
        Ok(cfg)
    }
}

fn check_indices(data: &Dataset, cause: usize, effect: usize, conds: &[usize]) -> Result<()> {
    let w = data.width();
    let mut seen = BTreeSet::new();
    for &i in [cause, effect].iter().chain(conds) {
        if i >= w {
            return Err(Error::param(format!(
                "variable index {i} out of range for {w} variables"
            )));
        }
        if !seen.insert(i) {
            return Err(Error::param(format!("variable index {i} used twice")));
        }
    }
    if conds.is_empty() {
        return Err(Error::param("condition set must not be empty"));
    }
    Ok(())
}

/// Runs partial cross mapping of `cause => effect | conds` at every grid cell on the full
/// series.
pub fn pcm_grid(
    data: &Dataset,
    cause: usize,
    effect: usize,
    conds: &[usize],
    spec: &GridSpec,
) -> Result<GridResult> {
    check_indices(data, cause, effect, conds)?;
    if spec.tau_range.is_empty() || spec.dim_range.is_empty() {
        return Err(Error::param("grid ranges must not be empty"));
    }
    if !(spec.threshold > 0.0 && spec.threshold < 1.0) {
        return Err(Error::param(format!(
            "threshold must lie in (0, 1), got {}",
            spec.threshold
        )));
    }
    let cond_series: Vec<TimeSeries> = conds.iter().map(|&c| data.variable(c).clone()).collect();
    let coords: Vec<(usize, usize)> = (0..spec.tau_range.len())
        .flat_map(|a| (0..spec.dim_range.len()).map(move |b| (a, b)))
        .collect();
    let outcomes: Vec<Result<PCMResult>> = coords
        .par_iter()
        .map(|&(a, b)| {
            let cfg = spec.cell_config(spec.tau_range[a], spec.dim_range[b])?;
            multi_pcm(
                data.variable(cause),
                data.variable(effect),
                &cond_series,
                &cfg,
            )
        })
        .collect();
    let mut cells = vec![vec![None; spec.dim_range.len()]; spec.tau_range.len()];
    let mut failures = Vec::new();
    for (&(a, b), outcome) in coords.iter().zip(outcomes) {
        match outcome {
            Ok(r) => cells[a][b] = Some(r),
            Err(e) => failures.push(GridFailure {
                tau: spec.tau_range[a],
                dim: spec.dim_range[b],
                error: e.to_string(),
            }),
        }
    }
    Ok(GridResult {
        tau_range: spec.tau_range.clone(),
        dim_range: spec.dim_range.clone(),
        threshold: spec.threshold,
        cells,
        failures,
    })
}

/// Kind of link a sweep case probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// A direct edge with no mediated route.
    Direct,
    /// No direct edge, only mediated routes.
    Indirect,
    /// A direct edge alongside mediated routes.
    Both,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Direct, Scenario::Indirect, Scenario::Both];

    pub fn expected(self) -> LinkLabel {
        match self {
            Scenario::Indirect => LinkLabel::Indirect,
            Scenario::Direct | Scenario::Both => LinkLabel::Direct,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::Direct => "direct",
            Scenario::Indirect => "indirect",
            Scenario::Both => "both",
        };
        f.pad(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCase {
    pub name: String,
    pub data: Dataset,
    pub cause: usize,
    pub effect: usize,
    pub conds: Vec<usize>,
    pub scenario: Scenario,
}

/// Mistake counts per scenario at every threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub thresholds: Vec<f64>,
    /// Ratio of each case, in input order; `None` when the case failed (counted as a
    /// mistake at every threshold).
    pub gammas: Vec<(String, Scenario, Option<f64>)>,
    /// `(scenario, mistakes per threshold)` for every scenario present.
    pub mistakes: Vec<(Scenario, Vec<usize>)>,
}

impl SweepResult {
    pub fn mistakes_for(&self, scenario: Scenario) -> Option<&[usize]> {
        self.mistakes
            .iter()
            .find(|(s, _)| *s == scenario)
            .map(|(_, m)| m.as_slice())
    }

    /// Thresholds with at most `tolerance` mistakes for `scenario`.
    pub fn admissible(&self, scenario: Scenario, tolerance: usize) -> Vec<f64> {
        match self.mistakes_for(scenario) {
            Some(m) => self
                .thresholds
                .iter()
                .zip(m)
                .filter(|(_, &n)| n <= tolerance)
                .map(|(&t, _)| t)
                .collect(),
            None => self.thresholds.clone(),
        }
    }

    /// Thresholds admissible for every scenario.
    pub fn common_admissible(&self, tolerance: usize) -> Vec<f64> {
        self.thresholds
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.mistakes.iter().all(|(_, m)| m[i] <= tolerance))
            .map(|(_, &t)| t)
            .collect()
    }
}

/// `0.05, 0.10, ..., 0.95`.
pub fn default_thresholds() -> Vec<f64> {
    (1..=19).map(|i| f64::from(i) * 5.0 / 100.0).collect()
}

/// Classifies every case at every threshold using one ratio per case computed with `cfg`.
pub fn threshold_sweep(cases: &[SweepCase], thresholds: &[f64], cfg: &PCMConfig) -> SweepResult {
    let gammas: Vec<Option<f64>> = cases
        .par_iter()
        .map(|c| {
            let conds: Vec<TimeSeries> = c
                .conds
                .iter()
                .map(|&i| c.data.variable(i).clone())
                .collect();
            multi_pcm(
                c.data.variable(c.cause),
                c.data.variable(c.effect),
                &conds,
                cfg,
            )
            .ok()
            .map(|r| r.gamma)
        })
        .collect();
    let mut mistakes = Vec::new();
    for scenario in Scenario::ALL {
        let members: Vec<Option<f64>> = cases
            .iter()
            .zip(&gammas)
            .filter(|(c, _)| c.scenario == scenario)
            .map(|(_, g)| *g)
            .collect();
        if members.is_empty() {
            continue;
        }
        let counts = thresholds
            .iter()
            .map(|&t| {
                members
                    .iter()
                    .filter(|g| match g {
                        Some(g) => {
                            let label = if *g >= t {
                                LinkLabel::Direct
                            } else {
                                LinkLabel::Indirect
                            };
                            label != scenario.expected()
                        }
                        None => true,
                    })
                    .count()
            })
            .collect();
        mistakes.push((scenario, counts));
    }
    SweepResult {
        thresholds: thresholds.to_vec(),
        gammas: cases
            .iter()
            .zip(gammas)
            .map(|(c, g)| (c.name.clone(), c.scenario, g))
            .collect(),
        mistakes,
    }
}

/// `(scenario, cause, effect, conditions)`.
pub type Probe = (Scenario, usize, usize, Vec<usize>);

/// Nodes reachable from `from` without passing through `avoid`.
fn reachable(g: &CausalGraph, from: usize, avoid: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &c in g.children(v) {
            if Some(c) != avoid && !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    seen
}

/// Nodes other than `i` with a directed path into `i`.
fn ancestors(g: &CausalGraph, i: usize) -> Vec<bool> {
    (0..g.node_count())
        .map(|a| a != i && reachable(g, a, None)[i])
        .collect()
}

/// True when some ancestor of `i` reaches `j` along a route that avoids `i`.
fn confounded(g: &CausalGraph, i: usize, j: usize) -> bool {
    let anc = ancestors(g, i);
    (0..g.node_count()).any(|a| anc[a] && a != j && reachable(g, a, Some(i))[j])
}

/// Picks at most one probe per scenario from a ground-truth graph, scanning ordered pairs
/// from the highest indices down so that probes sit downstream where systems differ most.
///
/// * indirect: a pair with no edge in either direction, joined by a path of exactly two
///   edges and not confounded; conditions are all nodes on mediated paths
/// * both: an unconfounded edge that also has a mediated route; conditions as above
/// * direct: an edge without a mediated route; conditions are the remaining nodes that are
///   not ancestors of the cause
pub fn scenario_probes(truth: &CausalGraph) -> Result<Vec<Probe>> {
    let n = truth.node_count();
    let mut found: Vec<Probe> = Vec::new();
    for i in (0..n).rev() {
        for j in (0..n).rev() {
            if i == j {
                continue;
            }
            let scenario = if truth.has_edge(i, j) {
                if !truth.has_indirect_path(i, j) {
                    Scenario::Direct
                } else if !confounded(truth, i, j) {
                    Scenario::Both
                } else {
                    continue;
                }
            } else if !truth.has_edge(j, i)
                && truth
                    .children(i)
                    .iter()
                    .any(|&m| m != j && truth.has_edge(m, j))
                && !confounded(truth, i, j)
            {
                Scenario::Indirect
            } else {
                continue;
            };
            if found.iter().any(|f| f.0 == scenario) {
                continue;
            }
            let conds: Vec<usize> = match scenario {
                Scenario::Direct => {
                    let anc = ancestors(truth, i);
                    (0..n).filter(|&v| v != i && v != j && !anc[v]).collect()
                }
                _ => truth.intermediate_nodes(i, j)?.into_iter().collect(),
            };
            if conds.is_empty() {
                continue;
            }
            found.push((scenario, i, j, conds));
        }
    }
    found.sort_by_key(|f| f.0);
    Ok(found)
}

/// Noise-free three-scenario suite over every registered preset.
pub fn threshold_suite(length: usize, seed: u64) -> Result<Vec<SweepCase>> {
    let mut cases = Vec::new();
    for name in PRESET_NAMES {
        let p = preset(name)?;
        let probes = scenario_probes(&p.truth)?;
        if probes.is_empty() {
            continue;
        }
        let data = generate(&p, length, NoiseConfig::none(), seed)?;
        for (scenario, cause, effect, conds) in probes {
            cases.push(SweepCase {
                name: format!("{name}:{}->{}", p.names()[cause], p.names()[effect]),
                data: data.clone(),
                cause,
                effect,
                conds,
                scenario,
            });
        }
    }
    Ok(cases)
}

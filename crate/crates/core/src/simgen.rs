//! Coupled logistic ("competing species") benchmark systems.
//!
//! Each variable follows
//!
//! ```text
//! x_i(t) = x_i(t-1) * (alpha_i - alpha_i * x_i(t-1) - sum_{j != i} beta[j][i] * x_j(t-1)) * eta_i + eps_i
//! ```
//!
//! where `beta[cause][effect]` is 0.35 for every edge of the preset's ground-truth graph and
//! 0 otherwise. Generation is deterministic in `(preset, length, noise, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::embedding::{Dataset, TimeSeries};
use crate::error::{Error, Result};
use crate::graph::CausalGraph;
use crate::pcm::correlation;

/// Coupling strength of every causal edge.
pub const COUPLING: f64 = 0.35;
/// Iterations discarded before samples are emitted.
pub const BURN_IN: usize = 1000;
/// Initial-condition redraws before giving up.
pub const MAX_ATTEMPTS: usize = 100;

const ALPHA_3V: [f64; 3] = [3.70, 3.78, 3.72];
const ALPHA_4V: [f64; 4] = [3.70, 3.78, 3.72, 3.70];

/// Coefficients and ground truth for one benchmark system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemPreset {
    pub name: String,
    pub alpha: Vec<f64>,
    /// `beta[cause][effect]`.
    pub beta: Vec<Vec<f64>>,
    pub truth: CausalGraph,
}

impl SystemPreset {
    /// Builds a preset from explicit autonomous rates and an edge list.
    pub fn from_structure(
        name: impl Into<String>,
        names: Vec<String>,
        alpha: Vec<f64>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let k = names.len();
        if alpha.len() != k {
            return Err(Error::param(format!(
                "{} autonomous rates given for {k} variables",
                alpha.len()
            )));
        }
        let truth = CausalGraph::from_edges(names, edges)?;
        let mut beta = vec![vec![0.0; k]; k];
        for (i, j) in truth.edges() {
            beta[i][j] = COUPLING;
        }
        Ok(Self {
            name: name.into(),
            alpha,
            beta,
            truth,
        })
    }

    pub fn width(&self) -> usize {
        self.alpha.len()
    }

    pub fn names(&self) -> &[String] {
        self.truth.names()
    }

    /// One noiseless update of the full state.
    pub fn step(&self, state: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; state.len()];
        self.step_into(state, &mut next, &[], &[]);
        next
    }

    fn step_into(&self, state: &[f64], next: &mut [f64], eta: &[f64], eps: &[f64]) {
        let k = self.width();
        for i in 0..k {
            let coupling: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| self.beta[j][i] * state[j])
                .sum();
            let a = self.alpha[i];
            let mut v = state[i] * (a - a * state[i] - coupling);
            if let Some(e) = eta.get(i) {
                v *= e;
            }
            if let Some(e) = eps.get(i) {
                v += e;
            }
            next[i] = v;
        }
    }
}

/// Noise settings. `eta` is a per-step multiplicative factor, fixed at 1 unless overridden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub eta: f64,
    /// Standard deviation of the additive Gaussian term.
    pub eps_std: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseConfig {
    pub fn none() -> Self {
        Self {
            eta: 1.0,
            eps_std: 0.0,
        }
    }

    pub fn gaussian(std: f64) -> Self {
        Self {
            eta: 1.0,
            eps_std: std,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_std >= 0.0 && self.eps_std.is_finite()) {
            return Err(Error::param(format!(
                "noise standard deviation must be finite and >= 0, got {}",
                self.eps_std
            )));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::param(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

fn attempt_rng(seed: u64, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng
}

/// Simulates `length` samples after the burn-in. Trajectories that leave `(0, 1)` are
/// restarted from fresh initial conditions.
pub fn generate(
    preset: &SystemPreset,
    length: usize,
    noise: NoiseConfig,
    seed: u64,
) -> Result<Dataset> {
    if length == 0 {
        return Err(Error::param("length must be at least 1"));
    }
    noise.validate()?;
    let k = preset.width();
    let normal = Normal::new(0.0, noise.eps_std)
        .map_err(|e| Error::param(format!("noise distribution: {e}")))?;
    let eta = vec![noise.eta; k];

    'attempt: for attempt in 0..MAX_ATTEMPTS {
        let mut rng = attempt_rng(seed, attempt);
        let mut state: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..0.95)).collect();
        let mut next = vec![0.0; k];
        let mut eps = vec![0.0; k];
        let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(length); k];
        for t in 0..BURN_IN + length {
            if noise.eps_std > 0.0 {
                for e in eps.iter_mut() {
                    *e = normal.sample(&mut rng);
                }
            }
            preset.step_into(&state, &mut next, &eta, &eps);
            if next.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
                continue 'attempt;
            }
            std::mem::swap(&mut state, &mut next);
            if t >= BURN_IN {
                for (col, &v) in out.iter_mut().zip(&state) {
                    col.push(v);
                }
            }
        }
        let series = preset
            .names()
            .iter()
            .zip(out)
            .map(|(n, v)| TimeSeries::new(n.clone(), v))
            .collect::<Result<Vec<_>>>()?;
        return Dataset::new(series);
    }
    Err(Error::Generation {
        preset: preset.name.clone(),
        attempts: MAX_ATTEMPTS,
    })
}

/// Preset with autonomous rates drawn uniformly from `[3.70, 3.80)`.
pub fn sample_coeffs(
    name: impl Into<String>,
    k: usize,
    structure: &[(usize, usize)],
    seed: u64,
) -> Result<SystemPreset> {
    if k == 0 {
        return Err(Error::param("system needs at least one variable"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = (0..k).map(|_| rng.random_range(3.70..3.80)).collect();
    SystemPreset::from_structure(name, numbered_names(k), alpha, structure)
}

fn numbered_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Seed used to draw the autonomous rates of the fixed 5- to 7-variable presets.
const HIGHER_DIM_ALPHA_SEED: u64 = 20_250_101;

/// Ground-truth edge lists of the registered systems.
fn structure(name: &str) -> Option<(usize, Vec<(usize, usize)>)> {
    let s = match name {
        // x -> y -> z
        "3V_chain" => (3, vec![(0, 1), (1, 2)]),
        // x -> z <- y
        "3V_immorality" => (3, vec![(0, 2), (1, 2)]),
        // chain plus the shortcut x -> z
        "3V_noCycle" => (3, vec![(0, 1), (1, 2), (0, 2)]),
        "3V_cycle" => (3, vec![(0, 1), (1, 2), (2, 0)]),
        // w -> x -> y -> z
        "4V_chain" => (4, vec![(0, 1), (1, 2), (2, 3)]),
        // chain plus the shortcut w -> z
        "4V_noCycle" => (4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]),
        "4V_cycle" => (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        // w -> z with no mediated route; w also drives the chain x -> y
        "4V_direct" => (4, vec![(0, 3), (0, 1), (1, 2)]),
        // w reaches z only through x and through y
        "4V_diamond" => (4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]),
        "5V_1_noCycle" => (5, vec![(0, 1), (1, 2), (2, 3), (4, 2)]),
        "5V_2_cycle" => (5, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (1, 4)]),
        "6V_noCycle" => (6, vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5)]),
        "7V_cycle" => (
            7,
            vec![
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 1),
                (3, 4),
                (4, 5),
                (5, 6),
                (0, 4),
            ],
        ),
        _ => return None,
    };
    Some(s)
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 11] = [
    "3V_chain",
    "3V_immorality",
    "3V_noCycle",
    "3V_cycle",
    "4V_chain",
    "4V_noCycle",
    "4V_cycle",
    "5V_1_noCycle",
    "5V_2_cycle",
    "6V_noCycle",
    "7V_cycle",
];

/// Four-variable systems for probing `w => z | {x, y}` in a single scenario each:
/// direct only, indirect only, and both (the chain with a shortcut).
pub const GRID_PRESET_NAMES: [(&str, &str); 3] = [
    ("direct", "4V_direct"),
    ("indirect", "4V_diamond"),
    ("both", "4V_noCycle"),
];

/// Looks up a registered system, or `<K>V_chain` / `NV_chain_<K>` for a chain of any width.
pub fn preset(name: &str) -> Result<SystemPreset> {
    if let Some((k, edges)) = structure(name) {
        return match k {
            3 => SystemPreset::from_structure(
                name,
                names(&["x", "y", "z"]),
                ALPHA_3V.to_vec(),
                &edges,
            ),
            4 => SystemPreset::from_structure(
                name,
                names(&["w", "x", "y", "z"]),
                ALPHA_4V.to_vec(),
                &edges,
            ),
            _ => sample_coeffs(name, k, &edges, HIGHER_DIM_ALPHA_SEED + k as u64),
        };
    }
    let chain_width = name
        .strip_prefix("NV_chain_")
        .or_else(|| name.strip_suffix("V_chain"))
        .and_then(|s| s.parse::<usize>().ok());
    match chain_width {
        Some(k) if k >= 2 => chain_preset(k),
        _ => Err(Error::param(format!(
            "unknown preset `{name}`; known presets: {}, 4V_direct, 4V_diamond, NV_chain_<K>",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Chain `x1 -> x2 -> ... -> xK`, using the published rates for 3 and 4 variables.
pub fn chain_preset(k: usize) -> Result<SystemPreset> {
    let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
    let name = format!("NV_chain_{k}");
    match k {
        3 => SystemPreset::from_structure(name, numbered_names(3), ALPHA_3V.to_vec(), &edges),
        4 => SystemPreset::from_structure(name, numbered_names(4), ALPHA_4V.to_vec(), &edges),
        _ => sample_coeffs(name, k, &edges, HIGHER_DIM_ALPHA_SEED + k as u64),
    }
}

/// Pairwise correlations of one sampled window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCorrelations {
    pub start: usize,
    /// `(i, j, r)` for `i < j`; `r` is `None` when either window is constant.
    pub pairs: Vec<(usize, usize, Option<f64>)>,
}

/// Correlations between every pair of variables on `n` randomly placed windows.
pub fn mirage_subsequences(
    dataset: &Dataset,
    window: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<WindowCorrelations>> {
    let len = dataset.len();
    if window < 2 || window > len {
        return Err(Error::param(format!(
            "window {window} must lie in 2..={len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = dataset.width();
    Ok((0..n)
        .map(|_| {
            let start = rng.random_range(0..=len - window);
            let mut pairs = Vec::new();
            for i in 0..k {
                for j in i + 1..k {
                    let a = &dataset.variable(i).values()[start..start + window];
                    let b = &dataset.variable(j).values()[start..start + window];
                    pairs.push((i, j, correlation(a, b).ok()));
                }
            }
            WindowCorrelations { start, pairs }
        })
        .collect())
}

//! Simplex projection between delay embeddings and bivariate convergent cross mapping.
//!
//! To test whether `x` drives `y`, the neighbours of each point on the embedding of `y`
//! are looked up, and the values of `x` at the neighbours' times are averaged with
//! exponentially decaying weights. If `y` carries the imprint of `x`, that reconstruction
//! correlates well with the true `x`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{build_delay_embedding, EmbedParams, Embedding, TimeSeries};
use crate::error::{Error, Result};
use crate::pcm::correlation;

/// The `k` nearest rows to a query row.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub query_row: usize,
    pub neighbor_rows: Vec<usize>,
    /// Euclidean distances, ascending.
    pub distances: Vec<f64>,
}

/// Squared distance, or `None` once the running sum reaches `bound`.
fn sq_dist_within(a: &[f64], b: &[f64], bound: f64) -> Option<f64> {
    let mut d = 0.0;
    for (x, y) in a.iter().zip(b) {
        d += (x - y) * (x - y);
        if d >= bound {
            return None;
        }
    }
    Some(d)
}

/// Exact brute-force search. Ties in distance go to the lower row index.
fn nearest(emb: &Embedding, query_row: usize, k: usize, exclusion_radius: usize) -> NeighborSet {
    let (neighbor_rows, distances) = nearest_in(
        emb,
        emb.row(query_row),
        emb.time_of(query_row),
        k,
        exclusion_radius,
    );
    NeighborSet {
        query_row,
        neighbor_rows,
        distances,
    }
}

/// The `k` library rows closest to `q`, skipping rows whose time lies within
/// `exclusion_radius` of `query_time`. Returns rows and Euclidean distances, ascending.
fn nearest_in(
    library: &Embedding,
    q: &[f64],
    query_time: usize,
    k: usize,
    exclusion_radius: usize,
) -> (Vec<usize>, Vec<f64>) {
    // (squared distance, row), kept sorted ascending; ties keep the earlier row first
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for r in 0..library.rows() {
        if library.time_of(r).abs_diff(query_time) <= exclusion_radius {
            continue;
        }
        let bound = if best.len() == k {
            best[k - 1].0
        } else {
            f64::INFINITY
        };
        let Some(d) = sq_dist_within(q, library.row(r), bound) else {
            continue;
        };
        let pos = best.partition_point(|&(bd, _)| bd <= d);
        best.insert(pos, (d, r));
        best.truncate(k);
    }
    (
        best.iter().map(|&(_, r)| r).collect(),
        best.iter().map(|&(d, _)| d.sqrt()).collect(),
    )
}

fn usable_rows(rows: usize, exclusion_radius: usize, query_row: usize) -> usize {
    let lo = query_row.saturating_sub(exclusion_radius);
    let hi = (query_row + exclusion_radius).min(rows - 1);
    rows - (hi - lo + 1)
}

/// The `k` nearest neighbours of `query_row`, excluding the row itself.
pub fn knn_neighbors(emb: &Embedding, query_row: usize, k: usize) -> Result<NeighborSet> {
    knn_neighbors_excluding(emb, query_row, k, 0)
}

/// Like [`knn_neighbors`], also skipping rows within `exclusion_radius` of the query.
pub fn knn_neighbors_excluding(
    emb: &Embedding,
    query_row: usize,
    k: usize,
    exclusion_radius: usize,
) -> Result<NeighborSet> {
    if query_row >= emb.rows() {
        return Err(Error::param(format!(
            "query row {query_row} outside embedding with {} rows",
            emb.rows()
        )));
    }
    if k == 0 || k > usable_rows(emb.rows(), exclusion_radius, query_row) {
        return Err(Error::param(format!(
            "k = {k} neighbours requested but the embedding has only {} rows",
            emb.rows()
        )));
    }
    Ok(nearest(emb, query_row, k, exclusion_radius))
}

/// Normalised simplex weights `exp(-d_i / d_min)`. When the nearest distance is zero, all
/// weight is spread uniformly over the zero-distance neighbours.
pub fn simplex_weights(distances: &[f64]) -> Vec<f64> {
    let d_min = distances[0];
    let raw: Vec<f64> = if d_min > 0.0 {
        distances.iter().map(|d| (-d / d_min).exp()).collect()
    } else {
        distances
            .iter()
            .map(|&d| if d == 0.0 { 1.0 } else { 0.0 })
            .collect()
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Per-row neighbour times and weights computed once on a source embedding, reusable for
/// projecting any quantity indexed by absolute time.
#[derive(Debug, Clone)]
pub struct SimplexMap {
    offset: usize,
    k: usize,
    /// Absolute times of the neighbours, `k` per row.
    times: Vec<usize>,
    weights: Vec<f64>,
}

impl SimplexMap {
    pub fn new(source: &Embedding, k: usize) -> Result<Self> {
        Self::with_exclusion(source, k, 0)
    }

    pub fn with_exclusion(source: &Embedding, k: usize, exclusion_radius: usize) -> Result<Self> {
        let rows = source.rows();
        if rows == 0 || k == 0 || (0..rows).any(|r| usable_rows(rows, exclusion_radius, r) < k) {
            return Err(Error::param(format!(
                "simplex projection needs more than k = {k} usable rows, embedding has {rows}"
            )));
        }
        let per_row: Vec<(Vec<usize>, Vec<f64>)> = (0..rows)
            .into_par_iter()
            .map(|r| {
                let nb = nearest(source, r, k, exclusion_radius);
                let w = simplex_weights(&nb.distances);
                let t = nb
                    .neighbor_rows
                    .iter()
                    .map(|&row| source.time_of(row))
                    .collect();
                (t, w)
            })
            .collect();
        Ok(Self::assemble(source.offset(), k, per_row))
    }

    fn assemble(offset: usize, k: usize, per_row: Vec<(Vec<usize>, Vec<f64>)>) -> Self {
        let mut times = Vec::with_capacity(per_row.len() * k);
        let mut weights = Vec::with_capacity(per_row.len() * k);
        for (t, w) in per_row {
            times.extend(t);
            weights.extend(w);
        }
        Self {
            offset,
            k,
            times,
            weights,
        }
    }

    /// Time of the first reconstructed point.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.times.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn neighbor_times(&self, row: usize) -> &[usize] {
        &self.times[row * self.k..(row + 1) * self.k]
    }

    pub fn weights(&self, row: usize) -> &[f64] {
        &self.weights[row * self.k..(row + 1) * self.k]
    }

    /// Weighted average of `target` (indexed by absolute time) at each row's neighbours.
    pub fn project(&self, target: &[f64]) -> Result<Reconstruction> {
        let last = self.offset + self.len();
        if target.len() < last {
            return Err(Error::data(format!(
                "target covers {} time steps but the source embedding reaches {last}",
                target.len()
            )));
        }
        let values = (0..self.len())
            .map(|r| {
                self.neighbor_times(r)
                    .iter()
                    .zip(self.weights(r))
                    .map(|(&t, &w)| w * target[t])
                    .sum()
            })
            .collect();
        Ok(Reconstruction {
            offset: self.offset,
            values,
        })
    }

    /// Reconstructs every coordinate of `target`'s rows with the same neighbour weights,
    /// producing a point cloud aligned with this map's rows.
    pub fn project_embedding(&self, target: &Embedding) -> Result<Embedding> {
        let first = self.offset;
        let last = self.offset + self.len();
        if first < target.offset() || last > target.offset() + target.rows() {
            return Err(Error::data(format!(
                "embedding covers times {}..{} but projection needs {first}..{last}",
                target.offset(),
                target.offset() + target.rows()
            )));
        }
        let cols = target.cols();
        let mut data = vec![0.0; self.len() * cols];
        for (r, out) in data.chunks_mut(cols).enumerate() {
            for (&t, &w) in self.neighbor_times(r).iter().zip(self.weights(r)) {
                let src = target.row(t - target.offset());
                for (o, s) in out.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
        Embedding::from_points(
            data,
            cols,
            self.offset,
            target.source_names().to_vec(),
            target.params(),
        )
    }
}

/// A reconstructed series whose entry `r` estimates the target at time `offset + r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub offset: usize,
    pub values: Vec<f64>,
}

impl Reconstruction {
    pub fn end(&self) -> usize {
        self.offset + self.values.len()
    }

    /// Values at absolute times `from..to`.
    pub fn slice(&self, from: usize, to: usize) -> &[f64] {
        &self.values[from - self.offset..to - self.offset]
    }
}

/// Cross-maps `target` from `source_emb` with `k` neighbours.
pub fn simplex_reconstruct(
    source_emb: &Embedding,
    target_series: &TimeSeries,
    k: usize,
) -> Result<Reconstruction> {
    SimplexMap::new(source_emb, k)?.project(target_series.values())
}

fn check_pair(cause: &TimeSeries, effect: &TimeSeries, params: &EmbedParams) -> Result<()> {
    params.validate()?;
    if cause.len() != effect.len() {
        return Err(Error::data(format!(
            "`{}` has length {} but `{}` has length {}",
            cause.name,
            cause.len(),
            effect.name,
            effect.len()
        )));
    }
    if cause.len() <= params.offset() + params.k {
        return Err(Error::param(format!(
            "series length {} too short: tau={}, E={}, k={} need more than {}",
            cause.len(),
            params.tau,
            params.dim,
            params.k,
            params.offset() + params.k
        )));
    }
    Ok(())
}

/// Cross-map skill for the hypothesis `cause => effect`: the Pearson correlation between
/// `cause` and its reconstruction from the embedding of `effect`.
pub fn ccm_score(cause: &TimeSeries, effect: &TimeSeries, params: EmbedParams) -> Result<f64> {
    check_pair(cause, effect, &params)?;
    let emb = build_delay_embedding(effect, params)?;
    let map = SimplexMap::with_exclusion(&emb, params.k, params.exclusion_radius)?;
    let recon = map.project(cause.values())?;
    correlation(&cause.values()[recon.offset..recon.end()], &recon.values)
}

/// Scores in both directions for an unordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCMResult {
    /// Score for `X_i => X_j`.
    pub beta_forward: f64,
    /// Score for `X_j => X_i`.
    pub beta_backward: f64,
    pub library_length: usize,
}

pub fn ccm_pair(xi: &TimeSeries, xj: &TimeSeries, params: EmbedParams) -> Result<CCMResult> {
    Ok(CCMResult {
        beta_forward: ccm_score(xi, xj, params)?,
        beta_backward: ccm_score(xj, xi, params)?,
        library_length: xi.len(),
    })
}

/// Cross-map skill as a function of library length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCurve {
    pub lengths: Vec<usize>,
    pub scores: Vec<f64>,
}

impl ConvergenceCurve {
    pub fn max_score(&self) -> f64 {
        self.scores
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn final_score(&self) -> Option<f64> {
        self.scores.last().copied()
    }
}

/// `ccm_score` evaluated on prefixes of the given lengths.
pub fn convergence_curve(
    cause: &TimeSeries,
    effect: &TimeSeries,
    params: EmbedParams,
    lengths: &[usize],
) -> Result<ConvergenceCurve> {
    if lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("library lengths must be strictly increasing"));
    }
    let scores = lengths
        .par_iter()
        .map(|&l| {
            if l <= params.offset() + params.k {
                return Err(Error::param(format!(
                    "library length {l} is below the embedding minimum {}",
                    params.offset() + params.k + 1
                )));
            }
            ccm_score(&cause.prefix(l)?, &effect.prefix(l)?, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceCurve {
        lengths: lengths.to_vec(),
        scores,
    })
}

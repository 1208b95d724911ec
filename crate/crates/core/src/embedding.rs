//! Delay-coordinate embeddings.
//!
//! A univariate embedding of a series `x` with lag `tau` and dimension `E` has one row per
//! time `t >= (E-1)*tau`, holding `[x_t, x_{t-tau}, ..., x_{t-(E-1)tau}]`. A stacked
//! (multivariate) embedding concatenates the univariate rows of several series that share
//! the same `(tau, E)`. Row `r` always corresponds to absolute time `offset + r`, so row
//! indices translate between embeddings built from the same dataset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named, finite-valued time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::data(format!("series `{name}` is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "series `{name}` has a non-finite value at index {i}"
            )));
        }
        Ok(Self { name, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// First `len` samples, keeping the name.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(Error::param(format!(
                "prefix length {len} outside 1..={}",
                self.len()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            values: self.values[..len].to_vec(),
        })
    }

    /// Samples `start..start + len`, keeping the name.
    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.len() {
            return Err(Error::param(format!(
                "window {start}..{} outside series of length {}",
                start + len,
                self.len()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            values: self.values[start..start + len].to_vec(),
        })
    }

    /// Z-scored copy. Constant series are returned centred but unscaled.
    pub fn standardized(&self) -> Self {
        let n = self.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        let scale = if sd > 0.0 { sd } else { 1.0 };
        Self {
            name: self.name.clone(),
            values: self.values.iter().map(|v| (v - mean) / scale).collect(),
        }
    }
}

/// Equal-length series observed from one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    variables: Vec<TimeSeries>,
}

impl Dataset {
    pub fn new(variables: Vec<TimeSeries>) -> Result<Self> {
        let Some(first) = variables.first() else {
            return Err(Error::data("dataset has no variables"));
        };
        let len = first.len();
        for v in &variables {
            if v.len() != len {
                return Err(Error::data(format!(
                    "series `{}` has length {} but `{}` has length {len}",
                    v.name,
                    v.len(),
                    first.name
                )));
            }
        }
        for (i, a) in variables.iter().enumerate() {
            if variables[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::data(format!("duplicate variable name `{}`", a.name)));
            }
        }
        Ok(Self { variables })
    }

    pub fn variables(&self) -> &[TimeSeries] {
        &self.variables
    }

    pub fn variable(&self, idx: usize) -> &TimeSeries {
        &self.variables[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    /// Number of variables.
    pub fn width(&self) -> usize {
        self.variables.len()
    }

    /// Common series length.
    pub fn len(&self) -> usize {
        self.variables[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        let vars = self
            .variables
            .iter()
            .map(|v| v.window(start, len))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { variables: vars })
    }

    pub fn standardized(&self) -> Self {
        Self {
            variables: self
                .variables
                .iter()
                .map(TimeSeries::standardized)
                .collect(),
        }
    }

    /// Reorders variables; `order[i]` is the old index of the new variable `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.width()];
        for &o in order {
            if o >= self.width() || seen[o] {
                return Err(Error::param("permutation is not a bijection"));
            }
            seen[o] = true;
        }
        if order.len() != self.width() {
            return Err(Error::param("permutation has the wrong length"));
        }
        Ok(Self {
            variables: order.iter().map(|&o| self.variables[o].clone()).collect(),
        })
    }
}

/// Lag, embedding dimension, and neighbour count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub tau: usize,
    pub dim: usize,
    pub k: usize,
    /// Neighbour candidates within this many rows of the query are skipped. 0 excludes
    /// only the query row itself.
    #[serde(default)]
    pub exclusion_radius: usize,
}

impl EmbedParams {
    /// Parameters with the simplex default `k = dim + 1`.
    pub fn new(tau: usize, dim: usize) -> Result<Self> {
        Self::with_k(tau, dim, dim + 1)
    }

    pub fn with_k(tau: usize, dim: usize, k: usize) -> Result<Self> {
        let p = Self {
            tau,
            dim,
            k,
            exclusion_radius: 0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::param("tau must be at least 1"));
        }
        if self.dim == 0 {
            return Err(Error::param("embedding dimension must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::param("neighbour count k must be at least 1"));
        }
        Ok(())
    }

    /// First valid time index, `(E-1)*tau`.
    pub fn offset(&self) -> usize {
        (self.dim - 1) * self.tau
    }

    /// Smallest series length that yields at least one delay vector.
    pub fn min_series_len(&self) -> usize {
        self.offset() + 1
    }
}

/// Row-major matrix of delay vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
    offset: usize,
    source_names: Vec<String>,
    params: EmbedParams,
}

impl Embedding {
    /// Wraps an arbitrary point cloud whose row `r` is attributed to time `offset + r`.
    pub fn from_points(
        data: Vec<f64>,
        cols: usize,
        offset: usize,
        source_names: Vec<String>,
        params: EmbedParams,
    ) -> Result<Self> {
        if cols == 0 || !data.len().is_multiple_of(cols) {
            return Err(Error::param(format!(
                "{} values cannot be split into rows of width {cols}",
                data.len()
            )));
        }
        Ok(Self {
            rows: data.len() / cols,
            data,
            cols,
            offset,
            source_names,
            params,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Dimension of each delay vector (`E` times the number of sources).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn params(&self) -> EmbedParams {
        self.params
    }

    pub fn source_names(&self) -> &[String] {
        &self.source_names
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Absolute time index of row `r`.
    pub fn time_of(&self, r: usize) -> usize {
        self.offset + r
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn check_length(name: &str, len: usize, params: &EmbedParams) -> Result<()> {
    if len <= params.offset() {
        return Err(Error::param(format!(
            "series `{name}` has length {len}; tau={} and E={} need at least {} samples",
            params.tau,
            params.dim,
            params.min_series_len()
        )));
    }
    Ok(())
}

/// Univariate delay embedding of `series`.
pub fn build_delay_embedding(series: &TimeSeries, params: EmbedParams) -> Result<Embedding> {
    build_multivariate_embedding(std::slice::from_ref(series), params)
}

/// Stacked embedding: each row is the concatenation of the per-series delay vectors at the
/// same time.
pub fn build_multivariate_embedding(
    series_set: &[TimeSeries],
    params: EmbedParams,
) -> Result<Embedding> {
    params.validate()?;
    let Some(first) = series_set.first() else {
        return Err(Error::param("cannot embed an empty collection of series"));
    };
    let len = first.len();
    for s in series_set {
        if s.len() != len {
            return Err(Error::data(format!(
                "series `{}` has length {} but `{}` has length {len}",
                s.name,
                s.len(),
                first.name
            )));
        }
    }
    check_length(&first.name, len, &params)?;
    let sources: Vec<&[f64]> = series_set.iter().map(|s| s.values()).collect();
    let data = stack_delay_vectors(&sources, params.tau, params.dim);
    Embedding::from_points(
        data,
        series_set.len() * params.dim,
        params.offset(),
        series_set.iter().map(|s| s.name.clone()).collect(),
        params,
    )
}

/// Raw stacked delay vectors over plain slices of equal length (callers check the length).
pub(crate) fn stack_delay_vectors(sources: &[&[f64]], tau: usize, dim: usize) -> Vec<f64> {
    let len = sources[0].len();
    let offset = (dim - 1) * tau;
    let rows = len - offset;
    let mut data = Vec::with_capacity(rows * dim * sources.len());
    for t in offset..len {
        for src in sources {
            data.extend((0..dim).map(|lag| src[t - lag * tau]));
        }
    }
    data
}

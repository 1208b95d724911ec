//! Wall-time scaling of discovery over chains of increasing width.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mxmap::{discover, MXMapConfig};
use crate::simgen::{chain_preset, generate, NoiseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimePoint {
    pub width: usize,
    pub seconds: f64,
}

/// Times `discover` on a noise-free chain for every width in `3..=max_width`. Each width
/// is run `repeats` times and the fastest run is kept.
pub fn runtime_scaling(
    max_width: usize,
    length: usize,
    seed: u64,
    repeats: usize,
    cfg: &MXMapConfig,
) -> Result<Vec<RuntimePoint>> {
    if max_width < 3 {
        return Err(Error::param(format!(
            "maximum width must be at least 3, got {max_width}"
        )));
    }
    if repeats == 0 {
        return Err(Error::param("repeats must be at least 1"));
    }
    let mut points = Vec::new();
    for width in 3..=max_width {
        let data = generate(&chain_preset(width)?, length, NoiseConfig::none(), seed)?;
        let mut best = f64::INFINITY;
        for _ in 0..repeats {
            let start = Instant::now();
            discover(&data, cfg)?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        points.push(RuntimePoint {
            width,
            seconds: best,
        });
    }
    Ok(points)
}

/// Least-squares slope of `ln(seconds)` against `ln(width)`. `None` with fewer than two
/// distinct widths or any non-positive time.
pub fn loglog_slope(points: &[RuntimePoint]) -> Option<f64> {
    if points
        .iter()
        .any(|p| p.width == 0 || p.seconds.is_nan() || p.seconds <= 0.0)
    {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.width as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.seconds.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

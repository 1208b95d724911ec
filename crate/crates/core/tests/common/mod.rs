//! Reference oracles shared by the property tests and the acceptance run. Each check
//! returns `Err` with a description of the first disagreement.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mxmap_core::crossmap::{knn_neighbors, simplex_weights, SimplexMap};
use mxmap_core::embedding::{build_delay_embedding, build_multivariate_embedding};
use mxmap_core::graph::default_names;
use mxmap_core::mxmap::{phase1, phase2};
use mxmap_core::pcm::{correlation, partial_correlation};
use mxmap_core::simgen::{generate, preset, NoiseConfig};
use mxmap_core::{
    evaluate, multi_pcm, pcm_univariate, CausalGraph, Dataset, EmbedParams, Embedding, MXMapConfig,
    PCMConfig, TimeSeries,
};

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn series(name: &str, values: Vec<f64>) -> TimeSeries {
    TimeSeries::new(name, values).unwrap()
}

/// Row `r` of an embedding holds `x[t], x[t - tau], ...` with `t = offset + r`, and a
/// stacked embedding concatenates the per-series rows.
pub fn embedding_laws(a: &[f64], b: &[f64], tau: usize, dim: usize) -> Check {
    let p = EmbedParams::new(tau, dim).map_err(|e| e.to_string())?;
    let sa = series("a", a.to_vec());
    let sb = series("b", b.to_vec());
    let offset = (dim - 1) * tau;
    if a.len() <= offset {
        return ensure(build_delay_embedding(&sa, p).is_err(), || {
            "short series accepted".into()
        });
    }
    let e = build_delay_embedding(&sa, p).map_err(|e| e.to_string())?;
    ensure(e.offset() == offset, || format!("offset {}", e.offset()))?;
    ensure(e.rows() == a.len() - offset, || {
        format!("rows {}", e.rows())
    })?;
    ensure(e.cols() == dim, || format!("cols {}", e.cols()))?;
    for r in 0..e.rows() {
        let t = offset + r;
        ensure(e.time_of(r) == t, || format!("time_of({r})"))?;
        for c in 0..dim {
            ensure(e.row(r)[c] == a[t - c * tau], || {
                format!("entry ({r}, {c})")
            })?;
        }
    }
    let m = build_multivariate_embedding(&[sa, sb], p).map_err(|e| e.to_string())?;
    ensure(m.cols() == 2 * dim && m.rows() == e.rows(), || {
        "stacked shape".into()
    })?;
    for r in 0..m.rows() {
        let t = offset + r;
        for c in 0..dim {
            ensure(m.row(r)[c] == a[t - c * tau], || {
                format!("stacked a ({r}, {c})")
            })?;
            ensure(m.row(r)[dim + c] == b[t - c * tau], || {
                format!("stacked b ({r}, {c})")
            })?;
        }
    }
    Ok(())
}

/// Weights are nonnegative, sum to one and do not increase with distance.
pub fn weight_laws(mut distances: Vec<f64>) -> Check {
    distances.sort_by(f64::total_cmp);
    let w = simplex_weights(&distances);
    ensure(w.len() == distances.len(), || "length".into())?;
    ensure(w.iter().all(|&x| (0.0..=1.0).contains(&x)), || {
        format!("range {w:?}")
    })?;
    let total: f64 = w.iter().sum();
    ensure((total - 1.0).abs() <= 1e-12, || format!("sum {total}"))?;
    ensure(w.windows(2).all(|p| p[0] >= p[1]), || {
        format!("order {w:?}")
    })
}

/// Every simplex prediction is a convex combination of its neighbours' target values.
pub fn projection_is_convex(source: &[f64], target: &[f64], dim: usize) -> Check {
    let p = EmbedParams::new(1, dim).map_err(|e| e.to_string())?;
    let e = build_delay_embedding(&series("s", source.to_vec()), p).map_err(|e| e.to_string())?;
    let map = SimplexMap::new(&e, p.k).map_err(|e| e.to_string())?;
    let rec = map.project(target).map_err(|e| e.to_string())?;
    for r in 0..map.len() {
        let vals: Vec<f64> = map.neighbor_times(r).iter().map(|&t| target[t]).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let v = rec.values[r];
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        ensure(v >= lo - slack && v <= hi + slack, || {
            format!("row {r}: {v} outside [{lo}, {hi}]")
        })?;
    }
    Ok(())
}

/// Sorting all other rows by distance, then by row index, gives the same neighbours and
/// the same distances bit for bit.
pub fn knn_matches_brute_force(points: &[f64], cols: usize, k: usize) -> Check {
    let p = EmbedParams::with_k(1, 1, k).unwrap();
    let emb = Embedding::from_points(points.to_vec(), cols, 0, vec!["p".into()], p)
        .map_err(|e| e.to_string())?;
    for q in 0..emb.rows() {
        let mut all: Vec<(f64, usize)> = (0..emb.rows())
            .filter(|&r| r != q)
            .map(|r| {
                let d2: f64 = emb
                    .row(q)
                    .iter()
                    .zip(emb.row(r))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2.sqrt(), r)
            })
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nb = knn_neighbors(&emb, q, k).map_err(|e| e.to_string())?;
        let rows: Vec<usize> = all[..k].iter().map(|x| x.1).collect();
        let dists: Vec<f64> = all[..k].iter().map(|x| x.0).collect();
        ensure(nb.neighbor_rows == rows, || {
            format!("query {q}: rows {:?} vs {rows:?}", nb.neighbor_rows)
        })?;
        ensure(nb.distances == dists, || format!("query {q}: distances"))?;
    }
    Ok(())
}

fn residuals(y: &[f64], x: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    x.iter()
        .zip(y)
        .map(|(a, b)| b - my - slope * (a - mx))
        .collect()
}

/// First-order partial correlation equals the correlation of least-squares residuals.
pub fn parcorr_matches_residuals(a: &[f64], b: &[f64], c: &[f64]) -> Check {
    let Ok(r) = partial_correlation(a, b, c) else {
        return Ok(());
    };
    let oracle = correlation(&residuals(a, c), &residuals(b, c)).map_err(|e| e.to_string())?;
    ensure((r - oracle).abs() <= 1e-10, || format!("{r} vs {oracle}"))
}

/// One condition through the multivariate path gives the univariate result exactly.
pub fn multi_equals_uni(x: &TimeSeries, y: &TimeSeries, z: &TimeSeries, cfg: &PCMConfig) -> Check {
    let m = multi_pcm(x, z, std::slice::from_ref(y), cfg);
    let u = pcm_univariate(x, y, z, cfg);
    match (m, u) {
        (Ok(m), Ok(u)) => ensure(m == u, || format!("{m:?} vs {u:?}")),
        (Err(a), Err(b)) => ensure(a == b, || format!("{a} vs {b}")),
        (m, u) => Err(format!("{m:?} vs {u:?}")),
    }
}

/// All simple paths `from ~> to` of at least two edges, by exhaustive extension.
pub fn enumerate_paths(g: &CausalGraph, from: usize, to: usize) -> BTreeSet<Vec<usize>> {
    fn extend(g: &CausalGraph, path: &mut Vec<usize>, to: usize, out: &mut BTreeSet<Vec<usize>>) {
        let last = *path.last().unwrap();
        for v in 0..g.node_count() {
            if !g.has_edge(last, v) || path.contains(&v) {
                continue;
            }
            path.push(v);
            if v == to {
                if path.len() >= 3 {
                    out.insert(path.clone());
                }
            } else {
                extend(g, path, to, out);
            }
            path.pop();
        }
    }
    let mut out = BTreeSet::new();
    if from != to {
        extend(g, &mut vec![from], to, &mut out);
    }
    out
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> CausalGraph {
    let edges: Vec<_> = edges.iter().copied().filter(|(i, j)| i != j).collect();
    CausalGraph::from_edges(default_names(n), &edges).unwrap()
}

/// Path visitor, mediated-path test and intermediate set agree with enumeration.
pub fn path_queries_match(g: &CausalGraph) -> Check {
    let n = g.node_count();
    for i in 0..n {
        for j in 0..n {
            let oracle = enumerate_paths(g, i, j);
            let mut seen = BTreeSet::new();
            g.for_each_mediated_path(i, j, usize::MAX, |p| {
                seen.insert(p.to_vec());
            })
            .map_err(|e| e.to_string())?;
            ensure(seen == oracle, || {
                format!("paths {i}->{j}: {seen:?} vs {oracle:?}")
            })?;
            ensure(g.has_indirect_path(i, j) == !oracle.is_empty(), || {
                format!("has_indirect_path({i}, {j})")
            })?;
            let inter: BTreeSet<usize> = oracle
                .iter()
                .flat_map(|p| p[1..p.len() - 1].to_vec())
                .collect();
            let got = g.intermediate_nodes(i, j).map_err(|e| e.to_string())?;
            ensure(got == inter, || format!("intermediates {i}->{j}"))?;
        }
    }
    Ok(())
}

/// Metrics from independent entrywise counts, SHD symmetry and the triangle inequality.
pub fn metrics_laws(a: &CausalGraph, b: &CausalGraph, c: &CausalGraph) -> Check {
    let m = evaluate(a, b).map_err(|e| e.to_string())?;
    let n = a.node_count();
    let (mut tp, mut fp, mut fneg) = (0.0, 0.0, 0.0);
    let mut shd = 0;
    for i in 0..n {
        for j in 0..n {
            match (a.has_edge(i, j), b.has_edge(i, j)) {
                (true, true) => tp += 1.0,
                (false, true) => fp += 1.0,
                (true, false) => fneg += 1.0,
                (false, false) => {}
            }
            if a.has_edge(i, j) != b.has_edge(i, j) {
                shd += 1;
            }
        }
    }
    let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let r = if tp + fneg > 0.0 {
        tp / (tp + fneg)
    } else {
        0.0
    };
    let f1 = if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    };
    ensure(m.precision == p && m.recall == r, || {
        format!("{m:?} vs p {p} r {r}")
    })?;
    ensure((m.f1 - f1).abs() <= 1e-15, || {
        format!("f1 {} vs {f1}", m.f1)
    })?;
    ensure(m.shd == shd, || format!("shd {} vs {shd}", m.shd))?;
    let shd_of = |x: &CausalGraph, y: &CausalGraph| evaluate(x, y).unwrap().shd;
    ensure(shd_of(a, b) == shd_of(b, a), || "shd symmetry".into())?;
    ensure(shd_of(a, c) <= shd_of(a, b) + shd_of(b, c), || {
        "triangle".into()
    })?;
    ensure(shd_of(a, a) == 0, || "self distance".into())
}

/// Same seed reproduces bitwise; a different seed differs; noise-free output stays in (0, 1).
pub fn generator_determinism(name: &str, length: usize, seed: u64) -> Check {
    let p = preset(name).map_err(|e| e.to_string())?;
    let a = generate(&p, length, NoiseConfig::none(), seed).map_err(|e| e.to_string())?;
    let b = generate(&p, length, NoiseConfig::none(), seed).map_err(|e| e.to_string())?;
    let c = generate(&p, length, NoiseConfig::none(), seed + 1).map_err(|e| e.to_string())?;
    ensure(a == b, || "same seed differs".into())?;
    ensure(a != c, || "different seeds agree".into())?;
    ensure(
        a.variables()
            .iter()
            .all(|s| s.values().iter().all(|&v| v > 0.0 && v < 1.0)),
        || "trajectory left (0, 1)".into(),
    )?;
    for i in 0..p.width() {
        for j in 0..p.width() {
            ensure(p.truth.has_edge(i, j) == (p.beta[i][j] == 0.35), || {
                format!("beta[{i}][{j}] disagrees with truth")
            })?;
        }
    }
    Ok(())
}

/// One step of the 3-variable chain from `(0.4, 0.2, 0.3)`, worked by hand:
/// x = 0.4 (3.70 - 1.48) = 0.888, y = 0.2 (3.78 - 0.756 - 0.14) = 0.5768,
/// z = 0.3 (3.72 - 1.116 - 0.07) = 0.7602.
pub fn single_step_hand_oracle() -> Check {
    let p = preset("3V_chain").map_err(|e| e.to_string())?;
    let next = p.step(&[0.4, 0.2, 0.3]);
    let want = [0.888, 0.5768, 0.7602];
    ensure(
        next.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12),
        || format!("{next:?} vs {want:?}"),
    )
}

/// Pruning only removes edges.
pub fn pruning_is_monotone(data: &Dataset, cfg: &MXMapConfig) -> Check {
    let (g1, _) = phase1(data, cfg).map_err(|e| e.to_string())?;
    let (g2, log) = phase2(data, &g1, cfg).map_err(|e| e.to_string())?;
    ensure(g2.is_subgraph_of(&g1), || {
        "final graph gained an edge".into()
    })?;
    let removed = log.iter().filter(|r| r.removed).count();
    ensure(g1.edge_count() - g2.edge_count() == removed, || {
        "removal count disagrees with log".into()
    })
}

/// Reordering the input columns reorders the phase-1 graph the same way.
pub fn phase1_permutation_invariant(data: &Dataset, order: &[usize], cfg: &MXMapConfig) -> Check {
    let (g, _) = phase1(data, cfg).map_err(|e| e.to_string())?;
    let permuted = data.permuted(order).map_err(|e| e.to_string())?;
    let (gp, _) = phase1(&permuted, cfg).map_err(|e| e.to_string())?;
    let expect = g.permuted(order).map_err(|e| e.to_string())?;
    ensure(gp == expect, || format!("{gp:?} vs {expect:?}"))
}

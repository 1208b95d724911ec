//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use mxmap_core::bench::{loglog_slope, runtime_scaling};
use mxmap_core::gridsearch::{
    default_thresholds, pcm_grid, threshold_suite, threshold_sweep, GridSpec, Scenario,
};
use mxmap_core::io::{read_dataset_csv, write_dataset_csv};
use mxmap_core::pcm::LinkLabel;
use mxmap_core::simgen::{generate, mirage_subsequences, preset, NoiseConfig};
use mxmap_core::{discover, evaluate, CausalGraph, Dataset, EmbedParams, PCMConfig};

use crate::args::{
    BenchArgs, Command, DiscoverArgs, EvalArgs, GenArgs, GridArgs, MirageArgs, SweepArgs,
};
use crate::output::{format_for, io_error, read_text, write_output, CliError};

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Discover(a) => discover_cmd(a),
        Command::Eval(a) => eval(a),
        Command::BenchRuntime(a) => bench(a),
        Command::Grid(a) => grid(a),
        Command::Sweep(a) => sweep(a),
        Command::Mirage(a) => mirage(a),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    read_dataset_csv(file).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<CausalGraph, CliError> {
    let text = read_text(path)?;
    CausalGraph::import(&text, format_for(path))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn gen(a: GenArgs) -> Result<(), CliError> {
    let system = preset(&a.preset)?;
    let noise = if a.noise_std > 0.0 {
        NoiseConfig::gaussian(a.noise_std)
    } else if a.noise_std == 0.0 {
        NoiseConfig::none()
    } else {
        return Err(CliError::Usage(format!(
            "--noise-std must be >= 0, got {}",
            a.noise_std
        )));
    };
    let data = generate(&system, a.length, noise, a.seed)?;
    let mut buf = Vec::new();
    write_dataset_csv(&data, &mut buf)?;
    write_output(a.out.as_deref(), &buf)?;
    if let Some(path) = &a.truth_out {
        write_output(Some(path), system.truth.export(format_for(path)).as_bytes())?;
    }
    Ok(())
}

fn discover_cmd(a: DiscoverArgs) -> Result<(), CliError> {
    let cfg = a.method.resolve()?;
    let data = load_dataset(&a.input)?;
    let report = discover(&data, &cfg)?;
    let failed = report
        .pair_scores
        .iter()
        .filter(|s| s.error.is_some())
        .count()
        + report
            .prune_log
            .iter()
            .filter(|r| r.error.is_some())
            .count();
    eprintln!(
        "phase 1: {} edges; phase 2: tested {}, removed {}, failed {}; final: {} edges",
        report.phase1_graph.edge_count(),
        report.prune_log.len(),
        report.prune_log.iter().filter(|r| r.removed).count(),
        failed,
        report.final_graph.edge_count()
    );
    if let Some(path) = &a.report {
        write_output(Some(path), &to_json(&report))?;
    }
    let text = report.final_graph.export(a.format.into());
    write_output(a.out.as_deref(), text.as_bytes())
}

fn eval(a: EvalArgs) -> Result<(), CliError> {
    let truth = load_graph(&a.truth)?;
    let pred = load_graph(&a.pred)?;
    let m = evaluate(&truth, &pred)?;
    let text = if a.json {
        format!("{}\n", m.to_json())
    } else {
        format!("{m}\n")
    };
    write_output(None, text.as_bytes())
}

fn bench(a: BenchArgs) -> Result<(), CliError> {
    let cfg = a.method.resolve()?;
    let points = runtime_scaling(a.max_k, a.length, a.seed, a.repeats, &cfg)?;
    let mut out = format!("{:>4}{:>12}\n", "K", "seconds");
    for p in &points {
        let _ = writeln!(out, "{:>4}{:>12.4}", p.width, p.seconds);
    }
    match loglog_slope(&points) {
        Some(s) => {
            let _ = writeln!(out, "log-log slope: {s:.3}");
        }
        None => out.push_str("log-log slope: undefined (need at least two widths)\n"),
    }
    write_output(None, out.as_bytes())
}

fn column(data: &Dataset, name: &str) -> Result<usize, CliError> {
    data.index_of(name).ok_or_else(|| {
        CliError::Usage(format!(
            "no column `{name}`; columns are {}",
            data.names().join(", ")
        ))
    })
}

fn grid(a: GridArgs) -> Result<(), CliError> {
    let data = load_dataset(&a.input)?;
    let cause = column(&data, &a.cause)?;
    let effect = column(&data, &a.effect)?;
    let conds = a
        .cond
        .iter()
        .map(|c| column(&data, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = GridSpec::new(a.taus.clone(), a.dims.clone(), a.threshold);
    spec.k = a.knn;
    spec.condition_mapping = a.condition_mapping.into();
    let g = pcm_grid(&data, cause, effect, &conds, &spec)?;
    let mut out = format!("{:>6}", "tau\\E");
    for d in &g.dim_range {
        let _ = write!(out, "{d:>16}");
    }
    out.push('\n');
    for (ti, tau) in g.tau_range.iter().enumerate() {
        let _ = write!(out, "{tau:>6}");
        for di in 0..g.dim_range.len() {
            let cell = match (g.cells[ti][di], g.label(ti, di)) {
                (Some(r), Some(l)) => format!("{:.3} {}", r.gamma, label_word(l)),
                _ => "failed".to_string(),
            };
            let _ = write!(out, "{cell:>16}");
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "direct {}, indirect {}, failed {}",
        g.count_label(LinkLabel::Direct),
        g.count_label(LinkLabel::Indirect),
        g.failures.len()
    );
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let case = format!("{}_{}", a.cause, a.effect);
        for path in g.write_csvs(dir, &case)? {
            let _ = writeln!(out, "wrote {}", path.display());
        }
    }
    write_output(None, out.as_bytes())
}

fn label_word(l: LinkLabel) -> &'static str {
    match l {
        LinkLabel::Direct => "direct",
        LinkLabel::Indirect => "indirect",
    }
}

fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let embed = match a.knn {
        Some(k) => EmbedParams::with_k(a.tau, a.dim, k)?,
        None => EmbedParams::new(a.tau, a.dim)?,
    };
    let thresholds = a.thresholds.clone().unwrap_or_else(default_thresholds);
    if thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(CliError::Usage("thresholds must lie in (0, 1)".into()));
    }
    let cfg = PCMConfig::new(embed, mxmap_core::mxmap::DEFAULT_GAMMA_STAR)?;
    let cases = threshold_suite(a.length, a.seed)?;
    let r = threshold_sweep(&cases, &thresholds, &cfg);
    let mut out = String::new();
    for (name, scenario, gamma) in &r.gammas {
        let g = gamma.map_or("failed".to_string(), |g| format!("{g:.4}"));
        let _ = writeln!(out, "{name:<28}{scenario:<10}{g:>10}");
    }
    let _ = write!(out, "\n{:<10}", "threshold");
    for t in &r.thresholds {
        let _ = write!(out, "{t:>6.2}");
    }
    out.push('\n');
    for s in Scenario::ALL {
        if let Some(m) = r.mistakes_for(s) {
            let _ = write!(out, "{s:<10}");
            for n in m {
                let _ = write!(out, "{n:>6}");
            }
            out.push('\n');
        }
    }
    let common = r.common_admissible(a.tolerance);
    let _ = writeln!(
        out,
        "admissible with <= {} mistakes per scenario: {}",
        a.tolerance,
        if common.is_empty() {
            "none".to_string()
        } else {
            common
                .iter()
                .map(|t| format!("{t:.2}"))
                .collect::<Vec<_>>()
                .join(", ")
        }
    );
    if let Some(path) = &a.out {
        write_output(Some(path), &to_json(&r))?;
    }
    write_output(None, out.as_bytes())
}

fn mirage(a: MirageArgs) -> Result<(), CliError> {
    let data = load_dataset(&a.input)?;
    let windows = mirage_subsequences(&data, a.window, a.count, a.seed)?;
    let names = data.names();
    let mut out = format!("{:<16}{:>8}{:>8}{:>8}\n", "pair", "min", "max", "flips");
    let Some(first) = windows.first() else {
        return write_output(None, out.as_bytes());
    };
    for (p, &(i, j, _)) in first.pairs.iter().enumerate() {
        let rs: Vec<f64> = windows.iter().filter_map(|w| w.pairs[p].2).collect();
        let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let flips = hi > a.level && lo < -a.level;
        let _ = writeln!(
            out,
            "{:<16}{lo:>8.3}{hi:>8.3}{:>8}",
            format!("{}-{}", names[i], names[j]),
            if flips { "yes" } else { "no" }
        );
    }
    write_output(None, out.as_bytes())
}

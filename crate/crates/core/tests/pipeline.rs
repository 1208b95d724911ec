use mxmap_core::io::{read_dataset_csv, write_dataset_csv};
use mxmap_core::mxmap::phase2;
use mxmap_core::simgen::{generate, preset, NoiseConfig};
use mxmap_core::{discover, evaluate, DiscoveryReport, MXMapConfig};

#[test]
fn generated_data_survives_csv() {
    let d = generate(
        &preset("5V_1_noCycle").unwrap(),
        500,
        NoiseConfig::gaussian(0.01),
        3,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_dataset_csv(&d, &mut buf).unwrap();
    assert_eq!(read_dataset_csv(buf.as_slice()).unwrap(), d);
}

#[test]
fn four_variable_chain_recovered() {
    let p = preset("4V_chain").unwrap();
    let d = generate(&p, 3500, NoiseConfig::none(), 2).unwrap();
    let r = discover(&d, &MXMapConfig::segment_protocol()).unwrap();
    let m = evaluate(&p.truth, &r.final_graph).unwrap();
    assert_eq!(m.shd, 0, "{}", r.final_graph.to_dot());
    assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
}

#[test]
fn shortcut_is_tested_and_logged() {
    let p = preset("3V_noCycle").unwrap();
    let d = generate(&p, 2000, NoiseConfig::none(), 1).unwrap();
    let r = discover(&d, &MXMapConfig::simulated()).unwrap();
    for rec in &r.prune_log {
        assert!(r.phase1_graph.has_edge(rec.cause, rec.effect));
        assert!(r.phase1_graph.has_indirect_path(rec.cause, rec.effect));
        assert!(!rec.conds.is_empty());
        assert_eq!(rec.removed, !r.final_graph.has_edge(rec.cause, rec.effect));
    }
    assert_eq!(r.pair_scores.len(), 3);
}

#[test]
fn second_pruning_pass_is_a_subgraph() {
    let cfg = MXMapConfig::simulated();
    let p = preset("4V_noCycle").unwrap();
    let d = generate(&p, 2000, NoiseConfig::none(), 5).unwrap();
    let r = discover(&d, &cfg).unwrap();
    let (again, _) = phase2(&d, &r.final_graph, &cfg).unwrap();
    assert!(again.is_subgraph_of(&r.final_graph));
}

#[test]
fn report_round_trips_through_json() {
    let d = generate(&preset("3V_chain").unwrap(), 800, NoiseConfig::none(), 0).unwrap();
    let r = discover(&d, &MXMapConfig::simulated()).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: DiscoveryReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.final_graph, r.final_graph);
    assert_eq!(back.phase1_graph, r.phase1_graph);
    for (a, b) in back.pair_scores.iter().zip(&r.pair_scores) {
        let (fa, fb) = (
            a.result.unwrap().beta_forward,
            b.result.unwrap().beta_forward,
        );
        assert!((fa - fb).abs() <= 1e-15);
    }
}

use std::fs;

use tensor_chernoff::chernoff::{transfer_expectation, VertexTensorAssignment};
use tensor_chernoff::expander::{gen_cycle, gen_random_regular, RegularGraph};
use tensor_chernoff::harness::{emit, run, table_from_csv, ExperimentConfig, Format, Report, Suite};
use tensor_chernoff::tensor::io;
use tensor_chernoff::{random, rng, Error, TensorShape};

#[test]
fn tensor_text_round_trip_is_bit_exact() {
    let mut r = rng::seeded(1);
    let shape = TensorShape::new(vec![2, 3], vec![3]).unwrap();
    let t = random::gaussian_tensor(&mut r, &shape);
    let back = io::from_text(&io::to_text(&t)).unwrap();
    assert_eq!(back, t);

    let text = "# a 2x2 identity\ntensor\nrow_dims 2\ncol_dims 2\nentries 4\n1 0\n0 0\n\n0 0\n1 0\n";
    let id = io::from_text(text).unwrap();
    assert_eq!(id.trace().unwrap().re, 2.0);
    let err = io::from_text("tensor\nrow_dims 2\ncol_dims 2\nentries 3\n").unwrap_err();
    assert!(matches!(err, Error::Config(m) if m.contains("line 4")));
}

#[test]
fn config_relative_files_drive_the_expander_suite() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_random_regular(10, 3, 5).unwrap();
    g.write_edge_list(&dir.path().join("graph.txt")).unwrap();
    let assign = VertexTensorAssignment::random(g.clone(), &[2], 0.8, 9).unwrap();
    assign.save(&dir.path().join("tensors")).unwrap();
    let cfg_path = dir.path().join("exp.toml");
    fs::write(
        &cfg_path,
        "suite = \"expander\"\ntrials = 20\nnum_walks = 2000\nkappa = 4\n\
         [graph]\nkind = \"edge_list\"\npath = \"graph.txt\"\n\
         [assignment]\nkind = \"manifest\"\npath = \"tensors/manifest.txt\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::from_file(&cfg_path).unwrap();
    let rebuilt = cfg.graph.build(cfg.seed).unwrap();
    assert_eq!(rebuilt.to_edge_list(), g.to_edge_list());
    let loaded = cfg.assignment.build(rebuilt, cfg.seed).unwrap();
    let p = cfg.lemma;
    assert_eq!(
        transfer_expectation(&loaded, p.t, p.a, p.b, 4).unwrap(),
        transfer_expectation(&assign, p.t, p.a, p.b, 4).unwrap()
    );
    let rep = run(&cfg, 2).unwrap();
    assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
}

#[test]
fn edge_list_errors_carry_line_numbers() {
    let err = RegularGraph::from_edge_list("3 2\n0 1 1\n1 2 x\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    let err = RegularGraph::from_edge_list("3 2\n0 1 1\n1 2 1\n").unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    let c5 = gen_cycle(5).unwrap();
    assert_eq!(RegularGraph::from_edge_list(&c5.to_edge_list()).unwrap().to_edge_list(), c5.to_edge_list());
}

#[test]
fn emitted_reports_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_suite(Suite::ChernoffSweep);
    cfg.num_walks = 300;
    cfg.theta = vec![10.0, 100.0, 390.0];
    let rep = run(&cfg, 1).unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    emit(&rep, Format::Json, &json).unwrap();
    emit(&rep, Format::Csv, &csv).unwrap();
    assert_eq!(Report::from_json(&fs::read_to_string(&json).unwrap()).unwrap(), rep);
    let rows = table_from_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows, rep.table);
    assert_eq!(rows.len(), cfg.theta.len());
    assert!(matches!(emit(&rep, Format::Json, &dir.path().join("missing/r.json")), Err(Error::Io(_))));
}

#[test]
fn missing_manifest_is_a_config_error() {
    let text = "suite = \"expander\"\n[assignment]\nkind = \"manifest\"\npath = \"/nowhere/manifest.txt\"\n";
    let err = ExperimentConfig::from_toml(text).unwrap_err();
    assert!(err.to_string().contains("assignment.path"), "{err}");
}

//! Binary-level tests: pipeline composition, determinism, artifact and
//! exit-code contracts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dynlid_core::stats::{correlate, ObsField, Observation};
use dynlid_core::NodeId;

fn dynlid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// 30 nodes in three drifting groups over three days (the synthetic
/// composition fixture).
fn write_synthetic(path: &Path) {
    let mut lines = Vec::new();
    for day in 0..3u32 {
        let t0 = day as i64 * 86_400;
        for g in 0..3u32 {
            let base = g * 10;
            for i in 0..10u32 {
                for j in (i + 1)..10u32 {
                    if (i + j + day) % (g + 3) != 0 {
                        let t = t0 + i64::from(i * 97 + j * 31);
                        lines.push(format!("v{} v{} {t}", base + i, base + j));
                    }
                }
            }
        }
        lines.push(format!("v9 v10 {}", t0 + 11));
        lines.push(format!("v19 v20 {}", t0 + 12));
    }
    fs::write(path, lines.join("\n")).unwrap();
}

struct Pipeline {
    _dir: tempfile::TempDir,
    input: PathBuf,
    out: PathBuf,
}

fn run_full_pipeline() -> Pipeline {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("synthetic.edges");
    write_synthetic(&input);
    let out = dir.path().join("run");
    let input_s = input.to_str().unwrap();
    let out_s = out.to_str().unwrap();

    for args in [
        vec![
            "stats",
            "--input",
            input_s,
            "--snapshots",
            "3",
            "--out",
            out_s,
        ],
        vec![
            "nclid",
            "--input",
            input_s,
            "--snapshots",
            "3",
            "--out",
            out_s,
        ],
        vec![
            "embed",
            "--input",
            input_s,
            "--snapshots",
            "3",
            "--out",
            out_s,
            "--dim",
            "16",
            "--epochs-initial",
            "3",
            "--seed",
            "11",
            "--deterministic",
        ],
        vec![
            "evaluate",
            "--input",
            input_s,
            "--snapshots",
            "3",
            "--out",
            out_s,
        ],
        vec![
            "report",
            "--input",
            input_s,
            "--snapshots",
            "3",
            "--out",
            out_s,
        ],
    ] {
        assert_ok(&dynlid(&args));
    }
    Pipeline {
        _dir: dir,
        input,
        out,
    }
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn full_pipeline_report_matches_module_oracles() {
    let p = run_full_pipeline();

    for artifact in [
        "stats_summary.csv",
        "nclid.csv",
        "reconstruction.csv",
        "reconstruction.json",
        "centralities.csv",
        "report.json",
        "fig1_nclid.csv",
        "fig2_centrality_correlations.csv",
        "fig3_quality_correlations.csv",
        "table3_high_low.csv",
        "manifest_report.json",
        "snapshots/manifest.json",
    ] {
        assert!(p.out.join(artifact).exists(), "missing {artifact}");
    }

    // independent recomputation of the pooled Spearman(NC-LID, F1) from the
    // two CSV artifacts, compared against report.json
    let nclid_rows: Vec<(usize, String, f64)> = fs::read_to_string(p.out.join("nclid.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].to_string(),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    let recon_rows: Vec<(usize, String, f64, f64)> =
        fs::read_to_string(p.out.join("reconstruction.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (
                    f[0].parse().unwrap(),
                    f[1].to_string(),
                    f[5].parse().unwrap(),
                    f[7].parse().unwrap(),
                )
            })
            .collect();

    let nclid_by_key: BTreeMap<(usize, String), f64> = nclid_rows
        .iter()
        .map(|(s, l, v)| ((*s, l.clone()), *v))
        .collect();
    let mut observations: Vec<Observation<f64>> = Vec::new();
    for (idx, (s, label, _prec, f1)) in recon_rows.iter().enumerate() {
        let nclid = nclid_by_key[&(*s, label.clone())];
        observations.push(Observation {
            snapshot_index: *s,
            node: idx as NodeId,
            nclid,
            precision: 0.0,
            recall: 0.0,
            f1: *f1,
            centralities: BTreeMap::new(),
        });
    }
    let (expected_rho, n) = correlate(&observations, ObsField::NcLid, ObsField::F1).unwrap();
    assert_eq!(n, nclid_rows.len());
    assert_eq!(n, recon_rows.len());

    let report = read_json(&p.out.join("report.json"));
    let got_rho = report["spearman"]["f1"].as_f64().unwrap();
    // f1 rationals are spaced far wider than the CSV's 6-decimal grid, so
    // the artifact-based oracle sees the same rank structure as the report
    assert!(
        (got_rho - expected_rho).abs() < 1e-9,
        "report rho {got_rho} vs oracle {expected_rho}"
    );
    assert_eq!(report["observations"].as_u64().unwrap() as usize, n);
    for key in ["degree", "betweenness", "closeness", "eigenvector", "shell"] {
        assert!(
            report["spearman"][key].is_number(),
            "missing spearman.{key}"
        );
    }
    let mwu = &report["mwu"];
    for key in ["u", "p", "accepted", "f1_H", "f1_L", "ps_H", "ps_L"] {
        assert!(!mwu[key].is_null(), "missing mwu.{key}");
    }

    // stats row against the library oracle
    let stats = read_json(&p.out.join("stats_summary.json"));
    assert_eq!(stats["nodes"].as_u64(), Some(30));
    assert_eq!(stats["snapshots"].as_u64(), Some(3));
    {
        use dynlid_core::graph::{activation_stats, aggregate_graph, build_snapshots, BinSpec};
        let file = std::fs::File::open(&p.input).unwrap();
        let log = dynlid_core::graph::parse_event_log(std::io::BufReader::new(file)).unwrap();
        let seq = build_snapshots(&log, BinSpec::Count(3)).unwrap();
        let (a_v, a_e): (f64, f64) = activation_stats(&seq);
        assert!((stats["node_activation"].as_f64().unwrap() - a_v).abs() < 1e-9);
        assert!((stats["edge_activation"].as_f64().unwrap() - a_e).abs() < 1e-9);
        let edges = aggregate_graph(&log).unwrap().edge_count() as u64;
        assert_eq!(stats["edges"].as_u64(), Some(edges));
    }
}

#[test]
fn resolution_binning_and_flag_exclusivity() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("spread.edges");
    write_synthetic(&input);
    let out = dir.path().join("run");
    assert_ok(&dynlid(&[
        "stats",
        "--input",
        input.to_str().unwrap(),
        "--resolution",
        "86400",
        "--out",
        out.to_str().unwrap(),
    ]));
    let stats = read_json(&out.join("stats_summary.json"));
    // synthetic events span three day-sized chunks anchored at the first event
    assert_eq!(stats["snapshots"].as_u64(), Some(3));

    let both = dynlid(&[
        "stats",
        "--input",
        input.to_str().unwrap(),
        "--snapshots",
        "2",
        "--resolution",
        "86400",
    ]);
    assert!(!both.status.success(), "binning flags are mutually exclusive");
}

#[test]
fn complete_graph_nclid_summary_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("k4.edges");
    fs::write(&input, "a b 1\na c 1\na d 1\nb c 1\nb d 1\nc d 1\n").unwrap();
    let out = dir.path().join("run");
    assert_ok(&dynlid(&[
        "nclid",
        "--input",
        input.to_str().unwrap(),
        "--snapshots",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]));
    let summary = read_json(&out.join("nclid_summary.json"));
    assert_eq!(summary["mean_nclid"].as_f64(), Some(0.0));
    assert_eq!(summary["max_nclid"].as_f64(), Some(0.0));
    let table = fs::read_to_string(out.join("nclid.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    for line in table.lines().skip(1) {
        assert!(line.contains(",0.000000,"), "{line}");
    }
}

#[test]
fn deterministic_reruns_are_byte_identical() {
    let p = run_full_pipeline();
    let emb_path = p.out.join("embeddings/snapshot_2.emb");
    let report_path = p.out.join("report.json");
    let before_emb = fs::read(&emb_path).unwrap();
    let before_report = fs::read(&report_path).unwrap();

    let input_s = p.input.to_str().unwrap();
    let out_s = p.out.to_str().unwrap();
    assert_ok(&dynlid(&[
        "embed",
        "--input",
        input_s,
        "--snapshots",
        "3",
        "--out",
        out_s,
        "--dim",
        "16",
        "--epochs-initial",
        "3",
        "--seed",
        "11",
        "--deterministic",
    ]));
    assert_ok(&dynlid(&[
        "evaluate",
        "--input",
        input_s,
        "--snapshots",
        "3",
        "--out",
        out_s,
    ]));
    assert_ok(&dynlid(&[
        "report",
        "--input",
        input_s,
        "--snapshots",
        "3",
        "--out",
        out_s,
    ]));

    assert_eq!(before_emb, fs::read(&emb_path).unwrap());
    assert_eq!(before_report, fs::read(&report_path).unwrap());
}

#[test]
fn perfect_embedding_fixture_scores_all_ones() {
    // hand-written embeddings whose nearest pairs are exactly the edges
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tiny.edges");
    fs::write(&input, "a b 1\nc d 1\na b 5\nc d 5\n").unwrap();
    let out = dir.path().join("run");
    fs::create_dir_all(out.join("embeddings")).unwrap();
    for idx in 0..2 {
        fs::write(
            out.join(format!("embeddings/snapshot_{idx}.emb")),
            "4 2\na 0.000000 0.000000\nb 0.100000 0.000000\nc 9.000000 0.000000\nd 9.100000 0.000000\n",
        )
        .unwrap();
    }
    let output = dynlid(&[
        "evaluate",
        "--input",
        input.to_str().unwrap(),
        "--snapshots",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_ok(&output);
    let text = fs::read_to_string(out.join("reconstruction.csv")).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with("1.000000,1.000000,1.000000"), "{line}");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.edges");
    fs::write(&empty, "# nothing\n").unwrap();
    let out = dynlid(&[
        "stats",
        "--input",
        empty.to_str().unwrap(),
        "--snapshots",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let malformed = dir.path().join("bad.edges");
    fs::write(&malformed, "a b one\n").unwrap();
    let out = dynlid(&[
        "stats",
        "--input",
        malformed.to_str().unwrap(),
        "--snapshots",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let good = dir.path().join("good.edges");
    fs::write(&good, "a b 1\nb c 2\n").unwrap();
    let fresh = dir.path().join("fresh");
    let out = dynlid(&[
        "evaluate",
        "--input",
        good.to_str().unwrap(),
        "--snapshots",
        "1",
        "--out",
        fresh.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("embeddings"),
        "must name the expected path: {stderr}"
    );

    // report without its upstream artifacts also names the missing file
    let out = dynlid(&[
        "report",
        "--input",
        good.to_str().unwrap(),
        "--snapshots",
        "1",
        "--out",
        fresh.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nclid.csv"));
}

#[test]
fn temporal_nclid_emits_its_own_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tiny.edges");
    fs::write(&input, "a b 1\nb c 3\na c 5\n").unwrap();
    let out = dir.path().join("run");
    assert_ok(&dynlid(&[
        "nclid",
        "--input",
        input.to_str().unwrap(),
        "--snapshots",
        "1",
        "--temporal",
        "--out",
        out.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(out.join("nclid_temporal.csv")).unwrap();
    assert!(text.starts_with("node_label,nclid,community_size,k,ball"));
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(out.join("nclid_summary.json").exists());
}

#[test]
fn tune_writes_a_sorted_grid_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cliques.edges");
    let mut lines = Vec::new();
    for t in [0i64, 10] {
        for a in 0..4u32 {
            for b in (a + 1)..4u32 {
                lines.push(format!("x{a} x{b} {t}"));
                lines.push(format!("y{a} y{b} {t}"));
            }
        }
    }
    fs::write(&input, lines.join("\n")).unwrap();
    let out = dir.path().join("run");
    assert_ok(&dynlid(&[
        "tune",
        "--input",
        input.to_str().unwrap(),
        "--snapshots",
        "2",
        "--p",
        "0.5,1",
        "--q",
        "1",
        "--dim",
        "10",
        "--runs",
        "2",
        "--walks",
        "5",
        "--walk-length",
        "10",
        "--epochs-initial",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(out.join("tune.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "network,dim,p,q,precision,recall,f1");
    assert_eq!(rows.len(), 3, "{text}");
    assert!(rows[1].starts_with("cliques,"));
    let f1_of = |row: &str| row.split(',').nth(6).unwrap().parse::<f64>().unwrap();
    assert!(
        f1_of(rows[1]) >= f1_of(rows[2]),
        "rows must be sorted best-first"
    );

    let best = read_json(&out.join("tune_best.json"));
    assert!((best["f1"].as_f64().unwrap() - f1_of(rows[1])).abs() < 1e-9);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIXTURE: &str = "citing,cited,count
Alpha,Beta,4
Alpha,Gamma,2
Alpha,Alpha,6
Beta,Alpha,3
Beta,Delta,1
Gamma,Alpha,5
Gamma,Beta,2
Gamma,Delta,3
Delta,Gamma,1
Delta,Delta,2
Epsilon,Alpha,1
Epsilon,Beta,1
Epsilon,Gamma,1
Epsilon,Delta,1
";

const METADATA: &str = "name,category,total_cites,impact_factor,immediacy
Alpha,Library Science,120,2.5,0.4
Beta,Library Science,80,1.1,0.2
Gamma,Physics,300,3.0,0.9
Delta,Library Science,15,0.5,0.1
Epsilon,Physics,5,0.2,
";

fn interdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interdisc"))
        .args(args)
        .output()
        .expect("run interdisc")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("edges.csv"), FIXTURE).unwrap();
        std::fs::write(dir.path().join("meta.csv"), METADATA).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }
}

fn csv_header(text: &str) -> Vec<String> {
    let line = text.lines().find(|l| !l.starts_with('#')).unwrap();
    line.split(',').map(String::from).collect()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn help_and_usage_errors() {
    let o = interdisc(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("indicators"));
    assert_eq!(interdisc(&[]).status.code(), Some(1));
    assert_eq!(interdisc(&["indicators", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        interdisc(&["indicators"]).status.code(),
        Some(1),
        "missing input is a usage error"
    );
    assert_eq!(
        interdisc(&["indicators", "-i", "x.csv", "--min-count", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(interdisc(&["synth"]).status.code(), Some(1));
}

#[test]
fn data_errors_exit_with_two() {
    let w = Workspace::new();
    let o = interdisc(&["indicators", "-i", &w.s("missing.csv"), "-o", &w.s("out")]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    std::fs::write(w.path("bad.csv"), "citing,cited,count\nA,B,x\n").unwrap();
    let o = interdisc(&["indicators", "-i", &w.s("bad.csv"), "-o", &w.s("out")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn indicators_write_both_directions() {
    let w = Workspace::new();
    let o = interdisc(&["indicators", "-i", &w.s("edges.csv"), "-o", &w.s("out")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for (dir, degree) in [("cited", "indegree"), ("citing", "outdegree")] {
        let text = w.read(&format!("out/indicators_{dir}.csv"));
        assert!(text.starts_with(&format!("# interdisc indicators direction={dir}")));
        assert!(text.contains("# input_sha256: "));
        let header = csv_header(&text);
        let expected = [
            "gini",
            "gini_normalized",
            "entropy",
            "entropy_normalized",
            "betweenness_raw",
            "betweenness_raw_normalized",
            "betweenness_cosine",
            "betweenness_cosine_normalized",
            "rao_stirling_one_minus_cosine",
            "rao_stirling_relative_euclidean",
            degree,
            "total",
        ];
        for col in expected {
            assert!(header.iter().any(|h| h == col), "{dir} lacks {col}: {header:?}");
        }
        assert_eq!(csv_rows(&text).len(), 5);
    }
    let json: serde_json::Value = serde_json::from_str(&w.read("out/indicators.json")).unwrap();
    assert_eq!(json["directions"].as_array().unwrap().len(), 2);
}

#[test]
fn cited_only_journal_is_flagged() {
    let w = Workspace::new();
    interdisc(&["indicators", "-i", &w.s("edges.csv"), "-o", &w.s("out")]);
    let text = w.read("out/indicators_cited.csv");
    let header = csv_header(&text);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let epsilon = csv_rows(&text)
        .into_iter()
        .find(|r| r[col("journal")] == "Epsilon")
        .unwrap();
    assert_eq!(epsilon[col("empty")], "true");
    assert_eq!(epsilon[col("gini")], "");
}

#[test]
fn rank_writes_a_file_and_appends() {
    let w = Workspace::new();
    let o = interdisc(&[
        "rank",
        "-i",
        &w.s("edges.csv"),
        "-o",
        &w.s("out"),
        "--indicator",
        "gini",
        "--direction",
        "citing",
        "--top",
        "2",
        "--append",
        "delta",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("gini (citing), top 2"));
    let text = w.read("out/ranking_gini_citing.csv");
    let rows = csv_rows(&text);
    assert!(rows.len() >= 2 && rows.len() <= 3, "{text}");
    let ranks: Vec<f64> = rows.iter().take(2).map(|r| r[0].parse().unwrap()).collect();
    assert!(ranks[0] <= ranks[1]);

    let o = interdisc(&[
        "rank",
        "-i",
        &w.s("edges.csv"),
        "-o",
        &w.s("out"),
        "--indicator",
        "nonsense",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = interdisc(&[
        "rank",
        "-i",
        &w.s("edges.csv"),
        "-o",
        &w.s("out"),
        "--indicator",
        "gini",
        "--append",
        "Zeta",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let w = Workspace::new();
    let cfg = serde_json::json!({
        "input": w.s("edges.csv"),
        "outdir": w.s("from_config"),
        "directions": ["citing"],
        "metrics": ["one_minus_cosine"],
    });
    std::fs::write(w.path("run.json"), cfg.to_string()).unwrap();
    let o = interdisc(&["indicators", "--config", &w.s("run.json"), "-o", &w.s("flag_out")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(w.path("flag_out/indicators_citing.csv").exists());
    assert!(!w.path("flag_out/indicators_cited.csv").exists());
    assert!(!w.path("from_config").exists());
    let text = w.read("flag_out/indicators_citing.csv");
    let header = csv_header(&text);
    let col = header
        .iter()
        .position(|h| h == "rao_stirling_relative_euclidean")
        .unwrap();
    assert!(csv_rows(&text).iter().all(|r| r[col].is_empty()));

    std::fs::write(w.path("bad.json"), r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(
        interdisc(&["indicators", "--config", &w.s("bad.json")]).status.code(),
        Some(1)
    );
}

#[test]
fn subset_by_category_in_both_modes() {
    let w = Workspace::new();
    for mode in ["global", "local"] {
        let out = format!("sub_{mode}");
        let o = interdisc(&[
            "subset",
            "-i",
            &w.s("edges.csv"),
            "--metadata",
            &w.s("meta.csv"),
            "--category",
            "library science",
            "--subset-mode",
            mode,
            "-o",
            &w.s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = w.read(&format!("{out}/indicators_cited.csv"));
        let names: Vec<String> = csv_rows(&text).into_iter().map(|r| r[1].clone()).collect();
        assert_eq!(names, vec!["Alpha", "Beta", "Delta"], "{mode}");
    }
    let o = interdisc(&["subset", "-i", &w.s("edges.csv"), "-o", &w.s("x")]);
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(w.path("ids.txt"), "Alpha\nGamma\n").unwrap();
    let o = interdisc(&[
        "subset",
        "-i",
        &w.s("edges.csv"),
        "--ids",
        &w.s("ids.txt"),
        "-o",
        &w.s("by_ids"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(csv_rows(&w.read("by_ids/indicators_citing.csv")).len(), 2);
}

#[test]
fn synth_then_correlate_and_factor() {
    let w = Workspace::new();
    let o = interdisc(&["synth", "--planted", "--seed", "3", "-o", &w.s("syn")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let truth: serde_json::Value = serde_json::from_str(&w.read("syn/synth_truth.json")).unwrap();
    assert_eq!(truth["seed"], 3);
    assert_eq!(truth["bridges"].as_array().unwrap().len(), 2);
    let edges = w.s("syn/synth_edges.csv");

    let o = interdisc(&["correlate", "-i", &edges, "-o", &w.s("an")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("** p < 0.01"));
    let corr: serde_json::Value = serde_json::from_str(&w.read("an/correlations.json")).unwrap();
    assert!(corr.to_string().contains("p_value"));
    assert!(w.path("an/correlations.csv").exists());

    let o = interdisc(&["factor", "-i", &edges, "-o", &w.s("an"), "-k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("Rotation: varimax with Kaiser normalization"));
    let f: serde_json::Value = serde_json::from_str(&w.read("an/factors.json")).unwrap();
    assert!(f.to_string().contains("rotation"));

    let o = interdisc(&["factor", "-i", &edges, "-o", &w.s("an"), "-k", "40"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn export_matrix_kinds() {
    let w = Workspace::new();
    for kind in ["cosine", "one-minus-cosine", "relative-euclidean", "cooccurrence"] {
        let out = w.path(&format!("{kind}.mtx"));
        let o = interdisc(&[
            "export-matrix",
            "-i",
            &w.s("edges.csv"),
            "-o",
            &w.s("out"),
            "--kind",
            kind,
            "--direction",
            "citing",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate"), "{kind}");
        assert!(text.lines().any(|l| l.starts_with("5 5 ")), "{kind}: {text}");
    }
    let o = interdisc(&[
        "export-matrix",
        "-i",
        &w.s("edges.csv"),
        "-o",
        &w.s("out"),
        "--kind",
        "cosine",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(&w.s("out/cosine_cited.mtx")).exists());
}

#[test]
fn matrix_market_input_with_names() {
    let w = Workspace::new();
    std::fs::write(
        w.path("m.mtx"),
        "%%MatrixMarket matrix coordinate integer general\n3 3 4\n1 2 3\n2 1 1\n3 1 2\n2 3 5\n",
    )
    .unwrap();
    std::fs::write(w.path("names.txt"), "One\nTwo\nThree\n").unwrap();
    let o = interdisc(&[
        "indicators",
        "-i",
        &w.s("m.mtx"),
        "--names",
        &w.s("names.txt"),
        "-o",
        &w.s("out"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&w.read("out/indicators_cited.csv"));
    let names: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(names, vec!["One", "Two", "Three"]);
}

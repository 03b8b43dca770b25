use std::io::Cursor;

use proptest::prelude::*;

use interdisc::config::RunConfig;
use interdisc::core::netspace::{cosine_matrix, distance_matrix, DistanceMetric};
use interdisc::core::{CitationMatrix, Direction, JournalRegistry};
use interdisc::error::CliError;
use interdisc::io::{
    read_edge_list, read_matrix_market, read_metadata, read_name_list, write_edge_list, write_matrix_market,
    write_symmetric,
};
use interdisc::pipeline::{run_indicators, Corpus};

const SMALL: &str = "citing,cited,count\nA,B,3\nA,C,1\nB,A,2\nC,C,5\nB,C,4\nA,B,1\n";

fn data_error<T: std::fmt::Debug>(r: Result<T, CliError>) -> String {
    match r {
        Err(CliError::Data(m)) => m,
        other => panic!("expected a data error, got {other:?}"),
    }
}

#[test]
fn edge_list_reads_and_sums_duplicates() {
    let (reg, m) = read_edge_list(SMALL.as_bytes(), 1).unwrap();
    assert_eq!(reg.len(), 3);
    let id = |n: &str| reg.id_of(n).unwrap();
    assert_eq!(m.get(id("B"), id("A")), 4);
    assert_eq!(m.get(id("A"), id("B")), 2);
    assert_eq!(m.get(id("C"), id("C")), 5);
    assert_eq!(m.total(), 16);
}

#[test]
fn edge_list_min_count_applies_after_summing() {
    let (reg, m) = read_edge_list(SMALL.as_bytes(), 4).unwrap();
    let id = |n: &str| reg.id_of(n).unwrap();
    assert_eq!(m.get(id("B"), id("A")), 4);
    assert_eq!(m.get(id("A"), id("C")), 0);
    assert_eq!(m.nnz(), 3);
}

#[test]
fn edge_list_errors_name_the_line() {
    let bad_header = data_error(read_edge_list("from,to,n\nA,B,1\n".as_bytes(), 1));
    assert!(bad_header.contains("line 1"), "{bad_header}");
    let negative = data_error(read_edge_list("citing,cited,count\nA,B,1\nA,C,-2\n".as_bytes(), 1));
    assert!(negative.contains("line 3"), "{negative}");
    let missing = data_error(read_edge_list("citing,cited,count\nA,B\n".as_bytes(), 1));
    assert!(missing.contains("line 2"), "{missing}");
    let fraction = data_error(read_edge_list("citing,cited,count\nA,B,1.5\n".as_bytes(), 1));
    assert!(fraction.contains("line 2"), "{fraction}");
    data_error(read_edge_list("citing,cited,count\n".as_bytes(), 1));
}

#[test]
fn edge_list_round_trip() {
    let (reg, m) = read_edge_list(SMALL.as_bytes(), 1).unwrap();
    let mut buf = Vec::new();
    write_edge_list(&mut buf, &reg, &m).unwrap();
    let (reg2, m2) = read_edge_list(buf.as_slice(), 1).unwrap();
    for (i, j, c) in m.triplets() {
        let (a, b) = (reg2.id_of(reg.name(i)).unwrap(), reg2.id_of(reg.name(j)).unwrap());
        assert_eq!(m2.get(a, b), c);
    }
    assert_eq!(m.total(), m2.total());
}

#[test]
fn permuted_rows_give_the_same_indicators_by_name() {
    let lines: Vec<&str> = SMALL.lines().skip(1).collect();
    let mut reversed = String::from("citing,cited,count\n");
    for l in lines.iter().rev() {
        reversed.push_str(l);
        reversed.push('\n');
    }
    let by_name = |text: &str| {
        let (registry, matrix) = read_edge_list(text.as_bytes(), 1).unwrap();
        let corpus = Corpus {
            registry,
            matrix,
            input_sha256: String::new(),
            metadata: None,
        };
        let run = run_indicators(&RunConfig::default(), &corpus).unwrap();
        let mut out = Vec::new();
        for d in &run.directions {
            for col in d.table.columns() {
                for (row, cell) in col.cells.iter().enumerate() {
                    out.push((
                        d.direction,
                        col.name.clone(),
                        run.names[row].clone(),
                        cell.value().map(f64::to_bits),
                    ));
                }
            }
        }
        out.sort();
        out
    };
    assert_eq!(by_name(SMALL), by_name(&reversed));
}

#[test]
fn matrix_market_general_and_symmetric() {
    let general = "%%MatrixMarket matrix coordinate integer general\n% comment\n3 3 3\n1 2 4\n2 1 1\n3 3 7\n";
    let (reg, m) = read_matrix_market(Cursor::new(general), None).unwrap();
    assert_eq!(reg.name(0), "J1");
    assert_eq!((m.get(0, 1), m.get(1, 0), m.get(2, 2)), (4, 1, 7));

    let symmetric = "%%MatrixMarket matrix coordinate integer symmetric\n3 3 2\n2 1 5\n3 3 2\n";
    let names = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    let (reg, m) = read_matrix_market(Cursor::new(symmetric), Some(names)).unwrap();
    assert_eq!(reg.name(2), "z");
    assert_eq!((m.get(1, 0), m.get(0, 1), m.get(2, 2)), (5, 5, 2));
    assert!(m.is_symmetric());
}

#[test]
fn matrix_market_rejects_bad_input() {
    let cases = [
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n",
        "%%MatrixMarket matrix coordinate integer general\n2 3 1\n1 1 1\n",
        "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 -1\n",
        "%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 1\n",
        "%%MatrixMarket matrix coordinate integer general\n2 2 1\n3 1 1\n",
        "%%MatrixMarket matrix array integer general\n2 2\n1\n1\n1\n1\n",
    ];
    for text in cases {
        data_error(read_matrix_market(Cursor::new(text), None));
    }
    let wrong_names = vec!["only".to_string()];
    data_error(read_matrix_market(
        Cursor::new("%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 2 1\n"),
        Some(wrong_names),
    ));
}

#[test]
fn matrix_market_round_trip() {
    let m = CitationMatrix::from_triplets(4, [(0, 1, 3), (1, 0, 2), (3, 2, 9), (2, 2, 1)], 1).unwrap();
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &m).unwrap();
    let (_, back) = read_matrix_market(Cursor::new(buf), None).unwrap();
    assert_eq!(back, m);
}

#[test]
fn symmetric_export_formats() {
    let m = CitationMatrix::from_triplets(3, [(0, 0, 1), (0, 1, 1), (1, 1, 2)], 1).unwrap();
    let mut buf = Vec::new();
    write_symmetric(&mut buf, &cosine_matrix(&m, Direction::Cited)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real symmetric\n"));
    assert!(text.contains("% kind: cosine_similarity"), "{text}");

    let mut buf = Vec::new();
    write_symmetric(
        &mut buf,
        &distance_matrix(&m, Direction::Cited, DistanceMetric::OneMinusCosine).unwrap(),
    )
    .unwrap();
    let text = String::from_utf8(buf).unwrap();
    // Journal 3 has an empty cited vector: its two off-diagonal cells are
    // undefined while the zeroed diagonal is kept.
    assert!(text.contains("% undefined cells omitted: 2"), "{text}");
    assert!(text.contains("\n3 3 0\n"), "{text}");
}

#[test]
fn name_lists_skip_comments() {
    let names = read_name_list(Cursor::new("# header\nAlpha\n\n  Beta  \n")).unwrap();
    assert_eq!(names, vec!["Alpha", "Beta"]);
}

#[test]
fn metadata_rows_and_errors() {
    let text = "name,category,total_cites,impact_factor,immediacy\nA,Physics,120,2.5,0.4\nB,,,,\nC,Biology\n";
    let rows = read_metadata(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].meta.category.as_deref(), Some("Physics"));
    assert_eq!(rows[0].meta.total_cites, Some(120));
    assert_eq!(rows[1].meta.impact_factor, None);
    assert_eq!(rows[2].meta.category.as_deref(), Some("Biology"));

    let mut reg = JournalRegistry::from_names(["A", "B"]).unwrap();
    let report = reg.attach_metadata(rows).unwrap();
    assert_eq!(report.unmatched, vec!["C".to_string()]);
    assert_eq!(reg.ids_in_category("physics"), vec![0]);

    data_error(read_metadata("journal,category\nA,x\n".as_bytes()));
    let bad = data_error(read_metadata("name,category,total_cites\nA,x,-3\n".as_bytes()));
    assert!(bad.contains("line 2"), "{bad}");
    data_error(read_metadata(
        "name,category,total_cites,impact_factor\nA,x,1,abc\n".as_bytes(),
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_and_matrix_market_round_trip(
        n in 1usize..15,
        cells in prop::collection::vec((0usize..15, 0usize..15, 1u64..1000), 1..60),
    ) {
        let cells: Vec<_> = cells.into_iter().map(|(i, j, c)| (i % n, j % n, c)).collect();
        let m = CitationMatrix::from_triplets(n, cells, 1).unwrap();
        let reg = JournalRegistry::from_names((0..n).map(|i| format!("Journal {i}"))).unwrap();

        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &m).unwrap();
        let (_, back) = read_matrix_market(Cursor::new(buf), None).unwrap();
        prop_assert_eq!(&back, &m);

        let mut buf = Vec::new();
        write_edge_list(&mut buf, &reg, &m).unwrap();
        let (reg2, m2) = read_edge_list(buf.as_slice(), 1).unwrap();
        prop_assert_eq!(m2.total(), m.total());
        for (i, j, c) in m.triplets() {
            let (a, b) = (reg2.id_of(reg.name(i)).unwrap(), reg2.id_of(reg.name(j)).unwrap());
            prop_assert_eq!(m2.get(a, b), c);
        }
    }
}

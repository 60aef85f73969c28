use std::path::PathBuf;

use rrcheck::verify::grid::{self, GRID_NAMES};
use rrcheck::verify::scenario::document_string;
use rrcheck::verify::{parse_document, run_all, Outcome, Summary};
use rrcheck::ExecMode;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/grids").join(format!("{name}.json"))
}

#[test]
fn shipped_grid_files_match_generators() {
    for name in GRID_NAMES {
        let text = std::fs::read_to_string(shipped(name)).expect("grid file exists");
        let generated = grid::grid_by_name(name).unwrap();
        assert_eq!(text, document_string(&generated), "{name}.json is stale");
    }
}

#[test]
fn grids_survive_a_round_trip() {
    for name in GRID_NAMES {
        let entries = grid::grid_by_name(name).unwrap();
        let reparsed = parse_document(&document_string(&entries), name).unwrap();
        assert_eq!(document_string(&reparsed), document_string(&entries), "{name}");
    }
}

#[test]
fn equivariant_grr_grid_passes() {
    let reports = run_all(&grid::equivariant_grr_grid(), ExecMode::Parallel);
    for r in &reports {
        assert_eq!(r.outcome(), Outcome::Passed, "{}", r.to_json_line());
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let entries = grid::passing_grid();
    let seq = run_all(&entries, ExecMode::Sequential);
    let par = run_all(&entries, ExecMode::Parallel);
    assert_eq!(seq, par);
    let s = Summary::from_reports(&par);
    assert!(s.all_passed(), "{s:?}");
}

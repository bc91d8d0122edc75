use std::path::PathBuf;

use fcc_core::search::{run_fact_script, FactScript};

fn facts_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../facts")
}

fn run(name: &str) {
    let script = FactScript::from_file(facts_dir().join(name)).unwrap();
    let report = run_fact_script(&script).unwrap();
    assert!(report.all_pass(), "{report}");
}

#[test]
fn power3_ge29() {
    run("power3_ge29.json");
}

#[test]
fn slab02_le2661() {
    run("slab02_le2661.json");
}

#[test]
fn slab02_le2665() {
    run("slab02_le2665.json");
}

#[test]
fn slab02_le2667() {
    run("slab02_le2667.json");
}

#[test]
fn slab02_sharknado() {
    run("slab02_sharknado.json");
}

#[test]
fn every_shipped_script_is_listed() {
    let mut names: Vec<String> = std::fs::read_dir(facts_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "power3_ge29.json",
            "slab02_le2661.json",
            "slab02_le2665.json",
            "slab02_le2667.json",
            "slab02_sharknado.json"
        ]
    );
}

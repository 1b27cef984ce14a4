use std::io::Write;

use bsshell::config::{load_force_file, RunConfig};
use tempfile::NamedTempFile;

#[test]
fn defaults_fill_missing_blocks() {
    let config: RunConfig = serde_json::from_str(r#"{"chart": {"kind": "plate"}}"#).unwrap();
    assert_eq!(config.mesh.nx, 8);
    assert_eq!(config.material.epsilon, 0.01);
    assert!(config.solver.options().is_ok());
}

#[test]
fn chart_parameters_are_required() {
    assert!(serde_json::from_str::<RunConfig>(r#"{"chart": {"kind": "cylinder"}}"#).is_err());
    assert!(serde_json::from_str::<RunConfig>(r#"{"chart": {"kind": "hypar", "c1": 1}}"#).is_err());
}

#[test]
fn force_file_needs_the_exact_header() {
    let mut file = NamedTempFile::new().unwrap();
    writeln!(file, "x,y,f1,f2,f3\n0,0,0,0,0").unwrap();
    assert!(load_force_file(file.path()).is_err());
}

#[test]
fn shipped_configs_load_and_set_up() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let (config, base) = RunConfig::load(&path).unwrap();
        config.setup(&base).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 3);
}

//! Generator outputs pinned against the JSON files in `tests/golden/`.

use std::fs;
use std::path::Path;

use serde_json::Value;

use densprog_core::setspec::set_to_json;
use densprog_core::{FamilyConfig, SetSpec};

#[test]
fn generators_match_golden_files() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let golden: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let spec = SetSpec::from_json(&golden["spec"]).unwrap();
        let cfg = FamilyConfig::default();
        let first = spec.resolve(&cfg).unwrap();
        let again = spec.resolve(&cfg).unwrap();
        assert_eq!(first, again, "{} is not deterministic", path.display());
        assert_eq!(set_to_json(&first)["intervals"], golden["intervals"], "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 9, "golden files missing from {}", dir.display());
}

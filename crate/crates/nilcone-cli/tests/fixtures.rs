use std::path::PathBuf;

use nilcone_cli::fixtures::bundled;
use nilcone_cli::{ingest, ingest_str};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Set `NILCONE_BLESS=1` to rewrite the files from the library examples.
#[test]
fn bundled_files_match_their_builders() {
    let bless = std::env::var("NILCONE_BLESS").is_ok_and(|v| v == "1");
    for (file, scenario) in bundled() {
        let path = fixture_dir().join(file);
        let expected = scenario.to_json();
        if bless {
            std::fs::write(&path, &expected).unwrap();
        }
        let on_disk =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{file}: {e}; run with NILCONE_BLESS=1"));
        assert_eq!(on_disk, expected, "{file} is stale; run with NILCONE_BLESS=1");
        assert_eq!(ingest(&path).unwrap(), scenario, "{file}");
    }
}

#[test]
fn serialization_round_trips() {
    for (file, scenario) in bundled() {
        let text = scenario.to_json();
        let back = ingest_str(&text).unwrap();
        assert_eq!(back, scenario, "{file}");
        assert_eq!(back.to_json(), text, "{file}");
    }
}

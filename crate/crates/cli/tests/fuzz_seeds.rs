//! Replays the checked-in fuzz seeds through the fuzz target bodies, so the
//! seeds stay parseable as the formats evolve.

use std::path::PathBuf;
use std::str::FromStr;

use qeigen::structrep::StructuredEigenfunction;
use qeigen::verify::{Suite, SuiteConfig};
use qeigen_cli::config::{merge, Command, CommonArgs};
use qeigen_cli::ConfigFile;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty(), "{target}");
    paths.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn eigenfunction_seeds() {
    for s in seeds("eigenfunction_json") {
        let f = StructuredEigenfunction::from_json_str(&s).unwrap();
        assert_eq!(StructuredEigenfunction::from_json_str(&f.to_json_string()).unwrap(), f);
        assert!(f.evaluate(1.0).unwrap().is_finite());
    }
}

#[test]
fn suite_config_seeds() {
    for s in seeds("suite_config_json") {
        let c: SuiteConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), s);
    }
}

#[test]
fn cli_config_seeds() {
    for s in seeds("cli_config_json") {
        let file = ConfigFile::from_json_str(&s).unwrap();
        let cfg = merge(Command::Tabulate, &CommonArgs::default(), None, None, file);
        cfg.validate().unwrap();
        assert!(!cfg.points().is_empty());
    }
}

#[test]
fn suite_name_seeds() {
    for s in seeds("suite_name") {
        let suite = Suite::from_str(&s).unwrap();
        assert_eq!(suite.name(), s);
    }
}

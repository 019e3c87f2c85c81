#![no_main]

use libfuzzer_sys::fuzz_target;
use qeigen_cli::config::{merge, Command, CommonArgs};
use qeigen_cli::ConfigFile;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(file) = ConfigFile::from_json_str(s) else { return };
    let cfg = merge(Command::Tabulate, &CommonArgs::default(), None, None, file);
    if cfg.validate().is_ok() {
        let n = cfg.points().len();
        assert!(n >= 1);
    }
});

#![no_main]

use std::str::FromStr;

use libfuzzer_sys::fuzz_target;
use qeigen::verify::Suite;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(suite) = Suite::from_str(s) {
        assert_eq!(Suite::from_str(suite.name()), Ok(suite));
    }
});

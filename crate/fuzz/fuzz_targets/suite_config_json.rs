#![no_main]

use libfuzzer_sys::fuzz_target;
use qeigen::verify::SuiteConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(c) = serde_json::from_slice::<SuiteConfig>(data) else { return };
    let back: SuiteConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&c).unwrap(), serde_json::to_string(&back).unwrap());
});

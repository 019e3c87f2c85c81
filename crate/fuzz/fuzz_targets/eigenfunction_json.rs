#![no_main]

use libfuzzer_sys::fuzz_target;
use qeigen::structrep::StructuredEigenfunction;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(f) = StructuredEigenfunction::from_json_str(s) else { return };
    let g = StructuredEigenfunction::from_json_str(&f.to_json_string()).expect("re-read");
    assert_eq!(f, g);
    let _ = f.evaluate(1.0);
});

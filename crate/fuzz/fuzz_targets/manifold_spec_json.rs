#![no_main]

use libfuzzer_sys::fuzz_target;
use loopspace_core::ManifoldSpec;

fuzz_target!(|data: &str| {
    if let Ok(spec) = ManifoldSpec::from_json_str(data) {
        let again = ManifoldSpec::from_json_str(&spec.to_json().to_string()).expect("written specs parse");
        assert_eq!(again.kind(), spec.kind());
        assert_eq!(again.ambient(), spec.ambient());
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use loopspace_core::FourierLoop;

fuzz_target!(|data: &str| {
    let Ok(f) = FourierLoop::from_json_str(data) else {
        return;
    };
    let again = FourierLoop::from_json_str(&f.to_json_string()).expect("written loops parse");
    assert_eq!(again.cutoff(), f.cutoff());
    assert_eq!(again.ambient(), f.ambient());
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use loopspace_core::{Ambient, SampledLoop};

fuzz_target!(|data: &[u8]| {
    // first byte picks the ambient
    let Some((&tag, rest)) = data.split_first() else {
        return;
    };
    let dim = 1 + usize::from(tag >> 2) % 3;
    let ambient = match tag & 3 {
        0 => Ambient::Real(dim),
        1 => Ambient::Complex(dim),
        _ => Ambient::Matrix(1 + dim % 2),
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(s) = SampledLoop::from_csv(text, ambient) {
        let again = SampledLoop::from_csv(&s.to_csv(), ambient).expect("written loops parse");
        assert_eq!(again.len(), s.len());
    }
});

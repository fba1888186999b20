#![no_main]

use libfuzzer_sys::fuzz_target;
use loopspace_lab::ExperimentConfig;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = ExperimentConfig::from_json_str(data) {
        let again = ExperimentConfig::from_json_str(&cfg.to_json().to_string()).expect("written configs parse");
        assert_eq!(again.sha256(), cfg.sha256());
    }
});

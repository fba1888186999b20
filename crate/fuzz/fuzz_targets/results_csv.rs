#![no_main]

use libfuzzer_sys::fuzz_target;
use loopspace_lab::ResultTable;

fuzz_target!(|data: &str| {
    if let Ok(t) = ResultTable::from_csv(data) {
        let again = ResultTable::from_csv(&t.to_csv()).expect("written tables parse");
        assert_eq!(again.columns(), t.columns());
        assert_eq!(again.rows().len(), t.rows().len());
    }
});

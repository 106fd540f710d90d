#![no_main]

use libfuzzer_sys::fuzz_target;
use ultrafid::measures::ConvergenceReport;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = ConvergenceReport::from_csv(text) {
        assert_eq!(ConvergenceReport::from_csv(&r.to_csv()).expect("re-parses"), r);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use ultrafid::measures::DensityGrid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = DensityGrid::from_csv(text) {
        assert_eq!(DensityGrid::from_csv(&g.to_csv()).expect("re-parses"), g);
    }
});

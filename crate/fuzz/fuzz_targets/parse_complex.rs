#![no_main]

use libfuzzer_sys::fuzz_target;
use ultrafid::transforms::{parse_complex, SlitPoint};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(text) {
        assert!(z.re.is_finite() && z.im.is_finite());
    }
    if let Ok(p) = text.parse::<SlitPoint>() {
        let again: SlitPoint = p.to_string().parse().expect("display parses back");
        assert_eq!(again.value(), p.value());
    }
});

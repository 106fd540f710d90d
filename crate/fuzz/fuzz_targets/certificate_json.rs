#![no_main]

use libfuzzer_sys::fuzz_target;
use ultrafid::inversion::CertificateRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = CertificateRecord::from_json(text) {
        let back = CertificateRecord::from_json(&rec.to_json()).expect("valid record re-parses");
        assert_eq!(back, rec);
    }
});

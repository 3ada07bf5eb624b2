#![no_main]

use censim_core::io::{parse_sample_csv, write_sample_csv, write_times_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = parse_sample_csv(text) else { return };
    assert!(!table.t.is_empty());
    assert!(table.t.iter().all(|t| t.is_finite() && *t >= 0.0));

    // whatever parses must survive a write/parse cycle unchanged
    let mut buf = Vec::new();
    match &table.delta {
        Some(delta) => {
            assert_eq!(delta.len(), table.t.len());
            write_sample_csv(&mut buf, &table.clone().censored().unwrap()).unwrap();
        }
        None => write_times_csv(&mut buf, &table.t).unwrap(),
    }
    let again = parse_sample_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(again, table);
});

#![no_main]

use censim_core::censoring::{apply_random, apply_type_i, apply_type_ii, sample_cure};
use censim_core::distributions::{MixtureCureParams, WeibullParams};
use censim_core::estimation::{fit_cure_random, fit_random, fit_type_i, fit_type_ii};
use censim_core::io::{parse_sample_csv, write_sample_csv};
use censim_core::numerics::RngStream;
use censim_core::sampling::sample_weibull;
use libfuzzer_sys::fuzz_target;

// Input layout: seed (8 bytes), then scheme, n, alpha, beta, censoring knob.
fuzz_target!(|data: &[u8]| {
    if data.len() < 13 {
        return;
    }
    let seed = u64::from_le_bytes(data[..8].try_into().unwrap());
    let scheme = data[8] % 4;
    let n = 5 + data[9] as usize;
    let alpha = 0.3 + data[10] as f64 / 32.0;
    let beta = 0.2 + data[11] as f64 / 32.0;
    let knob = (data[12] as f64 + 0.5) / 256.0;

    let base = WeibullParams::new(alpha, beta).unwrap();
    let mut rng = RngStream::new(seed);
    let x = sample_weibull(&mut rng, &base, n).unwrap();
    let (sample, t_c) = match scheme {
        0 => (apply_type_ii(&x, ((knob * n as f64) as usize).min(n - 1)).unwrap(), None),
        1 => {
            let t_c = base.quantile(knob).unwrap();
            (apply_type_i(&x, t_c).unwrap(), Some(t_c))
        }
        2 => (apply_random(&mut rng, &x, 4.0 * knob * base.mean()).unwrap(), None),
        _ => {
            let cure = MixtureCureParams::new(0.5 * knob, base).unwrap();
            (sample_cure(&mut rng, &cure, 2.0 * base.mean(), n).unwrap().censored, None)
        }
    };

    let mut buf = Vec::new();
    write_sample_csv(&mut buf, &sample).unwrap();
    let parsed = parse_sample_csv(std::str::from_utf8(&buf).unwrap())
        .expect("written sample parses")
        .censored()
        .unwrap();
    assert_eq!(parsed, sample);

    // fitting may reject degenerate samples but must not panic
    let _ = match (scheme, t_c) {
        (0, _) => fit_type_ii(&parsed),
        (1, Some(t_c)) => fit_type_i(&parsed, t_c),
        (2, _) => fit_random(&parsed),
        _ => fit_cure_random(&parsed, None),
    };
});

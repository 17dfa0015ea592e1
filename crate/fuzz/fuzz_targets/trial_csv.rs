#![no_main]

use bqte::data::write_trial_csv;
use bqte::{read_trial_csv, CsvOptions, ImputationRule};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for allow_zero in [false, true] {
        let opts = CsvOptions {
            allow_zero,
            ..CsvOptions::default()
        };
        let Ok(trial) = read_trial_csv(data, "fuzz", &opts) else {
            continue;
        };
        // anything accepted must survive a write and re-read unchanged
        let mut buf = Vec::new();
        write_trial_csv(&trial, &mut buf).expect("write");
        let again = read_trial_csv(buf.as_slice(), "fuzz", &opts).expect("re-read");
        assert_eq!(again, trial);
        if let Ok(imputed) = trial.impute_censored(ImputationRule::AtCensoringTime) {
            assert!(!imputed.has_censoring());
        }
    }
});

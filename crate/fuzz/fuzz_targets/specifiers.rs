#![no_main]

//! Command-line and scenario specifiers: grid policies, imputation rules,
//! outcome laws and treatment maps.

use bqte::{GridPolicy, ImputationRule, Law, TreatmentMap};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = s.parse::<GridPolicy>() {
        assert_eq!(g.to_string().parse::<GridPolicy>().expect("display re-parses"), g);
    }
    if let Ok(r) = s.parse::<ImputationRule>() {
        assert_eq!(r.to_string().parse::<ImputationRule>().expect("display re-parses"), r);
    }
    if let Ok(law) = s.parse::<Law>() {
        assert_eq!(law.to_string().parse::<Law>().expect("display re-parses"), law);
        let q = law.quantile(0.5);
        assert!(!q.is_nan());
    }
    if let Ok(m) = s.parse::<TreatmentMap>() {
        assert_eq!(m.to_string().parse::<TreatmentMap>().expect("display re-parses"), m);
    }
});

#![no_main]

use bqte::data::parse_curve_set_json;
use bqte::{parse_curve_json, serialize_curve, serialize_curve_set, CurveFormat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(curve) = parse_curve_json(data) {
        let bytes = serialize_curve(&curve, CurveFormat::Json).expect("serialize");
        assert_eq!(parse_curve_json(&bytes).expect("re-parse"), curve);
        // the other writers must not panic on anything that parsed
        let _ = serialize_curve(&curve, CurveFormat::Csv);
        let _ = serialize_curve(&curve, CurveFormat::Svg);
    }
    if let Ok(curves) = parse_curve_set_json(data) {
        let bytes = serialize_curve_set(&curves).expect("serialize");
        assert_eq!(parse_curve_set_json(&bytes).expect("re-parse"), curves);
    }
});

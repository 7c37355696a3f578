//! Number formatting shared with JavaScript peers.
//!
//! `serde_json` writes `8.0_f64` as `8.0`, while `JSON.stringify(8)` yields
//! `8`. Integral values that fit in the 53-bit safe range are written as
//! integers so that canonical messages are byte-identical across
//! implementations; everything else uses the shortest round-trip form.

use serde::Serializer;

const SAFE_INTEGER: f64 = 9_007_199_254_740_991.0;

pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let v = *value;
    if v.fract() == 0.0 && v.abs() <= SAFE_INTEGER {
        if v == 0.0 {
            // -0 stringifies as "0" in JS
            serializer.serialize_i64(0)
        } else {
            serializer.serialize_i64(v as i64)
        }
    } else {
        serializer.serialize_f64(v)
    }
}

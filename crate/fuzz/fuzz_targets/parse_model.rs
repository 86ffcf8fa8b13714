#![no_main]
use libfuzzer_sys::fuzz_target;

use jetvar::model::load_model_str;

fuzz_target!(|data: &[u8]| {
    if data.len() > 2048 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    // bound the symbolic work a single value line can demand: eager metric
    // inversion multiplies entry expressions, so unbounded products would
    // hit the JETVAR_MAX_TERMS abort by design rather than a parser bug
    if src.lines().any(|l| l.len() > 64) || src.matches('*').count() > 8 {
        return;
    }
    let _ = load_model_str(src);
});

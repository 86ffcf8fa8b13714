#![no_main]
use libfuzzer_sys::fuzz_target;

use jetvar::jet::JetModel;
use jetvar::parse::parse_expr;

fuzz_target!(|data: &[u8]| {
    // longer inputs can legitimately build > JETVAR_MAX_TERMS expressions
    // through repeated products, which aborts by design; parsing behaviour
    // is fully exercised below that bound
    if data.len() > 64 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let model = JetModel::new(
        vec!["t".into(), "x".into()],
        vec!["y".into(), "u".into()],
        vec!["c".into()],
        vec!["m".into()],
    )
    .unwrap();
    let _ = parse_expr(&model, src);
});

#![no_main]
use libfuzzer_sys::fuzz_target;

use jetvar::jet::JetModel;
use jetvar::parse::parse_expr;

// parse → print → parse must reproduce the identical normal form
fuzz_target!(|data: &[u8]| {
    if data.len() > 64 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let model = JetModel::new(
        vec!["t".into(), "x".into()],
        vec!["y".into()],
        vec!["c".into()],
        vec!["m".into()],
    )
    .unwrap();
    if let Ok(e) = parse_expr(&model, src) {
        let printed = model.render(&e);
        let reparsed = parse_expr(&model, &printed)
            .unwrap_or_else(|err| panic!("canonical `{printed}` failed to parse: {err}"));
        assert_eq!(e, reparsed, "round-trip changed `{src}` via `{printed}`");
    }
});

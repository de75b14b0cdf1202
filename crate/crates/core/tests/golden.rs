//! Byte-for-byte comparison against checked-in documents.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`.

use std::path::PathBuf;

use kolmogorov::par::Execution;
use kolmogorov::report::{sweep, sweep_svg};
use kolmogorov::{presets, Rect, Tolerances};

fn check(name: &str, doc: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, doc).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == doc, "{name} differs from the golden copy");
}

#[test]
fn ma_sweep_svg_matches_golden() {
    let m = presets::ma();
    let tols = Tolerances::default();
    let s = sweep(&m, &Rect::centered(0.01), 32, &tols, Execution::Parallel).unwrap();
    check("ma_sweep_32.svg", &sweep_svg(&s, &m, &tols));
}

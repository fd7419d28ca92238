//! Acceptance checks live in `tests/acceptance.rs`; run them with
//! `cargo test -p aras-validation -- --nocapture` to see one line per criterion.

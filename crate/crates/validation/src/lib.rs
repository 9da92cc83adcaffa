//! Holds no code. The acceptance target lives in `tests/acceptance.rs` and is
//! run with `cargo test -p phasetime-validation --test acceptance`.

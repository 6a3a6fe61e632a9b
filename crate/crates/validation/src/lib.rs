//! Acceptance suite for `hapkit-core` and the `hapkit` CLI; see
//! `tests/acceptance.rs`. This crate has no library code.

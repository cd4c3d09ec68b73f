//! Host package for the `acceptance` test target. It lives in its own
//! package so that `cargo test --workspace` runs it after every other test
//! binary: a failing criterion then cannot hide the results of the unit and
//! integration tests.

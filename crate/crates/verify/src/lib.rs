//! Holds the `acceptance` test target. It is a separate package so that it
//! runs after the unit, property and CLI tests of the other crates.

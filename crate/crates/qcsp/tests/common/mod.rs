#![allow(dead_code)]

use std::path::PathBuf;

use qcsp::format::parse_qcsp;
use qcsp::model::{Limits, Qcsp};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load(name: &str) -> Qcsp {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    parse_qcsp(&text, &Limits::default()).expect("fixture parses")
}

/// exists x1 in 2..3, forall x2 in 3..4, exists x3 in 3..6 : x1 + x2 <= x3
pub fn phi1() -> Qcsp {
    load("phi1.qcsp")
}

/// forall x1 in 1..2, exists x2 in 3..4, exists x3 in 4..6 : x1 + x2 = x3
pub fn phi2() -> Qcsp {
    load("phi2.qcsp")
}

/// The sum-to-30 picking game over five variables in 1..10.
pub fn phi3() -> Qcsp {
    load("phi3.qcsp")
}

/// exists x, y in 1..3 : x <= y, y <= x, x != 1, x != 3
pub fn phi4() -> Qcsp {
    load("phi4.qcsp")
}

/// exists x1, x2 in 0..1 : x1 = x2, x2 = 1
pub fn phi5() -> Qcsp {
    load("phi5.qcsp")
}

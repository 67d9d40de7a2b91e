//! The example tables and queries, with the reference traces.

use crate::store::{store_from_json, StoreFile};
use crate::trace::{parse_trace, Trace};

pub const RS_JSON: &str = include_str!("../../../fixtures/rs.json");
pub const R_CSV: &str = include_str!("../../../fixtures/r.csv");
pub const S_CSV: &str = include_str!("../../../fixtures/s.csv");
pub const Q1: &str = include_str!("../../../fixtures/q1.nrc");
pub const Q2: &str = include_str!("../../../fixtures/q2.nrc");
pub const Q3: &str = include_str!("../../../fixtures/q3.nrc");
pub const Q1_TRACE: &str = include_str!("../../../fixtures/golden/q1.trace");
pub const Q2_TRACE: &str = include_str!("../../../fixtures/golden/q2.trace");
pub const Q1_SLICE_L1: &str = include_str!("../../../fixtures/golden/q1_slice_l1.trace");
pub const Q1_SLICE_L1_SIMPLIFIED: &str = include_str!("../../../fixtures/golden/q1_slice_l1.simplified");
pub const Q2_SLICE_L12_SIMPLIFIED: &str = include_str!("../../../fixtures/golden/q2_slice_l12.simplified");

/// The projection example: `R` with two rows.
pub const INTRO_JSON: &str = include_str!("../../../fixtures/intro.json");
pub const INTRO: &str = include_str!("../../../fixtures/intro.nrc");
pub const INTRO_TRACE: &str = include_str!("../../../fixtures/golden/intro.trace");
pub const INTRO_BACKWARD_L1: &str = include_str!("../../../fixtures/golden/intro_backward_l1.trace");
pub const INTRO_FORWARD_L22: &str = include_str!("../../../fixtures/golden/intro_forward_l22.trace");
pub const INTRO_DEST: &str = "l'";

/// The conditional example over `x` and `y`.
pub const COND_JSON: &str = include_str!("../../../fixtures/cond.json");
pub const COND: &str = include_str!("../../../fixtures/cond.nrc");
pub const COND_TRACE: &str = include_str!("../../../fixtures/golden/cond.trace");
pub const COND_DEST: &str = "l'";

/// Destinations used by the reference traces.
pub const Q1_DEST: &str = "l";
pub const Q2_DEST: &str = "l'";

fn load(json: &str) -> StoreFile {
    store_from_json(&serde_json::from_str(json).expect("fixture is JSON")).expect("fixture is a valid store")
}

pub fn rs_store() -> StoreFile {
    load(RS_JSON)
}

pub fn intro_store() -> StoreFile {
    load(INTRO_JSON)
}

pub fn cond_store() -> StoreFile {
    load(COND_JSON)
}

/// Parses a reference trace, panicking on malformed fixtures.
pub fn golden(src: &str) -> Trace {
    parse_trace(src).expect("reference trace parses")
}

pub fn q1_trace() -> Trace {
    golden(Q1_TRACE)
}

pub fn q2_trace() -> Trace {
    golden(Q2_TRACE)
}

pub mod adapt;
pub mod check;
pub mod eval;
pub mod fixtures;
pub mod gen;
pub mod lang;
pub mod pipeline;
pub mod provenance;
pub mod slicing;
pub mod store;
pub mod trace;

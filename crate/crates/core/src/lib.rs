pub mod abc;
pub mod arith;
pub mod cache;
pub mod cli;
pub mod error;
pub mod expr;
pub mod galois;
pub mod heights;
pub mod map;
pub mod places_q;
pub mod places_qt;
pub mod poly;
pub mod report;
pub mod zsigmondy;

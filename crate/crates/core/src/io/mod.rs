//! File formats and engineering-notation quantities.

pub mod curve_csv;
pub mod design;
pub mod quantity;
pub mod touchstone;

//! Exact qualitative analysis of planar Darboux-type polynomial systems
//! `x' = x + P3(x, y)`, `y' = y + Q3(x, y)`.

pub mod algebraic;
pub mod blowup;
pub mod classify;
pub mod compactify;
pub mod darboux;
pub mod equilibria;
pub mod linalg;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod system;
pub mod upoly;

pub mod complex;
pub mod cyclotomic;
pub mod diagram;
pub mod fixtures;
pub mod homology;
pub mod poly;
pub mod potential;
pub mod resolution;
pub mod states;

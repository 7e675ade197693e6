pub mod copulas;
pub mod detector;
pub mod directions;
pub mod dominance;
pub mod floodcase;
pub mod geometry;
pub mod io;
pub mod margins;
pub mod random;
pub mod sample;
pub mod stats;

pub mod period;
pub mod potential;
pub mod simulate;

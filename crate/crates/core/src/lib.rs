pub mod eos;
pub mod error;
pub mod euler;
pub mod harness;
pub mod mesh;
pub mod multiphase;
pub mod rd;
pub mod riemann;
pub mod solver;

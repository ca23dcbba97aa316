pub mod atlas;
pub mod kernel;
pub mod mellin;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod special;
pub mod symbols;

pub mod b0curve;
pub mod certify;
pub mod solve;
pub mod symbol;
pub mod verify;

pub mod coefficients;
pub mod fixedpoint;
pub mod homotopy;
pub mod motivealg;
pub mod notation;
pub mod quadform;
pub mod tatecat;
pub mod verify;

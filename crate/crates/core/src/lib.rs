pub mod bls;
pub mod credential;
pub mod group;
pub mod ces;
pub mod zk;
pub mod wire;
pub mod vectors;

pub mod bloch;
pub mod config;
pub mod doppler;
pub mod error;
pub mod experiments;
pub mod fluctuations;
pub mod model;
pub mod numerics;
pub mod validation;

#[cfg(test)]
mod testutil;

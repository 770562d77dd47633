pub mod acceptance;
pub mod circle;
pub mod cli;
pub mod config;
pub mod diffeo;
pub mod error;
pub mod export;
pub mod fields;
pub mod maps;
pub mod numeric;
pub mod orbit;
pub mod sampling;

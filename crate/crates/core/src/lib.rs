pub mod config;
pub mod coxeter;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod hydro;
pub mod markov_ops;
pub mod report;
pub mod scalar;

pub mod baseline;
pub mod cli;
pub mod config;
pub mod episode;
pub mod eval;
pub mod fitness;
pub mod neat;
pub mod replay;
pub mod scenario;
pub mod sensors;
pub mod sim;
pub mod sweep;
pub mod training;

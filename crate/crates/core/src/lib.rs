pub mod elastic;
pub mod georoute;
pub mod tide;
pub mod instrument;
pub mod analysis;
pub mod cli;

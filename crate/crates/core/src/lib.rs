pub mod adapt;
pub mod harness;
pub mod kernel;
pub mod mac;
pub mod net;
pub mod xlayer;

pub mod error;
pub mod par;
pub mod rings;
pub mod quadform;
pub mod clifford;
pub mod splitting;
pub mod morita;
pub mod pencil;
pub mod lagrangian;
pub mod cli;

pub mod cosphere;
pub mod error;
pub mod modular;
pub mod oracle;
pub mod symbol;
pub mod theta;
pub mod verify;

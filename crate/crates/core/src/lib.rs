pub mod asymptotics;
pub mod pipeline;
pub mod precision;
pub mod recognition;
pub mod rs;

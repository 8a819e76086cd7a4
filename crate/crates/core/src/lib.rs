pub mod bits;
pub mod builders;
pub mod circuit;
pub mod decode;
pub mod dem;
pub mod harness;
pub mod sim;

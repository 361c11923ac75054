pub mod frame;
pub mod classical;
pub use classical::*;
pub use frame::*;

pub mod structure;
pub mod vectorfield;
pub use structure::*;
pub use vectorfield::*;

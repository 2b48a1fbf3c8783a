//! Exact lattice, genus and Grothendieck-group computations for orders.

pub mod algebra;
pub mod arith;
pub mod genus;
pub mod instance;
pub mod k0_global;
pub mod k0_local;
pub mod lattice;
pub mod linalg;

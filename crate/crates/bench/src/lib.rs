//! Re-export of the criterion API used by the bench targets, kept in one
//! place so the backend can be swapped without touching the benches.

pub use criterion::*;

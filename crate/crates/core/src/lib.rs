//! Coherent logic over finite sets: a finite-set kernel, functorial database
//! schemas, coherent theories with Set-valued semantics, theory constructions
//! (hard coding, pushouts, interpretations), minifloat arithmetic tables, and
//! neural-network theory builders on top of them.

pub mod constructions;
pub mod finset;
pub mod minifloat;
pub mod nn;
pub mod schema;
pub mod semantics;
pub mod syntax;
pub mod text;

//! Finite fields `F_{p^m}` and towers of their extensions.

mod field;
mod tower;

pub use field::{
    enumerate_field, enumerate_field_capped, field_op, prime_power, Code, FieldElement, FieldOp,
    FieldSpec, MAX_FIELD_ORDER,
};
pub use tower::{element_degree, ExtensionTower};

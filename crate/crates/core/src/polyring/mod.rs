//! Homogeneous forms over `F_q` and the spaces `S_d` they fill.

mod enumerate;
mod form;
mod mono;

pub use enumerate::{enumerate_forms, sample_form, FormSpace, DEFAULT_ENUMERATION_CAP};
pub use form::{CompiledForm, FormTuple, HomogeneousForm};
pub use mono::{count_monomials, monomials, Mono, MAX_DEGREE, MAX_VARS};

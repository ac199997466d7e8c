//! Directed-rounding interval arithmetic used to certify every inequality.

pub mod dyadic;
pub mod enclosure;
pub mod logscaled;
pub mod precision;
pub mod transcend;

pub use dyadic::{Dir, Dyadic};
pub use enclosure::{certify_compare, Enclosure, Ext, Relation, Verdict, DEFAULT_BITS, MAX_BITS};
pub use logscaled::{certify_compare_log, log2_sum, LogScaled, Sign};
pub use precision::{certify_adaptive, default_bits, PRECISION_ENV};
pub use transcend::ln2;

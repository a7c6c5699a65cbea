//! Binary quadratic forms: reduction, composition, class groups and units.

mod classgroup;
mod form;
mod unit;

pub use classgroup::{
    class_group_summary, prime_to_class, s_class_counts, s_class_counts_of, summary_of, unit_norm_from_cf,
    ClassGroupSummary, FormClassGroup, PrimeClass, SClassCounts, UnitNorm,
};
pub use form::{all_reduced, compose, enumerate_reduced, QuadraticForm};
pub use unit::{fundamental_unit, FundamentalUnit};

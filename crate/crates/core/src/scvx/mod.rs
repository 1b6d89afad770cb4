//! Super convex spaces, countably affine maps and their checkers.

pub mod affine;
pub mod monotone;
pub mod point;
pub mod space;

pub use affine::{
    affine_case, check_transform_compose, classify_probe, dg_constancy_check, epi_cancellation, is_affine,
    iso_delta2_interval, iso_map, j_map, rinf_j_map, sample_sequences, seq_to_affine, transform_compose,
    AffineMap, AffinenessReport, Budget, ClassifyReport, DgOutcome, IsoDirection,
};
pub use monotone::{
    affine_iff_monotone, all_endofunctions, monotone_maps, monotone_oracle, subset_min_witness, NsReport,
    DEFAULT_EXHAUSTIVE_BOUND,
};
pub use point::{Carrier, Coeq, DefaultRule, Point, SeqMap};
pub use space::{builtin_space, check_axiom1, check_axiom2, standard_spaces, SpaceHandle, TypeTag, BUILTIN_SPACES};

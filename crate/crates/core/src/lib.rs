//! Exact tools for the problem of making the coordinate projections of a
//! finite set in N0^n as small as possible.
//!
//! * [`order`]: the cube order, its initial segments and their hulls.
//! * [`projections`]: projection profiles and the extremal values
//!   `sigma_n(m)` and `lambda_n(m)`.
//! * [`rearrange`]: a traced, step-by-step transformation of any finite set
//!   into the initial segment of the same size that never increases the
//!   hyperplane projection sum.
//! * [`oracle`]: brute-force minimisation over boxes and exhaustive law suites.

mod arith;
pub mod error;
pub mod oracle;
pub mod order;
pub mod point;
pub mod projections;
pub mod rearrange;
pub mod text;

pub use error::{Error, Result};
pub use order::{
    cmp_by_rank, compress, cube_cmp, decompose, hull_sizes, initial_segment, initial_segment_capped, is_closed, rank,
    unrank, CubeDecomposition, HullSizes, DEFAULT_SEGMENT_CAP,
};
pub use point::{Point, PointSet};
pub use projections::{
    lambda_profile, lambda_segment, lw_agm_holds, sigma_closed, sigma_profile, sigma_segment, ProfileKind,
    ProjectionProfile,
};
pub use rearrange::{rearrange_to_segment, RearrangeTrace, TraceStep};
pub use text::{format_pointset, parse_pointset, parse_pointset_str};

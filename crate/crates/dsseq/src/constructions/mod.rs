//! Lower-bound constructions with exact statistics.

pub mod even;
pub mod z;

pub use even::{build_s_even, check_even, even_stats, multiplicity, EvenCheck, EvenStats, EvenStatsTable};
pub use z::{build_z, build_z_interpolated, check_z, z_stats, InterpolationPlan, ZCheck, ZStats, ZStatsTable};

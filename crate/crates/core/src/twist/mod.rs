//! The twist as a regulator: series expansion of singular solutions,
//! homotopy in the twist angle and regulated product identities.

mod expansion;
mod homotopy;
mod regularize;

pub use expansion::{evaluate_series, expand_series, expand_series_with, first_order_correction, TwistSeries};
pub use homotopy::{homotopy_track, schedule, HomotopyOptions, PathPoint};
pub use regularize::{
    epsilon_constraint_check, is_unit, regulated_limit, regulated_values, EpsilonRegulator, Regulator, RegulatorCtor,
    RegulatorRegistry, TwistRegulator,
};

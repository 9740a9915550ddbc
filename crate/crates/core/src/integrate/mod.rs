//! Young and rough integration on grids, with improper limits at `0+`.
//!
//! All discrete integrals are left-point sums. Improper limits are taken
//! along dyadic anchors `2^-n t`, and the Cauchy increments of that sequence
//! give the fitted convergence rate.

mod controlled;
mod improper;
mod lift;
mod rough_path;
mod young;

pub use controlled::{
    controlled_compose, singular_controlled_norm, ControlledNormReport, ControlledPath, Controller,
};
pub use improper::{ImproperLevel, ImproperReport};
pub use lift::{level2_lift_young, Level2Field};
pub use rough_path::{
    chen_defect, improper_rough, levy_area_leftpoint, rough_integral, rough_integral_strided,
    ChenReport, ImproperRoughReport, InhomRoughPath, RoughConditions,
};
pub use young::{improper_young, young_integral, YoungValue};

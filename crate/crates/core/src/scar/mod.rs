//! Stable and consistent AR(3) construction: the consistent family, its
//! stability boundary surface, singular candidates, maximin step selection
//! and a numerical stability oracle.

mod certificate;
mod family;
mod select;
mod singular;
mod surface;

pub use certificate::{
    construct_scar3, scar3_model, scar_certificate, verify_stability_margin, ScarCertificate, ScarOptions,
    StabilityReport, BOUNDARY_TOL,
};
pub use family::{consistency_family, symbolic_coefficients, ConsistentFamily};
pub use select::{select_parameters, smallest_positive_root, Candidate, Selection, TIE_TOL};
pub use singular::{
    circle_double_roots, relative_residual, singular_points, SearchPath, SeedGrid, SingularOptions, SingularPoint,
    SingularSet,
};
pub use surface::*;

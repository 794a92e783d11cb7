//! Invariant forms on homogeneous spaces G/H, G/K, G/L built from Lie
//! algebra data: the pull-push form, its vanishing criteria, and Chern forms
//! of homogeneous Hodge bundles.

pub mod chern;
pub mod exterior;
pub mod lie;
mod linalg;
pub mod presets;
pub mod pullpush;

pub use chern::{chern_form, chern_form_complex, curvature_form, CurvatureForm};
pub use exterior::{proportionality_test, AlternatingForm, MultiVector, Proportionality, Space};
pub use lie::{LieConfiguration, LieSpec};
pub use presets::{preset, PRESETS};
pub use pullpush::{
    adjoint_pullback, complex_nonvanishing_check, pull_push, vanishing_criterion_check, ComplexNonvanishingReport,
    FiberQuadrature, PullPushOptions, PullPushResult, VanishingWitness,
};

//! Velocity fields polynomial in the transversal coordinate `h`.
//!
//! In-plane components are carried as `v + i u` series in the canonical
//! plane. A pair with nonzero divergence `-s(x, y)` is an analytic series
//! plus the non-analytic summand `-(conj(z) W - conj(A)) / 4`, where `W` is
//! analytic with `Im W = s` and `A = ∫ W`.

mod assembly;
mod fields;
mod glue;

pub use assembly::{
    assemble_linear, assemble_quadratic, assemble_quadratic_pairs, field_residuals, FieldResiduals,
    LinearSplineField, QuadraticSplineField, ResidualGrid, SplineField, ANALYTIC_TOL, FD_STEP,
    FD_TOL,
};
pub use fields::{
    check_cauchy_riemann, compute_w0, compute_w1_quadratic, fix_w0_constant, pack, unpack,
    unpack_with_factor, CrVariant, ScalarField, VelocityPair, CORRECTION_FACTOR,
    UNHALVED_CORRECTION_FACTOR,
};
pub use glue::{glue_sections, solve_glued_section, GluedLowerData, GluedSection, SectionField};

//! Planar inverse problem for a single blade section: from the prescribed
//! tangential speed to the analytic velocity and the closed contour.

mod canonical;
mod distribution;
mod solve;

pub use canonical::{canonical_map, CircleCorrespondence};
pub use distribution::{
    detect_branch_indices, potential_and_circulation, PotentialTable, VelocityDistribution,
    VelocityDistributionJson,
};
pub use solve::{
    closure_conditions, modified_distribution, quasisolution_correct, reconstruct_contour,
    solve_blade, solve_modified, solve_zhukovsky, BladeSolution, ClosureReport, Quasisolution,
    SolveOptions, Zhukovsky, CLOSURE_TOL,
};

//! Geometric particle-in-cell: periodic cubic B-spline Galerkin Poisson
//! solve, the integrator family with likelihood bookkeeping and the Monte
//! Carlo estimators.

mod estimators;
mod integrator;
mod run;
mod spline;

pub use estimators::{discrete_entropy, kinetic_energy, momentum, total_mass, EntropyEstimate};
pub use integrator::{
    explicit_euler_map, flow_jacobian_det, implicit_euler_map, map_jacobian_det, push, push_frozen,
    step_particle, FnField, ForceField, IntegratorKind, PushReport, FIXED_POINT_MAX_ITER, FIXED_POINT_TOL,
};
pub use run::{pic_diagnostics, run_pic, run_pic_with, PicRun, PicRunConfig, StarDiscSettings};
pub use spline::{
    cubic_weights, cubic_weights_d1, cubic_weights_d2, FieldSolution, SplinePoissonSolver, STIFFNESS_STENCIL,
};

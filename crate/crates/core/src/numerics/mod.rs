//! Small dense numerical kernels used by the atom models.

pub mod linalg;
pub mod ode;
pub mod quad;
pub mod scalar_opt;

pub use linalg::{solve_linear, ComplexMatrix, PIVOT_THRESHOLD};
pub use ode::{
    decay_check, default_horizon, integrate_linear_ivp, integrate_linear_ivp_final, resolvent, resolvent_component,
    steady_state, LinearSystemModel, Trajectory,
};
pub use quad::{integrate_adaptive, integrate_real_line};
pub use scalar_opt::{find_root, maximize_on_grid, maximize_scalar};

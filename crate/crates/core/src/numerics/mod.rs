//! Numerical substrate shared by every other module.
//!
//! Everything here is a pure function of its arguments. Randomness only
//! enters through an explicit [`RngStream`].

pub mod hessian;
pub mod optim;
pub mod quad;
pub mod rng;
pub mod root;
pub mod special;
pub mod truncnorm;

pub use hessian::{default_steps, hessian_fd, hessian_fd_with_steps};
pub use optim::{maximize, maximize_with, MaximizeOptions, OptimResult};
pub use quad::{integrate, integrate_to_infinity};
pub use rng::RngStream;
pub use root::{find_root, Bracket};
pub use special::{
    gamma_fn, ln_gamma, lower_incomplete_gamma, normal_cdf, normal_ln_sf, normal_quantile,
    normal_sf, upper_incomplete_gamma,
};
pub use truncnorm::{sample_trunc_normal, trunc_normal_logpdf};

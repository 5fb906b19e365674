//! Sliced Gromov-Wasserstein (SGW) and rotation-invariant SGW (RISGW).
//!
//! The crate is built around an exact solver for the one-dimensional
//! Gromov-Monge problem with squared-distance costs: after sorting both
//! samples, the optimal matching is either the identity or the anti-identity,
//! and its cost can be evaluated in linear time from a handful of moments
//! ([`gw1d`]). Projecting two point clouds onto random directions and
//! averaging the 1D costs gives [`sgw::sgw`]; minimizing that quantity over
//! orthonormal frames gives [`risgw::risgw`].
//!
//! Brute-force validators live in [`oracle`], experiment drivers and file
//! formats in [`cli`], [`io`] and [`mds`].
//!
//! ```
//! use slicedgw::{sample_directions, sgw::sgw, PointCloud};
//!
//! let mu = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
//! let nu = mu.translated(&[3.0, -1.0]).unwrap();
//! let dirs = sample_directions(50, 2, 7).unwrap();
//! let res = sgw(&mu, &nu, None, &dirs).unwrap();
//! assert!(res.value.abs() < 1e-10);
//! ```

pub mod cli;
pub mod cloud;
pub mod error;
pub mod gw1d;
pub mod io;
pub mod mds;
pub mod oracle;
pub mod risgw;
pub mod sgw;
pub mod stiefel;

pub use cloud::{
    apply_frame, pad_uplift, project, sample_directions, DirectionSet, PointCloud, ProjectedCloud,
};
pub use error::{Error, Result};
pub use gw1d::{gm_cost_for_perm, gm_cost_naive, solve_gw1d, Assignment1D, MomentSummary, PermKind};
pub use risgw::{risgw, risw, OptTrace, RisgwConfig};
pub use sgw::{sgw, sw_delta, SgwResult};
pub use stiefel::{retract, StiefelFrame};

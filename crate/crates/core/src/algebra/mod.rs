//! Scalars, polynomials, rational maps, roots and residues.

mod exact;
pub mod json;
mod poly;
mod rational;
mod residue;
mod roots;
mod scalar;

pub use exact::{format_rational, parse_rational, ExactComplex};
pub use poly::Poly;
pub use rational::{value_distance, RationalMap, SpherePoint};
pub use residue::{
    contour_residue, form_at_infinity, laurent_residue, residue, Residue, ResidueConfig, ResidueMode,
    DEFAULT_CONTOUR_NODES,
};
pub use roots::{roots, RootCluster, ROOT_TOL};
pub use scalar::{Scalar, APPROX_REL_EPS};

/// Floating complex scalar.
pub type ApproxComplex = num_complex::Complex64;

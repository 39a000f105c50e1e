//! Gauss maps of minimal surfaces on punctured Riemann spheres.

pub mod algebra;
pub mod error;
pub mod families;
pub mod mesh;
pub mod solver;
pub mod sphere;
pub mod weierstrass;

pub use algebra::{ApproxComplex, ExactComplex, Poly, RationalMap, RootCluster, Scalar, SpherePoint};
pub use error::{Error, Result};
pub use sphere::{MoebiusMap, PuncturedSphere, RamificationProfile, TotallyRamifiedReport};
pub use weierstrass::{AlphaForm, OneForm, WeierstrassData};

//! A desk-scale laboratory for the linear dynamics of Hilbert-space
//! operators.
//!
//! The crate models a symbolically tractable class of bounded operators —
//! weighted shifts with eventually convergent weights, finite matrices,
//! piecewise-constant diagonals and their scalings, sums and finite-rank
//! perturbations — and provides four engines over it:
//!
//! * [`operator`] / [`normal_form`]: exact action on finitely supported
//!   vectors, adjoints, block normal forms;
//! * [`spectral`]: exact spectral pictures (essential curves, region
//!   indices and kernel dimensions) with a truncation-based numerical
//!   oracle in [`truncation`];
//! * [`orbit`]: orbit norms, Li-Yorke pair scores, distributional chaos
//!   statistics, norm-unimodality certificates, orbit-dichotomy checks;
//! * [`classify`]: the spectral membership predicates deciding closure and
//!   interior membership for the chaotic-operator classes, plus the
//!   relation suite tying them together.
//!
//! [`gallery`] builds the named example operators and the connectedness
//! path used throughout the test suites.

pub use rand;
pub use rand_chacha;

pub mod classify;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod interval;
pub mod normal_form;
pub mod numeric;
pub mod operator;
pub mod orbit;
pub mod spectral;
pub mod truncation;
pub mod vector;
pub mod weights;

pub use classify::{classify, random_picture, relation_suite, ClassificationVerdict, Truth};
pub use error::{Error, Result};
pub use gallery::{gallery, gallery_names, identity_perturbation, path_picture, GalleryEntry, PathPoint};
pub use geometry::Circle;
pub use interval::Interval;
pub use normal_form::{normalize, NormalForm};
pub use numeric::{c64, C64};
pub use operator::{Direction, OperatorSpec};
pub use orbit::{
    dichotomy_check, li_yorke_score, orbit, pair_profile, unimodal_certify, DistributionalProfile,
    OrbitTrace, UnimodalCertificate,
};
pub use spectral::{
    formal_kernel_dim, limit_radii, spectral_picture, weyl_spectrum, Region, SpectralPicture,
};
pub use truncation::{truncation_oracle, OracleReport};
pub use vector::SparseVector;

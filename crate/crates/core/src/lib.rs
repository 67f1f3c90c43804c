//! Numerics for univalent disk maps with quasiconformal extensions: the
//! Bers and pre-Schwarzian embeddings, holomorphic curves through them,
//! conformal welding, and non-overlapping map tuples on punctured spheres.

pub mod analytic;
pub mod atlas;
pub mod complex_serde;
pub mod config;
pub mod corpus;
pub mod curves;
pub mod disk_map;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod operators;
pub mod poly;
pub mod polyline;
pub mod verify;
pub mod welding;

pub use analytic::{Analytic, AnalyticMap, Mobius, PolynomialMap};
pub use atlas::{LocalChart, NonOverlappingTuple, PuncturedSphereConfig, SpherePoint};
pub use config::RunConfig;
pub use curves::HolomorphicCurve;
pub use disk_map::{check_univalence, compose_left, image_bound, ClosedDisk, DiskMap, Truncated};
pub use error::{Error, Result};
pub use grid::{weighted_sup, EvaluationGrid, NormEstimate, RefinementPolicy};
pub use operators::{BersPoint, ChiPoint, OneDifferential, QuadDifferential};
pub use poly::{Poly, Rational, C64};
pub use welding::{CircleMap, ExteriorMap, WeldingPair};

//! Constructions of the example models.

pub mod circle;
pub mod clifford;
pub mod crossed;
pub mod decomposed;
pub mod graph;
pub mod lattice;
pub mod point;
pub mod product;
pub mod torus;

pub use circle::{build_circle_bundle_blocks, CircleBundleBlockModel, CircleBundleParams};
pub use clifford::{make_clifford, CliffordSet};
pub use crossed::{build_crossed_product_model, CrossedOptions};
pub use decomposed::{CliffordDecomposition, DecomposedParts, DecomposedTripleModel, ModelKind};
pub use graph::{graph_model, scalar_model, two_point_model, GraphSpec};
pub use point::build_point_collapse;
pub use product::{build_product_triple, product_triple};
pub use torus::{build_torus_triple, TorusParams};

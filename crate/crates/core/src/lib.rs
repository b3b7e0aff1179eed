//! Exact base diagrams of almost toric fibrations, their blow-up surgeries,
//! and the intersection-lattice bookkeeping that certifies the almost toric
//! and symplectic blow-ups give equivalent log Calabi-Yau pairs.
//!
//! Everything is exact: rationals for coordinates and symplectic areas,
//! integers for lattice classes. No floating point is used outside of the
//! decimal coordinates written into SVG output.

pub mod affine;
pub mod diagram;
pub mod error;
pub mod format;
pub mod geometry;
pub mod homology;
pub mod linalg;
pub mod pipeline;
pub mod rational;
pub mod render;
pub mod surgery;
pub mod torelli;

pub use affine::{is_unimodular_pair, primitive, AffineMap, IMat2, LatVec, Point};
pub use diagram::{BaseDiagram, ConvexRegion, EdgeMark, Node, Violation, ViolationKind};
pub use error::{Error, Result};
pub use format::ParseError;
pub use homology::{LatticeModel, MarkedClass};
pub use pipeline::{PipelineReport, Scenario, Stage, StageError};
pub use rational::Rat;
pub use render::RenderStyle;
pub use surgery::{BallPlacement, Triangle};
pub use torelli::{IsometryCertificate, MarkedClassMap, SearchOptions};

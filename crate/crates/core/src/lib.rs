//! Finite generalized polygons and the epimorphisms between them.
//!
//! The crate builds the classical small polygons (projective planes,
//! quadrangles, the split Cayley hexagon, thin polygons and their doubles),
//! recognizes generalized polygons from their incidence graphs, enumerates
//! epimorphisms exhaustively, and checks the classification of epimorphisms
//! onto thin polygons against explicit canonical generators.
//!
//! With the default `parallel` feature, validation, construction and search
//! fan out over rayon; without it the same code runs sequentially and gives
//! identical output.

pub mod classify;
pub mod construct;
pub mod error;
pub mod field;
pub mod free;
pub mod hyperplane;
pub mod incidence;
pub mod io;
pub mod morphism;
pub mod par;
pub mod report;
pub mod search;
pub mod validate;

pub use error::{Error, Result};
pub use incidence::{Element, Flag, IncidenceGeometry};
pub use morphism::GeometryMorphism;
pub use validate::{classify_polygon, PolygonClass};

use std::fmt;

use crate::incidence::Element;

/// Why a geometry failed the generalized-polygon axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotPolygonWitness {
    /// The incidence graph has no cycle at all.
    Acyclic,
    /// Two elements with no connecting path.
    Disconnected(Element, Element),
    /// An element incident with fewer than two others.
    NotFirm { element: Element, degree: usize },
    /// Two elements further apart than the gonality implied by the girth.
    TooFar { a: Element, b: Element, distance: u32, gonality: u32 },
}

impl fmt::Display for NotPolygonWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotPolygonWitness::Acyclic => write!(f, "incidence graph is acyclic"),
            NotPolygonWitness::Disconnected(a, b) => write!(f, "{a} and {b} are not connected"),
            NotPolygonWitness::NotFirm { element, degree } => {
                write!(f, "{element} is incident with only {degree} element(s)")
            }
            NotPolygonWitness::TooFar { a, b, distance, gonality } => write!(
                f,
                "{a} and {b} are at distance {distance} > {gonality} (girth/2)"
            ),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),
    #[error("geometry has no elements")]
    EmptyGeometry,
    #[error("not a weak generalized polygon: {0}")]
    NotPolygon(NotPolygonWitness),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("search truncated after {found} result(s) and {nodes} node(s): {reason}")]
    Truncated { found: usize, nodes: u64, reason: String },
    #[error("invalid descriptor: {0}")]
    Descriptor(String),
    #[error("construction failed its validation gate: {0}")]
    Construction(String),
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },
    #[error("no deficient pair left to close")]
    Exhausted,
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

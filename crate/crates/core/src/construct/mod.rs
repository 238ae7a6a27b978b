//! Constructions of the thin and classical polygons.
//!
//! Every constructor here is checked against [`classify_polygon`] in the
//! test suite; the coordinate constructions also run that check themselves
//! before returning.
//!
//! [`classify_polygon`]: crate::validate::classify_polygon

mod hexagon;
mod projective;
mod quadric;
mod t2;
mod thin;

pub use hexagon::split_cayley_hexagon;
pub use projective::{
    is_hyperoval, is_oval, nucleus, projective_plane, projective_plane_model, segre_oval,
    ProjectiveModel, ProjectivePoint,
};
pub use quadric::{q4, q4_model, subfield_embedding, symplectic_quadrangle};
pub use t2::t2_of_oval;
pub use thin::{
    digon, double, dual_grid, grid, ordinary_polygon, plane_from_thin_hexagon,
    thin_hexagon_from_plane, undouble, Undoubled,
};

use crate::error::{Error, Result};
use crate::incidence::IncidenceGeometry;
use crate::validate::{classify_polygon, classify_polygon_sampled};

/// Above this many elements the gate scans a sample of BFS roots only.
const FULL_GATE_LIMIT: usize = 20_000;

/// Confirms that a coordinate construction produced the advertised polygon.
///
/// Huge outputs get the sampled check: the order is still verified exactly,
/// girth and diameter from 64 roots.
pub(crate) fn gate(
    name: &str,
    g: IncidenceGeometry,
    gonality: u32,
    order: (usize, usize),
) -> Result<IncidenceGeometry> {
    let class = if g.num_elements() <= FULL_GATE_LIMIT {
        classify_polygon(&g)
    } else {
        classify_polygon_sampled(&g, 64)
    };
    let class = class.map_err(|e| Error::Construction(format!("{name}: {e}")))?;
    if class.gonality != gonality || class.order != Some(order) {
        return Err(Error::Construction(format!(
            "{name}: expected gonality {gonality} and order {order:?}, got {class}"
        )));
    }
    Ok(g)
}

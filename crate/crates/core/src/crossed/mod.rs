//! Banded elements `Σ_k f_k(U)Vᵏ` of the crossed product `L∞(𝕋) ⋊ ℤ`.

mod banded;
mod circle;
mod projection;

pub use banded::{BandedElement, ProjectionReport};
pub use circle::{CircleFunction, ExactForm, Piece, PieceKind, DEFAULT_GRID};
pub use projection::{build_rieffel_projection, RieffelProjectionSpec};

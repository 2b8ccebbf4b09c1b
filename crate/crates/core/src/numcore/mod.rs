//! Extended reals, lattice grids, rational linear maps and polytopes.

pub mod ext;
pub mod grid;
pub mod linmap;
pub mod polytope;
pub mod rat;

pub use ext::{fmt_f64, ExtReal, Finite, PosInf};
pub use grid::{GridFn, LatticeGrid};
pub use linmap::{grid_compatible, index_map, IndexMap, RatLinMap};
pub use polytope::Polytope;
pub use rat::{fmt_point, fmt_rat, int, parse_rat, rat, Rat};

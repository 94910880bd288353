//! Function carriers, quadrature and scans shared by every other module.

pub mod energy;
pub mod grid;
pub mod integrate;
pub mod quad;
pub mod scan;
pub mod step;
pub mod weight;

pub use energy::{lp_energy, weighted_mass};
pub use grid::{Extension, GridFunction, LogGrid};
pub use integrate::{integrate, integrate_with};
pub use quad::Quadrature;
pub use scan::{prefix_sup, suffix_sup};
pub use step::StepFunction;
pub use weight::{Segment, Term, WeightSpec};

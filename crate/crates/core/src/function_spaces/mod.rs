//! Concrete examples: Hermite functions on a uniform grid, the Sobolev space
//! `W^{1,2}(R)` through the Fourier multiplier `(I − D²)^{±1/2}`, and the
//! coefficient-space models of the number operator and the Schwartz space.

mod grid;
mod hermite;
mod models;
mod sobolev;

pub use grid::{LineGrid, SampledFunction};
pub use hermite::{hermite_basis, hermite_closed_form, hermite_values, tail_mass};
pub use models::{number_operator_model, schwartz_hermite_model};
pub use sobolev::{auto_grid, sobolev_basis, sobolev_multiplier, SobolevBasis, ALIASING_LIMIT};

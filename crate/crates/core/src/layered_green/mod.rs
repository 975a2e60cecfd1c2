//! Transfer-matrix description of the layered cylinder and the zz component
//! of its scattering Green tensor for source and field outside the shell:
//!
//! ```text
//!   G_zz(r, r') = (i / 8 pi) Int dh  Sum_n (2 - delta_n0) (eta_1^2 / k_1^2)
//!                 C_1V(n, h) H1_n(eta_1 r) H1_n(eta_1 r') cos n(phi - phi') e^{i h (z - z')}
//! ```
//!
//! together with the closed-form free-space zz element for z-dipoles
//! separated perpendicular to the axis.

mod green;
mod kernel;
pub mod matrix;
mod mode;
mod transfer;

pub use green::{freespace_green_zz, scattering_green_zz, FieldPoint, GreenEstimate, ModeIntegrals};
pub use kernel::{ScaledValue, ScatteringKernel};
pub use matrix::{Lu4, Mat4, MAX_CONDITION};
pub use mode::{radial_wavenumber, LayerMode, ModeParams};
pub use transfer::{
    coefficient_from_cascade, interface_transfer, scattering_coefficient, transmission_matrix, Polarization,
    TransferCascade,
};

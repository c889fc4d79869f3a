//! Spectral transforms, Fourier-multiplier operators and the helical defect.

pub mod helical;
pub mod ops;
pub mod transform;

pub use helical::{helical_defect, helical_defect_masked, helical_derivative};
pub use ops::{
    curl, dealias, derivative, divergence, gradient, inverse_curl, laplacian, leray_project,
    perp_part, vertical_mean, InverseCurl,
};
pub use transform::{forward, inverse};

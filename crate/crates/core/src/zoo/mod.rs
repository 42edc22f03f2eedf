//! Ground-truth operator families and their quadrature backends.

pub mod burgers;
pub mod family;
pub mod green;
pub mod grid_function;
pub mod heat;
pub mod kernels;
pub mod quadrature;

pub use burgers::{burgers_cole_hopf, burgers_fd_reference};
pub use family::{family_eval, OperatorFamily};
pub use green::{green_apply, green_kernel, green_kernel_relu_form};
pub use grid_function::{Audit, GridFunction};
pub use heat::{heat_apply, heat_kernel, Extension};
pub use kernels::{kernel_apply, Kernel, Profile};
pub use quadrature::{quad_integrate, quad_integrate_box, QuadratureKind, QuadratureRule};

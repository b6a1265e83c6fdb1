//! Small numerical kernels shared by the wave and spectral modules.

pub mod diff;
pub mod ode;
pub mod quad;
pub mod roots;

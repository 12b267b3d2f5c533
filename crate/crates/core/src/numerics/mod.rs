//! Small numerical building blocks shared by the scattering and asymptotic
//! modules.

pub mod quadrature;
pub mod trig;
pub mod winding;

pub use quadrature::GaussLegendre;
pub use trig::TrigInterpolant;

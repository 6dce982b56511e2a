//! Hermitian lattices over a ramified quadratic extension of Q_p.

pub mod corpus;
pub mod density;
pub mod efield;
pub mod enumerate;
pub mod error;
pub mod glcount;
pub mod hermlat;
pub mod oracle;
pub mod rational;
pub mod schwartz;

pub use efield::{EValuation, Elem, FieldConfig, Matrix, Vector};
pub use error::{Error, Result};
pub use rational::Q;

//! Mobility analysis of kinematic mechanisms with zebra-crossing diagrams.

pub mod analysis;
pub mod corpus;
pub mod diagram;
pub mod model;
pub mod textfmt;
pub mod xvalidate;

pub use model::{
    are_isomorphic, Joint, Link, LinkGroup, Mechanism, MechanismClass, ModelError,
    ValidatedMechanism, ValidationError, ValidationErrors,
};

//! Hierarchical finite state controllers for generalized planning.
//!
//! The pipeline compiles a set of planning instances plus bounds on the number
//! of controller states, controllers and stack levels into one classical
//! planning problem, solves it with the built-in forward-search planner and
//! decodes the plan back into a controller hierarchy that can be executed and
//! verified on held-out instances.

pub mod cli;
pub mod compile;
pub mod decode;
pub mod domains;
pub mod fsc;
pub mod model;
pub mod pddl;
pub mod planner;

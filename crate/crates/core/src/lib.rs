pub mod classify;
pub mod corpus;
pub mod expr;
pub mod invariants;
pub mod ode;
pub mod report;

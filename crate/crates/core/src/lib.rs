pub mod density;
pub mod error;
pub mod extended;
pub mod group;
pub mod interp;
pub mod quad;
pub mod root;
pub mod score;
pub mod coverage;
pub mod equivalence;
pub mod catalog;
pub mod estimator;
pub mod family;
pub mod forge;
pub mod suite;
pub mod cli;

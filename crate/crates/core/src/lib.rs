pub mod catalog;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod hypergroups;
pub mod measures;
pub mod registry;
pub mod reproduce;
pub mod weights;

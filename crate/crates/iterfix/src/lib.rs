//! Iterative test-driven program repair for MiniLang.
//!
//! The pipeline: perturb correct programs into a buggy corpus, train a
//! template-frequency patch generator on it, then repair bugs by chaining
//! compile-error and functional-error fixes, re-running fault localization
//! whenever a partial patch reduces the failing-test count.

pub mod check;
pub mod cli;
pub mod diffs;
pub mod edit;
pub mod engine;
pub mod exec;
pub mod faultloc;
pub mod gen;
pub mod lang;
pub mod manifest;
pub mod perturb;

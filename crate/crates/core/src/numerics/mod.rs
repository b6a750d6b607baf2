//! Exact arithmetic primitives shared by the engine, the bound evaluator and
//! the simulator.

mod combinatorics;
mod float;
mod rational;

pub use combinatorics::{binom, binom_column, collision_survival, harmonic, HarmonicPartialSums};
pub use float::{
    euler_gamma, ln_u64, rational_to_real, real_from_u64, Precision, Real, RealContext,
};
pub use rational::{lcm_accumulate, ExactRational};

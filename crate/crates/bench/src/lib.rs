//! Fixtures shared by the benchmarks.

use basis_forge::order2::run;
use basis_forge::orderh::{run_h, HConstructionState};
use basis_forge::{ChoicePolicy, ConstructionState, IntegerSet, Multiplicity, RunConfig, TargetFunction};

pub fn ones() -> TargetFunction {
    TargetFunction::constant(Multiplicity::Finite(1)).expect("f ≡ 1 is valid")
}

/// Unaudited config, so that benchmarks time the construction only.
pub fn fast_config(restricted: bool) -> RunConfig {
    let mut config = RunConfig::new(ChoicePolicy::MinAbs, restricted);
    config.audit_each_step = false;
    config
}

/// An order-2 state after `steps` steps for `f ≡ 1`.
pub fn order2_state(steps: usize) -> ConstructionState {
    run(&ones(), steps, &fast_config(false)).expect("f ≡ 1 construction succeeds")
}

/// An order-`h` state after `steps` steps for `f ≡ 1`.
pub fn orderh_state(h: usize, steps: usize) -> HConstructionState {
    run_h(&ones(), h, steps, &fast_config(false), None).expect("f ≡ 1 construction succeeds")
}

/// A spread-out set of `n` integers for oracle timing.
pub fn sample_set(n: usize) -> IntegerSet {
    (0..n as i64).map(|i| i * i * 7 - 3 * i * (i % 5) - 50).collect()
}

//! One handle over the order-2 and order-`h` constructors.

use crate::error::{Error, Result};
use crate::format::{BasisFile, StepEntry};
use crate::order2::{ConstructionState, RunConfig, StepRecord};
use crate::orderh::HConstructionState;
use crate::policy::{ChoicePolicy, PolicyDescriptor};
use crate::report::VerificationReport;
use crate::sumset::IntegerSet;
use crate::target::TargetFunction;

#[derive(Clone, Debug)]
pub enum Construction {
    Order2(ConstructionState),
    OrderH(HConstructionState),
}

impl Construction {
    /// Empty construction of the given order. `c` overrides the window
    /// constant and is only accepted for `order >= 3`.
    pub fn new(target: TargetFunction, order: usize, config: &RunConfig, c: Option<i64>) -> Result<Self> {
        match order {
            2 => {
                if let Some(c) = c {
                    if c != target.window_constant() {
                        return Err(Error::InvalidParameter(format!(
                            "order 2 uses c = {}, not {c}",
                            target.window_constant()
                        )));
                    }
                }
                Ok(Construction::Order2(ConstructionState::new(target, config)))
            }
            h if h >= 3 => {
                let mut state = HConstructionState::new(target, h, config)?;
                if let Some(c) = c {
                    state = state.with_window_constant(c)?;
                }
                Ok(Construction::OrderH(state))
            }
            h => Err(Error::InvalidParameter(format!("order {h} < 2"))),
        }
    }

    pub fn step(&mut self) -> Result<&StepRecord> {
        match self {
            Construction::Order2(s) => s.step(),
            Construction::OrderH(s) => s.step_h(),
        }
    }

    pub fn audit(&self) -> VerificationReport {
        match self {
            Construction::Order2(s) => s.audit(),
            Construction::OrderH(s) => s.audit_h(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Construction::Order2(_) => 2,
            Construction::OrderH(s) => s.h(),
        }
    }

    pub fn restricted(&self) -> bool {
        match self {
            Construction::Order2(s) => s.restricted(),
            Construction::OrderH(s) => s.restricted(),
        }
    }

    pub fn c(&self) -> i64 {
        match self {
            Construction::Order2(s) => s.c(),
            Construction::OrderH(s) => s.c(),
        }
    }

    pub fn delta(&self) -> usize {
        match self {
            Construction::Order2(s) => s.delta(),
            Construction::OrderH(s) => s.delta(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Construction::Order2(s) => s.k(),
            Construction::OrderH(s) => s.k(),
        }
    }

    pub fn elements(&self) -> &IntegerSet {
        match self {
            Construction::Order2(s) => s.elements(),
            Construction::OrderH(s) => s.elements(),
        }
    }

    pub fn log(&self) -> &[StepRecord] {
        match self {
            Construction::Order2(s) => s.log(),
            Construction::OrderH(s) => s.log(),
        }
    }

    pub fn policy(&self) -> &ChoicePolicy {
        match self {
            Construction::Order2(s) => s.policy(),
            Construction::OrderH(s) => s.policy(),
        }
    }

    pub fn to_basis_file(&self) -> BasisFile {
        BasisFile {
            order: self.order(),
            restricted: self.restricted(),
            c: self.c(),
            delta: self.delta(),
            k: self.k(),
            policy: PolicyDescriptor::from(self.policy()),
            elements: self.elements().as_slice().to_vec(),
            steps: self.log().iter().map(StepEntry::from).collect(),
        }
    }
}

/// Builds a construction of `steps` steps, auditing after each one when
/// `config.audit_each_step` is set.
pub fn build(
    target: &TargetFunction,
    order: usize,
    steps: usize,
    config: &RunConfig,
    c: Option<i64>,
) -> Result<Construction> {
    let mut construction = Construction::new(target.clone(), order, config, c)?;
    for _ in 0..steps {
        construction.step()?;
        if config.audit_each_step {
            let report = construction.audit();
            if !report.passed() {
                return Err(Error::AuditFailed {
                    k: construction.k(),
                    failures: report.failure_summary(),
                });
            }
        }
    }
    Ok(construction)
}

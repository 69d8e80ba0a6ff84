//! Independent verification of a stored basis file against its target.

use std::collections::HashMap;

use serde::Serialize;

use crate::construction::build;
use crate::format::BasisFile;
use crate::growth::first_failure;
use crate::order2::{check_against_target, check_consumed, RunConfig};
use crate::orderh::block;
use crate::policy::ChoicePolicy;
use crate::report::VerificationReport;
use crate::sumset::{full_rep_table, IntegerSet};
use crate::target::{Multiplicity, TargetFunction};
use crate::useq::u_prefix;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub passed: bool,
    /// Values `n` with `|n| <= window` were classified as settled or pending.
    pub window: i64,
    /// Number of settled `n` in the window, each checked for `r(n) = f(n)`.
    pub settled: usize,
    /// `n` whose `U`-occurrences are not all consumed yet.
    pub pending: Vec<i64>,
    pub report: VerificationReport,
}

/// Recomputes everything about `basis` from scratch: conditions (i)–(iv)
/// with the brute-force oracle, exact values at settled `n`, the growth
/// bound, consistency of the step log, and a full deterministic replay.
pub fn verify_basis(basis: &BasisFile, target: &TargetFunction, window: i64) -> VerifyOutcome {
    let window = window.abs();
    let mut report = VerificationReport::new();
    let h = basis.order;
    let k = basis.k;

    let params_ok = h >= 2
        && basis.c >= 1
        && basis.delta == target.delta()
        && (h != 2 || basis.c == target.window_constant());
    report.record(
        "target parameters",
        params_ok,
        format!("order {h}, c = {}, Δ = {} (target Δ = {})", basis.c, basis.delta, target.delta()),
    );
    if !params_ok {
        return finish(report, window, 0, Vec::new());
    }

    let sorted = IntegerSet::from_sorted(basis.elements.clone());
    report.record("elements sorted", sorted.is_some(), "strictly increasing element list");
    let set = IntegerSet::from(basis.elements.clone());

    report.record(
        "condition (i)",
        set.len() == h * k,
        format!("|A_{k}| = {}, expected {}", set.len(), h * k),
    );
    let bound = (basis.c as i128).saturating_mul((k as i128).saturating_pow(2 * h as u32 - 1));
    report.record(
        "condition (ii)",
        (set.max_abs() as i128) <= bound,
        format!("max |a| = {}, c·k^{} = {bound}", set.max_abs(), 2 * h - 1),
    );

    let table = match full_rep_table(&set, h, basis.restricted) {
        Ok(t) => t,
        Err(e) => {
            report.record("oracle", false, e.to_string());
            return finish(report, window, 0, Vec::new());
        }
    };
    check_against_target(&mut report, &table, target);

    let last_i = basis.steps.last().map_or(0, |s| s.i_k);
    let prefix: Vec<i64> = match u_prefix(target, last_i) {
        Ok(p) => p.into_iter().map(|t| t.value).collect(),
        Err(e) => {
            report.record("condition (iv)", false, e.to_string());
            return finish(report, window, 0, Vec::new());
        }
    };
    check_consumed(&mut report, &table, &prefix);

    let mut occurrences: HashMap<i64, u64> = HashMap::new();
    for &u in &prefix {
        *occurrences.entry(u).or_insert(0) += 1;
    }
    let mut settled = 0;
    let mut pending = Vec::new();
    let mut mismatch = None;
    for n in -window..=window {
        match target.evaluate(n) {
            Multiplicity::Finite(l) if occurrences.get(&n).copied().unwrap_or(0) == l => {
                settled += 1;
                if table.get(n) != l && mismatch.is_none() {
                    mismatch = Some((n, table.get(n), l));
                }
            }
            _ => pending.push(n),
        }
    }
    report.record(
        "settled values",
        mismatch.is_none(),
        match mismatch {
            Some((n, r, l)) => format!("r({n}) = {r} but f({n}) = {l} is fully consumed"),
            None => format!("{settled} settled values have r(n) = f(n), {} pending", pending.len()),
        },
    );

    let c = basis.c.unsigned_abs();
    let growth = first_failure(&set, c, k, h);
    report.record(
        "growth",
        growth.is_none(),
        match growth {
            Some(x) => format!("A(-x, x) below (x/c)^(1/{}) at x = {x}", 2 * h - 1),
            None => format!("A(-x, x) >= (x/c)^(1/{}) on [8c, c·K^{}]", 2 * h - 1, 2 * h - 1),
        },
    );

    check_step_log(&mut report, basis, &prefix, &set);
    check_replay(&mut report, basis, target);
    finish(report, window, settled, pending)
}

fn finish(report: VerificationReport, window: i64, settled: usize, pending: Vec<i64>) -> VerifyOutcome {
    VerifyOutcome { passed: report.passed(), window, settled, pending, report }
}

fn check_step_log(report: &mut VerificationReport, basis: &BasisFile, prefix: &[i64], set: &IntegerSet) {
    let steps = &basis.steps;
    let ordered = steps.len() == basis.k
        && steps.iter().enumerate().all(|(j, s)| {
            s.k == j + 1
                && s.i_k >= 1
                && (j == 0 || steps[j - 1].i_k < s.i_k)
                && prefix.get(s.i_k - 1) == Some(&s.u)
        });
    report.record(
        "step log",
        ordered,
        format!("{} steps, consecutive k, increasing i_k, u = u_(i_k)", steps.len()),
    );

    let mut rebuilt = IntegerSet::new();
    let mut disjoint = true;
    for s in steps {
        match block(s.a, s.u, basis.order) {
            Ok(b) if b.len() == basis.order => {
                for x in b.iter() {
                    disjoint &= rebuilt.insert(x);
                }
            }
            _ => disjoint = false,
        }
    }
    report.record(
        "log reproduces elements",
        disjoint && rebuilt == *set,
        "union of logged blocks equals the element list",
    );
}

fn check_replay(report: &mut VerificationReport, basis: &BasisFile, target: &TargetFunction) {
    let policy = match ChoicePolicy::try_from(&basis.policy) {
        Ok(p) => p,
        Err(e) => {
            report.record("replay", false, e.to_string());
            return;
        }
    };
    let mut config = RunConfig::new(policy, basis.restricted);
    config.audit_each_step = false;
    let c = (basis.order > 2).then_some(basis.c);
    match build(target, basis.order, basis.k, &config, c) {
        Ok(replayed) => {
            let again = replayed.to_basis_file();
            let first_diff = again
                .steps
                .iter()
                .zip(&basis.steps)
                .find(|(x, y)| x != y)
                .map(|(x, _)| x.k);
            report.record(
                "replay",
                again == *basis,
                match first_diff {
                    Some(k) => format!("replay diverges at step {k}"),
                    None if again == *basis => "replay reproduces the file exactly".into(),
                    None => "replayed file differs from the stored one".into(),
                },
            );
        }
        Err(e) => report.record("replay", false, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build;

    fn ones() -> TargetFunction {
        TargetFunction::constant(Multiplicity::Finite(1)).unwrap()
    }

    fn basis(steps: usize) -> BasisFile {
        build(&ones(), 2, steps, &RunConfig::default(), None).unwrap().to_basis_file()
    }

    #[test]
    fn fresh_basis_verifies() {
        let out = verify_basis(&basis(10), &ones(), 20);
        assert!(out.passed, "{:?}", out.report.failure_summary());
        assert!(out.settled > 0);
    }

    #[test]
    fn removed_element_breaks_condition_i() {
        let mut b = basis(10);
        b.elements.remove(3);
        let out = verify_basis(&b, &ones(), 10);
        assert!(!out.passed);
        assert!(!out.report.get("condition (i)").unwrap().passed);
    }

    #[test]
    fn wide_window_reports_pending_values() {
        let b = basis(6);
        let out = verify_basis(&b, &ones(), 1000);
        assert!(out.passed);
        assert!(out.pending.contains(&1000) && out.pending.contains(&-1000));
        assert!(!out.pending.contains(&0));
    }

    #[test]
    fn tampered_log_fails_replay() {
        let mut b = basis(5);
        b.steps[2].candidate_rank = 1;
        let out = verify_basis(&b, &ones(), 10);
        assert!(!out.report.get("replay").unwrap().passed);
    }

    #[test]
    fn wrong_target_is_detected() {
        let b = basis(5);
        let two = TargetFunction::constant(Multiplicity::Finite(2)).unwrap();
        let out = verify_basis(&b, &two, 10);
        assert!(!out.passed);
    }
}

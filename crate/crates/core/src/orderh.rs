//! Order-`h` construction: sums of `h` elements.
//!
//! Each step adds the block `{u + T·a, -a, -m·a, ..., -m^(h-2)·a}` with
//! `m = h + 2` and `T = 1 + m + ... + m^(h-2)`, whose elements sum to `u`.
//! Multipliers `1, 2, ..., h-1` do not work for `h >= 3`: `2·(-a) = -2a`
//! inside every block, so any two blocks share the sum `-2a - a' - a'` =
//! `-a - a - 2a'`. With base-`m` digits no multiset of at most `h` block
//! elements has an `a`-free sum except the whole block, so every unwanted
//! coincidence is a linear equation in `a` and excludes at most one value.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::order2::{self, check_against_target, check_consumed, check_log, RunConfig, StepRecord};
use crate::policy::{candidate_order, ChoicePolicy, Chooser};
use crate::report::VerificationReport;
use crate::sumset::{full_rep_table, tuple_total, IntegerSet};
use crate::target::TargetFunction;
use crate::useq::USequence;

/// Multipliers `(h+2)^j` for `0 <= j < h-1`.
fn multipliers(h: usize) -> impl Iterator<Item = i128> {
    (0..h as u32 - 1).map(move |j| (h as i128 + 2).pow(j))
}

/// `T = 1 + m + ... + m^(h-2)` with `m = h + 2`.
pub fn spread(h: usize) -> i128 {
    multipliers(h).sum()
}

fn block_values(a: i64, u: i64, h: usize) -> Option<Vec<i64>> {
    let (a, u) = (a as i128, u as i128);
    let mut out = Vec::with_capacity(h);
    out.push(i64::try_from(u + spread(h).checked_mul(a)?).ok()?);
    for m in multipliers(h) {
        out.push(i64::try_from(-m.checked_mul(a)?).ok()?);
    }
    Some(out)
}

/// `{u + T·a} ∪ {-(h+2)^j·a : 0 <= j < h-1}`; its elements sum to `u`. Has fewer
/// than `h` elements when they coincide (always for `a = 0`).
pub fn block(a: i64, u: i64, h: usize) -> Result<IntegerSet> {
    if h < 2 {
        return Err(Error::InvalidParameter(format!("order {h} < 2")));
    }
    block_values(a, u, h)
        .map(IntegerSet::from)
        .ok_or(Error::Overflow("block"))
}

/// `T·(8 + [(Δ+1)/2])`: the order-2 constant scaled so that the first
/// block fits for some `a != 0`. Equals the order-2 constant for `h = 2`.
pub fn default_window_constant(target: &TargetFunction, h: usize) -> i64 {
    (spread(h) as i64).saturating_mul(target.window_constant())
}

/// Sums of all size-`m` multisets (or subsets, if `distinct`) of `elems`.
fn subset_sums(elems: &[i64], m: usize, distinct: bool) -> Vec<i128> {
    fn rec(elems: &[i64], start: usize, left: usize, acc: i128, distinct: bool, out: &mut Vec<i128>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..elems.len() {
            let next = if distinct { i + 1 } else { i };
            rec(elems, next, left - 1, acc + elems[i] as i128, distinct, out);
        }
    }
    let mut out = Vec::new();
    rec(elems, 0, m, 0, distinct, &mut out);
    out
}

/// New `h`-fold sums created by adding `block` (disjoint from `old`),
/// given the old partial sums indexed by size.
fn new_sum_counts(block: &[i64], partials: &[Vec<i128>], h: usize, distinct: bool) -> FxHashMap<i64, u64> {
    let mut out = FxHashMap::default();
    for j in 1..=h {
        for sigma in subset_sums(block, j, distinct) {
            for &s in &partials[h - j] {
                let n = i64::try_from(sigma + s).expect("admissible sums fit in i64");
                *out.entry(n).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Order-`h` analogue of [`order2::ConstructionState`].
#[derive(Clone, Debug)]
pub struct HConstructionState {
    target: TargetFunction,
    zero: FxHashSet<i64>,
    h: usize,
    delta: usize,
    c: i64,
    restricted: bool,
    useq: USequence,
    chooser: Chooser,
    k: usize,
    i_k: usize,
    set: IntegerSet,
    members: FxHashSet<i64>,
    /// `r_{A,h}` over `hA`.
    reps: FxHashMap<i64, u64>,
    /// `r̂_{A,h}`, maintained only in restricted mode.
    reps_hat: FxHashMap<i64, u64>,
    /// `partials[m]`: sums of size-`m` multisets of `A`, `m < h`.
    partials: Vec<Vec<i128>>,
    partials_hat: Vec<Vec<i128>>,
    log: Vec<StepRecord>,
}

impl HConstructionState {
    /// Empty state with the default window constant [`default_window_constant`].
    pub fn new(target: TargetFunction, h: usize, config: &RunConfig) -> Result<Self> {
        if h < 2 {
            return Err(Error::InvalidParameter(format!("order {h} < 2")));
        }
        let mut state = HConstructionState {
            zero: target.zero_set().iter().collect(),
            delta: target.delta(),
            c: default_window_constant(&target, h),
            restricted: config.restricted,
            useq: USequence::new(target.clone()),
            chooser: Chooser::new(config.policy.clone()),
            target,
            h,
            k: 0,
            i_k: 0,
            set: IntegerSet::new(),
            members: FxHashSet::default(),
            reps: FxHashMap::default(),
            reps_hat: FxHashMap::default(),
            partials: Vec::new(),
            partials_hat: Vec::new(),
            log: Vec::new(),
        };
        state.refresh_partials();
        Ok(state)
    }

    /// Overrides the window constant `c_h`. Only valid before the first step.
    pub fn with_window_constant(mut self, c: i64) -> Result<Self> {
        if c < 1 || self.k > 0 {
            return Err(Error::InvalidParameter(format!("window constant {c}")));
        }
        self.c = c;
        Ok(self)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn i_k(&self) -> usize {
        self.i_k
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn restricted(&self) -> bool {
        self.restricted
    }

    pub fn target(&self) -> &TargetFunction {
        &self.target
    }

    pub fn policy(&self) -> &ChoicePolicy {
        self.chooser.policy()
    }

    pub fn elements(&self) -> &IntegerSet {
        &self.set
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    /// `c_h · k^{2h-1}`.
    pub fn containment_bound(&self, k: usize) -> i128 {
        self.c as i128 * (k as i128).pow(2 * self.h as u32 - 1)
    }

    /// Largest `|a|` searched at step `k` for deficit value `u`. For `h = 2`
    /// this is the order-2 window; otherwise the largest `|a|` keeping
    /// `|u + T·a| <= c_h k^{2h-1}`.
    pub fn window(&self, k: usize, u: i64) -> i64 {
        if self.h == 2 {
            return order2::window(k, self.delta, self.c);
        }
        let room = self.containment_bound(k) - u.unsigned_abs() as i128;
        i64::try_from((room / spread(self.h)).max(0)).unwrap_or(i64::MAX)
    }

    fn refresh_partials(&mut self) {
        let elems = self.set.as_slice();
        self.partials = (0..self.h).map(|m| subset_sums(elems, m, false)).collect();
        if self.restricted {
            self.partials_hat = (0..self.h).map(|m| subset_sums(elems, m, true)).collect();
        }
    }

    pub fn rep(&self, n: i64) -> u64 {
        let table = if self.restricted { &self.reps_hat } else { &self.reps };
        table.get(&n).copied().unwrap_or(0)
    }

    /// The least `i > i_k` with `rep(u_i) < f(u_i)`, and `u_i`.
    pub fn next_deficit(&mut self) -> Result<(usize, i64)> {
        let mut i = self.i_k + 1;
        loop {
            let u = self.useq.term(i)?.value;
            if self.target.evaluate(u).exceeds(self.rep(u)) {
                return Ok((i, u));
            }
            i += 1;
        }
    }

    /// Whether adding `block(a, u, h)` keeps every old count, adds exactly
    /// one representation of `u`, and creates only fresh, unique sums
    /// outside the zero set. Uses unrestricted counts in both modes, which
    /// is conservative for the restricted function.
    pub fn admissible_h(&self, u: i64, a: i64) -> bool {
        let Some(block) = block_values(a, u, self.h) else {
            return false;
        };
        let distinct: FxHashSet<i64> = block.iter().copied().collect();
        if distinct.len() < self.h || block.iter().any(|b| self.members.contains(b)) {
            return false;
        }
        let mut sorted = block;
        sorted.sort_unstable();
        let mut fresh: FxHashMap<i64, u32> = FxHashMap::default();
        // few sums at large j; reject there first
        for j in (1..=self.h).rev() {
            for sigma in subset_sums(&sorted, j, false) {
                for &s in &self.partials[self.h - j] {
                    let Ok(n) = i64::try_from(sigma + s) else {
                        return false;
                    };
                    if self.zero.contains(&n) || (n != u && self.reps.contains_key(&n)) {
                        return false;
                    }
                    let c = fresh.entry(n).or_insert(0);
                    *c += 1;
                    if *c > 1 {
                        return false;
                    }
                }
            }
        }
        fresh.get(&u) == Some(&1)
    }

    /// Extends `A_{k-1}` to `A_k`.
    pub fn step_h(&mut self) -> Result<&StepRecord> {
        let k = self.k + 1;
        let (i, u) = self.next_deficit()?;
        let window = self.window(k, u);
        let bound = self.containment_bound(k);
        let plan = self.chooser.plan(k);

        let mut found: Vec<(i64, Vec<i64>)> = Vec::with_capacity(plan.wanted);
        for a in candidate_order(window) {
            if !self.admissible_h(u, a) {
                continue;
            }
            let mut b = block_values(a, u, self.h).expect("admissible block fits");
            if b.iter().any(|&x| (x as i128).abs() > bound) {
                continue;
            }
            b.sort_unstable();
            if found.iter().any(|(_, f)| *f == b) {
                continue;
            }
            found.push((a, b));
            if found.len() == plan.wanted {
                break;
            }
        }
        if found.len() < 2 {
            return Err(Error::WindowExhausted { k, window, found: found.len() });
        }
        let found_count = found.len();
        let rank = plan.rank(found_count);
        let (a, b) = found.swap_remove(rank);
        self.commit(u, &b);
        self.k = k;
        self.i_k = i;
        log::debug!("order-{} step {k}: i_k={i} u={u} a={a} rank={rank}", self.h);
        self.log.push(StepRecord {
            k,
            i_k: i,
            u,
            a,
            candidate_rank: rank,
            window,
            admissible_found: found_count,
            census: None,
        });
        Ok(self.log.last().expect("just pushed"))
    }

    fn commit(&mut self, u: i64, block: &[i64]) {
        let fresh = new_sum_counts(block, &self.partials, self.h, false);
        for (n, c) in fresh {
            let r = self.reps.entry(n).or_insert(0);
            assert!(
                (*r == 0 && c == 1) || (n == u && c == 1),
                "admissible block {block:?} disturbed the count of {n}"
            );
            *r += c;
        }
        if self.restricted {
            for (n, c) in new_sum_counts(block, &self.partials_hat, self.h, true) {
                *self.reps_hat.entry(n).or_insert(0) += c;
            }
        }
        for &b in block {
            self.set.insert(b);
            self.members.insert(b);
        }
        self.refresh_partials();
    }

    /// Re-checks the state against the brute-force oracle.
    pub fn audit_h(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        let (h, k) = (self.h, self.k);
        let size = self.set.len();
        report.record(
            "condition (i)",
            size == h * k,
            format!("|A_{k}| = {size}, expected {}", h * k),
        );
        let bound = self.containment_bound(k);
        let max_abs = self.set.max_abs();
        report.record(
            "condition (ii)",
            (max_abs as i128) <= bound,
            format!("max |a| = {max_abs}, c·k^{} = {bound}", 2 * h - 1),
        );
        let table = match full_rep_table(&self.set, h, self.restricted) {
            Ok(t) => t,
            Err(e) => {
                report.record("oracle", false, e.to_string());
                return report;
            }
        };
        check_against_target(&mut report, &table, &self.target);
        let prefix: Vec<i64> = self.useq.emitted()[..self.i_k].iter().map(|t| t.value).collect();
        check_consumed(&mut report, &table, &prefix);
        let expected_total = tuple_total(h * self.k, h, self.restricted);
        report.record(
            "representation total",
            table.total() == expected_total,
            format!("Σ r = {}, expected {expected_total}", table.total()),
        );
        let cache = if self.restricted { &self.reps_hat } else { &self.reps };
        let disagree = table
            .nonzero()
            .map(|(n, _)| n)
            .chain(cache.keys().copied())
            .find(|&n| self.rep(n) != table.get(n));
        report.record(
            "cache agreement",
            disagree.is_none(),
            match disagree {
                Some(n) => format!("cache {} vs oracle {} at n = {n}", self.rep(n), table.get(n)),
                None => "incremental counts match the oracle".into(),
            },
        );
        let restricted = self.restricted;
        check_log(
            &mut report,
            &self.log,
            |k| 1 + tuple_total(h * (k - 1), h, restricted),
            "i_k ≤ 1 + Σ r_{A_{k-1}}",
        );
        report
    }
}

/// Runs `steps` order-`h` steps, auditing as configured. `c` overrides
/// the default window constant.
pub fn run_h(
    target: &TargetFunction,
    h: usize,
    steps: usize,
    config: &RunConfig,
    c: Option<i64>,
) -> Result<HConstructionState> {
    if steps == 0 {
        return Err(Error::InvalidParameter("at least one step is required".into()));
    }
    let mut state = HConstructionState::new(target.clone(), h, config)?;
    if let Some(c) = c {
        state = state.with_window_constant(c)?;
    }
    for _ in 0..steps {
        state.step_h()?;
        if config.audit_each_step {
            let report = state.audit_h();
            if !report.passed() {
                return Err(Error::AuditFailed { k: state.k, failures: report.failure_summary() });
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order2::{run, ConstructionState};
    use crate::sumset::{rep_count, rep_table};
    use crate::target::Multiplicity::Finite;
    use crate::useq::extremal_target;

    fn ones() -> TargetFunction {
        TargetFunction::constant(Finite(1)).unwrap()
    }

    #[test]
    fn block_examples() {
        assert_eq!(block(7, 3, 2).unwrap(), IntegerSet::from([10, -7]));
        assert_eq!(block(5, 2, 3).unwrap(), IntegerSet::from([32, -5, -25]));
        assert_eq!(block(1, 0, 3).unwrap(), IntegerSet::from([6, -1, -5]));
        assert_eq!(block(1, 0, 4).unwrap(), IntegerSet::from([43, -1, -6, -36]));
        assert_eq!(block(0, 4, 3).unwrap(), IntegerSet::from([4, 0]));
        assert!(block(i64::MAX, 0, 3).is_err());
        assert!(block(1, 0, 1).is_err());
    }

    #[test]
    fn first_order3_step() {
        let s = HConstructionState::new(ones(), 3, &RunConfig::default()).unwrap();
        assert!(s.admissible_h(0, 1));
        // brute force over the 10 multiset sums of {6, -1, -5}
        let t = rep_table(&IntegerSet::from([6, -1, -5]), 3, false, -15, 18).unwrap();
        assert_eq!(t.total(), 10);
        assert!(t.nonzero().all(|(_, c)| c == 1));
        assert_eq!(t.get(0), 1);
    }

    #[test]
    fn linear_multipliers_always_collide() {
        // blocks {u + 3a, -a, -2a} for any two steps share a 3-fold sum
        for (a, b) in [(1, 7), (-4, 13), (30, -9)] {
            let set = IntegerSet::from([3 * a, -a, -2 * a, 1 + 3 * b, -b, -2 * b]);
            let n = -2 * a - 2 * b;
            assert!(rep_count(&set, 3, false, n) >= 2);
        }
    }

    #[test]
    fn colliding_block_is_rejected() {
        let mut s = HConstructionState::new(ones(), 3, &RunConfig::default()).unwrap();
        s.step_h().unwrap();
        // a = -x for an existing element x puts -a = x into the block
        let x = s.elements().as_slice()[0];
        let (_, u) = s.clone().next_deficit().unwrap();
        assert!(!s.admissible_h(u, -x));
    }

    #[test]
    fn order2_path_matches_order2_constructor() {
        for restricted in [false, true] {
            for policy in ["min-abs", "stream:2d5", "seed:11"] {
                let cfg = RunConfig::new(policy.parse().unwrap(), restricted);
                let a = run(&ones(), 10, &cfg).unwrap();
                let b = run_h(&ones(), 2, 10, &cfg, None).unwrap();
                assert_eq!(a.elements(), b.elements(), "{policy} restricted={restricted}");
                let strip = |log: &[StepRecord]| {
                    log.iter().map(|s| (s.k, s.i_k, s.u, s.a, s.candidate_rank)).collect::<Vec<_>>()
                };
                assert_eq!(strip(a.log()), strip(b.log()));
            }
        }
    }

    #[test]
    fn admissibility_agrees_with_order2_fast_path() {
        let (f, _) = extremal_target(2);
        let cfg = RunConfig::default();
        let mut two = ConstructionState::new(f.clone(), &cfg);
        let mut gen = HConstructionState::new(f, 2, &cfg).unwrap();
        for _ in 0..8 {
            let (_, u) = two.clone().next_deficit().unwrap();
            for a in -300..=300 {
                assert_eq!(two.admissible(u, a), gen.admissible_h(u, a), "u={u} a={a}");
            }
            two.step().unwrap();
            gen.step_h().unwrap();
        }
    }

    #[test]
    fn small_order3_and_order4_runs_audit_clean() {
        for (h, steps) in [(3, 4), (4, 3)] {
            for restricted in [false, true] {
                let cfg = RunConfig::new(ChoicePolicy::MinAbs, restricted);
                let s = run_h(&ones(), h, steps, &cfg, None).unwrap();
                assert_eq!(s.elements().len(), h * steps);
                assert!(s.audit_h().passed());
            }
        }
    }
}

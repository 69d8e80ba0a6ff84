//! Greedy construction of a set whose order-2 representation function
//! (or its restricted form) converges to a target `f`.
//!
//! Step `k` finds the first index `i_k` of `U` whose value is still
//! under-represented, then adds the pair `{a + u, -a}` with `u = u_{i_k}`.
//! The new pair contributes the sums `A + {a+u, -a}` and `{u, 2a+2u, -2a}`;
//! `a` is admissible when `u` is the only new sum that collides with an old
//! one, every other new sum is hit exactly once, and none lands in `f⁻¹(0)`.
//!
//! Admissibility is tested with `O(|A|)` hash lookups. The same constraints
//! can also be materialized as explicit forbidden sets
//! ([`ConstructionState::exclusion_census`]); that path is for auditing.

use std::collections::{BTreeSet, HashMap};

use rustc_hash::{FxHashMap, FxHashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::policy::{candidate_order, ChoicePolicy, Chooser};
use crate::report::VerificationReport;
use crate::sumset::{full_rep_table, tuple_total, IntegerSet, RepTable};
use crate::target::{Multiplicity, TargetFunction};
use crate::useq::USequence;

/// One committed construction step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub k: usize,
    pub i_k: usize,
    pub u: i64,
    pub a: i64,
    /// 0-based rank of `a` among the distinct admissible candidates.
    pub candidate_rank: usize,
    /// Largest `|a|` that was searchable at this step.
    pub window: i64,
    /// Distinct admissible candidates found before committing.
    pub admissible_found: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusCounts>,
}

/// Cardinalities of the forbidden sets, one per constraint family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    /// New elements distinct from each other and from `A`.
    pub distinctness: usize,
    /// `A + {a+u, -a}` misses `2A`.
    pub cross_vs_old: usize,
    /// `A + {a+u, -a}` misses `f⁻¹(0)`.
    pub cross_vs_zero: usize,
    /// `A + a + u` misses `A - a`.
    pub cross_vs_cross: usize,
    /// `{2a+2u, -2a}` misses `2A`.
    pub diag_vs_old: usize,
    /// `{2a+2u, -2a}` misses `f⁻¹(0)`.
    pub diag_vs_zero: usize,
    /// `{2a+2u, -2a}` misses `A + {a+u, -a}`.
    pub diag_vs_cross: usize,
}

impl CensusCounts {
    /// Worst-case sizes at step `k` with `|f⁻¹(0)| = Δ`:
    /// `4k-3, 16(k-1)³, 4Δ(k-1), 4(k-1)², 8(k-1)², 2Δ, 8(k-1)`.
    pub fn bounds(k: usize, delta: usize) -> CensusCounts {
        let j = k - 1;
        CensusCounts {
            distinctness: 4 * k - 3,
            cross_vs_old: 16 * j * j * j,
            cross_vs_zero: 4 * delta * j,
            cross_vs_cross: 4 * j * j,
            diag_vs_old: 8 * j * j,
            diag_vs_zero: 2 * delta,
            diag_vs_cross: 8 * j,
        }
    }

    fn fields(&self) -> [(&'static str, usize); 7] {
        [
            ("distinctness", self.distinctness),
            ("cross_vs_old", self.cross_vs_old),
            ("cross_vs_zero", self.cross_vs_zero),
            ("cross_vs_cross", self.cross_vs_cross),
            ("diag_vs_old", self.diag_vs_old),
            ("diag_vs_zero", self.diag_vs_zero),
            ("diag_vs_cross", self.diag_vs_cross),
        ]
    }

    /// Names of the families whose count exceeds `bound`.
    pub fn exceeded(&self, bound: &CensusCounts) -> Vec<&'static str> {
        self.fields()
            .iter()
            .zip(bound.fields())
            .filter(|((_, v), (_, b))| v > b)
            .map(|((name, _), _)| *name)
            .collect()
    }

    pub fn total(&self) -> usize {
        self.fields().iter().map(|(_, v)| v).sum()
    }
}

/// Materialized forbidden values of `a` for one step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExclusionCensus {
    pub distinctness: BTreeSet<i64>,
    pub cross_vs_old: BTreeSet<i64>,
    pub cross_vs_zero: BTreeSet<i64>,
    pub cross_vs_cross: BTreeSet<i64>,
    pub diag_vs_old: BTreeSet<i64>,
    pub diag_vs_zero: BTreeSet<i64>,
    pub diag_vs_cross: BTreeSet<i64>,
}

impl ExclusionCensus {
    pub fn counts(&self) -> CensusCounts {
        CensusCounts {
            distinctness: self.distinctness.len(),
            cross_vs_old: self.cross_vs_old.len(),
            cross_vs_zero: self.cross_vs_zero.len(),
            cross_vs_cross: self.cross_vs_cross.len(),
            diag_vs_old: self.diag_vs_old.len(),
            diag_vs_zero: self.diag_vs_zero.len(),
            diag_vs_cross: self.diag_vs_cross.len(),
        }
    }

    pub fn forbids(&self, a: i64) -> bool {
        [
            &self.distinctness,
            &self.cross_vs_old,
            &self.cross_vs_zero,
            &self.cross_vs_cross,
            &self.diag_vs_old,
            &self.diag_vs_zero,
            &self.diag_vs_cross,
        ]
        .iter()
        .any(|s| s.contains(&a))
    }
}

fn exact_div(n: i128, d: i128) -> Option<i64> {
    if n % d == 0 {
        i64::try_from(n / d).ok()
    } else {
        None
    }
}

fn lookup<V>(set: &FxHashMap<i64, V>, v: i128) -> bool {
    i64::try_from(v).is_ok_and(|v| set.contains_key(&v))
}

fn member(set: &FxHashSet<i64>, v: i128) -> bool {
    i64::try_from(v).is_ok_and(|v| set.contains(&v))
}

/// Search radius for step `k`: `c` for the first step (candidates are
/// further filtered by `|a+u| <= c`), then `c·k³ - k² - [(Δ+1)/2]`.
pub fn window(k: usize, delta: usize, c: i64) -> i64 {
    let k = k as i64;
    let half = (delta as i64 + 1) / 2;
    if k == 1 {
        c
    } else {
        c * k * k * k - k * k - half
    }
}

/// Construction options shared by both constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub policy: ChoicePolicy,
    pub restricted: bool,
    /// Materialize the exclusion census at every step (costly: `O(k³)`).
    pub census: bool,
    /// Re-audit against the oracle after every step.
    pub audit_each_step: bool,
}

impl RunConfig {
    pub fn new(policy: ChoicePolicy, restricted: bool) -> Self {
        RunConfig { policy, restricted, census: false, audit_each_step: true }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::new(ChoicePolicy::MinAbs, false)
    }
}

/// `A_k` together with everything needed to extend and audit it.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    target: TargetFunction,
    zero: FxHashSet<i64>,
    delta: usize,
    c: i64,
    restricted: bool,
    census: bool,
    useq: USequence,
    chooser: Chooser,
    k: usize,
    i_k: usize,
    set: IntegerSet,
    members: FxHashSet<i64>,
    /// Unrestricted `r_{A,2}` over `2A`; the restricted count is derived.
    reps: FxHashMap<i64, u64>,
    log: Vec<StepRecord>,
}

impl ConstructionState {
    /// The empty state `k = 0`.
    pub fn new(target: TargetFunction, config: &RunConfig) -> Self {
        ConstructionState {
            zero: target.zero_set().iter().collect(),
            delta: target.delta(),
            c: target.window_constant(),
            restricted: config.restricted,
            census: config.census,
            useq: USequence::new(target.clone()),
            chooser: Chooser::new(config.policy.clone()),
            target,
            k: 0,
            i_k: 0,
            set: IntegerSet::new(),
            members: FxHashSet::default(),
            reps: FxHashMap::default(),
            log: Vec::new(),
        }
    }

    /// `A_1 = {a_1 + u_1, -a_1}`.
    pub fn seed(target: TargetFunction, config: &RunConfig) -> Result<Self> {
        let mut state = ConstructionState::new(target, config);
        state.step()?;
        Ok(state)
    }

    pub fn target(&self) -> &TargetFunction {
        &self.target
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

    pub fn policy(&self) -> &ChoicePolicy {
        self.chooser.policy()
    }

    pub fn elements(&self) -> &IntegerSet {
        &self.set
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    pub fn useq(&mut self) -> &mut USequence {
        &mut self.useq
    }

    /// Current `r_{A_k,2}(n)` (restricted: `r̂`), from the incremental cache.
    pub fn rep(&self, n: i64) -> u64 {
        let r = self.reps.get(&n).copied().unwrap_or(0);
        if self.restricted && n % 2 == 0 && self.members.contains(&(n / 2)) {
            r - 1
        } else {
            r
        }
    }

    /// The least `i > i_{k}` with `rep(u_i) < f(u_i)`, and `u_i`.
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

    /// Fast admissibility test for adding `{a + u, -a}` to the current set.
    pub fn admissible(&self, u: i64, a: i64) -> bool {
        let (u, a) = (u as i128, a as i128);
        let p = a + u;
        let q = -a;
        if p == q || member(&self.members, p) || member(&self.members, q) {
            return false;
        }
        for x in self.set.iter() {
            let x = x as i128;
            if lookup(&self.reps, x + p) || lookup(&self.reps, x + q) {
                return false;
            }
            if member(&self.zero, x + p) || member(&self.zero, x + q) {
                return false;
            }
            if member(&self.members, x + p - q) {
                return false;
            }
        }
        let (dp, dq) = (2 * p, 2 * q);
        if lookup(&self.reps, dp) || lookup(&self.reps, dq) {
            return false;
        }
        if member(&self.zero, dp) || member(&self.zero, dq) {
            return false;
        }
        !(member(&self.members, dp - q) || member(&self.members, dq - p))
    }

    /// Every `a` ruled out at the current state for deficit value `u`,
    /// grouped by constraint family.
    pub fn exclusion_census(&self, u: i64) -> ExclusionCensus {
        let u = u as i128;
        let elems: Vec<i128> = self.set.iter().map(i128::from).collect();
        let sums: Vec<i128> = self.reps.keys().map(|&s| s as i128).collect();
        let zeros: Vec<i128> = self.target.zero_set().iter().map(i128::from).collect();
        let mut out = ExclusionCensus::default();
        let put = |set: &mut BTreeSet<i64>, v: i128| {
            if let Ok(v) = i64::try_from(v) {
                set.insert(v);
            }
        };

        for &x in &elems {
            put(&mut out.distinctness, -x);
            put(&mut out.distinctness, x - u);
        }
        if let Some(v) = exact_div(-u, 2) {
            out.distinctness.insert(v);
        }

        for &x in &elems {
            for &y in &sums {
                // x + a + u = y  or  x - a = y
                put(&mut out.cross_vs_old, y - x - u);
                put(&mut out.cross_vs_old, x - y);
            }
            for &z in &zeros {
                put(&mut out.cross_vs_zero, z - x - u);
                put(&mut out.cross_vs_zero, x - z);
            }
            for &x2 in &elems {
                // x + a + u = x2 - a
                if let Some(v) = exact_div(x2 - x - u, 2) {
                    out.cross_vs_cross.insert(v);
                }
            }
        }

        for &y in &sums {
            // 2a + 2u = y  or  -2a = y
            if let Some(v) = exact_div(y - 2 * u, 2) {
                out.diag_vs_old.insert(v);
            }
            if let Some(v) = exact_div(-y, 2) {
                out.diag_vs_old.insert(v);
            }
        }
        for &z in &zeros {
            if let Some(v) = exact_div(z - 2 * u, 2) {
                out.diag_vs_zero.insert(v);
            }
            if let Some(v) = exact_div(-z, 2) {
                out.diag_vs_zero.insert(v);
            }
        }

        for &x in &elems {
            // 2(a+u) = x + (a+u)
            put(&mut out.diag_vs_cross, x - u);
            // -2a = x - a
            put(&mut out.diag_vs_cross, -x);
            // 2(a+u) = x - a
            if let Some(v) = exact_div(x - 2 * u, 3) {
                out.diag_vs_cross.insert(v);
            }
            // -2a = x + a + u
            if let Some(v) = exact_div(-x - u, 3) {
                out.diag_vs_cross.insert(v);
            }
        }
        out
    }

    /// Extends `A_{k-1}` to `A_k`.
    pub fn step(&mut self) -> Result<&StepRecord> {
        let k = self.k + 1;
        let (i, u) = self.next_deficit()?;
        let window = window(k, self.delta, self.c);
        let bound = self.c as i128 * (k as i128).pow(3);
        let plan = self.chooser.plan(k);

        let mut found: Vec<(i64, [i64; 2])> = Vec::with_capacity(plan.wanted);
        for a in candidate_order(window) {
            if !self.admissible(u, a) {
                continue;
            }
            let (p, q) = (a + u, -a);
            if (p as i128).abs() > bound || (q as i128).abs() > bound {
                continue;
            }
            // a and -a-u give the same pair
            let pair = [p.min(q), p.max(q)];
            if found.iter().any(|(_, b)| *b == pair) {
                continue;
            }
            found.push((a, pair));
            if found.len() == plan.wanted {
                break;
            }
        }
        if found.len() < 2 {
            return Err(Error::WindowExhausted { k, window, found: found.len() });
        }
        let rank = plan.rank(found.len());
        let a = found[rank].0;
        let census = self.census.then(|| self.exclusion_census(u).counts());
        self.commit(u, a);
        self.k = k;
        self.i_k = i;
        log::debug!("step {k}: i_k={i} u={u} a={a} rank={rank} found={}", found.len());
        self.log.push(StepRecord {
            k,
            i_k: i,
            u,
            a,
            candidate_rank: rank,
            window,
            admissible_found: found.len(),
            census,
        });
        Ok(self.log.last().expect("just pushed"))
    }

    fn commit(&mut self, u: i64, a: i64) {
        let (p, q) = (a + u, -a);
        let mut fresh: Vec<i64> = Vec::with_capacity(2 * self.set.len() + 3);
        for x in self.set.iter() {
            fresh.push(x + p);
            fresh.push(x + q);
        }
        fresh.extend([2 * p, 2 * q, u]);
        for n in fresh {
            let r = self.reps.entry(n).or_insert(0);
            assert!(
                *r == 0 || n == u,
                "admissible pair {{{p}, {q}}} changed the count of existing sum {n}"
            );
            *r += 1;
        }
        self.set.insert(p);
        self.set.insert(q);
        self.members.insert(p);
        self.members.insert(q);
    }

    /// Re-checks the state against the brute-force oracle.
    pub fn audit(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        let k = self.k;
        let size = self.set.len();
        report.record(
            "condition (i)",
            size == 2 * k,
            format!("|A_{k}| = {size}, expected {}", 2 * k),
        );
        let bound = self.c as u128 * (k as u128).pow(3);
        let max_abs = self.set.max_abs();
        report.record(
            "condition (ii)",
            (max_abs as u128) <= bound,
            format!("max |a| = {max_abs}, c·k³ = {bound}"),
        );
        let table = match full_rep_table(&self.set, 2, self.restricted) {
            Ok(t) => t,
            Err(e) => {
                report.record("oracle", false, e.to_string());
                return report;
            }
        };
        check_against_target(&mut report, &table, &self.target);
        let prefix: Vec<i64> = self.useq.emitted()[..self.i_k].iter().map(|t| t.value).collect();
        check_consumed(&mut report, &table, &prefix);

        let expected_total = tuple_total(2 * k, 2, self.restricted);
        report.record(
            "representation total",
            table.total() == expected_total,
            format!("Σ r = {}, expected {expected_total}", table.total()),
        );

        let disagree = table
            .nonzero()
            .map(|(n, _)| n)
            .chain(self.reps.keys().copied())
            .find(|&n| self.rep(n) != table.get(n));
        report.record(
            "cache agreement",
            disagree.is_none(),
            match disagree {
                Some(n) => format!("cache {} vs oracle {} at n = {n}", self.rep(n), table.get(n)),
                None => "incremental counts match the oracle".into(),
            },
        );
        check_log(&mut report, &self.log, |k| (2 * k * k) as u64, "i_k ≤ 2k²");
        check_census(&mut report, &self.log, self.delta);
        report
    }
}

/// `r(n) <= f(n)` for every represented `n`.
pub(crate) fn check_against_target(report: &mut VerificationReport, table: &RepTable, f: &TargetFunction) {
    let bad = table.nonzero().find(|&(n, r)| Multiplicity::Finite(r) > f.evaluate(n));
    report.record(
        "condition (iii)",
        bad.is_none(),
        match bad {
            Some((n, r)) => format!("r({n}) = {r} > f({n}) = {}", f.evaluate(n)),
            None => "r(n) ≤ f(n) for all n".into(),
        },
    );
}

/// `r(u_j) >= #{i <= i_k : u_i = u_j}` for every `j <= i_k`.
pub(crate) fn check_consumed(report: &mut VerificationReport, table: &RepTable, prefix: &[i64]) {
    let mut occurrences: HashMap<i64, u64> = HashMap::new();
    for &u in prefix {
        *occurrences.entry(u).or_insert(0) += 1;
    }
    let bad = occurrences.iter().find(|(&n, &c)| table.get(n) < c);
    report.record(
        "condition (iv)",
        bad.is_none(),
        match bad {
            Some((n, c)) => format!("r({n}) = {} < {c} consumed occurrences", table.get(*n)),
            None => format!("all {} consumed terms are represented", prefix.len()),
        },
    );
}

pub(crate) fn check_log(
    report: &mut VerificationReport,
    log: &[StepRecord],
    deficit_bound: impl Fn(usize) -> u64,
    bound_name: &str,
) {
    let ordered = log
        .iter()
        .enumerate()
        .all(|(j, s)| s.k == j + 1 && (j == 0 || log[j - 1].i_k < s.i_k));
    report.record("step log order", ordered, "k consecutive, i_k strictly increasing");
    let over = log.iter().find(|s| s.i_k as u64 > deficit_bound(s.k));
    report.record(
        "deficit bound",
        over.is_none(),
        match over {
            Some(s) => format!("i_{} = {} violates {bound_name}", s.k, s.i_k),
            None => format!("{bound_name} at every step"),
        },
    );
    let thin = log.iter().find(|s| s.admissible_found < 2);
    report.record(
        "branching",
        thin.is_none(),
        match thin {
            Some(s) => format!("step {} had {} admissible candidate(s)", s.k, s.admissible_found),
            None => "at least two admissible candidates at every step".into(),
        },
    );
}

fn check_census(report: &mut VerificationReport, log: &[StepRecord], delta: usize) {
    let mut audited = 0;
    for s in log {
        let Some(counts) = &s.census else { continue };
        audited += 1;
        let over = counts.exceeded(&CensusCounts::bounds(s.k, delta));
        if !over.is_empty() {
            report.record(
                "exclusion census",
                false,
                format!("step {}: {} above bound", s.k, over.join(", ")),
            );
            return;
        }
    }
    if audited > 0 {
        report.record("exclusion census", true, format!("{audited} steps within bounds"));
    }
}

/// Runs `steps` construction steps from scratch, auditing as configured.
pub fn run(target: &TargetFunction, steps: usize, config: &RunConfig) -> Result<ConstructionState> {
    if steps == 0 {
        return Err(Error::InvalidParameter("at least one step is required".into()));
    }
    let mut state = ConstructionState::new(target.clone(), config);
    for _ in 0..steps {
        state.step()?;
        if config.audit_each_step {
            let report = state.audit();
            if !report.passed() {
                return Err(Error::AuditFailed { k: state.k, failures: report.failure_summary() });
            }
        }
    }
    Ok(state)
}

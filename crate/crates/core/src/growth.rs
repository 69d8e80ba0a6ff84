//! Certification of the counting-function lower bound
//! `A(-x, x) >= (x/c)^{1/(2h-1)}` on `8c <= x <= c·K^{2h-1}`.
//!
//! The pass decision is the exact integer test `count^{2h-1} · c >= x`.

use serde::Serialize;

use crate::sumset::IntegerSet;

/// CSV header written by [`write_csv`].
pub const CSV_HEADER: &str = "x,count,bound_cubed_lhs,bound_rhs,pass";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub x: u64,
    pub count: u64,
    /// `count^{2h-1} · c`, saturating.
    pub lhs: u128,
    /// `x`.
    pub rhs: u64,
    pub pass: bool,
}

/// `count^exponent · c >= x`.
pub fn bound_holds(count: u64, x: u64, c: u64, exponent: u32) -> bool {
    lhs(count, c, exponent) >= x as u128
}

fn lhs(count: u64, c: u64, exponent: u32) -> u128 {
    (count as u128)
        .checked_pow(exponent)
        .and_then(|p| p.checked_mul(c as u128))
        .unwrap_or(u128::MAX)
}

/// The interval `[8c, c·K^{2h-1}]`; `None` when it is empty.
pub fn certified_range(c: u64, steps: usize, h: usize) -> Option<(u64, u64)> {
    let exponent = (2 * h - 1) as u32;
    let hi = (steps as u64).checked_pow(exponent)?.checked_mul(c)?;
    let lo = 8 * c;
    (lo <= hi).then_some((lo, hi))
}

fn sorted_abs(a: &IntegerSet) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(i64::unsigned_abs).collect();
    v.sort_unstable();
    v
}

fn count_within(abs_sorted: &[u64], x: u64) -> u64 {
    abs_sorted.partition_point(|&t| t <= x) as u64
}

/// Every integer `x` in the certified range at which the bound could first
/// fail: the right end of each plateau of `x ↦ A(-x, x)`.
fn critical_points(abs_sorted: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    let mut pts: Vec<u64> = abs_sorted
        .iter()
        .filter(|&&t| t > lo && t <= hi)
        .map(|&t| t - 1)
        .collect();
    pts.push(hi);
    pts.dedup();
    pts
}

/// Checks the bound for *every* integer `x` in `[8c, c·K^{2h-1}]`.
/// Since the count is a step function and the bound is increasing, it
/// suffices to test the right end of each plateau.
pub fn growth_check(a: &IntegerSet, c: u64, steps: usize, h: usize) -> bool {
    first_failure(a, c, steps, h).is_none()
}

/// Smallest critical `x` where the bound fails, if any.
pub fn first_failure(a: &IntegerSet, c: u64, steps: usize, h: usize) -> Option<u64> {
    let (lo, hi) = certified_range(c, steps, h)?;
    let abs = sorted_abs(a);
    let exponent = (2 * h - 1) as u32;
    critical_points(&abs, lo, hi)
        .into_iter()
        .find(|&x| !bound_holds(count_within(&abs, x), x, c, exponent))
}

/// Sample rows: every breakpoint `c·k^{2h-1}` (k = 1..=K) inside the range
/// plus `geometric` log-spaced points, ascending and deduplicated.
pub fn growth_rows(a: &IntegerSet, c: u64, steps: usize, h: usize, geometric: usize) -> Vec<GrowthRow> {
    let Some((lo, hi)) = certified_range(c, steps, h) else {
        return Vec::new();
    };
    let exponent = (2 * h - 1) as u32;
    let mut xs: Vec<u64> = (1..=steps as u64)
        .filter_map(|k| k.checked_pow(exponent)?.checked_mul(c))
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    if geometric >= 2 {
        let ratio = (hi as f64 / lo as f64).ln();
        for i in 0..geometric {
            let t = i as f64 / (geometric - 1) as f64;
            let x = (lo as f64 * (ratio * t).exp()).round() as u64;
            xs.push(x.clamp(lo, hi));
        }
    } else if geometric == 1 {
        xs.push(lo);
    }
    xs.sort_unstable();
    xs.dedup();

    let abs = sorted_abs(a);
    xs.into_iter()
        .map(|x| {
            let count = count_within(&abs, x);
            let l = lhs(count, c, exponent);
            GrowthRow { x, count, lhs: l, rhs: x, pass: l >= x as u128 }
        })
        .collect()
}

/// Renders rows as CSV, header included.
pub fn write_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.x, r.count, r.lhs, r.rhs, r.pass));
    }
    out
}

//! Exact finite-set arithmetic over the integers.
//!
//! Everything here is brute force on purpose: the representation counts
//! computed by [`rep_count`] and [`rep_table`] are the oracle every
//! construction is audited against. Tuple sums are accumulated in `i128`,
//! so the oracle itself cannot overflow; operations that must return `i64`
//! values fail with [`Error::Overflow`] instead of wrapping.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, strictly increasing set of integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntegerSet(Vec<i64>);

impl IntegerSet {
    pub fn new() -> Self {
        IntegerSet(Vec::new())
    }

    /// Builds a set from a slice that is already strictly increasing.
    /// Returns `None` if the slice is not.
    pub fn from_sorted(elements: Vec<i64>) -> Option<Self> {
        if elements.windows(2).all(|w| w[0] < w[1]) {
            Some(IntegerSet(elements))
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn min(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.0.last().copied()
    }

    /// Inserts `x`, returning `false` if it was already present.
    pub fn insert(&mut self, x: i64) -> bool {
        match self.0.binary_search(&x) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, x);
                true
            }
        }
    }

    pub fn remove(&mut self, x: i64) -> bool {
        match self.0.binary_search(&x) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// `A(y, x)`: the number of elements `a` with `y <= a <= x`.
    pub fn counting(&self, y: i64, x: i64) -> usize {
        if y > x {
            return 0;
        }
        let lo = self.0.partition_point(|&a| a < y);
        let hi = self.0.partition_point(|&a| a <= x);
        hi - lo
    }

    /// Largest absolute value of an element, or 0 for the empty set.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }
}

impl From<Vec<i64>> for IntegerSet {
    fn from(mut v: Vec<i64>) -> Self {
        v.sort_unstable();
        v.dedup();
        IntegerSet(v)
    }
}

impl From<IntegerSet> for Vec<i64> {
    fn from(s: IntegerSet) -> Self {
        s.0
    }
}

impl FromIterator<i64> for IntegerSet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        IntegerSet::from(iter.into_iter().collect::<Vec<_>>())
    }
}

impl<const N: usize> From<[i64; N]> for IntegerSet {
    fn from(a: [i64; N]) -> Self {
        a.into_iter().collect()
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

fn narrow(n: i128, op: &'static str) -> Result<i64> {
    i64::try_from(n).map_err(|_| Error::Overflow(op))
}

/// `A + B`.
pub fn sumset(a: &IntegerSet, b: &IntegerSet) -> Result<IntegerSet> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            out.push(x.checked_add(y).ok_or(Error::Overflow("sumset"))?);
        }
    }
    Ok(IntegerSet::from(out))
}

/// `A - B`.
pub fn difference_set(a: &IntegerSet, b: &IntegerSet) -> Result<IntegerSet> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            out.push(x.checked_sub(y).ok_or(Error::Overflow("difference_set"))?);
        }
    }
    Ok(IntegerSet::from(out))
}

/// `-A = {0} - A`.
pub fn negation(a: &IntegerSet) -> Result<IntegerSet> {
    difference_set(&IntegerSet::from([0]), a)
}

/// Calls `visit` with the sum of every non-decreasing (strictly increasing
/// if `restricted`) `h`-tuple of elements. Tuples whose sum would exceed
/// `upper` are pruned using sortedness.
fn for_each_tuple_sum<F: FnMut(i128)>(
    elems: &[i64],
    h: usize,
    restricted: bool,
    upper: Option<i128>,
    visit: &mut F,
) {
    fn rec<F: FnMut(i128)>(
        elems: &[i64],
        start: usize,
        left: usize,
        partial: i128,
        restricted: bool,
        upper: Option<i128>,
        visit: &mut F,
    ) {
        if left == 0 {
            visit(partial);
            return;
        }
        for i in start..elems.len() {
            if restricted && elems.len() - i < left {
                break;
            }
            let e = elems[i] as i128;
            if let Some(u) = upper {
                // every remaining summand is >= e
                if partial + e * left as i128 > u {
                    break;
                }
            }
            let next = if restricted { i + 1 } else { i };
            rec(elems, next, left - 1, partial + e, restricted, upper, visit);
        }
    }
    rec(elems, 0, h, 0, restricted, upper, visit);
}

fn check_order(h: usize) -> Result<()> {
    if h == 0 {
        Err(Error::InvalidParameter("order h must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `hA` (all sums of `h` elements, repetition allowed) or, if `restricted`,
/// the sums of `h` pairwise distinct elements.
pub fn h_fold_sumset(a: &IntegerSet, h: usize, restricted: bool) -> Result<IntegerSet> {
    check_order(h)?;
    let mut sums = Vec::new();
    for_each_tuple_sum(a.as_slice(), h, restricted, None, &mut |s| sums.push(s));
    let mut out = Vec::with_capacity(sums.len());
    for s in sums {
        out.push(narrow(s, "h_fold_sumset")?);
    }
    Ok(IntegerSet::from(out))
}

/// `r_{A,h}(n)` (or the restricted `r̂_{A,h}(n)`): the number of
/// non-decreasing (strictly increasing) `h`-tuples from `A` summing to `n`.
pub fn rep_count(a: &IntegerSet, h: usize, restricted: bool, n: i64) -> u64 {
    fn rec(elems: &[i64], start: usize, left: usize, rest: i128, restricted: bool) -> u64 {
        if left == 0 {
            return u64::from(rest == 0);
        }
        let Some(&largest) = elems.last() else {
            return 0;
        };
        let mut total = 0;
        for i in start..elems.len() {
            let e = elems[i] as i128;
            if e * left as i128 > rest {
                break;
            }
            if e + largest as i128 * (left as i128 - 1) < rest {
                continue;
            }
            let next = if restricted { i + 1 } else { i };
            total += rec(elems, next, left - 1, rest - e, restricted);
        }
        total
    }
    if h == 0 {
        return u64::from(n == 0);
    }
    rec(a.as_slice(), 0, h, n as i128, restricted)
}

/// Representation counts over an inclusive window of integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepTable {
    order: usize,
    restricted: bool,
    lo: i64,
    hi: i64,
    /// Nonzero counts only; every other `n` in the window has count 0.
    counts: BTreeMap<i64, u64>,
}

impl RepTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn restricted(&self) -> bool {
        self.restricted
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Count for `n`; zero outside the window.
    pub fn get(&self, n: i64) -> u64 {
        self.counts.get(&n).copied().unwrap_or(0)
    }

    /// `(n, count)` for every `n` with a nonzero count, ascending.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts.iter().map(|(&n, &c)| (n, c))
    }

    /// `(n, count)` for every integer in the window, zeros included.
    pub fn rows(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        (self.lo..=self.hi).map(move |n| (n, self.get(n)))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn support(&self) -> IntegerSet {
        IntegerSet(self.counts.keys().copied().collect())
    }
}

/// Batch form of [`rep_count`] over `[lo, hi]`, in one pass over tuples.
pub fn rep_table(a: &IntegerSet, h: usize, restricted: bool, lo: i64, hi: i64) -> Result<RepTable> {
    check_order(h)?;
    if lo > hi {
        return Err(Error::InvalidParameter(format!("empty window [{lo}, {hi}]")));
    }
    let mut counts = BTreeMap::new();
    let (lo_w, hi_w) = (lo as i128, hi as i128);
    for_each_tuple_sum(a.as_slice(), h, restricted, Some(hi_w), &mut |s| {
        if s >= lo_w {
            *counts.entry(s as i64).or_insert(0) += 1;
        }
    });
    Ok(RepTable { order: h, restricted, lo, hi, counts })
}

/// [`rep_table`] over the whole reachable window `[h·min A, h·max A]`.
pub fn full_rep_table(a: &IntegerSet, h: usize, restricted: bool) -> Result<RepTable> {
    check_order(h)?;
    let (Some(min), Some(max)) = (a.min(), a.max()) else {
        return Ok(RepTable { order: h, restricted, lo: 0, hi: 0, counts: BTreeMap::new() });
    };
    let lo = narrow(min as i128 * h as i128, "full_rep_table")?;
    let hi = narrow(max as i128 * h as i128, "full_rep_table")?;
    rep_table(a, h, restricted, lo, hi)
}

/// Binomial coefficient `C(n, k)`; panics if it does not fit in `u64`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Number of tuples [`rep_table`] enumerates for a set of `size` elements:
/// `C(size+h-1, h)`, or `C(size, h)` when restricted.
pub fn tuple_total(size: usize, h: usize, restricted: bool) -> u64 {
    if restricted {
        binomial(size as u64, h as u64)
    } else {
        binomial((size + h - 1) as u64, h as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set<const N: usize>(a: [i64; N]) -> IntegerSet {
        IntegerSet::from(a)
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&set([0, 1, 3]), &set([0, 1, 3])).unwrap(), set([0, 1, 2, 3, 4, 6]));
        assert_eq!(sumset(&set([]), &set([5])).unwrap(), set([]));
        assert_eq!(sumset(&set([7]), &set([0])).unwrap(), set([7]));
    }

    #[test]
    fn sumset_overflow_is_an_error() {
        let big = set([i64::MAX]);
        assert_eq!(sumset(&big, &set([1])), Err(Error::Overflow("sumset")));
        assert!(difference_set(&set([i64::MIN]), &set([1])).is_err());
        assert!(h_fold_sumset(&big, 2, false).is_err());
        assert!(full_rep_table(&big, 2, false).is_err());
        // the oracle itself is exact even here
        assert_eq!(rep_count(&set([i64::MAX, 0]), 2, false, i64::MAX), 1);
    }

    #[test]
    fn h_fold_examples() {
        let a = set([0, 1, 3]);
        assert_eq!(h_fold_sumset(&a, 2, true).unwrap(), set([1, 3, 4]));
        assert_eq!(h_fold_sumset(&a, 2, false).unwrap(), set([0, 1, 2, 3, 4, 6]));
        assert_eq!(h_fold_sumset(&set([5]), 3, false).unwrap(), set([15]));
        assert_eq!(h_fold_sumset(&set([5]), 3, true).unwrap(), set([]));
        assert!(h_fold_sumset(&a, 0, false).is_err());
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference_set(&set([1, 4]), &set([1])).unwrap(), set([0, 3]));
        assert_eq!(difference_set(&set([2]), &set([2])).unwrap(), set([0]));
        assert_eq!(negation(&set([1, -5])).unwrap(), set([-1, 5]));
    }

    #[test]
    fn counting_examples() {
        let a = set([-3, 0, 1, 3]);
        assert_eq!(a.counting(-2, 2), 2);
        assert_eq!(a.counting(-3, 3), 4);
        assert_eq!(set([]).counting(-100, 100), 0);
        assert_eq!(a.counting(3, -3), 0);
    }

    #[test]
    fn rep_count_examples() {
        let a = set([0, 1, 2]);
        assert_eq!(rep_count(&a, 2, false, 2), 2);
        assert_eq!(rep_count(&a, 2, true, 2), 1);
        assert_eq!(rep_count(&set([1, -1]), 2, false, 0), 1);
        assert_eq!(rep_count(&set([]), 2, false, 0), 0);
    }

    #[test]
    fn rep_table_examples() {
        let t = rep_table(&set([0, 1, 3]), 2, false, 0, 6).unwrap();
        let rows: Vec<_> = t.rows().collect();
        assert_eq!(rows, vec![(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 0), (6, 1)]);

        let t = rep_table(&set([]), 2, false, -3, 3).unwrap();
        assert!(t.rows().all(|(_, c)| c == 0));

        let t = rep_table(&set([1, -1]), 2, false, -2, 2).unwrap();
        let rows: Vec<_> = t.rows().collect();
        assert_eq!(rows, vec![(-2, 1), (-1, 0), (0, 1), (1, 0), (2, 1)]);

        assert!(rep_table(&set([1]), 2, false, 3, 2).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 5), 0);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(tuple_total(3, 2, false), 6);
        assert_eq!(tuple_total(3, 2, true), 3);
    }

    #[test]
    fn serde_normalizes() {
        let s: IntegerSet = serde_json::from_str("[3, -1, 3, 0]").unwrap();
        assert_eq!(s.as_slice(), &[-1, 0, 3]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[-1,0,3]");
    }
}

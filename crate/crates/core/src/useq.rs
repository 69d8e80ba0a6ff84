//! The enumeration `U` of target values.
//!
//! `V = 0, -1, 0, 1, -2, -1, 0, 1, 2, ...` lists row `s` as `-s..=s`, with
//! `v_{s²+s+1+r} = r`. The subsequence `U` keeps the first `f(n)`
//! occurrences of each `n`. Because `n` occurs exactly once in every row
//! `s >= |n|`, the occurrence of `n` in row `s` is kept iff `s - |n| < f(n)`,
//! which lets rows be generated directly instead of scanning all of `V`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::target::{Multiplicity, TargetFunction};

/// `v_m` for `m >= 1`.
pub fn v_term(m: u64) -> i64 {
    assert!(m >= 1, "V is indexed from 1");
    let s = (m - 1).isqrt();
    m as i64 - (s * s + s + 1) as i64
}

/// Position of `r` in row `s` of `V`: `s² + s + 1 + r`.
pub fn v_index(s: u64, r: i64) -> u64 {
    debug_assert!(r.unsigned_abs() <= s);
    (s * s + s + 1).wrapping_add_signed(r)
}

/// `[(k+Δ)/2]`.
pub fn u_bound(k: usize, delta: usize) -> u64 {
    ((k + delta) / 2) as u64
}

/// One term of `U`: the value `u_k` and its index `m_k` in `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UTerm {
    pub value: i64,
    pub source: u64,
}

/// Lazily extended, memoized prefix of `U` for a fixed target.
#[derive(Clone, Debug)]
pub struct USequence {
    target: TargetFunction,
    emitted: Vec<UTerm>,
    next_row: u64,
}

impl USequence {
    pub fn new(target: TargetFunction) -> Self {
        USequence { target, emitted: Vec::new(), next_row: 0 }
    }

    pub fn target(&self) -> &TargetFunction {
        &self.target
    }

    /// Everything generated so far (possibly more than was asked for).
    pub fn emitted(&self) -> &[UTerm] {
        &self.emitted
    }

    /// Makes sure at least `len` terms are available.
    pub fn ensure(&mut self, len: usize) -> Result<()> {
        if let Some(total) = self.target.total_mass() {
            if (len as u64) > total {
                return Err(Error::TargetExhausted { requested: len, available: total });
            }
        }
        while self.emitted.len() < len {
            self.push_row();
        }
        Ok(())
    }

    pub fn prefix(&mut self, len: usize) -> Result<&[UTerm]> {
        self.ensure(len)?;
        Ok(&self.emitted[..len])
    }

    /// `u_k`, 1-based.
    pub fn term(&mut self, k: usize) -> Result<UTerm> {
        assert!(k >= 1, "U is indexed from 1");
        self.ensure(k)?;
        Ok(self.emitted[k - 1])
    }

    fn push_row(&mut self) {
        let s = self.next_row;
        self.next_row += 1;
        let si = s as i64;
        let mut candidates: Vec<i64> = match self.target.default_value() {
            Multiplicity::Infinite => (-si..=si).collect(),
            Multiplicity::Finite(d) => {
                // default-valued n survive in row s iff |n| > s - d
                let low = s.saturating_sub(d - 1) as i64;
                if low <= 0 {
                    (-si..=si).collect()
                } else {
                    (-si..=-low).chain(low..=si).collect()
                }
            }
        };
        candidates.extend(
            self.target.overrides().keys().copied().filter(|n| n.unsigned_abs() <= s),
        );
        candidates.sort_unstable();
        candidates.dedup();
        for r in candidates {
            let earlier = s - r.unsigned_abs();
            if self.target.evaluate(r).exceeds(earlier) {
                self.emitted.push(UTerm { value: r, source: v_index(s, r) });
            }
        }
    }
}

/// The first `len` terms of `U` for `f`.
pub fn u_prefix(f: &TargetFunction, len: usize) -> Result<Vec<UTerm>> {
    let mut seq = USequence::new(f.clone());
    Ok(seq.prefix(len)?.to_vec())
}

/// Checks `|u_k| <= [(k+Δ)/2]` for every term, together with the covering
/// property behind it: when `|u_k| = n`, every `m ∉ f⁻¹(0)` with `|m| < n`
/// already occurred among `u_1, ..., u_{k-1}`.
pub fn u_bound_audit(values: &[i64], f: &TargetFunction) -> bool {
    let zero = f.zero_set();
    let delta = f.delta();
    let mut seen = HashSet::new();
    // every m ∉ f⁻¹(0) with |m| < radius has been seen
    let mut radius: u64 = 0;
    let advance = |radius: &mut u64, seen: &HashSet<i64>| {
        let covered = |m: i64| zero.contains(m) || seen.contains(&m);
        while covered(*radius as i64) && covered(-(*radius as i64)) {
            *radius += 1;
        }
    };
    advance(&mut radius, &seen);
    for (idx, &u) in values.iter().enumerate() {
        let k = idx + 1;
        let n = u.unsigned_abs();
        if n > u_bound(k, delta) || n > radius {
            return false;
        }
        seen.insert(u);
        advance(&mut radius, &seen);
    }
    true
}

/// An explicit sequence attaining `|u_k| = [(k+Δ)/2]` for every `k`.
#[derive(Clone, Debug)]
pub enum ExtremalSequence {
    /// Closed-form terms for `Δ >= 1`.
    Explicit { delta: usize },
    /// `Δ = 0`: `f ≡ 1` with its ordinary enumeration, which meets the
    /// bound only at even `k`.
    Enumerated(Box<USequence>),
}

impl ExtremalSequence {
    /// `u_k`, 1-based.
    pub fn term(&mut self, k: usize) -> i64 {
        assert!(k >= 1, "U is indexed from 1");
        match self {
            ExtremalSequence::Explicit { delta } => {
                let d = (*delta / 2) as i64;
                let k = k as i64;
                if *delta % 2 == 1 {
                    // u_{2i-1} = δ+i, u_{2i} = -(δ+i)
                    if k % 2 == 1 {
                        d + (k + 1) / 2
                    } else {
                        -(d + k / 2)
                    }
                } else if k == 1 {
                    d
                } else if k % 2 == 0 {
                    // u_{2i} = δ+i
                    d + k / 2
                } else {
                    // u_{2i+1} = -(δ+i)
                    -(d + (k - 1) / 2)
                }
            }
            ExtremalSequence::Enumerated(seq) => {
                seq.term(k).expect("f ≡ 1 never exhausts").value
            }
        }
    }

    pub fn prefix(&mut self, len: usize) -> Vec<i64> {
        (1..=len).map(|k| self.term(k)).collect()
    }
}

/// A target with `|f⁻¹(0)| = Δ` and a sequence meeting the bound with equality.
///
/// Odd `Δ = 2δ+1`: `f(n) = 0` for `|n| <= δ`. Even `Δ = 2δ > 0`:
/// `f(n) = 0` for `-δ <= n <= δ-1`. All other values are 1.
pub fn extremal_target(delta: usize) -> (TargetFunction, ExtremalSequence) {
    let half = (delta / 2) as i64;
    let zeros: Vec<i64> = if delta == 0 {
        Vec::new()
    } else if delta % 2 == 1 {
        (-half..=half).collect()
    } else {
        (-half..half).collect()
    };
    let f = TargetFunction::new(
        Multiplicity::Finite(1),
        zeros.into_iter().map(|n| (n, Multiplicity::Finite(0))).collect(),
    )
    .expect("default 1 is valid");
    let seq = if delta == 0 {
        ExtremalSequence::Enumerated(Box::new(USequence::new(f.clone())))
    } else {
        ExtremalSequence::Explicit { delta }
    };
    (f, seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    use Multiplicity::{Finite, Infinite};

    fn values(f: &TargetFunction, len: usize) -> Vec<i64> {
        u_prefix(f, len).unwrap().into_iter().map(|t| t.value).collect()
    }

    /// Literal scan of V with per-value counters.
    fn scanned_prefix(f: &TargetFunction, len: usize) -> Vec<UTerm> {
        let mut used: HashMap<i64, u64> = HashMap::new();
        let mut out = Vec::new();
        let mut m = 1;
        while out.len() < len {
            let v = v_term(m);
            let c = used.entry(v).or_insert(0);
            if f.evaluate(v).exceeds(*c) {
                *c += 1;
                out.push(UTerm { value: v, source: m });
            }
            m += 1;
        }
        out
    }

    #[test]
    fn v_examples() {
        let first: Vec<i64> = (1..=9).map(v_term).collect();
        assert_eq!(first, vec![0, -1, 0, 1, -2, -1, 0, 1, 2]);
        assert_eq!(v_term(10), -3);
        assert_eq!(v_term(16), 3);
        for k in 0..50u64 {
            assert_eq!(v_term(k * k + 1), -(k as i64));
            assert_eq!(v_term((k + 1) * (k + 1)), k as i64);
        }
    }

    #[test]
    fn v_positions_are_a_bijection() {
        let mut seen = HashSet::new();
        let mut m = 1;
        for s in 0u64..100 {
            for r in -(s as i64)..=(s as i64) {
                assert_eq!(v_index(s, r), m);
                assert_eq!(v_term(m), r);
                assert!(seen.insert((s, r)));
                m += 1;
            }
        }
        assert!(m > 10_000);
    }

    #[test]
    fn prefix_examples() {
        let one = TargetFunction::constant(Finite(1)).unwrap();
        let p = u_prefix(&one, 7).unwrap();
        assert_eq!(p.iter().map(|t| t.value).collect::<Vec<_>>(), vec![0, -1, 1, -2, 2, -3, 3]);
        assert_eq!(p.iter().map(|t| t.source).collect::<Vec<_>>(), vec![1, 2, 4, 5, 9, 10, 16]);

        let two = TargetFunction::constant(Finite(2)).unwrap();
        let p = u_prefix(&two, 6).unwrap();
        assert_eq!(p.iter().map(|t| t.value).collect::<Vec<_>>(), vec![0, -1, 0, 1, -2, -1]);
        assert_eq!(p.iter().map(|t| t.source).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn row_generation_matches_literal_scan() {
        let targets = vec![
            TargetFunction::constant(Finite(1)).unwrap(),
            TargetFunction::constant(Finite(3)).unwrap(),
            TargetFunction::constant(Infinite).unwrap(),
            extremal_target(4).0,
            TargetFunction::new(
                Finite(2),
                [(0, Finite(0)), (3, Infinite), (-7, Finite(5)), (40, Finite(0))].into(),
            )
            .unwrap(),
            TargetFunction::new(Infinite, [(1, Finite(0)), (-2, Finite(1))].into()).unwrap(),
        ];
        for f in &targets {
            assert_eq!(u_prefix(f, 3000).unwrap(), scanned_prefix(f, 3000), "{f:?}");
        }
    }

    #[test]
    fn audit_examples() {
        let one = TargetFunction::constant(Finite(1)).unwrap();
        assert!(u_bound_audit(&values(&one, 7), &one));
        assert!(!u_bound_audit(&[0, 5], &one));
        // skipping a value breaks the covering property
        assert!(!u_bound_audit(&[0, 1, -2], &one));

        let (f, mut seq) = extremal_target(1);
        let p = seq.prefix(200);
        assert!(u_bound_audit(&p, &f));
        for (i, u) in p.iter().enumerate() {
            assert_eq!(u.unsigned_abs(), u_bound(i + 1, 1));
        }
    }

    #[test]
    fn extremal_examples() {
        let (f, mut seq) = extremal_target(1);
        assert_eq!(f.zero_set().as_slice(), &[0]);
        assert_eq!(seq.prefix(4), vec![1, -1, 2, -2]);

        let (f, mut seq) = extremal_target(2);
        assert_eq!(f.zero_set().as_slice(), &[-1, 0]);
        assert_eq!(seq.prefix(5), vec![1, 2, -2, 3, -3]);

        let (f, mut seq) = extremal_target(3);
        assert_eq!(f.zero_set().as_slice(), &[-1, 0, 1]);
        assert_eq!(seq.prefix(4), vec![2, -2, 3, -3]);

        let (f, mut seq) = extremal_target(0);
        assert_eq!(f, TargetFunction::constant(Finite(1)).unwrap());
        assert_eq!(seq.prefix(5), vec![0, -1, 1, -2, 2]);
    }

    #[test]
    fn extremal_sequences_list_their_targets() {
        for delta in 1..=8 {
            let (f, mut seq) = extremal_target(delta);
            assert_eq!(f.delta(), delta);
            let p = seq.prefix(400);
            let distinct: HashSet<_> = p.iter().collect();
            assert_eq!(distinct.len(), p.len());
            assert!(p.iter().all(|&u| f.evaluate(u) == Finite(1)));
            // the values 1..=190 in absolute value (beyond the zero set) all appear
            for n in -190i64..=190 {
                if f.evaluate(n) == Finite(1) {
                    assert!(distinct.contains(&n), "Δ={delta} missing {n}");
                }
            }
        }
    }
}

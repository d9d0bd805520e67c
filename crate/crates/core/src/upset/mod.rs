//! Exact arithmetic on ultimately periodic subsets of ℕ.
//!
//! A set is stored as an explicit prefix `0..threshold` followed by a block of
//! length `period` that repeats forever. Every constructor and operation returns
//! the canonical form (minimal period, then minimal threshold), so derived
//! `PartialEq` is set equality.

mod calculus;
mod natmap;
pub mod oracle;
pub mod props;
mod sample;
mod syntax;

use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use calculus::{companion, gamma, n0_set, three_n_or_three_n_plus_two};
pub use natmap::{AffineRule, NatMap, NatMapError};
pub use sample::random_upset;
pub use syntax::{parse_upset, UpSetSyntaxError};
pub(crate) use syntax::parse_expr as syntax_expr;

/// Periods above this are refused instead of allocating gigabytes of block.
pub const MAX_PERIOD: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpSetError {
    #[error("residue {residue} is not below modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("prefix has {got} bits but threshold is {threshold}")]
    PrefixLength { threshold: usize, got: usize },
    #[error("block has {got} bits but period is {period}")]
    BlockLength { period: usize, got: usize },
    #[error("set has only {size} elements, index {index} is exhausted")]
    Exhausted { index: u64, size: u64 },
    #[error("period {0} exceeds the supported maximum")]
    PeriodTooLarge(u128),
}

/// An ultimately periodic subset of ℕ in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpSet {
    threshold: usize,
    period: usize,
    prefix: Vec<bool>,
    block: Vec<bool>,
}

impl UpSet {
    pub fn empty() -> Self {
        UpSet { threshold: 0, period: 1, prefix: Vec::new(), block: vec![false] }
    }

    pub fn naturals() -> Self {
        UpSet { threshold: 0, period: 1, prefix: Vec::new(), block: vec![true] }
    }

    /// `{r, r + m, r + 2m, …}`.
    pub fn from_residue(residue: u64, modulus: u64) -> Result<Self, UpSetError> {
        if modulus == 0 {
            return Err(UpSetError::ZeroModulus);
        }
        if residue >= modulus {
            return Err(UpSetError::ResidueOutOfRange { residue, modulus });
        }
        let period = usize::try_from(modulus).map_err(|_| UpSetError::PeriodTooLarge(modulus as u128))?;
        if period > MAX_PERIOD {
            return Err(UpSetError::PeriodTooLarge(modulus as u128));
        }
        let mut block = vec![false; period];
        block[residue as usize] = true;
        Ok(UpSet::from_parts(0, period, Vec::new(), block))
    }

    pub fn from_finite<I: IntoIterator<Item = u64>>(elems: I) -> Self {
        let elems: Vec<u64> = elems.into_iter().collect();
        let threshold = elems.iter().max().map_or(0, |&m| m as usize + 1);
        let mut prefix = vec![false; threshold];
        for e in elems {
            prefix[e as usize] = true;
        }
        UpSet::from_parts(threshold, 1, prefix, vec![false])
    }

    pub fn singleton(n: u64) -> Self {
        UpSet::from_finite([n])
    }

    /// Builds a set from raw (possibly non-canonical) parts.
    pub fn from_bits(
        threshold: usize,
        period: usize,
        prefix: Vec<bool>,
        block: Vec<bool>,
    ) -> Result<Self, UpSetError> {
        if period == 0 {
            return Err(UpSetError::ZeroPeriod);
        }
        if period > MAX_PERIOD {
            return Err(UpSetError::PeriodTooLarge(period as u128));
        }
        if prefix.len() != threshold {
            return Err(UpSetError::PrefixLength { threshold, got: prefix.len() });
        }
        if block.len() != period {
            return Err(UpSetError::BlockLength { period, got: block.len() });
        }
        Ok(UpSet::from_parts(threshold, period, prefix, block))
    }

    /// Tabulates `f` on `0..threshold + period`; the caller guarantees that
    /// `f(n) == f(n + period)` for all `n >= threshold`.
    pub(crate) fn tabulate(threshold: usize, period: usize, f: impl Fn(u64) -> bool) -> Self {
        assert!(period > 0 && period <= MAX_PERIOD, "period {period} out of range");
        let prefix = (0..threshold).map(|n| f(n as u64)).collect();
        let block = (0..period).map(|r| f((threshold + r) as u64)).collect();
        UpSet::from_parts(threshold, period, prefix, block)
    }

    fn from_parts(threshold: usize, period: usize, prefix: Vec<bool>, block: Vec<bool>) -> Self {
        let mut s = UpSet { threshold, period, prefix, block };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        // Minimal period: the block is purely periodic, so its least period
        // divides the current one.
        let p = self.period;
        if let Some(d) = divisors(p)
            .into_iter()
            .find(|&d| (d..p).all(|i| self.block[i] == self.block[i % d]))
        {
            self.block.truncate(d);
            self.period = d;
        }
        // Minimal threshold: pull prefix bits into the periodic part while they
        // agree with the value one period later.
        let p = self.period;
        let mut t = self.threshold;
        while t > 0 && self.prefix[t - 1] == self.member_usize(t - 1 + p) {
            t -= 1;
        }
        if t < self.threshold {
            let block: Vec<bool> = (0..p).map(|r| self.member_usize(t + r)).collect();
            self.prefix.truncate(t);
            self.threshold = t;
            self.block = block;
        }
    }

    fn member_usize(&self, n: usize) -> bool {
        if n < self.threshold {
            self.prefix[n]
        } else {
            self.block[(n - self.threshold) % self.period]
        }
    }

    pub fn member(&self, n: u64) -> bool {
        if n < self.threshold as u64 {
            self.prefix[n as usize]
        } else {
            self.block[((n - self.threshold as u64) % self.period as u64) as usize]
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.member(n)
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn prefix_bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn block_bits(&self) -> &[bool] {
        &self.block
    }

    pub fn is_empty(&self) -> bool {
        !self.prefix.iter().any(|&b| b) && self.is_finite()
    }

    pub fn is_finite(&self) -> bool {
        !self.block.iter().any(|&b| b)
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Number of elements, `None` when infinite.
    pub fn len(&self) -> Option<u64> {
        self.is_finite().then(|| self.prefix.iter().filter(|&&b| b).count() as u64)
    }

    pub fn least(&self) -> Option<u64> {
        self.nth(0).ok()
    }

    /// The `i`-th smallest element (0-based).
    pub fn nth(&self, i: u64) -> Result<u64, UpSetError> {
        let mut seen = 0u64;
        for (n, &b) in self.prefix.iter().enumerate() {
            if b {
                if seen == i {
                    return Ok(n as u64);
                }
                seen += 1;
            }
        }
        let per_block = self.block.iter().filter(|&&b| b).count() as u64;
        if per_block == 0 {
            return Err(UpSetError::Exhausted { index: i, size: seen });
        }
        let rest = i - seen;
        let q = rest / per_block;
        let mut r = rest % per_block;
        for (off, &b) in self.block.iter().enumerate() {
            if b {
                if r == 0 {
                    return Ok(self.threshold as u64 + q * self.period as u64 + off as u64);
                }
                r -= 1;
            }
        }
        unreachable!("block count is consistent")
    }

    /// Elements in increasing order (unbounded for infinite sets).
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let periodic = self.is_infinite();
        let t = self.threshold as u64;
        let prefix = self.prefix.iter().enumerate().filter(|(_, &b)| b).map(|(n, _)| n as u64);
        let offsets: Vec<u64> = self
            .block
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(r, _)| r as u64)
            .collect();
        let p = self.period as u64;
        let tail = (0u64..)
            .take_while(move |_| periodic)
            .flat_map(move |q| offsets.clone().into_iter().map(move |r| t + q * p + r));
        prefix.chain(tail)
    }

    /// Elements below `bound`.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&n| n < bound).collect()
    }

    /// All elements of a finite set, `None` when infinite.
    pub fn elements(&self) -> Option<Vec<u64>> {
        self.is_finite().then(|| self.iter().collect())
    }

    /// Index one past the largest element of a finite set, or the start of the
    /// periodic part for an infinite one. Past this bound membership is periodic.
    pub fn horizon(&self) -> u64 {
        self.threshold as u64
    }

    fn combine(&self, other: &UpSet, op: impl Fn(bool, bool) -> bool) -> UpSet {
        let threshold = self.threshold.max(other.threshold);
        let period = lcm(self.period, other.period);
        UpSet::tabulate(threshold, period, |n| op(self.member(n), other.member(n)))
    }

    pub fn union(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> UpSet {
        UpSet {
            threshold: self.threshold,
            period: self.period,
            prefix: self.prefix.iter().map(|b| !b).collect(),
            block: self.block.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &UpSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &UpSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// `self ∖ {n}`.
    pub fn without(&self, n: u64) -> UpSet {
        self.difference(&UpSet::singleton(n))
    }

    /// `self ∪ {n}`.
    pub fn with(&self, n: u64) -> UpSet {
        self.union(&UpSet::singleton(n))
    }
}

impl Default for UpSet {
    fn default() -> Self {
        UpSet::empty()
    }
}

impl<'a> BitOr<&'a UpSet> for &'a UpSet {
    type Output = UpSet;
    fn bitor(self, rhs: &'a UpSet) -> UpSet {
        self.union(rhs)
    }
}

impl<'a> BitAnd<&'a UpSet> for &'a UpSet {
    type Output = UpSet;
    fn bitand(self, rhs: &'a UpSet) -> UpSet {
        self.intersection(rhs)
    }
}

impl<'a> Sub<&'a UpSet> for &'a UpSet {
    type Output = UpSet;
    fn sub(self, rhs: &'a UpSet) -> UpSet {
        self.difference(rhs)
    }
}

impl Not for &UpSet {
    type Output = UpSet;
    fn not(self) -> UpSet {
        self.complement()
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "up(threshold={}, period={}, prefix={}, block={})",
            self.threshold,
            self.period,
            bits(&self.prefix),
            bits(&self.block)
        )
    }
}

impl fmt::Debug for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // A short human view: a few leading elements plus the raw form.
        let head: Vec<String> = self.iter().take(8).map(|n| n.to_string()).collect();
        let more = if self.is_infinite() || self.len().unwrap_or(0) > 8 { ", …" } else { "" };
        write!(f, "{{{}{}}} = {}", head.join(", "), more, self)
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    let l = (a / gcd(a, b)) as u128 * b as u128;
    assert!(l <= MAX_PERIOD as u128, "period {l} exceeds the supported maximum");
    l as usize
}

fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

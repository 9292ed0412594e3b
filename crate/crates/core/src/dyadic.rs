//! Binary expansions of points in [0,1] and the dyadic partition each bit
//! induces.
//!
//! Bit `i` (1-based, most significant first) of `x` is `floor(x * 2^i) mod 2`.
//! Every interval is half-open `[lo, hi)` except the one ending at 1, which
//! is closed so that `x = 1` expands to all ones.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported expansion precision. An `f64` in [0,1) carries 52
/// fraction bits; deeper bits describe the float, not the distribution.
pub const MAX_PRECISION: u32 = 52;

pub(crate) fn check_precision(n: u32) -> Result<()> {
    if n == 0 || n > MAX_PRECISION {
        return Err(Error::domain(format!(
            "precision {n} outside 1..={MAX_PRECISION}"
        )));
    }
    Ok(())
}

pub(crate) fn check_bit_value(value: u8) -> Result<()> {
    if value > 1 {
        return Err(Error::domain(format!("bit value {value} is not 0 or 1")));
    }
    Ok(())
}

/// An `n`-bit truncated binary expansion `0.b1 b2 ... bn`.
///
/// Bits are packed into a `u64` with `b1` in position `n - 1`, so the packed
/// integer `k` identifies the dyadic cell `[k 2^-n, (k+1) 2^-n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    packed: u64,
    len: u32,
}

impl BitVector {
    /// Builds a vector from explicit 0/1 values, `bits[0]` most significant.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_precision(bits.len() as u32)?;
        let mut packed = 0u64;
        for &b in bits {
            check_bit_value(b)?;
            packed = (packed << 1) | u64::from(b);
        }
        Ok(BitVector {
            packed,
            len: bits.len() as u32,
        })
    }

    /// Builds a vector from the index of its dyadic cell at level `n`.
    pub fn from_cell(cell: u64, n: u32) -> Result<Self> {
        check_precision(n)?;
        if cell >> n != 0 {
            return Err(Error::domain(format!(
                "cell index {cell} does not fit in {n} bits"
            )));
        }
        Ok(BitVector {
            packed: cell,
            len: n,
        })
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of the level-`n` dyadic cell containing the expanded point.
    pub fn cell(&self) -> u64 {
        self.packed
    }

    /// Bit `i`, 1-based.
    ///
    /// # Panics
    ///
    /// If `i` is 0 or greater than `len()`.
    pub fn bit(&self, i: u32) -> u8 {
        assert!(i >= 1 && i <= self.len, "bit index {i} out of range");
        ((self.packed >> (self.len - i)) & 1) as u8
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len).map(move |i| self.bit(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Truncated `n`-bit binary expansion of `x`.
///
/// Computed by repeated doubling, which is exact in binary floating point.
/// `x = 1` maps to all ones.
pub fn expand(x: f64, n: u32) -> Result<BitVector> {
    check_precision(n)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [0, 1]")));
    }
    if x == 1.0 {
        return Ok(BitVector {
            packed: (1u64 << n) - 1,
            len: n,
        });
    }
    let mut rest = x;
    let mut packed = 0u64;
    for _ in 0..n {
        rest *= 2.0;
        let bit = rest >= 1.0;
        if bit {
            rest -= 1.0;
        }
        packed = (packed << 1) | u64::from(bit);
    }
    Ok(BitVector { packed, len: n })
}

/// `sum_i b_i 2^-i`.
pub fn value_of(bits: &BitVector) -> f64 {
    bits.packed as f64 / (1u64 << bits.len) as f64
}

/// A subinterval of [0,1]. Half-open unless `closed` is set, which only
/// happens for the interval ending at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            closed: hi == 1.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && (x < self.hi || (self.closed && x == self.hi))
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Overlap of two intervals, `None` when it has zero length.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi <= lo {
            return None;
        }
        Some(Interval {
            lo,
            hi,
            closed: self.closed && other.closed,
        })
    }
}

/// The set `{x in [0,1] : bit i of x = value}`: a union of `2^(i-1)`
/// disjoint intervals of length `2^-i`.
///
/// Intervals are produced lazily, in increasing order, since the count
/// doubles with every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicIntervalSet {
    bit_index: u32,
    bit_value: u8,
}

impl DyadicIntervalSet {
    pub fn bit_index(&self) -> u32 {
        self.bit_index
    }

    pub fn bit_value(&self) -> u8 {
        self.bit_value
    }

    /// Number of intervals, `2^(i-1)`.
    pub fn len(&self) -> u64 {
        1u64 << (self.bit_index - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// For value 1 the j-th interval is `[2^-i (2j-1), 2^-i 2j)`, for value 0
    /// it is `[2^-i (2j-2), 2^-i (2j-1))`, with `j = 1..=2^(i-1)`.
    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        let scale = (1u64 << self.bit_index) as f64;
        let offset = u64::from(self.bit_value);
        (0..self.len()).map(move |k| {
            let lo = (2 * k + offset) as f64 / scale;
            let hi = (2 * k + offset + 1) as f64 / scale;
            Interval::new(lo, hi)
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        // Bit i of x, read without materializing the intervals.
        match expand(x, self.bit_index) {
            Ok(bits) => bits.bit(self.bit_index) == self.bit_value,
            Err(_) => false,
        }
    }

    /// Total length, always 1/2.
    pub fn measure(&self) -> f64 {
        self.intervals().map(|iv| iv.length()).sum()
    }

    /// The sorted list of intervals where both sets hold.
    pub fn intersect(&self, other: &DyadicIntervalSet) -> Vec<Interval> {
        intersect_sorted(self.intervals(), other.intervals())
    }
}

/// Bit `i` takes `value` exactly on the returned set.
pub fn bit_intervals(i: u32, value: u8) -> Result<DyadicIntervalSet> {
    if i == 0 || i > MAX_PRECISION {
        return Err(Error::domain(format!(
            "bit index {i} outside 1..={MAX_PRECISION}"
        )));
    }
    check_bit_value(value)?;
    Ok(DyadicIntervalSet {
        bit_index: i,
        bit_value: value,
    })
}

/// Merge-style intersection of two sorted lists of disjoint intervals.
pub fn intersect_sorted<A, B>(a: A, b: B) -> Vec<Interval>
where
    A: IntoIterator<Item = Interval>,
    B: IntoIterator<Item = Interval>,
{
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    let mut out = Vec::new();
    while let (Some(x), Some(y)) = (a.peek().copied(), b.peek().copied()) {
        if let Some(iv) = x.intersect(&y) {
            out.push(iv);
        }
        if x.hi <= y.hi {
            a.next();
        } else {
            b.next();
        }
    }
    out
}

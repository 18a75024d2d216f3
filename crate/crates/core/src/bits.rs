//! Fixed-width binary ranks and the prefix sets that turn a dominance test
//! into tuple equality.
//!
//! For a bitstring `x`, `p0(x)` holds every `v` such that `v0` is a prefix of
//! `x`, and `p1(x)` every `v` such that `v1` is. For equal-width `x` and `y`,
//! `p0(x) ∩ p1(y)` is a single element (the longest common prefix) exactly
//! when `x < y`, and empty otherwise. Coordinate-wise products extend this
//! to tuples: a data tuple's `P0` product meets a query tuple's `P1` product
//! in exactly one tuple when the data tuple is strictly smaller in every
//! coordinate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Widest bitstring supported.
pub const MAX_WIDTH: u32 = 63;

/// A bitstring of at most [`MAX_WIDTH`] digits.
///
/// Stored in a single word with a leading marker bit above the digits, so
/// `""`, `"0"` and `"00"` are distinct values. Ordered lexicographically,
/// which for equal widths coincides with the numeric order of the encoded
/// values.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString(u64);

/// Inline storage for the bitstring coordinates of one tuple.
pub type Parts = SmallVec<[BitString; 4]>;

impl BitString {
    pub const EMPTY: BitString = BitString(1);

    /// Number of digits.
    pub fn width(self) -> u32 {
        63 - self.0.leading_zeros()
    }

    /// The digits read as a binary number.
    pub fn value(self) -> u64 {
        self.0 ^ (1 << self.width())
    }

    pub fn is_empty(self) -> bool {
        self.width() == 0
    }

    /// Digit `i`, counting from the most significant end.
    pub fn bit(self, i: u32) -> bool {
        let w = self.width();
        assert!(i < w, "bit index {i} out of range for width {w}");
        (self.value() >> (w - 1 - i)) & 1 == 1
    }

    /// The first `len` digits.
    pub fn prefix(self, len: u32) -> BitString {
        let w = self.width();
        assert!(len <= w, "prefix length {len} exceeds width {w}");
        BitString(self.0 >> (w - len))
    }

    /// Appends one digit.
    pub fn push(self, bit: bool) -> BitString {
        assert!(self.width() < MAX_WIDTH, "bitstring is full");
        BitString((self.0 << 1) | u64::from(bit))
    }

    pub fn digits(self) -> impl Iterator<Item = bool> {
        (0..self.width()).map(move |i| self.bit(i))
    }
}

/// `n` in binary, left-padded with zeros to exactly `width` digits.
pub fn bin(n: u64, width: u32) -> Result<BitString> {
    if width > MAX_WIDTH {
        return Err(Error::WidthTooLarge {
            width,
            max: MAX_WIDTH,
        });
    }
    if n >> width != 0 {
        return Err(Error::BitOverflow { value: n, width });
    }
    Ok(BitString((1 << width) | n))
}

/// Digits needed for ranks `1..=unique` encoded zero-based: `max(1, ⌈log₂ unique⌉)`.
pub fn rank_width(unique: u64) -> u32 {
    if unique <= 2 {
        1
    } else {
        64 - (unique - 1).leading_zeros()
    }
}

/// Every `v` such that `v0` is a prefix of `x`, shortest first.
pub fn p0(x: BitString) -> Vec<BitString> {
    prefixes_before(x, false)
}

/// Every `v` such that `v1` is a prefix of `x`, shortest first.
pub fn p1(x: BitString) -> Vec<BitString> {
    prefixes_before(x, true)
}

fn prefixes_before(x: BitString, digit: bool) -> Vec<BitString> {
    (0..x.width())
        .filter(|&i| x.bit(i) == digit)
        .map(|i| x.prefix(i))
        .collect()
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        let (la, lb) = (self.width(), other.width());
        let common = la.min(lb);
        let a = self.value() >> (la - common);
        let b = other.value() >> (lb - common);
        a.cmp(&b).then(la.cmp(&lb))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.digits() {
            f.write_str(if d { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseBitStringError;

impl fmt::Display for ParseBitStringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected at most {MAX_WIDTH} binary digits")
    }
}

impl std::error::Error for ParseBitStringError {}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.len() > MAX_WIDTH as usize {
            return Err(ParseBitStringError);
        }
        s.chars().try_fold(BitString::EMPTY, |acc, c| match c {
            '0' => Ok(acc.push(false)),
            '1' => Ok(acc.push(true)),
            _ => Err(ParseBitStringError),
        })
    }
}

/// Whether a point is a data point or a query. Data sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Data,
    Query,
}

/// One element of an expanded point: a tuple of prefixes that inherits the
/// originating point's identity and weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixTuple<A> {
    pub parts: Parts,
    pub role: Role,
    pub id: u64,
    pub weight: A,
}

/// Cartesian product of `p0` (data) or `p1` (query) over the coordinates.
///
/// The first coordinate varies slowest; within a coordinate prefixes come
/// shortest first. An empty `tuple` yields one empty tuple.
pub fn prefix_product(tuple: &[BitString], role: Role) -> Vec<Parts> {
    let sets: Vec<Vec<BitString>> = tuple
        .iter()
        .map(|&b| match role {
            Role::Data => p0(b),
            Role::Query => p1(b),
        })
        .collect();
    let total: usize = sets.iter().map(Vec::len).product();
    let mut out: Vec<Parts> = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    out.push(Parts::new());
    for set in &sets {
        out = out
            .iter()
            .flat_map(|head| {
                set.iter().map(move |&p| {
                    let mut t = head.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    out
}

/// Expands one point's bitstring tuple into its prefix tuples.
pub fn expand<A: Clone>(tuple: &[BitString], role: Role, id: u64, weight: A) -> Vec<PrefixTuple<A>> {
    prefix_product(tuple, role)
        .into_iter()
        .map(|parts| PrefixTuple {
            parts,
            role,
            id,
            weight: weight.clone(),
        })
        .collect()
}

/// The unique element of `P0(x) ∩ P1(y)` when `x` is coordinate-wise
/// strictly smaller than `y`, otherwise `None`.
pub fn dominance_witness(x: &[BitString], y: &[BitString]) -> Result<Option<Parts>> {
    if x.len() != y.len() {
        return Err(Error::ArityMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut witness = Parts::new();
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        if a.width() != b.width() {
            return Err(Error::WidthMismatch {
                coordinate: i,
                left: a.width(),
                right: b.width(),
            });
        }
        let zeros = p0(a);
        let mut common = p1(b).into_iter().filter(|v| zeros.contains(v));
        match (common.next(), common.next()) {
            (Some(v), None) => witness.push(v),
            (None, _) => return Ok(None),
            (Some(_), Some(_)) => unreachable!("prefix sets of equal-width strings meet at most once"),
        }
    }
    Ok(Some(witness))
}

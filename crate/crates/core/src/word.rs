//! Binary words of the dyadic odometer.
//!
//! A word `a = a_0 a_1 ... a_{t-1}` is stored as the integer
//! `sum a_i 2^i`, so digit 0 is the least significant bit and the odometer
//! carry (which runs from digit 0 towards digit `t-1`) is ordinary binary
//! addition modulo `2^t`. Words render with digit 0 leftmost.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Hard limit imposed by the `u64` representation.
pub const MAX_LEN: u32 = 63;

/// Default limit for words parsed from user input.
pub const DEFAULT_MAX_LEN: u32 = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word {
    value: u64,
    len: u32,
}

#[inline]
fn mask(len: u32) -> u64 {
    if len == 0 {
        0
    } else {
        u64::MAX >> (64 - len)
    }
}

impl Word {
    /// The empty word `o`.
    pub const EMPTY: Word = Word { value: 0, len: 0 };

    pub fn new(value: u64, len: u32) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::WordTooLong { len, max: MAX_LEN });
        }
        Ok(Word {
            value: value & mask(len),
            len,
        })
    }

    /// Builds a word without range checks; `value` is reduced modulo `2^len`.
    #[inline]
    pub(crate) fn from_parts(value: u64, len: u32) -> Self {
        debug_assert!(len <= MAX_LEN);
        Word {
            value: value & mask(len),
            len,
        }
    }

    pub fn zeros(len: u32) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn ones(len: u32) -> Result<Self> {
        Self::new(u64::MAX, len)
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let len = digits.len() as u32;
        if len > MAX_LEN {
            return Err(Error::WordTooLong { len, max: MAX_LEN });
        }
        let mut value = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            match d {
                0 => {}
                1 => value |= 1 << i,
                _ => return Err(Error::InvalidDigit(char::from(b'0' + d.min(9)))),
            }
        }
        Ok(Word { value, len })
    }

    /// Parses an ASCII digit string with digit 0 first. `""` and `"o"` are the
    /// empty word.
    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with_max(s, DEFAULT_MAX_LEN)
    }

    pub fn parse_with_max(s: &str, max_len: u32) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "o" {
            return Ok(Word::EMPTY);
        }
        let len = s.chars().count() as u32;
        let max = max_len.min(MAX_LEN);
        if len > max {
            return Err(Error::WordTooLong { len, max });
        }
        let mut value = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => value |= 1 << i,
                other => return Err(Error::InvalidDigit(other)),
            }
        }
        Ok(Word { value, len })
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.len
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// The integer `sum a_i 2^i`; also the index of `K_a` inside its level.
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn index(self) -> usize {
        self.value as usize
    }

    pub fn digit(self, i: u32) -> Option<u8> {
        (i < self.len).then(|| ((self.value >> i) & 1) as u8)
    }

    pub fn digits(self) -> Vec<u8> {
        (0..self.len).map(|i| ((self.value >> i) & 1) as u8).collect()
    }

    /// Odometer addition `a + n` in the cyclic group of order `2^t`.
    /// Negative `n` subtracts. The empty word is fixed.
    pub fn add(self, n: i64) -> Word {
        if self.len == 0 {
            return self;
        }
        let m = mask(self.len);
        // two's complement wrapping agrees with reduction mod 2^len
        Word {
            value: self.value.wrapping_add(n as u64) & m,
            len: self.len,
        }
    }

    /// `a_0 ... a_{s-1}`.
    pub fn prefix(self, s: u32) -> Result<Word> {
        if s > self.len {
            return Err(Error::PrefixOutOfRange {
                prefix: s,
                len: self.len,
            });
        }
        Ok(Word::from_parts(self.value, s))
    }

    /// True iff `self` lies in the cylinder `[a]`.
    pub fn starts_with(self, a: Word) -> bool {
        a.len <= self.len && (self.value & mask(a.len)) == a.value
    }

    /// The child `a u`.
    pub fn child(self, u: u8) -> Result<Word> {
        if self.len >= MAX_LEN {
            return Err(Error::WordTooLong {
                len: self.len + 1,
                max: MAX_LEN,
            });
        }
        Ok(Word {
            value: self.value | (((u & 1) as u64) << self.len),
            len: self.len + 1,
        })
    }

    pub fn parent(self) -> Option<Word> {
        (self.len > 0).then(|| Word::from_parts(self.value, self.len - 1))
    }

    /// The last digit `a_{t-1}`.
    pub fn last_digit(self) -> Option<u8> {
        self.len.checked_sub(1).map(|i| ((self.value >> i) & 1) as u8)
    }

    pub fn is_all_ones(self) -> bool {
        self.value == mask(self.len)
    }

    pub fn is_all_zeros(self) -> bool {
        self.value == 0
    }

    /// Position of `K_a` among the level-`t` intervals in left-to-right order.
    /// Admissible systems put `K_{a0}` left of `K_{a1}`, so this is the
    /// bit-reversal of the word value.
    #[inline]
    pub fn spatial_rank(self) -> u64 {
        spatial_rank(self.value, self.len)
    }

    /// Inverse of [`Word::spatial_rank`].
    pub fn from_spatial_rank(rank: u64, len: u32) -> Word {
        Word::from_parts(spatial_rank(rank, len), len)
    }

    /// Iterates over all of `Sigma^t` in word-value order.
    pub fn all(len: u32) -> impl Iterator<Item = Word> {
        assert!(len <= 32, "enumerating 2^{len} words");
        (0..1u64 << len).map(move |v| Word::from_parts(v, len))
    }
}

#[inline]
pub(crate) fn spatial_rank(value: u64, len: u32) -> u64 {
    if len == 0 {
        0
    } else {
        value.reverse_bits() >> (64 - len)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            let c = if (self.value >> i) & 1 == 1 { '1' } else { '0' };
            fmt::Write::write_char(f, c)?;
        }
        Ok(())
    }
}

impl core::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        alloc::format!("{w}")
    }
}

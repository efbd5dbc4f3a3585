//! Base-`b` digit decomposition and the digit-power-sum map.
//!
//! For a [`DigitSystem`] with base `b` and exponent `e`, the map sends
//! `n = Σ aᵢ·bⁱ` to `Σ aᵢᵉ`. Digits are always produced by repeated division
//! in the target base, so binary, ternary or base-1000 systems go through the
//! same code path as decimal.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Bases up to this size count digit occurrences in a table instead of
/// raising every digit to the exponent individually.
const COUNTING_BASE_LIMIT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigitError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("exponent must be at least 1, got {0}")]
    InvalidExponent(u32),
    #[error("digit {digit} at position {index} is out of range for base {base}")]
    DigitOutOfRange { index: usize, digit: u32, base: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseNaturalError {
    #[error("empty string is not a natural number")]
    Empty,
    #[error("negative values are not natural numbers")]
    Negative,
    #[error("invalid character {found:?} at offset {offset}")]
    InvalidDigit { offset: usize, found: char },
}

/// An arbitrary-precision nonnegative integer.
///
/// Parses from and displays as a canonical base-10 string with no sign and no
/// leading zeros (except `"0"` itself).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Natural(BigUint);

impl Natural {
    pub fn zero() -> Self {
        Natural(BigUint::zero())
    }

    pub fn one() -> Self {
        Natural(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// Number of base-`b` digits in the canonical expansion; zero has none.
    pub fn digit_count(&self, sys: DigitSystem) -> usize {
        to_digits(self, sys).len()
    }
}

impl From<u64> for Natural {
    fn from(v: u64) -> Self {
        Natural(BigUint::from(v))
    }
}

impl From<u32> for Natural {
    fn from(v: u32) -> Self {
        Natural(BigUint::from(v))
    }
}

impl From<BigUint> for Natural {
    fn from(v: BigUint) -> Self {
        Natural(v)
    }
}

impl FromStr for Natural {
    type Err = ParseNaturalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ParseNaturalError::Empty);
        }
        if s.starts_with('-') {
            return Err(ParseNaturalError::Negative);
        }
        if let Some((offset, found)) = s.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
            return Err(ParseNaturalError::InvalidDigit { offset, found });
        }
        // All ASCII digits, so radix parsing cannot fail.
        Ok(Natural(BigUint::parse_bytes(s.as_bytes(), 10).expect("validated decimal digits")))
    }
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for Natural {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Natural {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The (base, exponent) pair parameterizing the digit-power-sum map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DigitSystem {
    base: u32,
    exponent: u32,
}

impl DigitSystem {
    pub fn new(base: u32, exponent: u32) -> Result<Self, DigitError> {
        if base < 2 {
            return Err(DigitError::InvalidBase(base));
        }
        if exponent < 1 {
            return Err(DigitError::InvalidExponent(exponent));
        }
        Ok(DigitSystem { base, exponent })
    }

    /// Sum of squares of decimal digits, the classic happy-number map.
    pub const fn decimal_squares() -> Self {
        DigitSystem { base: 10, exponent: 2 }
    }

    pub fn base(self) -> u32 {
        self.base
    }

    pub fn exponent(self) -> u32 {
        self.exponent
    }

    pub fn digit_power(self, digit: u32) -> BigUint {
        BigUint::from(digit).pow(self.exponent)
    }

    /// `(b − 1)^e`, the largest contribution of a single digit.
    pub fn max_digit_power(self) -> BigUint {
        self.digit_power(self.base - 1)
    }

    pub fn apply(self, n: &Natural) -> Natural {
        digit_power_sum(n, self)
    }
}

impl fmt::Display for DigitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(base {}, exponent {})", self.base, self.exponent)
    }
}

/// Digits of a number, least significant first.
///
/// A vector need not be canonical: most-significant zero padding is allowed
/// and ignored by [`from_digits`] and [`power_sum_of_digits`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DigitVector(Vec<u32>);

impl DigitVector {
    pub fn from_raw(digits: Vec<u32>) -> Self {
        DigitVector(digits)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.0.last() != Some(&0)
    }

    /// Strip most-significant zeros.
    pub fn canonicalize(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }
}

/// Largest power of `base` that fits in a `u64`, with its exponent.
fn word_chunk(base: u32) -> (u64, u32) {
    let base = u64::from(base);
    let mut chunk = base;
    let mut width = 1;
    while let Some(next) = chunk.checked_mul(base) {
        chunk = next;
        width += 1;
    }
    (chunk, width)
}

/// Divide little-endian limbs in place by `divisor`, returning the remainder.
fn div_rem_limbs(limbs: &mut Vec<u64>, divisor: u64) -> u64 {
    let divisor = u128::from(divisor);
    let mut rem: u128 = 0;
    for limb in limbs.iter_mut().rev() {
        let cur = (rem << 64) | u128::from(*limb);
        *limb = (cur / divisor) as u64;
        rem = cur % divisor;
    }
    while limbs.last() == Some(&0) {
        limbs.pop();
    }
    rem as u64
}

/// Canonical base-`b` digits of `n`, least significant first; zero is empty.
pub fn to_digits(n: &Natural, sys: DigitSystem) -> DigitVector {
    let base = u64::from(sys.base);
    let (chunk, width) = word_chunk(sys.base);
    let mut limbs = n.0.to_u64_digits();
    let mut digits = Vec::new();
    while !limbs.is_empty() {
        let mut rem = div_rem_limbs(&mut limbs, chunk);
        if limbs.is_empty() {
            // Most significant chunk: emit only its real digits.
            while rem != 0 {
                digits.push((rem % base) as u32);
                rem /= base;
            }
        } else {
            for _ in 0..width {
                digits.push((rem % base) as u32);
                rem /= base;
            }
        }
    }
    DigitVector(digits)
}

/// Recompose a digit vector. Padding zeros are accepted.
pub fn from_digits(d: &DigitVector, sys: DigitSystem) -> Result<Natural, DigitError> {
    if let Some((index, &digit)) = d.0.iter().enumerate().find(|(_, &x)| x >= sys.base) {
        return Err(DigitError::DigitOutOfRange { index, digit, base: sys.base });
    }
    let mut acc = BigUint::zero();
    for &digit in d.0.iter().rev() {
        acc *= sys.base;
        acc += digit;
    }
    Ok(Natural(acc))
}

/// `Σ dᵉ` over the given digits, padded or not.
pub fn power_sum_of_digits(d: &DigitVector, sys: DigitSystem) -> BigUint {
    if sys.base <= COUNTING_BASE_LIMIT {
        let mut counts = vec![0u64; sys.base as usize];
        for &digit in &d.0 {
            counts[digit as usize] += 1;
        }
        counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c != 0)
            .map(|(digit, &c)| sys.digit_power(digit as u32) * c)
            .sum()
    } else {
        d.0.iter().filter(|&&x| x != 0).map(|&x| sys.digit_power(x)).sum()
    }
}

/// The digit-power-sum map: sum of the `e`-th powers of the base-`b` digits.
pub fn digit_power_sum(n: &Natural, sys: DigitSystem) -> Natural {
    Natural(power_sum_of_digits(&to_digits(n, sys), sys))
}

/// The number written with `p` ones in base `b`, i.e. `(bᵖ − 1)/(b − 1)`.
pub fn repunit(p: u32, sys: DigitSystem) -> Natural {
    let base = BigUint::from(sys.base);
    Natural((base.pow(p) - 1u32) / (sys.base - 1))
}

/// The map restricted to machine words, for exhaustive scans.
///
/// Holds a precomputed table of digit powers. Evaluation returns `None` on
/// `u64` overflow.
#[derive(Debug, Clone)]
pub struct WordMap {
    base: u64,
    powers: Vec<u64>,
}

impl WordMap {
    /// `None` when the base is too large for a table or a digit power
    /// overflows a `u64`.
    pub fn new(sys: DigitSystem) -> Option<Self> {
        if sys.base > COUNTING_BASE_LIMIT {
            return None;
        }
        let powers = (0..sys.base)
            .map(|d| u64::from(d).checked_pow(sys.exponent))
            .collect::<Option<Vec<_>>>()?;
        Some(WordMap { base: u64::from(sys.base), powers })
    }

    pub fn apply(&self, mut n: u64) -> Option<u64> {
        let mut sum = 0u64;
        while n != 0 {
            sum = sum.checked_add(self.powers[(n % self.base) as usize])?;
            n /= self.base;
        }
        Some(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(s: &str) -> Natural {
        s.parse().unwrap()
    }

    fn sys(b: u32, e: u32) -> DigitSystem {
        DigitSystem::new(b, e).unwrap()
    }

    // Independent oracle: plain u128 digit loop.
    fn naive_f(mut n: u128, b: u128, e: u32) -> u128 {
        let mut s = 0;
        while n > 0 {
            s += (n % b).pow(e);
            n /= b;
        }
        s
    }

    #[test]
    fn system_validation() {
        assert_eq!(DigitSystem::new(1, 2), Err(DigitError::InvalidBase(1)));
        assert_eq!(DigitSystem::new(0, 2), Err(DigitError::InvalidBase(0)));
        assert_eq!(DigitSystem::new(10, 0), Err(DigitError::InvalidExponent(0)));
        assert_eq!(DigitSystem::new(10, 2).unwrap(), DigitSystem::decimal_squares());
    }

    #[test]
    fn natural_parsing() {
        assert_eq!(nat("308").to_u64(), Some(308));
        assert_eq!(nat("000").to_string(), "0");
        assert_eq!(nat("0042").to_string(), "42");
        assert_eq!("".parse::<Natural>(), Err(ParseNaturalError::Empty));
        assert_eq!("-5".parse::<Natural>(), Err(ParseNaturalError::Negative));
        assert_eq!(
            "12a4".parse::<Natural>(),
            Err(ParseNaturalError::InvalidDigit { offset: 2, found: 'a' })
        );
        assert!("+5".parse::<Natural>().is_err());
        assert!("1 2".parse::<Natural>().is_err());
    }

    #[test]
    fn to_digits_examples() {
        let dec = DigitSystem::decimal_squares();
        assert_eq!(to_digits(&nat("308"), dec).as_slice(), &[8, 0, 3]);
        assert!(to_digits(&Natural::zero(), dec).is_empty());
        let bin = sys(2, 1);
        let d = to_digits(&nat("12"), bin);
        assert_eq!(d.as_slice(), &[0, 0, 1, 1]);
        // recomposition oracle Σ dᵢ·2^i
        let back: u64 = d.as_slice().iter().enumerate().map(|(i, &x)| u64::from(x) << i).sum();
        assert_eq!(back, 12);
    }

    #[test]
    fn to_digits_crosses_word_chunks() {
        // 10^19 is exactly one decimal chunk; the zero chunk below it must be padded.
        let n = nat("10000000000000000000");
        let d = to_digits(&n, DigitSystem::decimal_squares());
        assert_eq!(d.len(), 20);
        assert_eq!(d.as_slice()[19], 1);
        assert!(d.as_slice()[..19].iter().all(|&x| x == 0));
    }

    #[test]
    fn from_digits_examples() {
        let dec = DigitSystem::decimal_squares();
        let v = from_digits(&DigitVector::from_raw(vec![8, 0, 3]), dec).unwrap();
        assert_eq!(v, nat("308"));
        assert_eq!(from_digits(&DigitVector::default(), dec).unwrap(), Natural::zero());
        let v = from_digits(&DigitVector::from_raw(vec![0, 0, 3]), dec).unwrap();
        assert_eq!(v, nat("300"));
        assert_eq!(to_digits(&v, dec).as_slice(), &[0, 0, 3]);
        assert_eq!(
            from_digits(&DigitVector::from_raw(vec![1, 10]), dec),
            Err(DigitError::DigitOutOfRange { index: 1, digit: 10, base: 10 })
        );
        assert!(from_digits(&DigitVector::from_raw(vec![2]), sys(2, 1)).is_err());
    }

    #[test]
    fn map_examples() {
        let dec = DigitSystem::decimal_squares();
        assert_eq!(dec.apply(&nat("0")), nat("0"));
        assert_eq!(dec.apply(&nat("12")), nat("5"));
        assert_eq!(dec.apply(&nat("308")), nat("73"));
        assert_eq!(dec.apply(&nat("89")), nat("145"));
        assert_eq!(sys(10, 3).apply(&nat("999")), nat("2187"));
        assert_eq!(naive_f(999, 10, 3), 2187);
    }

    #[test]
    fn non_injective() {
        let dec = DigitSystem::decimal_squares();
        assert_eq!(dec.apply(&nat("1")), Natural::one());
        assert_eq!(dec.apply(&nat("10")), Natural::one());
    }

    #[test]
    fn repunit_examples() {
        let dec = DigitSystem::decimal_squares();
        assert_eq!(repunit(3, dec), nat("111"));
        assert_eq!(repunit(0, dec), Natural::zero());
        assert_eq!(dec.apply(&repunit(0, dec)), Natural::zero());
        let bin = sys(2, 1);
        assert_eq!(repunit(5, bin), nat("31"));
        assert_eq!(repunit(5, bin), from_digits(&DigitVector::from_raw(vec![1; 5]), bin).unwrap());
    }

    #[test]
    fn surjectivity_witness() {
        for (b, e) in [(10, 2), (2, 1), (3, 5), (16, 3), (1000, 2)] {
            let s = sys(b, e);
            for p in 0..=1000u32 {
                let r = repunit(p, s);
                assert_eq!(from_digits(&DigitVector::from_raw(vec![1; p as usize]), s).unwrap(), r);
                assert_eq!(s.apply(&r), Natural::from(p), "p = {p} in {s}");
            }
        }
    }

    #[test]
    fn huge_base_uses_direct_powers() {
        let s = sys(u32::MAX, 2);
        let n = Natural::from(u64::from(u32::MAX - 1) * u64::from(u32::MAX) + 7);
        assert_eq!(to_digits(&n, s).as_slice(), &[7, u32::MAX - 1]);
        let expect = BigUint::from(7u32).pow(2) + BigUint::from(u32::MAX - 1).pow(2);
        assert_eq!(s.apply(&n).into_biguint(), expect);
    }

    #[test]
    fn word_map_overflow() {
        assert!(WordMap::new(sys(10, 30)).is_none());
        let w = WordMap::new(sys(10, 20)).unwrap();
        assert_eq!(w.apply(9), Some(9u64.pow(20)));
        assert_eq!(w.apply(99), None);
    }

    proptest! {
        #[test]
        fn round_trip(limbs in prop::collection::vec(any::<u32>(), 0..12), b in 2u32..300, e in 1u32..6) {
            let s = sys(b, e);
            let n = Natural::from(BigUint::new(limbs));
            let d = to_digits(&n, s);
            prop_assert!(d.is_canonical());
            prop_assert!(d.as_slice().iter().all(|&x| x < b));
            prop_assert_eq!(from_digits(&d, s).unwrap(), n);
        }

        #[test]
        fn matches_naive_oracle(n in any::<u64>(), b in 2u32..40, e in 1u32..5) {
            let s = sys(b, e);
            let expect = naive_f(u128::from(n), u128::from(b), e);
            prop_assert_eq!(s.apply(&Natural::from(n)).into_biguint(), BigUint::from(expect));
            prop_assert_eq!(WordMap::new(s).unwrap().apply(n).map(u128::from), Some(expect));
        }

        #[test]
        fn padding_independence(digits in prop::collection::vec(0u32..10, 0..40), pad in 0usize..10) {
            let s = DigitSystem::decimal_squares();
            let canonical = DigitVector::from_raw(digits.clone()).canonicalize();
            let mut padded = digits;
            padded.extend(std::iter::repeat_n(0, pad));
            let padded = DigitVector::from_raw(padded);
            prop_assert_eq!(from_digits(&padded, s).unwrap(), from_digits(&canonical, s).unwrap());
            prop_assert_eq!(power_sum_of_digits(&padded, s), power_sum_of_digits(&canonical, s));
            let n = from_digits(&padded, s).unwrap();
            prop_assert_eq!(s.apply(&n).into_biguint(), power_sum_of_digits(&padded, s));
        }

        #[test]
        fn image_bounded_by_digit_count(limbs in prop::collection::vec(any::<u32>(), 0..20), b in 2u32..20, e in 1u32..5) {
            let s = sys(b, e);
            let n = Natural::from(BigUint::new(limbs));
            let p = n.digit_count(s);
            prop_assert!(s.apply(&n).into_biguint() <= s.max_digit_power() * p);
        }

        #[test]
        fn decimal_string_round_trip(s in "[1-9][0-9]{0,80}|0") {
            prop_assert_eq!(nat(&s).to_string(), s);
        }
    }
}

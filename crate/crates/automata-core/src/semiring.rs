//! Semirings ⟨K, ⊕, ⊗⟩ and the builtin weight types.
//!
//! Following the usual weighted-automata convention, the weight type itself
//! implements [`Semiring`]. Builtins: [`BoolWeight`] ⟨{0,1},∨,∧⟩,
//! [`RationalWeight`] ⟨ℚ,+,·⟩ with exact arbitrary-precision fractions, and
//! [`MaxPlusWeight`] ⟨ℚ∪{−∞},max,+⟩. [`RealWeight`] (f64 with +,·) backs the
//! floating spectral-learning mode and is not part of the JSON surface.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};

use crate::{Error, Result};

/// A semiring element. `plus` must be associative and commutative with
/// identity `zero`; `times` associative with identity `one`, distributing
/// over `plus`; `zero` annihilates `times`.
pub trait Semiring: Clone + PartialEq + fmt::Debug + fmt::Display {
    /// Tag used by the WFA JSON format.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Parses the JSON/CLI textual form of a weight.
    fn parse_weight(text: &str) -> Result<Self>;

    /// Textual form used in JSON documents.
    fn render_weight(&self) -> String {
        self.to_string()
    }
}

/// ⟨{0,1}, ∨, ∧⟩.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct BoolWeight(pub bool);

impl fmt::Display for BoolWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Semiring for BoolWeight {
    const NAME: &'static str = "boolean";

    fn zero() -> Self {
        BoolWeight(false)
    }

    fn one() -> Self {
        BoolWeight(true)
    }

    fn plus(&self, other: &Self) -> Self {
        BoolWeight(self.0 || other.0)
    }

    fn times(&self, other: &Self) -> Self {
        BoolWeight(self.0 && other.0)
    }

    fn parse_weight(text: &str) -> Result<Self> {
        match text {
            "1" | "true" => Ok(BoolWeight(true)),
            "0" | "false" => Ok(BoolWeight(false)),
            other => Err(Error::format("boolean weight", format!("{other:?}"))),
        }
    }
}

/// The rational field ⟨ℚ, +, ·⟩ with exact reduced fractions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalWeight(pub BigRational);

impl RationalWeight {
    pub fn from_int(n: i64) -> Self {
        RationalWeight(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        RationalWeight(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Nearest f64, for the floating factorization backend.
    pub fn to_f64(&self) -> f64 {
        num::ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for RationalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // BigRational renders as `p/q`, or just `p` when q = 1.
        write!(f, "{}", self.0)
    }
}

impl Semiring for RationalWeight {
    const NAME: &'static str = "rational";

    fn zero() -> Self {
        RationalWeight(BigRational::zero())
    }

    fn one() -> Self {
        RationalWeight(BigRational::one())
    }

    fn plus(&self, other: &Self) -> Self {
        RationalWeight(&self.0 + &other.0)
    }

    fn times(&self, other: &Self) -> Self {
        RationalWeight(&self.0 * &other.0)
    }

    fn parse_weight(text: &str) -> Result<Self> {
        BigRational::from_str(text)
            .map(RationalWeight)
            .map_err(|e| Error::format("rational weight", format!("{text:?}: {e}")))
    }
}

/// ⟨ℚ ∪ {−∞}, max, +⟩; `None` is −∞, the ⊕-identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaxPlusWeight(pub Option<BigRational>);

impl MaxPlusWeight {
    pub fn finite(n: i64) -> Self {
        MaxPlusWeight(Some(BigRational::from_integer(BigInt::from(n))))
    }

    pub fn neg_infinity() -> Self {
        MaxPlusWeight(None)
    }
}

impl fmt::Display for MaxPlusWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => f.write_str("-inf"),
            Some(q) => write!(f, "{q}"),
        }
    }
}

impl Semiring for MaxPlusWeight {
    const NAME: &'static str = "maxplus";

    fn zero() -> Self {
        MaxPlusWeight(None)
    }

    fn one() -> Self {
        MaxPlusWeight(Some(BigRational::zero()))
    }

    fn plus(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => MaxPlusWeight(Some(a.max(b).clone())),
        }
    }

    fn times(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (None, _) | (_, None) => MaxPlusWeight(None),
            (Some(a), Some(b)) => MaxPlusWeight(Some(a + b)),
        }
    }

    fn parse_weight(text: &str) -> Result<Self> {
        if text == "-inf" {
            return Ok(MaxPlusWeight(None));
        }
        BigRational::from_str(text)
            .map(|q| MaxPlusWeight(Some(q)))
            .map_err(|e| Error::format("max-plus weight", format!("{text:?}: {e}")))
    }
}

/// f64 with ordinary addition and multiplication. Only approximately a
/// semiring; used for numerically learned machines.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct RealWeight(pub f64);

impl fmt::Display for RealWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for RealWeight {
    const NAME: &'static str = "real";

    fn zero() -> Self {
        RealWeight(0.0)
    }

    fn one() -> Self {
        RealWeight(1.0)
    }

    fn plus(&self, other: &Self) -> Self {
        RealWeight(self.0 + other.0)
    }

    fn times(&self, other: &Self) -> Self {
        RealWeight(self.0 * other.0)
    }

    fn parse_weight(text: &str) -> Result<Self> {
        text.parse()
            .map(RealWeight)
            .map_err(|e| Error::format("real weight", format!("{text:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law_check<W: Semiring>(a: W, b: W, c: W) {
        // ⊕ associative, commutative, identity zero.
        assert_eq!(a.plus(&b).plus(&c), a.plus(&b.plus(&c)));
        assert_eq!(a.plus(&b), b.plus(&a));
        assert_eq!(a.plus(&W::zero()), a);
        // ⊗ associative, identity one.
        assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        assert_eq!(a.times(&W::one()), a);
        assert_eq!(W::one().times(&a), a);
        // Distributivity both sides.
        assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        assert_eq!(b.plus(&c).times(&a), b.times(&a).plus(&c.times(&a)));
        // Zero annihilates.
        assert_eq!(a.times(&W::zero()), W::zero());
        assert_eq!(W::zero().times(&a), W::zero());
    }

    fn rat(value: (i32, u32)) -> RationalWeight {
        let (n, d) = value;
        RationalWeight(BigRational::new(
            BigInt::from(n),
            BigInt::from(d as i64 + 1),
        ))
    }

    fn maxplus(v: Option<(i32, u32)>) -> MaxPlusWeight {
        MaxPlusWeight(v.map(|x| rat(x).0))
    }

    proptest! {
        #[test]
        fn boolean_laws(a: bool, b: bool, c: bool) {
            law_check(BoolWeight(a), BoolWeight(b), BoolWeight(c));
        }

        #[test]
        fn rational_laws(a in ((-20i32..20), (0u32..6)),
                         b in ((-20i32..20), (0u32..6)),
                         c in ((-20i32..20), (0u32..6))) {
            law_check(rat(a), rat(b), rat(c));
        }

        #[test]
        fn maxplus_laws(a in proptest::option::of(((-20i32..20), (0u32..6))),
                        b in proptest::option::of(((-20i32..20), (0u32..6))),
                        c in proptest::option::of(((-20i32..20), (0u32..6)))) {
            law_check(maxplus(a), maxplus(b), maxplus(c));
        }
    }

    #[test]
    fn weight_text_round_trips() {
        for text in ["0", "1", "5", "-3", "2/3", "-7/4"] {
            let w = RationalWeight::parse_weight(text).unwrap();
            assert_eq!(w.render_weight(), text);
        }
        assert_eq!(
            MaxPlusWeight::parse_weight("-inf").unwrap(),
            MaxPlusWeight::neg_infinity()
        );
        assert_eq!(BoolWeight::parse_weight("1").unwrap(), BoolWeight(true));
        // Unreduced input reduces on parse.
        assert_eq!(
            RationalWeight::parse_weight("4/6").unwrap().render_weight(),
            "2/3"
        );
    }
}

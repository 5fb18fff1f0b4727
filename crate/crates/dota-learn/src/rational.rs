//! Exact non-floating time values.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `numer / denom`, reducing to lowest terms. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Largest integer not greater than `self`.
    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    /// Smallest integer not less than `self`.
    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// The rational with the smallest denominator strictly between `lo` and `hi`
    /// (ties broken by smallest numerator). `hi = None` means unbounded.
    pub fn simplest_between(lo: Rational, hi: Option<Rational>) -> Rational {
        let Some(hi) = hi else {
            return Rational::from_int(lo.floor() + 1);
        };
        assert!(lo < hi, "empty interval");
        let fl = lo.floor();
        if Rational::from_int(fl + 1) < hi {
            return Rational::from_int(fl + 1);
        }
        // Both endpoints lie in [fl, fl+1]; search the fractional parts.
        let base = Rational::from_int(fl);
        let (a, b) = (lo - base, hi - base);
        base + simplest_in_unit(a, b)
    }
}

// Smallest-denominator rational strictly inside (a, b) with 0 <= a < b <= 1.
fn simplest_in_unit(a: Rational, b: Rational) -> Rational {
    let mut q: i64 = 2;
    loop {
        // Smallest p with p/q > a.
        let p = (a.numer() * q).div_euclid(a.denom()) + 1;
        let cand = Rational::new(p, q);
        if cand < b {
            return cand;
        }
        q += 1;
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    /// Terminating decimals print as decimals ("9.5"); anything else as "p/q".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = (self.numer(), self.denom());
        if d == 1 {
            return write!(f, "{n}");
        }
        let mut rest = d;
        let (mut twos, mut fives) = (0u32, 0u32);
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        if rest != 1 {
            return write!(f, "{n}/{d}");
        }
        let digits = twos.max(fives);
        let scale = 10i128.pow(digits);
        let scaled = n as i128 * scale / d as i128;
        let sign = if scaled < 0 { "-" } else { "" };
        let abs = scaled.abs();
        let int = abs / scale;
        let frac = abs % scale;
        write!(f, "{sign}{int}.{frac:0width$}", width = digits as usize)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts integers ("4"), decimals ("5.5", "-0.25") and fractions ("7/3").
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Rational::new(n, d));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int) || !all_digits(frac) || frac.len() > 17 {
            return Err(bad());
        }
        let int_v: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let mut value = Ratio::from_integer(int_v);
        if !frac.is_empty() {
            let den = 10i64.pow(frac.len() as u32);
            let num: i64 = frac.parse().map_err(|_| bad())?;
            value += Ratio::new(num, den);
        }
        if neg {
            value = -value;
        }
        Ok(Rational(value))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Rational::from_int(n)),
            // Floats are re-read through their shortest decimal rendering.
            Raw::Float(x) => x.to_string().parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

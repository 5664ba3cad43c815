//! Exact rational thresholds.
//!
//! Similarity ratios are ratios of small integers, so comparing them against
//! a floating-point threshold flips at boundaries like 1/3 depending on
//! rounding. Thresholds are kept as reduced fractions and compared by integer
//! cross-multiplication instead.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Threshold {
    num: u64,
    den: u64,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Threshold {
    pub const ZERO: Threshold = Threshold { num: 0, den: 1 };

    /// `num / den`, which must lie in `[0, 1)`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::BadThreshold(format!("{num}/{den}")));
        }
        Self::reduced(u128::from(num), u128::from(den))
            .filter(|t| t.num < t.den)
            .ok_or_else(|| Error::ThresholdOutOfRange(format!("{num}/{den}")))
    }

    fn reduced(num: u128, den: u128) -> Option<Self> {
        let g = gcd(num, den).max(1);
        Some(Threshold {
            num: u64::try_from(num / g).ok()?,
            den: u64::try_from(den / g).ok()?,
        })
    }

    /// Converts through the shortest decimal representation of `x`, so
    /// `from_f64(0.05)` is exactly 1/20.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::BadThreshold(x.to_string()));
        }
        format!("{x}").parse()
    }

    pub fn numer(self) -> u64 {
        self.num
    }

    pub fn denom(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// True iff `shared / total > self`. A zero `total` never exceeds.
    #[inline]
    pub fn exceeded_by(self, shared: u64, total: u64) -> bool {
        total != 0 && u128::from(shared) * u128::from(self.den) > u128::from(self.num) * u128::from(total)
    }

    /// `from, from + step, ...` up to and including `to`. Every element must
    /// itself be a valid threshold.
    pub fn ladder(from: Threshold, to: Threshold, step: Threshold) -> Result<Vec<Threshold>> {
        if step.num == 0 {
            return Err(Error::InvalidConfig("sweep step must be positive".into()));
        }
        let mut out = Vec::new();
        let mut k: u128 = 0;
        loop {
            // from + k * step = (fn*sd + k*sn*fd) / (fd*sd)
            let num = u128::from(from.num) * u128::from(step.den) + k * u128::from(step.num) * u128::from(from.den);
            let den = u128::from(from.den) * u128::from(step.den);
            let t = Self::reduced(num, den).ok_or_else(|| Error::InvalidConfig("sweep ladder overflow".into()))?;
            if t > to {
                break;
            }
            out.push(t);
            k += 1;
        }
        Ok(out)
    }
}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den)).cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// Accepts plain decimals (`0.05`, `.5`, `0`) and fractions (`1/3`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadThreshold(s.to_owned());
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Self::new(n, d).map_err(|e| match e {
                Error::ThresholdOutOfRange(_) => Error::ThresholdOutOfRange(s.to_owned()),
                _ => bad(),
            });
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u128.pow(frac.len() as u32);
        let int_val: u128 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: u128 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int_val
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        if num >= den {
            return Err(Error::ThresholdOutOfRange(s.to_owned()));
        }
        Self::reduced(num, den).ok_or_else(bad)
    }
}

impl fmt::Display for Threshold {
    /// Exact decimal when the denominator has only factors 2 and 5,
    /// otherwise `num/den`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = self.den;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d.is_multiple_of(2) {
            d /= 2;
            twos += 1;
        }
        while d.is_multiple_of(5) {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return write!(f, "{}/{}", self.num, self.den);
        }
        let digits = twos.max(fives);
        if digits == 0 {
            return write!(f, "{}", self.num);
        }
        let scaled = u128::from(self.num) * 10u128.pow(digits) / u128::from(self.den);
        let int = scaled / 10u128.pow(digits);
        let frac = scaled % 10u128.pow(digits);
        write!(f, "{int}.{frac:0width$}", width = digits as usize)
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Threshold {
        s.parse().unwrap()
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(t("0.05"), Threshold::new(1, 20).unwrap());
        assert_eq!(t(".5"), Threshold::new(1, 2).unwrap());
        assert_eq!(t("0"), Threshold::ZERO);
        assert_eq!(t("2/6"), Threshold::new(1, 3).unwrap());
        assert!(matches!("1".parse::<Threshold>(), Err(Error::ThresholdOutOfRange(_))));
        assert!(matches!("1.5".parse::<Threshold>(), Err(Error::ThresholdOutOfRange(_))));
        assert!(matches!("-0.1".parse::<Threshold>(), Err(Error::BadThreshold(_))));
        assert!(matches!("abc".parse::<Threshold>(), Err(Error::BadThreshold(_))));
        assert!(matches!(".".parse::<Threshold>(), Err(Error::BadThreshold(_))));
    }

    #[test]
    fn displays_exact_decimals() {
        assert_eq!(t("0.01").to_string(), "0.01");
        assert_eq!(t("0.250").to_string(), "0.25");
        assert_eq!(t("0").to_string(), "0");
        assert_eq!(t("1/3").to_string(), "1/3");
        assert_eq!(t("1/8").to_string(), "0.125");
    }

    #[test]
    fn strict_comparison_at_one_third() {
        let third = t("1/3");
        assert!(!third.exceeded_by(1, 3));
        assert!(third.exceeded_by(2, 5));
        assert!(t("0.3").exceeded_by(1, 3));
        assert!(!t("0.4").exceeded_by(1, 3));
        assert!(!Threshold::ZERO.exceeded_by(0, 4));
        assert!(Threshold::ZERO.exceeded_by(1, 400));
    }

    #[test]
    fn from_f64_uses_shortest_decimal() {
        assert_eq!(Threshold::from_f64(0.05).unwrap(), Threshold::new(1, 20).unwrap());
        assert_eq!(Threshold::from_f64(0.1).unwrap(), Threshold::new(1, 10).unwrap());
        assert!(Threshold::from_f64(1.0).is_err());
    }

    #[test]
    fn ladder_hits_every_hundredth() {
        let l = Threshold::ladder(t("0.01"), t("0.99"), t("0.01")).unwrap();
        assert_eq!(l.len(), 99);
        assert_eq!(l[0], t("0.01"));
        assert_eq!(l[98], t("0.99"));
        assert_eq!(l[29].to_string(), "0.3");
        assert!(Threshold::ladder(t("0.5"), t("0.1"), t("0.1")).unwrap().is_empty());
        assert!(Threshold::ladder(t("0"), t("0.5"), t("0")).is_err());
    }
}

//! Extended rationals, dyadic rationals, Farey pairs and the Minkowski
//! question mark function.
//!
//! The projective line is read as a circle starting at `0/1`: first the
//! non-negative ray up to `∞`, then the negative ray back to `0`. Under `?`
//! the first half lands on `[0, 1/2]` and the second on `[1/2, 1]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{parse_err, Error, Result};

/// A point of `ℚ ∪ {∞}` in lowest terms.
///
/// `1/0` and `-1/0` are the same point of the projective line but are kept
/// apart as interval endpoint spellings; use [`ExtRational::same_point`] to
/// compare points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtRational {
    num: BigInt,
    den: BigInt,
}

impl ExtRational {
    /// Builds `num/den` in lowest terms with a non-negative denominator.
    ///
    /// A zero denominator yields `1/0` or `-1/0` according to the sign of
    /// `num`. Returns `None` for `0/0`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Option<Self> {
        let (mut num, mut den) = (num.into(), den.into());
        if num.is_zero() && den.is_zero() {
            return None;
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if den.is_zero() {
            return Some(Self {
                num: num.signum(),
                den,
            });
        }
        let g = num.gcd(&den);
        Some(Self {
            num: num / &g,
            den: den / g,
        })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    /// `1/0`.
    pub fn infinity() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    /// `-1/0`.
    pub fn neg_infinity() -> Self {
        Self {
            num: -BigInt::one(),
            den: BigInt::zero(),
        }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    /// Equality as points of the projective line.
    pub fn same_point(&self, other: &Self) -> bool {
        (self.is_infinite() && other.is_infinite()) || self == other
    }

    /// `self.num * other.den - self.den * other.num`.
    pub fn cross(&self, other: &Self) -> BigInt {
        &self.num * &other.den - &self.den * &other.num
    }

    /// Position on the circle, as used for sorting breakpoints: the
    /// non-negative rationals, then `∞`, then the negative rationals.
    pub fn circle_cmp(&self, other: &Self) -> Ordering {
        self.circle_class()
            .cmp(&other.circle_class())
            .then_with(|| match (self.is_infinite(), other.is_infinite()) {
                (true, true) => Ordering::Equal,
                _ => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
            })
    }

    fn circle_class(&self) -> u8 {
        if self.is_infinite() {
            1
        } else if self.num.is_negative() {
            2
        } else {
            0
        }
    }

    /// Möbius action `x ↦ (ax + b)/(cx + d)`, with `∞` handled as in the
    /// projective line. A zero denominator always yields `1/0`.
    pub fn mobius(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Self {
        let num = a * &self.num + b * &self.den;
        let den = c * &self.num + d * &self.den;
        if den.is_zero() {
            return Self::infinity();
        }
        Self::new(num, den).expect("determinant 1 keeps the image defined")
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| parse_err(format!("expected p/q, got {s:?}")))?;
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad numerator in {s:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad denominator in {s:?}")))?;
        if den.is_negative() {
            return Err(parse_err(format!("negative denominator in {s:?}")));
        }
        let value =
            Self::new(num.clone(), den.clone()).ok_or_else(|| parse_err("0/0 is not a point"))?;
        if value.num != num || value.den != den {
            return Err(parse_err(format!(
                "{s:?} is not in lowest terms (expected {value})"
            )));
        }
        Ok(value)
    }
}

/// The Farey mediant `p/q ⊕ r/s = (p+r)/(q+s)`, reduced.
pub fn mediant(x: &ExtRational, y: &ExtRational) -> Result<ExtRational> {
    ExtRational::new(&x.num + &y.num, &x.den + &y.den)
        .ok_or_else(|| Error::UndefinedMediant(x.to_string(), y.to_string()))
}

/// `|ps − qr| = 1`.
pub fn is_farey_pair(x: &ExtRational, y: &ExtRational) -> bool {
    x.cross(y).abs().is_one()
}

/// An interval between consecutive Farey numbers, oriented from `lo` to
/// `hi` along the circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FareyInterval {
    pub lo: ExtRational,
    pub hi: ExtRational,
}

impl FareyInterval {
    pub fn new(lo: ExtRational, hi: ExtRational) -> Result<Self> {
        if !is_farey_pair(&lo, &hi) {
            return Err(Error::InvalidMap(format!("{lo}, {hi} is not a Farey pair")));
        }
        Ok(Self { lo, hi })
    }

    /// The two halves obtained by inserting the mediant.
    pub fn split(&self) -> (FareyInterval, FareyInterval) {
        let m = mediant(&self.lo, &self.hi).expect("Farey pairs have a mediant");
        (
            FareyInterval {
                lo: self.lo.clone(),
                hi: m.clone(),
            },
            FareyInterval {
                lo: m,
                hi: self.hi.clone(),
            },
        )
    }
}

/// An exact dyadic rational `num / 2^exp`, canonical (odd `num` or `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u64) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        if num.is_zero() {
            return Self { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp);
        if tz > 0 {
            num >>= tz;
            exp -= tz;
        }
        Self { num, exp }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            exp: 0,
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `2^-e`.
    pub fn pow2_neg(e: u64) -> Self {
        Self::new(1, e)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn half(&self) -> Self {
        self.shr(1)
    }

    /// Division by `2^k`.
    pub fn shr(&self, k: u64) -> Self {
        Self::new(self.num.clone(), self.exp + k)
    }

    /// Multiplication by `2^k`.
    pub fn shl(&self, k: u64) -> Self {
        if k <= self.exp {
            Self::new(self.num.clone(), self.exp - k)
        } else {
            Self {
                num: &self.num << (k - self.exp),
                exp: 0,
            }
        }
    }

    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&(BigInt::one() << self.exp))
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &Dyadic::integer(self.floor())
    }

    /// Writes a non-zero value as `m · 2^t` with `m` odd.
    pub fn odd_decomposition(&self) -> Option<(BigInt, i64)> {
        if self.num.is_zero() {
            return None;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        Some((&self.num >> tz, tz as i64 - self.exp as i64))
    }

    /// `Some(t)` when `self = 2^t`.
    pub fn log2_exact(&self) -> Option<i64> {
        match self.odd_decomposition() {
            Some((m, t)) if m.is_one() => Some(t),
            _ => None,
        }
    }

    /// `Some(t)` when `self / other = 2^t`.
    pub fn ratio_log2(&self, other: &Self) -> Option<i64> {
        let (ma, ta) = self.odd_decomposition()?;
        let (mb, tb) = other.odd_decomposition()?;
        (ma == mb).then_some(ta - tb)
    }

    /// True when `[self, self + width)` is a standard dyadic interval
    /// `[m/2^e, (m+1)/2^e]` inside some integer translate of `[0, 1]`.
    pub fn is_standard_interval(&self, width: &Dyadic) -> bool {
        match width.log2_exact() {
            Some(t) if t <= 0 => self.exp <= (-t) as u64,
            _ => false,
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        (&self.num << (e - self.exp)).cmp(&(&other.num << (e - other.exp)))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(
            (&self.num << (e - self.exp)) + (&rhs.num << (e - rhs.exp)),
            e,
        )
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `p`, `p/q` with `q` a power of two, and `p/2^e`, all in
    /// lowest terms.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || parse_err(format!("{s:?} is not a canonical dyadic"));
        let Some((p, q)) = s.split_once('/') else {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            return Ok(Dyadic::integer(n));
        };
        let num: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim();
        let exp: u64 = if let Some(e) = q.strip_prefix("2^") {
            e.parse().map_err(|_| bad())?
        } else {
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if !q.is_positive() || q.magnitude().count_ones() != 1 {
                return Err(parse_err(format!(
                    "denominator of {s:?} is not a power of two"
                )));
            }
            q.trailing_zeros().unwrap_or(0)
        };
        if exp == 0 || num.is_even() {
            return Err(parse_err(format!("{s:?} is not in lowest terms")));
        }
        Ok(Dyadic { num, exp })
    }
}

/// Minkowski's `?` on `ℚ ∪ {∞}`, valued in `[0, 1)`.
///
/// `?(0) = 0`, `?(∞) = 1/2`, `?(x ⊕ y) = (?(x) + ?(y))/2` on Farey pairs, and
/// `?(−x) = 1 − ?(x)` for `x > 0`.
pub fn minkowski_q(x: &ExtRational) -> Dyadic {
    if x.is_infinite() {
        return Dyadic::new(1, 1);
    }
    if x.num.is_zero() {
        return Dyadic::zero();
    }
    if x.num.is_negative() {
        let pos = ExtRational {
            num: -&x.num,
            den: x.den.clone(),
        };
        return &Dyadic::one() - &minkowski_q(&pos);
    }
    positive_ray(&x.num, &x.den)
}

/// Stern–Brocot descent in `[0/1, 1/0]` with the values `[0, 1/2]`, taking
/// each run of equal turns in one step.
fn positive_ray(p: &BigInt, q: &BigInt) -> Dyadic {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    let (mut c, mut d) = (BigInt::one(), BigInt::zero());
    let mut vlo = Dyadic::zero();
    let mut vhi = Dyadic::new(1, 1);
    loop {
        let n = p * &b - q * &a;
        let dd = q * &c - p * &d;
        match n.cmp(&dd) {
            Ordering::Equal => return (&vlo + &vhi).half(),
            Ordering::Greater => {
                let count = (&n - 1u32) / &dd;
                a += &count * &c;
                b += &count * &d;
                let k = count.to_u64().expect("run length fits in u64");
                vlo = &vhi - &(&vhi - &vlo).shr(k);
            }
            Ordering::Less => {
                let count = (&dd - 1u32) / &n;
                c += &count * &a;
                d += &count * &b;
                let k = count.to_u64().expect("run length fits in u64");
                vhi = &vlo + &(&vhi - &vlo).shr(k);
            }
        }
    }
}

/// Inverse of [`minkowski_q`] on dyadics in `[0, 1)`.
pub fn minkowski_inv(d: &Dyadic) -> Result<ExtRational> {
    if d.is_negative() || *d >= Dyadic::one() {
        return Err(Error::OutOfRange(d.to_string()));
    }
    let half = Dyadic::new(1, 1);
    match d.cmp(&half) {
        Ordering::Equal => Ok(ExtRational::infinity()),
        Ordering::Greater => {
            let x = bisect(&(&Dyadic::one() - d));
            Ok(ExtRational {
                num: -x.num,
                den: x.den,
            })
        }
        Ordering::Less => Ok(bisect(d)),
    }
}

fn bisect(d: &Dyadic) -> ExtRational {
    let mut lo = ExtRational::zero();
    let mut hi = ExtRational::infinity();
    let mut vlo = Dyadic::zero();
    let mut vhi = Dyadic::new(1, 1);
    loop {
        if *d == vlo {
            return lo;
        }
        let m = mediant(&lo, &hi).expect("Stern-Brocot neighbours have a mediant");
        let vm = (&vlo + &vhi).half();
        match d.cmp(&vm) {
            Ordering::Equal => return m,
            Ordering::Less => {
                hi = m;
                vhi = vm;
            }
            Ordering::Greater => {
                lo = m;
                vlo = vm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExtRational {
        s.parse().unwrap()
    }

    fn dy(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(&q("0/1"), &q("1/0")).unwrap(), q("1/1"));
        assert_eq!(mediant(&q("1/2"), &q("1/1")).unwrap(), q("2/3"));
        assert_eq!(mediant(&q("1/2"), &q("1/3")).unwrap(), q("2/5"));
        assert!(matches!(
            mediant(&q("1/0"), &q("-1/0")),
            Err(Error::UndefinedMediant(..))
        ));
    }

    #[test]
    fn farey_pair_examples() {
        assert!(is_farey_pair(&q("0/1"), &q("1/0")));
        assert!(is_farey_pair(&q("1/2"), &q("2/3")));
        assert!(!is_farey_pair(&q("1/3"), &q("2/3")));
    }

    #[test]
    fn question_mark_values() {
        assert_eq!(minkowski_q(&q("0/1")), Dyadic::zero());
        assert_eq!(minkowski_q(&q("1/0")), dy("1/2"));
        assert_eq!(minkowski_q(&q("-1/0")), dy("1/2"));
        assert_eq!(minkowski_q(&q("1/1")), dy("1/4"));
        assert_eq!(minkowski_q(&q("1/2")), dy("1/8"));
        assert_eq!(minkowski_q(&q("-1/1")), dy("3/4"));
        assert_eq!(minkowski_q(&q("-1/2")), dy("7/8"));
        assert_eq!(minkowski_q(&q("-2/1")), dy("5/8"));
        assert_eq!(minkowski_q(&q("2/3")), dy("3/16"));
        assert_eq!(minkowski_q(&q("3/1")), dy("7/16"));
    }

    #[test]
    fn question_mark_inverse() {
        assert_eq!(minkowski_inv(&Dyadic::zero()).unwrap(), q("0/1"));
        assert_eq!(minkowski_inv(&dy("1/2")).unwrap(), q("1/0"));
        assert_eq!(minkowski_inv(&dy("1/4")).unwrap(), q("1/1"));
        assert_eq!(minkowski_inv(&dy("5/8")).unwrap(), q("-2/1"));
        assert!(matches!(
            minkowski_inv(&Dyadic::one()),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            minkowski_inv(&dy("-1/4")),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn long_runs_are_batched() {
        let x = ExtRational::new(1, 1000).unwrap();
        assert_eq!(minkowski_q(&x), Dyadic::pow2_neg(1001));
        assert_eq!(minkowski_inv(&Dyadic::pow2_neg(1001)).unwrap(), x);
    }

    #[test]
    fn dyadic_parsing() {
        assert_eq!(dy("3/8"), Dyadic::new(3, 3));
        assert_eq!(dy("3/2^3"), Dyadic::new(3, 3));
        assert_eq!(dy("-5"), Dyadic::integer(-5));
        assert!("2/8".parse::<Dyadic>().is_err());
        assert!("1/6".parse::<Dyadic>().is_err());
        assert!("1/2^0".parse::<Dyadic>().is_err());
        assert_eq!(Dyadic::new(12, 4).to_string(), "3/4");
    }

    #[test]
    fn ext_rational_parsing() {
        assert!("2/4".parse::<ExtRational>().is_err());
        assert!("0/0".parse::<ExtRational>().is_err());
        assert!("2/0".parse::<ExtRational>().is_err());
        assert!("1/-2".parse::<ExtRational>().is_err());
        assert!("x".parse::<ExtRational>().is_err());
        assert_eq!(q("-1/0"), ExtRational::neg_infinity());
        assert!(q("-1/0").same_point(&q("1/0")));
        assert_ne!(q("-1/0"), q("1/0"));
    }

    #[test]
    fn circle_order() {
        let pts = ["0/1", "1/2", "1/1", "5/1", "1/0", "-7/1", "-1/1", "-1/3"];
        for w in pts.windows(2) {
            assert_eq!(
                q(w[0]).circle_cmp(&q(w[1])),
                Ordering::Less,
                "{} < {}",
                w[0],
                w[1]
            );
        }
        assert_eq!(q("1/0").circle_cmp(&q("-1/0")), Ordering::Equal);
    }

    #[test]
    fn dyadic_ratios() {
        assert_eq!(dy("3/8").ratio_log2(&dy("3/2")), Some(-2));
        assert_eq!(dy("3/8").ratio_log2(&dy("1/2")), None);
        assert_eq!(dy("1/4").log2_exact(), Some(-2));
        assert_eq!(Dyadic::integer(4).log2_exact(), Some(2));
        assert!(dy("3/4").is_standard_interval(&dy("1/4")));
        assert!(!dy("1/4").is_standard_interval(&dy("1/2")));
        assert_eq!(dy("-3/4").floor(), BigInt::from(-1));
        assert_eq!(dy("7/4").fract(), dy("3/4"));
    }
}

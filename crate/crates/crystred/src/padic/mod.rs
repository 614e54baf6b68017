//! Capped relative precision arithmetic in E = Q_p(pi), pi^2 = p.

mod parse;
mod prime;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use parse::parse_scalar;
use prime::mulmod;
pub use prime::Prime;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not a supported odd prime")]
    BadPrime(u64),
    #[error("inversion of a value that is zero within precision")]
    DivisionByZero,
    #[error("valuation of zero")]
    ZeroValuation,
    #[error("precision insufficient: known only modulo pi^{known}, needed pi^{needed}")]
    PrecisionInsufficient { known: i64, needed: i64 },
    #[error("non-integral value (pi-valuation {0}) has no residue")]
    NonIntegral(i64),
    #[error("value is not in Q_p")]
    NotInQp,
    #[error("scalar parse error: {0}")]
    Parse(String),
}

/// A half-integer held as a count of pi-units. `HalfInt(3)` is 3/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(n: i64) -> HalfInt {
        HalfInt(2 * n)
    }
    pub fn pi_units(self) -> i64 {
        self.0
    }
    pub fn num(self) -> i64 {
        if self.0 % 2 == 0 {
            self.0 / 2
        } else {
            self.0
        }
    }
    pub fn den(self) -> i64 {
        if self.0 % 2 == 0 {
            1
        } else {
            2
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/2", self.num())
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Frac {
            num: i64,
            den: i64,
        }
        Frac {
            num: self.num(),
            den: self.den(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Frac {
            num: i64,
            den: i64,
        }
        let f = Frac::deserialize(d)?;
        match f.den {
            1 => Ok(HalfInt(2 * f.num)),
            2 => Ok(HalfInt(f.num)),
            _ => Err(serde::de::Error::custom("denominator must be 1 or 2")),
        }
    }
}

const EXACT: i64 = i64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    /// Zero modulo pi^abs; `abs == EXACT` is a true zero.
    Zero { abs: i64 },
    /// pi^vpi * (a + b pi) with a a unit, known to `prec` pi-digits.
    Unit { vpi: i64, a: u64, b: u64, prec: u32 },
}

/// Element of E with capped relative precision.
#[derive(Clone, Copy)]
pub struct ExtScalar {
    prime: Prime,
    repr: Repr,
}

impl PartialEq for ExtScalar {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.repr == other.repr
    }
}
impl Eq for ExtScalar {}

fn abs_add(x: i64, y: i64) -> i64 {
    if x == EXACT || y == EXACT {
        EXACT
    } else {
        x + y
    }
}

impl ExtScalar {
    pub fn zero(prime: Prime) -> ExtScalar {
        ExtScalar {
            prime,
            repr: Repr::Zero { abs: EXACT },
        }
    }

    /// Zero known only modulo pi^abs.
    pub fn approx_zero(prime: Prime, abs: i64) -> ExtScalar {
        ExtScalar {
            prime,
            repr: Repr::Zero { abs },
        }
    }

    pub fn one(prime: Prime) -> ExtScalar {
        Self::from_i64(prime, 1)
    }

    pub fn pi(prime: Prime) -> ExtScalar {
        Self::unit_raw(prime, 1, 1, 0, prime.max_prec())
    }

    /// pi^e exactly.
    pub fn pi_pow(prime: Prime, e: i64) -> ExtScalar {
        Self::unit_raw(prime, e, 1, 0, prime.max_prec())
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    fn unit_raw(prime: Prime, vpi: i64, a: u64, b: u64, prec: u32) -> ExtScalar {
        let prec = prec.min(prime.max_prec());
        let (a, b) = truncate(prime, a, b, prec);
        debug_assert!(a % prime.p() != 0);
        ExtScalar {
            prime,
            repr: Repr::Unit { vpi, a, b, prec },
        }
    }

    /// Build pi^vpi (a + b pi) from arbitrary residues, renormalizing.
    fn normalize(prime: Prime, mut vpi: i64, mut a: u64, mut b: u64, mut prec: i64) -> ExtScalar {
        let p = prime.p();
        let abs = vpi + prec;
        loop {
            if prec <= 0 {
                return Self::approx_zero(prime, abs);
            }
            let (ta, tb) = truncate(prime, a, b, prec as u32);
            a = ta;
            b = tb;
            if !a.is_multiple_of(p) {
                return ExtScalar {
                    prime,
                    repr: Repr::Unit {
                        vpi,
                        a,
                        b,
                        prec: prec as u32,
                    },
                };
            }
            let shifted = a / p;
            a = b;
            b = shifted;
            vpi += 1;
            prec -= 1;
        }
    }

    pub fn from_i64(prime: Prime, n: i64) -> ExtScalar {
        Self::from_bigint(prime, &BigInt::from(n))
    }

    pub fn from_bigint(prime: Prime, n: &BigInt) -> ExtScalar {
        if n.is_zero() {
            return Self::zero(prime);
        }
        let p = BigInt::from(prime.p());
        let mut v = 0i64;
        let mut m = n.clone();
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            m = q;
            v += 1;
        }
        let modulus = BigInt::from(prime.modulus());
        let unit = m.mod_floor(&modulus).to_u64().unwrap();
        Self::unit_raw(prime, 2 * v, unit, 0, prime.max_prec())
    }

    /// num/den as an element of Q_p.
    pub fn from_ratio(prime: Prime, num: &BigInt, den: &BigInt) -> Result<ExtScalar, PadicError> {
        let d = Self::from_bigint(prime, den);
        Self::from_bigint(prime, num).div(&d)
    }

    /// Teichmuller lift of a residue.
    pub fn teichmuller(prime: Prime, residue: u64) -> ExtScalar {
        let residue = residue % prime.p();
        if residue == 0 {
            return Self::zero(prime);
        }
        Self::unit_raw(prime, 0, prime.teich_raw(residue), 0, prime.max_prec())
    }

    /// Build from a pi-adic digit list starting at pi^vpi.
    pub fn from_digits(prime: Prime, vpi: i64, digits: &[u64], prec: u32) -> ExtScalar {
        let p = prime.p();
        let mut acc = Self::zero(prime);
        for (i, &d) in digits.iter().enumerate() {
            if d % p != 0 {
                acc = acc + Self::from_i64(prime, (d % p) as i64) * Self::pi_pow(prime, vpi + i as i64);
            }
        }
        match acc.repr {
            Repr::Zero { .. } => Self::approx_zero(prime, vpi + prec as i64),
            _ => acc.with_abs_prec(vpi + prec as i64),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: EXACT })
    }

    /// True for exact zero and for zero within precision.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// pi-adic valuation of a non-zero value.
    pub fn vpi(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { vpi, .. } => Some(vpi),
            Repr::Zero { .. } => None,
        }
    }

    pub fn valuation(&self) -> Result<HalfInt, PadicError> {
        self.vpi().map(HalfInt).ok_or(PadicError::ZeroValuation)
    }

    /// Lower bound on the valuation in pi-units; `i64::MAX` for exact zero.
    pub fn min_vpi(&self) -> i64 {
        match self.repr {
            Repr::Unit { vpi, .. } => vpi,
            Repr::Zero { abs } => abs,
        }
    }

    /// Absolute precision in pi-units: the value is known modulo pi^abs_prec.
    pub fn abs_prec(&self) -> i64 {
        match self.repr {
            Repr::Unit { vpi, prec, .. } => vpi + prec as i64,
            Repr::Zero { abs } => abs,
        }
    }

    pub fn rel_prec(&self) -> u32 {
        match self.repr {
            Repr::Unit { prec, .. } => prec,
            Repr::Zero { .. } => 0,
        }
    }

    /// Decide whether the value lies in pi^s O_E.
    pub fn divisible_by_pi(&self, s: i64) -> Result<bool, PadicError> {
        match self.repr {
            Repr::Unit { vpi, .. } => Ok(vpi >= s),
            Repr::Zero { abs } if abs >= s => Ok(true),
            Repr::Zero { abs } => Err(PadicError::PrecisionInsufficient { known: abs, needed: s }),
        }
    }

    /// Drop relative precision to at most `prec` digits.
    pub fn with_rel_prec(self, prec: u32) -> ExtScalar {
        match self.repr {
            Repr::Unit { vpi, a, b, prec: old } => Self::normalize(self.prime, vpi, a, b, old.min(prec) as i64),
            Repr::Zero { .. } => self,
        }
    }

    /// Forget everything at or beyond pi^abs.
    pub fn with_abs_prec(self, abs: i64) -> ExtScalar {
        match self.repr {
            Repr::Unit { .. } if abs == EXACT => self,
            Repr::Unit { vpi, a, b, prec } => {
                let keep = (abs - vpi).min(prec as i64);
                Self::normalize(self.prime, vpi, a, b, keep)
            }
            Repr::Zero { abs: old } => Self::approx_zero(self.prime, old.min(abs)),
        }
    }

    /// Unit part digits d_0..d_{prec-1} in base pi.
    pub fn unit_digits(&self) -> Vec<u64> {
        match self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Unit { a, b, prec, .. } => {
                let p = self.prime.p();
                let (mut a, mut b) = (a, b);
                (0..prec)
                    .map(|i| {
                        let src = if i % 2 == 0 { &mut a } else { &mut b };
                        let d = *src % p;
                        *src /= p;
                        d
                    })
                    .collect()
            }
        }
    }

    /// Image in F_p of an integral value.
    pub fn residue(&self) -> Result<u64, PadicError> {
        match self.repr {
            Repr::Unit { vpi, a, .. } => match vpi.cmp(&0) {
                Ordering::Less => Err(PadicError::NonIntegral(vpi)),
                Ordering::Equal => Ok(a % self.prime.p()),
                Ordering::Greater => Ok(0),
            },
            Repr::Zero { abs } if abs >= 1 => Ok(0),
            Repr::Zero { abs } => Err(PadicError::PrecisionInsufficient { known: abs, needed: 1 }),
        }
    }

    /// Exact rational integer when the value lies in Z_p modulo p^k; returns
    /// the residue modulo p^k as a big integer.
    pub fn to_zp_residue(&self, k: u32) -> Result<BigInt, PadicError> {
        let needed = 2 * k as i64;
        let p = BigInt::from(self.prime.p());
        let modulus = num_traits::pow(p.clone(), k as usize);
        match self.repr {
            Repr::Zero { abs } if abs >= needed => Ok(BigInt::zero()),
            Repr::Zero { abs } => Err(PadicError::PrecisionInsufficient { known: abs, needed }),
            Repr::Unit { vpi, .. } if vpi < 0 => Err(PadicError::NonIntegral(vpi)),
            Repr::Unit { vpi, prec, .. } => {
                if vpi >= needed {
                    return Ok(BigInt::zero());
                }
                if vpi + (prec as i64) < needed {
                    return Err(PadicError::PrecisionInsufficient {
                        known: vpi + prec as i64,
                        needed,
                    });
                }
                let digits = self.unit_digits();
                let mut acc = BigInt::zero();
                for (i, d) in digits.iter().enumerate() {
                    let e = vpi + i as i64;
                    if e >= needed || *d == 0 {
                        continue;
                    }
                    if e % 2 == 1 {
                        return Err(PadicError::NotInQp);
                    }
                    acc += BigInt::from(*d) * num_traits::pow(p.clone(), (e / 2) as usize);
                }
                Ok(acc.mod_floor(&modulus))
            }
        }
    }

    pub fn inv(&self) -> Result<ExtScalar, PadicError> {
        match self.repr {
            Repr::Zero { .. } => Err(PadicError::DivisionByZero),
            Repr::Unit { vpi, a, b, prec } => {
                let prime = self.prime;
                let m = prime.modulus();
                let p = prime.p();
                // (a + b pi)^{-1} = (a - b pi) / (a^2 - p b^2)
                let norm = (mulmod(a, a, m) + m - mulmod(p, mulmod(b, b, m), m)) % m;
                let ninv = inverse_mod(norm, m);
                let na = mulmod(a, ninv, m);
                let nb = (m - mulmod(b, ninv, m)) % m;
                Ok(Self::unit_raw(prime, -vpi, na, nb, prec))
            }
        }
    }

    pub fn div(&self, other: &ExtScalar) -> Result<ExtScalar, PadicError> {
        Ok(*self * other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<ExtScalar, PadicError> {
        let base = if e < 0 { self.inv()? } else { *self };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.prime);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            sq = sq * sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiply by pi^k.
    pub fn shift(&self, k: i64) -> ExtScalar {
        match self.repr {
            Repr::Zero { abs } => Self::approx_zero(self.prime, abs_add(abs, k)),
            Repr::Unit { vpi, a, b, prec } => ExtScalar {
                prime: self.prime,
                repr: Repr::Unit {
                    vpi: vpi + k,
                    a,
                    b,
                    prec,
                },
            },
        }
    }

    /// Multiply by a rational integer.
    pub fn scale_i64(&self, n: i64) -> ExtScalar {
        *self * Self::from_i64(self.prime, n)
    }
}

fn truncate(prime: Prime, a: u64, b: u64, prec: u32) -> (u64, u64) {
    let ea = prec.div_ceil(2);
    let eb = prec / 2;
    (a % prime.pow(ea), b % prime.pow(eb))
}

fn inverse_mod(x: u64, m: u64) -> u64 {
    let ext = (x as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(ext.gcd, 1);
    ext.x.rem_euclid(m as i128) as u64
}

/// Multiply the unit a + b pi by pi^k modulo p^mmax.
fn unit_times_pi_pow(prime: Prime, a: u64, b: u64, k: u32) -> (u64, u64) {
    let m = prime.modulus();
    let pk = prime.pow(k / 2);
    let (a, b) = (mulmod(a, pk, m), mulmod(b, pk, m));
    if k.is_multiple_of(2) {
        (a, b)
    } else {
        (mulmod(b, prime.p(), m), a)
    }
}

impl Add for ExtScalar {
    type Output = ExtScalar;
    fn add(self, rhs: ExtScalar) -> ExtScalar {
        assert!(self.prime == rhs.prime, "mixed primes");
        let prime = self.prime;
        match (self.repr, rhs.repr) {
            (Repr::Zero { abs: x }, Repr::Zero { abs: y }) => Self::approx_zero(prime, x.min(y)),
            (Repr::Zero { abs }, _) => rhs.with_abs_prec(abs),
            (_, Repr::Zero { abs }) => self.with_abs_prec(abs),
            (
                Repr::Unit {
                    vpi: vx,
                    a: ax,
                    b: bx,
                    prec: px,
                },
                Repr::Unit {
                    vpi: vy,
                    a: ay,
                    b: by,
                    prec: py,
                },
            ) => {
                let ((v0, a0, b0, _), (v1, a1, b1, _)) = if vx <= vy {
                    ((vx, ax, bx, px), (vy, ay, by, py))
                } else {
                    ((vy, ay, by, py), (vx, ax, bx, px))
                };
                let abs = (vx + px as i64).min(vy + py as i64);
                let rel = abs - v0;
                let k = v1 - v0;
                if k >= rel {
                    return Self::normalize(prime, v0, a0, b0, rel);
                }
                let (sa, sb) = unit_times_pi_pow(prime, a1, b1, k as u32);
                let m = prime.modulus();
                Self::normalize(prime, v0, (a0 + sa) % m, (b0 + sb) % m, rel)
            }
        }
    }
}

impl Neg for ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        match self.repr {
            Repr::Zero { .. } => self,
            Repr::Unit { vpi, a, b, prec } => {
                let m = self.prime.modulus();
                Self::unit_raw(self.prime, vpi, (m - a) % m, (m - b) % m, prec)
            }
        }
    }
}

impl Sub for ExtScalar {
    type Output = ExtScalar;
    fn sub(self, rhs: ExtScalar) -> ExtScalar {
        self + (-rhs)
    }
}

impl Mul for ExtScalar {
    type Output = ExtScalar;
    fn mul(self, rhs: ExtScalar) -> ExtScalar {
        assert!(self.prime == rhs.prime, "mixed primes");
        let prime = self.prime;
        match (self.repr, rhs.repr) {
            (Repr::Zero { abs: x }, Repr::Zero { abs: y }) => Self::approx_zero(prime, abs_add(x, y)),
            (Repr::Zero { abs }, Repr::Unit { vpi, .. }) | (Repr::Unit { vpi, .. }, Repr::Zero { abs }) => {
                Self::approx_zero(prime, abs_add(abs, vpi))
            }
            (
                Repr::Unit {
                    vpi: vx,
                    a: ax,
                    b: bx,
                    prec: px,
                },
                Repr::Unit {
                    vpi: vy,
                    a: ay,
                    b: by,
                    prec: py,
                },
            ) => {
                let m = prime.modulus();
                let p = prime.p();
                let a = (mulmod(ax, ay, m) + mulmod(p, mulmod(bx, by, m), m)) % m;
                let b = (mulmod(ax, by, m) + mulmod(bx, ay, m)) % m;
                Self::unit_raw(prime, vx + vy, a, b, px.min(py))
            }
        }
    }
}

/// Serialized in the parser's syntax so reports round-trip exactly.
impl Serialize for ExtScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders in the parser's syntax, e.g. `pi^3*(1 + 2*pi) + O(pi^43)`.
impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Zero { abs: EXACT } => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O(pi^{abs})"),
            Repr::Unit { vpi, prec, .. } => {
                let digits = self.unit_digits();
                let last = digits.iter().rposition(|&d| d != 0).unwrap_or(0);
                let terms: Vec<String> = digits[..=last]
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d != 0)
                    .map(|(i, d)| match i {
                        0 => format!("{d}"),
                        1 => format!("{d}*pi"),
                        _ => format!("{d}*pi^{i}"),
                    })
                    .collect();
                write!(f, "pi^{vpi}*({})", terms.join(" + "))?;
                if prec < self.prime.max_prec() {
                    write!(f, " + O(pi^{})", vpi + prec as i64)?;
                }
                Ok(())
            }
        }
    }
}

/// p-adic valuation of a non-zero big integer.
pub fn vp_bigint(p: u64, n: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn pi_squared_is_p() {
        let p = f5();
        let pi = ExtScalar::pi(p);
        assert_eq!(pi * pi, ExtScalar::from_i64(p, 5));
    }

    #[test]
    fn inverse_of_p() {
        let p = f5();
        let inv = ExtScalar::from_i64(p, 5).inv().unwrap();
        assert_eq!(inv.vpi(), Some(-2));
        assert_eq!(inv.unit_digits()[0], 1);
        assert!(inv.unit_digits()[1..].iter().all(|&d| d == 0));
    }

    #[test]
    fn ap_squared() {
        let p = f5();
        let ap = ExtScalar::from_i64(p, 5) * ExtScalar::pi(p);
        assert_eq!(ap.vpi(), Some(3));
        // digit oracle: 125 = 5^3 is pi^6 with unit digit 1
        let sq = ap * ap;
        assert_eq!(sq.vpi(), Some(6));
        assert_eq!(sq, ExtScalar::from_i64(p, 125));
    }

    #[test]
    fn valuations_as_fractions() {
        let p = f5();
        assert_eq!(ExtScalar::one(p).valuation().unwrap(), HalfInt(0));
        let v = ExtScalar::from_i64(p, 5).valuation().unwrap();
        assert_eq!((v.num(), v.den()), (1, 1));
        let v = (ExtScalar::from_i64(p, 5) * ExtScalar::pi(p)).valuation().unwrap();
        assert_eq!((v.num(), v.den()), (3, 2));
        assert_eq!(ExtScalar::zero(p).valuation(), Err(PadicError::ZeroValuation));
    }

    #[test]
    fn teichmuller_two_mod_25() {
        let p = f5();
        let t = ExtScalar::teichmuller(p, 2);
        // brute-force oracle: the unique x mod 25 with x = 2 mod 5 and x^4 = 1
        let oracle = (0..25u64).find(|x| x % 5 == 2 && x.pow(4) % 25 == 1).unwrap();
        assert_eq!(t.to_zp_residue(2).unwrap(), BigInt::from(oracle));
        assert_eq!(oracle, 7);
        assert_eq!(t.pow(4).unwrap(), ExtScalar::one(p));
    }

    #[test]
    fn teichmuller_power_sums() {
        for prime in [5u64, 7, 11] {
            let p = Prime::new(prime).unwrap();
            for i in 0..(3 * (prime - 1)) as i64 {
                let mut sum = ExtScalar::zero(p);
                for lam in 1..prime {
                    sum = sum + ExtScalar::teichmuller(p, lam).pow(i).unwrap();
                }
                if i % (prime as i64 - 1) == 0 {
                    assert_eq!(sum, ExtScalar::from_i64(p, prime as i64 - 1));
                } else {
                    assert!(sum.is_zero());
                    assert!(sum.abs_prec() >= p.max_prec() as i64);
                }
            }
        }
    }

    #[test]
    fn cancellation_tracks_precision() {
        let p = f5();
        let x = ExtScalar::from_i64(p, 1).with_rel_prec(10);
        let y = ExtScalar::from_i64(p, 1 + 125);
        let d = y - x;
        // 125 is beyond the 10 known digits of x: pi^6 < pi^10
        assert_eq!(d.vpi(), Some(6));
        assert_eq!(d.rel_prec(), 4);
        let z = x - ExtScalar::one(p);
        assert!(z.is_zero() && !z.is_exact_zero());
        assert_eq!(z.abs_prec(), 10);
        assert!(z.divisible_by_pi(11).is_err());
        assert_eq!(z.divisible_by_pi(10), Ok(true));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(ExtScalar::zero(f5()).inv(), Err(PadicError::DivisionByZero));
    }

    #[test]
    fn ratio_embeds_in_zp() {
        let p = f5();
        let third = ExtScalar::from_ratio(p, &BigInt::from(1), &BigInt::from(3)).unwrap();
        let r = third.to_zp_residue(3).unwrap();
        assert_eq!((r * 3u32) % 125u32, BigInt::from(1));
    }

    #[test]
    fn display_round_trip() {
        let p = f5();
        let x = ExtScalar::pi_pow(p, 3) * (ExtScalar::one(p) + ExtScalar::pi(p).scale_i64(2));
        let text = x.to_string();
        assert_eq!(text, "pi^3*(1 + 2*pi)");
        assert_eq!(parse_scalar(p, &text).unwrap(), x);
    }

    #[test]
    fn half_int_serde() {
        let json = serde_json::to_string(&HalfInt(5)).unwrap();
        assert_eq!(json, r#"{"num":5,"den":2}"#);
        let back: HalfInt = serde_json::from_str(r#"{"num":2,"den":1}"#).unwrap();
        assert_eq!(back, HalfInt(4));
    }
}

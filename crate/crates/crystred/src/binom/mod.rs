//! Exact binomial sums and the congruences they satisfy for weights
//! r = b + n(p-1)p^t.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BinomError {
    #[error("r = {r} is not {b} mod {m}", m = .p - 1)]
    WrongClass { p: u64, r: u64, b: u64 },
    #[error("r = {r} must exceed {b}")]
    TooSmall { r: u64, b: u64 },
    #[error("p = {0} must be a prime above 3")]
    BadPrime(u64),
    #[error("part {part} does not exist for {family}")]
    NoSuchPart { family: String, part: u32 },
    #[error("denominator of the right-hand side is divisible by p")]
    NonUnitDenominator,
    #[error("instance unsupported: {0}")]
    Unsupported(String),
}

/// C(n, k); zero outside 0 <= k <= n.
pub fn binom(n: u64, k: i64) -> BigInt {
    binom_checked(n, k).unwrap_or_else(BigInt::zero)
}

/// C(n, k), or `None` when k is out of range.
pub fn binom_checked(n: u64, k: i64) -> Option<BigInt> {
    if k < 0 || k as u64 > n {
        return None;
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Some(acc)
}

/// Row n of Pascal's triangle.
pub fn binom_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::one();
    row.push(acc.clone());
    for k in 0..n {
        acc = acc * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(acc.clone());
    }
    row
}

/// v_p(n!) by Legendre's formula.
pub fn val_factorial(p: u64, n: u64) -> u64 {
    let mut v = 0;
    let mut q = n / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v
}

/// v_p(C(n, k)) for 0 <= k <= n.
pub fn val_binom(p: u64, n: u64, k: u64) -> u64 {
    assert!(k <= n);
    val_factorial(p, n) - val_factorial(p, k) - val_factorial(p, n - k)
}

/// v_p of a non-zero integer.
pub fn val_int(p: u64, x: &BigInt) -> Option<u64> {
    crate::padic::vp_bigint(p, x).map(u64::from)
}

/// Weights r = b + n(p-1)p^t with t = v(r - b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalWeight {
    pub p: u64,
    pub b: u64,
    pub r: u64,
    pub n: u64,
    pub t: u32,
}

impl ExceptionalWeight {
    pub fn from_r(p: u64, b: u64, r: u64) -> Result<Self, BinomError> {
        if p < 5 || !(2..p).all(|d| !p.is_multiple_of(d)) {
            return Err(BinomError::BadPrime(p));
        }
        if r <= b {
            return Err(BinomError::TooSmall { r, b });
        }
        if !(r - b).is_multiple_of(p - 1) {
            return Err(BinomError::WrongClass { p, r, b });
        }
        let mut n = (r - b) / (p - 1);
        let mut t = 0;
        while n.is_multiple_of(p) {
            n /= p;
            t += 1;
        }
        Ok(ExceptionalWeight { p, b, r, n, t })
    }

    pub fn build(p: u64, b: u64, n: u64, t: u32) -> Result<Self, BinomError> {
        Self::from_r(p, b, b + n * (p - 1) * p.pow(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRange {
    /// 0 < j < r
    Open,
    /// 1 < j <= r-2
    AboveOne,
    /// 2 < j <= r-1
    AboveTwo,
    /// 2 <= j < r-1
    FromTwo,
    /// 2 < j < r
    Inner,
    /// 0 <= j <= r
    All,
}

impl SumRange {
    pub fn contains(self, j: u64, r: u64) -> bool {
        match self {
            SumRange::Open => 0 < j && j < r,
            SumRange::AboveOne => 1 < j && j + 2 <= r,
            SumRange::AboveTwo => 2 < j && j < r,
            SumRange::FromTwo => 2 <= j && j + 1 < r,
            SumRange::Inner => 2 < j && j < r,
            SumRange::All => j <= r,
        }
    }
}

/// Sum of C(j, weight) C(r, j) over j = class mod (p-1) in a range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumSpec {
    pub p: u64,
    pub r: u64,
    pub class: u64,
    pub weight: u64,
    pub range: SumRange,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSum {
    pub value: BigInt,
    /// No j satisfied the range and class.
    pub empty: bool,
}

pub fn residue_class_sum(spec: SumSpec) -> ClassSum {
    let row = binom_row(spec.r);
    class_sum_with_row(&spec, &row)
}

fn class_sum_with_row(spec: &SumSpec, row: &[BigInt]) -> ClassSum {
    let modulus = spec.p - 1;
    let mut value = BigInt::zero();
    let mut empty = true;
    for j in (0..=spec.r).filter(|j| j % modulus == spec.class % modulus && spec.range.contains(*j, spec.r)) {
        empty = false;
        if j >= spec.weight {
            value += binom(j, spec.weight as i64) * &row[j as usize];
        }
    }
    ClassSum { value, empty }
}

/// One line of the identity report.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdentityRecord {
    pub prop: String,
    pub part: u32,
    pub p: u64,
    pub r: u64,
    pub modulus: String,
    pub pass: bool,
    pub witness: String,
}

/// lhs = rhs mod p^k, with rhs a rational whose denominator is a p-unit.
pub fn congruent(p: u64, k: u32, lhs: &BigInt, rhs: &BigRational) -> Result<(bool, BigInt, BigInt), BinomError> {
    let modulus = BigInt::from(p).pow(k);
    let rhs_res = rational_mod(rhs, &modulus, p)?;
    let lhs_res = lhs.mod_floor(&modulus);
    Ok((lhs_res == rhs_res, lhs_res, rhs_res))
}

/// Image of a p-integral rational in Z/p^k.
pub fn rational_mod(x: &BigRational, modulus: &BigInt, p: u64) -> Result<BigInt, BinomError> {
    let den = x.denom();
    if (den % BigInt::from(p)).is_zero() {
        return Err(BinomError::NonUnitDenominator);
    }
    if modulus.is_one() {
        return Ok(BigInt::zero());
    }
    let ext = den.mod_floor(modulus).extended_gcd(modulus);
    debug_assert!(ext.gcd.is_one());
    Ok((x.numer() * ext.x).mod_floor(modulus))
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValuationLemma {
    /// r = 3 mod (p-1): p^i C(r,i) = 0 mod p^{t+4} for i >= 4.
    B3,
    /// r = 2 mod (p-1): p^i C(r,i) = 0 mod p^{t+3} for i >= 3.
    B2,
    /// r = 1 mod (p-1): p^i C(r,i) = 0 mod p^{t+2} for i >= 2.
    B1,
}

impl ValuationLemma {
    pub fn b(self) -> u64 {
        match self {
            ValuationLemma::B3 => 3,
            ValuationLemma::B2 => 2,
            ValuationLemma::B1 => 1,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            ValuationLemma::B3 => "valuation-b3",
            ValuationLemma::B2 => "valuation-b2",
            ValuationLemma::B1 => "valuation-b1",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [Self::B3, Self::B2, Self::B1]
            .into_iter()
            .find(|l| l.id() == text || l.id().ends_with(text))
    }
}

pub fn check_valuation_lemma(p: u64, r: u64, which: ValuationLemma) -> Result<IdentityRecord, BinomError> {
    let w = ExceptionalWeight::from_r(p, which.b(), r)?;
    let start = which.b() + 1;
    let bound = w.t as u64 + which.b() + 1;
    let mut witness = format!("i = {start}..={r}: v(p^i C(r,i)) >= t+{}", which.b() + 1);
    let mut pass = true;
    for i in start..=r {
        let v = i + val_binom(p, r, i);
        if v < bound {
            pass = false;
            witness = format!("i = {i}: v(p^i C(r,i)) = {v} < {bound}");
            break;
        }
    }
    Ok(IdentityRecord {
        prop: which.id().into(),
        part: 1,
        p,
        r,
        modulus: format!("{p}^{bound}"),
        pass,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumFamily {
    /// r = 3 + n(p-1)p^t, j = 3 mod (p-1), 0 < j < r.
    J3Open,
    /// s = 1 + n(p-1)p^t, j = 1 mod (p-1), all j.
    J1All,
    /// r = 3 + n(p-1)p^t, j = 1 mod (p-1), 1 < j <= r-2.
    J1AboveOne,
    /// r = 2 + n(p-1)p^t, j = 2 mod (p-1), 0 < j < r.
    J2Open,
    /// r = 3 + n(p-1)p^t, j = 2 mod (p-1), 2 < j <= r-1.
    J2AboveTwo,
    /// Integers beta_j close to C(r, j) with prescribed moment sums.
    Beta,
}

impl SumFamily {
    pub const ALL: [SumFamily; 6] = [
        Self::J3Open,
        Self::J1All,
        Self::J1AboveOne,
        Self::J2Open,
        Self::J2AboveTwo,
        Self::Beta,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SumFamily::J3Open => "sum-j3-open",
            SumFamily::J1All => "sum-j1-all",
            SumFamily::J1AboveOne => "sum-j1-above-one",
            SumFamily::J2Open => "sum-j2-open",
            SumFamily::J2AboveTwo => "sum-j2-above-two",
            SumFamily::Beta => "beta",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.id() == text)
    }

    /// Residue class b of the weight.
    pub fn weight_class(self) -> u64 {
        match self {
            SumFamily::J1All => 1,
            SumFamily::J2Open => 2,
            _ => 3,
        }
    }

    pub fn parts(self) -> u32 {
        match self {
            SumFamily::J3Open | SumFamily::J1AboveOne | SumFamily::J2AboveTwo => 5,
            SumFamily::J1All => 3,
            SumFamily::J2Open | SumFamily::Beta => 4,
        }
    }

    fn class_and_range(self) -> (u64, SumRange) {
        match self {
            SumFamily::J3Open => (3, SumRange::Open),
            SumFamily::J1All => (1, SumRange::All),
            SumFamily::J1AboveOne => (1, SumRange::AboveOne),
            SumFamily::J2Open => (2, SumRange::Open),
            SumFamily::J2AboveTwo => (2, SumRange::AboveTwo),
            SumFamily::Beta => (2, SumRange::FromTwo),
        }
    }
}

/// A congruence lhs = rhs mod p^k, possibly for a list of weights i.
struct Claim {
    modulus_exp: u32,
    cases: Vec<(String, BigInt, BigRational)>,
}

fn moment(w: &ExceptionalWeight, family: SumFamily, weight: u64, row: &[BigInt]) -> BigInt {
    let (class, range) = family.class_and_range();
    class_sum_with_row(
        &SumSpec {
            p: w.p,
            r: w.r,
            class,
            weight,
            range,
        },
        row,
    )
    .value
}

fn p_pow(p: u64, e: u64) -> BigInt {
    BigInt::from(p).pow(e as u32)
}

/// "p^i * moment_i = 0 mod p^k for all i >= from".
fn high_moments(w: &ExceptionalWeight, family: SumFamily, from: u64, k: u32, row: &[BigInt]) -> Claim {
    let cases = (from..=w.r)
        .map(|i| (format!("i={i}"), p_pow(w.p, i) * moment(w, family, i, row), rat(0)))
        .collect();
    Claim { modulus_exp: k, cases }
}

fn single(k: u32, label: &str, lhs: BigInt, rhs: BigRational) -> Claim {
    Claim {
        modulus_exp: k,
        cases: vec![(label.to_string(), lhs, rhs)],
    }
}

fn claim_for(w: &ExceptionalWeight, family: SumFamily, part: u32, row: &[BigInt]) -> Result<Claim, BinomError> {
    let (p, r, n, t) = (w.p as i64, w.r as i64, w.n as i64, w.t);
    let pb = BigInt::from(p);
    let pt1 = pb.pow(t + 1);
    let no_part = || BinomError::NoSuchPart {
        family: family.id().into(),
        part,
    };
    let m = |i: u64| moment(w, family, i, row);
    let claim = match (family, part) {
        (SumFamily::J3Open, 1) => {
            let c_low = binom(2 * p as u64 + 1, p - 1);
            let c_high = binom(2 * p as u64 + 1, p + 2);
            if c_low != c_high {
                return Err(BinomError::Unsupported("C(2p+1,p-1) != C(2p+1,p+2)".into()));
            }
            let q = ratio(3 - r, 1 - p);
            let cb = rat(c_low);
            let rhs = q.clone() / rat(6) * (rat(6 * p * p + 5 * p) - rat(3) * cb.clone())
                + q.clone() * q / rat(6) * (rat(-3 * p * p - 3 * p) + rat(3) * cb);
            single(t + 3, "i=0", m(0), rhs)
        }
        (SumFamily::J3Open, 2) => single(t + 2, "i=1", m(1), ratio(p * r * (3 - r), 2)),
        (SumFamily::J3Open, 3) => single(t + 1, "i=2", m(2), rat(0)),
        (SumFamily::J3Open, 4) => single(t, "i=3", m(3), ratio(binom(r as u64, 3), 1 - p)),
        (SumFamily::J3Open, 5) => high_moments(w, family, 4, t + 4, row),
        (SumFamily::J1All, 1) => single(t + 2, "i=0", m(0), rat(BigInt::one() + BigInt::from(n) * &pt1)),
        (SumFamily::J1All, 2) => {
            let rhs = ratio(r * (p - 2), p - 1) - rat(BigInt::from(r * n) * &pt1);
            single(t + 2, "i=1", m(1), rhs)
        }
        (SumFamily::J1All, 3) => high_moments(w, family, 2, t + 2, row),
        (SumFamily::J1AboveOne, 1) => single(t + 1, "i=0", m(0), rat(3 - r)),
        (SumFamily::J1AboveOne, 2) => single(t + 1, "i=1", m(1), rat(0)),
        (SumFamily::J1AboveOne, 3) => single(t, "i=2", m(2), rat(0)),
        (SumFamily::J1AboveOne, 4) => single(t, "i=3", m(3), ratio(binom(r as u64, 3), 1 - p)),
        (SumFamily::J1AboveOne, 5) => high_moments(w, family, 4, t + 4, row),
        (SumFamily::J2Open, 1) => {
            let d = 2 - r;
            let rhs = ratio(p * d, 2) + ratio(3 * p * p * d, 2) - ratio(p * p * d * d, 2);
            single(t + 3, "i=0", m(0), rhs)
        }
        (SumFamily::J2Open, 2) => single(t + 2, "i=1", m(1), ratio(p * r * (2 - r), 1 - p)),
        (SumFamily::J2Open, 3) => single(t + 1, "i=2", m(2), ratio(binom(r as u64, 2), 1 - p)),
        (SumFamily::J2Open, 4) => high_moments(w, family, 3, t + 3, row),
        (SumFamily::J2AboveTwo, 1) => {
            let rhs = rat(3) - rat(binom(r as u64, 2)) + rat(BigInt::from(5 * n) * &pt1) / rat(2);
            single(t + 2, "i=0", m(0), rhs)
        }
        (SumFamily::J2AboveTwo, 2) => single(t + 1, "i=1", m(1), rat(r * (3 - r))),
        (SumFamily::J2AboveTwo, 3) => single(t + 1, "i=2", m(2), rat(0)),
        (SumFamily::J2AboveTwo, 4) => single(t + 1, "i=3", m(3), ratio(binom(r as u64, 3), p - 1)),
        (SumFamily::J2AboveTwo, 5) => high_moments(w, family, 4, t + 4, row),
        _ => return Err(no_part()),
    };
    Ok(claim)
}

fn settle(family: &str, part: u32, w: &ExceptionalWeight, claim: Claim) -> Result<IdentityRecord, BinomError> {
    let mut first_fail = None;
    let mut summary = Vec::new();
    for (label, lhs, rhs) in &claim.cases {
        let (ok, l, rr) = congruent(w.p, claim.modulus_exp, lhs, rhs)?;
        if claim.cases.len() == 1 {
            summary.push(format!("{label}: lhs = {l}, rhs = {rr}"));
        }
        if !ok && first_fail.is_none() {
            first_fail = Some(format!("{label}: lhs = {l}, rhs = {rr}"));
        }
    }
    if claim.cases.len() > 1 {
        summary.push(format!(
            "{} .. {}: all zero",
            claim.cases[0].0,
            claim.cases.last().unwrap().0
        ));
    }
    Ok(IdentityRecord {
        prop: family.into(),
        part,
        p: w.p,
        r: w.r,
        modulus: format!("{}^{}", w.p, claim.modulus_exp),
        pass: first_fail.is_none(),
        witness: first_fail.unwrap_or_else(|| summary.join("; ")),
    })
}

pub fn check_sum_proposition(p: u64, r: u64, family: SumFamily, part: u32) -> Result<IdentityRecord, BinomError> {
    if family == SumFamily::Beta {
        let (_, records) = beta_coefficients(p, r)?;
        return records
            .into_iter()
            .find(|rec| rec.part == part)
            .ok_or(BinomError::NoSuchPart {
                family: family.id().into(),
                part,
            });
    }
    let w = ExceptionalWeight::from_r(p, family.weight_class(), r)?;
    let row = binom_row(r);
    let claim = claim_for(&w, family, part, &row)?;
    settle(family.id(), part, &w, claim)
}

/// beta_j for j = 2 mod (p-1), 2 <= j < r-1.
#[derive(Clone, Debug)]
pub struct BetaFamily {
    pub weight: ExceptionalWeight,
    pub beta: Vec<(u64, BigInt)>,
    /// 2 b' = 1 mod p^{t+1}.
    pub b_prime: BigInt,
}

impl BetaFamily {
    pub fn get(&self, j: u64) -> Option<&BigInt> {
        self.beta.iter().find(|(k, _)| *k == j).map(|(_, b)| b)
    }

    pub fn moment(&self, i: u64) -> BigInt {
        self.beta.iter().map(|(j, b)| binom(*j, i as i64) * b).sum()
    }
}

pub fn build_beta(p: u64, r: u64) -> Result<BetaFamily, BinomError> {
    let w = ExceptionalWeight::from_r(p, 3, r)?;
    if 2 * p + 1 >= r {
        return Err(BinomError::Unsupported(format!(
            "index 2p = {} is not below r-1 = {}",
            2 * p,
            r - 1
        )));
    }
    let row = binom_row(r);
    let pt1 = BigInt::from(p).pow(w.t + 1);
    let b_prime = (&pt1 + 1) / 2;
    let interior: Vec<u64> = (3..r - 1).filter(|j| (j % (p - 1)) == 2 % (p - 1)).collect();
    let beta2: BigInt = -interior
        .iter()
        .map(|&j| &b_prime * BigInt::from(j) * &row[j as usize])
        .sum::<BigInt>();
    let beta2p: BigInt = -interior
        .iter()
        .filter(|&&j| j != 2 * p)
        .map(|&j| row[j as usize].clone())
        .sum::<BigInt>()
        - &beta2;
    let mut beta = vec![(2, beta2)];
    for &j in &interior {
        let value = if j == 2 * p {
            beta2p.clone()
        } else {
            row[j as usize].clone()
        };
        beta.push((j, value));
    }
    Ok(BetaFamily {
        weight: w,
        beta,
        b_prime,
    })
}

pub fn beta_coefficients(p: u64, r: u64) -> Result<(BetaFamily, Vec<IdentityRecord>), BinomError> {
    let fam = build_beta(p, r)?;
    let w = fam.weight;
    let t = w.t;
    let row = binom_row(r);
    let id = SumFamily::Beta.id();
    let mut records = Vec::new();

    let cases = fam
        .beta
        .iter()
        .map(|(j, b)| (format!("j={j}"), b - &row[*j as usize], rat(0)))
        .collect();
    records.push(settle(id, 1, &w, Claim { modulus_exp: t, cases })?);

    let exact_zero = fam.moment(0).is_zero();
    let cases = (0..=2u64)
        .map(|i| (format!("i={i}"), fam.moment(i), rat(0)))
        .collect::<Vec<_>>();
    let mut rec = IdentityRecord {
        prop: id.into(),
        part: 2,
        p,
        r,
        modulus: format!("{p}^({}-i)", t + 2),
        pass: exact_zero,
        witness: if exact_zero {
            "sum beta_j = 0 exactly".into()
        } else {
            "sum beta_j != 0".into()
        },
    };
    for (i, (label, lhs, rhs)) in cases.into_iter().enumerate() {
        let (ok, l, rr) = congruent(p, t + 2 - i as u32, &lhs, &rhs)?;
        if !ok && rec.pass {
            rec.pass = false;
            rec.witness = format!("{label}: lhs = {l}, rhs = {rr}");
        }
    }
    records.push(rec);

    let p3 = BigInt::from(p).pow(3);
    let rhs = rat(&p3 * binom(r, 3)) / rat(BigInt::from(p - 1));
    records.push(settle(id, 3, &w, single(t + 3, "i=3", &p3 * fam.moment(3), rhs))?);

    let cases = (4..=r)
        .map(|i| (format!("i={i}"), p_pow(p, i) * fam.moment(i), rat(0)))
        .collect();
    records.push(settle(
        id,
        4,
        &w,
        Claim {
            modulus_exp: t + 3,
            cases,
        },
    )?);
    Ok((fam, records))
}

/// All identity checks for one weight of the given class.
pub fn records_for_weight(w: &ExceptionalWeight) -> Vec<IdentityRecord> {
    let mut out = Vec::new();
    let lemma = match w.b {
        3 => ValuationLemma::B3,
        2 => ValuationLemma::B2,
        _ => ValuationLemma::B1,
    };
    if let Ok(rec) = check_valuation_lemma(w.p, w.r, lemma) {
        out.push(rec);
    }
    for family in SumFamily::ALL.into_iter().filter(|f| f.weight_class() == w.b) {
        if family == SumFamily::Beta {
            match beta_coefficients(w.p, w.r) {
                Ok((_, recs)) => out.extend(recs),
                Err(BinomError::Unsupported(_)) => {}
                Err(e) => out.push(IdentityRecord {
                    prop: family.id().into(),
                    part: 0,
                    p: w.p,
                    r: w.r,
                    modulus: String::new(),
                    pass: false,
                    witness: e.to_string(),
                }),
            }
            continue;
        }
        for part in 1..=family.parts() {
            let rec = check_sum_proposition(w.p, w.r, family, part).unwrap_or_else(|e| IdentityRecord {
                prop: family.id().into(),
                part,
                p: w.p,
                r: w.r,
                modulus: String::new(),
                pass: false,
                witness: e.to_string(),
            });
            out.push(rec);
        }
    }
    out
}

/// Every weight r = b + n(p-1)p^t for b in {1,2,3} over the grid, checked in parallel
/// and sorted by (p, b, r, prop, part).
pub fn identity_grid(primes: &[u64], ns: &[u64], ts: &[u32], extra: &[(u64, u64)]) -> Vec<IdentityRecord> {
    let mut weights = Vec::new();
    for &p in primes {
        for &n in ns {
            for &t in ts {
                for b in 1..=3 {
                    if let Ok(w) = ExceptionalWeight::build(p, b, n, t) {
                        weights.push(w);
                    }
                }
            }
        }
    }
    for &(p, r) in extra {
        if let Ok(w) = ExceptionalWeight::from_r(p, 3, r) {
            weights.push(w);
        }
    }
    weights.sort_by_key(|w| (w.p, w.b, w.r));
    weights.dedup();
    let mut records: Vec<IdentityRecord> = weights.par_iter().flat_map(records_for_weight).collect();
    records.sort_by(|a, b| (a.p, a.r, &a.prop, a.part).cmp(&(b.p, b.r, &b.prop, b.part)));
    records
}

/// Number of carries when adding k and n-k in base p.
pub fn kummer_carries(p: u64, n: u64, k: u64) -> u64 {
    let (mut a, mut b) = (k, n - k);
    let mut carry = 0;
    let mut count = 0;
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = u64::from(s >= p);
        count += carry;
        a /= p;
        b /= p;
    }
    count
}

pub fn to_u64(x: &BigInt) -> Option<u64> {
    if x.is_negative() {
        None
    } else {
        x.to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_oracle(n: u64, k: u64) -> BigInt {
        let num: BigInt = (n - k + 1..=n).map(BigInt::from).product();
        let den: BigInt = (1..=k).map(BigInt::from).product();
        num / den
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binom(17, 0), BigInt::one());
        assert_eq!(binom(11, 3), product_oracle(11, 3));
        assert_eq!(binom(11, 3), BigInt::from(165));
        assert_eq!(binom(23, 7), product_oracle(23, 7));
        assert_eq!(binom(23, 7), BigInt::from(245157));
        assert_eq!(binom(5, 7), BigInt::zero());
        assert!(binom_checked(5, -1).is_none());
    }

    #[test]
    fn valuations_match_kummer() {
        assert_eq!(val_binom(5, 5, 1), 1);
        assert_eq!(val_binom(5, 23, 7), kummer_carries(5, 23, 7));
        assert_eq!(val_binom(5, 23, 7), 0);
        assert_eq!(val_binom(5, 11, 4), 1);
        assert_eq!(val_int(5, &BigInt::from(330)), Some(1));
    }

    #[test]
    fn class_sums_small_instance() {
        let spec = SumSpec {
            p: 5,
            r: 11,
            class: 3,
            weight: 0,
            range: SumRange::Open,
        };
        // j in {3, 7}
        let oracle = product_oracle(11, 3) + product_oracle(11, 7);
        assert_eq!(residue_class_sum(spec).value, oracle);
        assert_eq!(residue_class_sum(spec).value, BigInt::from(495));
        let spec = SumSpec { weight: 1, ..spec };
        assert_eq!(residue_class_sum(spec).value, BigInt::from(3 * 165 + 7 * 330));
        let spec = SumSpec { weight: 12, ..spec };
        assert!(residue_class_sum(spec).value.is_zero());
    }

    #[test]
    fn anchor_congruences() {
        let rec = check_sum_proposition(5, 11, SumFamily::J3Open, 1).unwrap();
        assert!(rec.pass, "{rec:?}");
        assert_eq!(rec.modulus, "5^3");
        assert!(rec.witness.contains("lhs = 120, rhs = 120"), "{}", rec.witness);
        let rec = check_sum_proposition(5, 11, SumFamily::J3Open, 2).unwrap();
        assert!(rec.pass);
        // 2805 = 5 mod 25 and -220 = 5 mod 25
        assert!(rec.witness.contains("lhs = 5, rhs = 5"), "{}", rec.witness);
    }

    #[test]
    fn rhs_closed_form_by_hand() {
        // (1/3)(985) mod 125 computed independently
        let inv3 = (1..125).find(|x| (3 * x) % 125 == 1).unwrap();
        assert_eq!((985 * inv3) % 125, 120);
    }

    #[test]
    fn valuation_lemmas() {
        assert!(check_valuation_lemma(5, 11, ValuationLemma::B3).unwrap().pass);
        assert!(check_valuation_lemma(5, 23, ValuationLemma::B3).unwrap().pass);
        assert!(matches!(
            check_valuation_lemma(5, 10, ValuationLemma::B3),
            Err(BinomError::WrongClass { .. })
        ));
    }

    #[test]
    fn upper_class_two_part_four() {
        let r = 3 + 2 * 6 * 7;
        let rec = check_sum_proposition(7, r, SumFamily::J2AboveTwo, 4).unwrap();
        assert!(rec.pass, "{rec:?}");
        // direct summation oracle
        let direct: BigInt = (3..r)
            .filter(|j| j % 6 == 2)
            .map(|j| product_oracle(j, 3) * product_oracle(r, j))
            .sum();
        let m = BigInt::from(7).pow(2);
        let rhs = rational_mod(&ratio(product_oracle(r, 3), 6), &m, 7).unwrap();
        assert_eq!(direct.mod_floor(&m), rhs);
    }

    #[test]
    fn beta_family() {
        let (fam, records) = beta_coefficients(5, 23).unwrap();
        assert!(fam.moment(0).is_zero());
        for rec in &records {
            assert!(rec.pass, "{rec:?}");
        }
        for (j, b) in &fam.beta {
            let diff: BigInt = b - binom(23, *j as i64);
            assert!((diff % BigInt::from(5)).is_zero(), "j = {j}");
        }
        let p3 = BigInt::from(125);
        let lhs = &p3 * fam.moment(3);
        let rhs = rational_mod(&ratio(&p3 * binom(23, 3), 4), &BigInt::from(5).pow(4), 5).unwrap();
        assert_eq!(lhs.mod_floor(&BigInt::from(5).pow(4)), rhs);
    }

    #[test]
    fn beta_needs_room() {
        assert!(matches!(build_beta(5, 11), Err(BinomError::Unsupported(_))));
    }

    #[test]
    fn family_ids_round_trip() {
        for f in SumFamily::ALL {
            assert_eq!(SumFamily::parse(f.id()), Some(f));
        }
    }
}

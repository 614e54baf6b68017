use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::binom::binom;
use crate::padic::{ExtScalar, HalfInt, Prime};

use super::ZigzagError;

/// Half-integral slopes with an exceptional weight class handled here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Slope {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "3/2")]
    ThreeHalves,
}

impl Slope {
    pub fn parse(text: &str) -> Option<Slope> {
        match text.trim() {
            "1/2" | "0.5" => Some(Slope::Half),
            "1" => Some(Slope::One),
            "3/2" | "1.5" => Some(Slope::ThreeHalves),
            _ => None,
        }
    }

    /// b = 2v, the exceptional class of r mod (p-1).
    pub fn b(self) -> u64 {
        match self {
            Slope::Half => 1,
            Slope::One => 2,
            Slope::ThreeHalves => 3,
        }
    }

    pub fn pi_units(self) -> i64 {
        self.b() as i64
    }

    /// Smallest r the cited results cover.
    fn min_r(self) -> u64 {
        self.b() + 1
    }

    /// The integer N with c = (a_p^2 - N p^b) / (p a_p).
    fn numerator_constant(self, r: u64) -> BigInt {
        match self {
            Slope::Half => BigInt::from(r),
            Slope::One => binom(r, 2),
            Slope::ThreeHalves => BigInt::from(r - 2) * binom(r - 1, 2),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slope::Half => "1/2",
            Slope::One => "1",
            Slope::ThreeHalves => "3/2",
        })
    }
}

/// A valuation that is either exact or only bounded below by the precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Valuation {
    Exact(HalfInt),
    AtLeast(HalfInt),
}

impl Valuation {
    pub fn of(x: &ExtScalar) -> Valuation {
        match x.vpi() {
            Some(v) => Valuation::Exact(HalfInt(v)),
            None => Valuation::AtLeast(HalfInt(x.abs_prec())),
        }
    }

    pub fn exact(self) -> Option<HalfInt> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Compare against a bound when the precision decides it.
    pub fn cmp_to(self, bound: HalfInt) -> Option<Ordering> {
        match self {
            Valuation::Exact(v) => Some(v.cmp(&bound)),
            Valuation::AtLeast(v) if v > bound => Some(Ordering::Greater),
            Valuation::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Position of tau relative to t, t + 1/2 and t + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Regime {
    #[serde(rename = "tau<t")]
    BelowT,
    #[serde(rename = "tau=t")]
    AtT,
    #[serde(rename = "t<tau<t+1/2")]
    BelowHalf,
    #[serde(rename = "tau=t+1/2")]
    AtHalf,
    #[serde(rename = "t+1/2<tau<t+1")]
    BelowOne,
    #[serde(rename = "tau=t+1")]
    AtOne,
    #[serde(rename = "tau>t+1")]
    AboveOne,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::BelowT,
        Regime::AtT,
        Regime::BelowHalf,
        Regime::AtHalf,
        Regime::BelowOne,
        Regime::AtOne,
        Regime::AboveOne,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Regime::BelowT => "tau<t",
            Regime::AtT => "tau=t",
            Regime::BelowHalf => "t<tau<t+1/2",
            Regime::AtHalf => "tau=t+1/2",
            Regime::BelowOne => "t+1/2<tau<t+1",
            Regime::AtOne => "tau=t+1",
            Regime::AboveOne => "tau>t+1",
        }
    }

    pub fn parse(text: &str) -> Option<Regime> {
        let norm: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        Regime::ALL.into_iter().find(|r| r.label() == norm)
    }

    /// Locate tau, measured in pi-units against t.
    pub fn locate(tau: Valuation, t: u32) -> Option<Regime> {
        let t2 = 2 * t as i64;
        let bounds = [HalfInt(t2), HalfInt(t2 + 1), HalfInt(t2 + 2)];
        let mut out = Regime::AboveOne;
        for (i, b) in bounds.into_iter().enumerate() {
            match tau.cmp_to(b)? {
                Ordering::Less => {
                    out = Regime::ALL[2 * i];
                    break;
                }
                Ordering::Equal => {
                    out = Regime::ALL[2 * i + 1];
                    break;
                }
                Ordering::Greater => {}
            }
        }
        Some(out)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationCheck {
    pub statement: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantBundle {
    pub p: u64,
    pub r: u64,
    pub slope: Slope,
    pub a_p: ExtScalar,
    pub b: u64,
    pub t: u32,
    /// r = b + n (p-1) p^t.
    pub n: u64,
    pub c: ExtScalar,
    pub tau: Valuation,
    pub c_tilde: Option<ExtScalar>,
    pub tau_tilde: Option<Valuation>,
    pub regime: Regime,
    pub implications: Vec<ImplicationCheck>,
}

fn vp_u64(p: u64, mut x: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// (a^2 - n p^b) / (p a).
fn slope_constant(a_p: &ExtScalar, n: &BigInt, b: i64) -> Result<ExtScalar, ZigzagError> {
    let prime = a_p.prime();
    let num = *a_p * *a_p - ExtScalar::from_bigint(prime, n).shift(2 * b);
    Ok(num.div(&a_p.shift(2))?)
}

/// Check the four implications relating tau and tau~ against t + 1/2.
fn lemma51(tau: Valuation, tau_tilde: Valuation, t: u32) -> Vec<ImplicationCheck> {
    let half = HalfInt(2 * t as i64 + 1);
    let mut out = Vec::new();
    let mut pair = |x: Valuation, y: Valuation, small: &'static str, large: &'static str| match x.cmp_to(half) {
        Some(Ordering::Less) => out.push(ImplicationCheck {
            statement: small,
            holds: x.exact() == y.exact() && y.exact().is_some(),
        }),
        Some(_) => {
            let holds = matches!(y.cmp_to(half), Some(Ordering::Greater | Ordering::Equal))
                || matches!(y, Valuation::AtLeast(v) if v >= half);
            out.push(ImplicationCheck {
                statement: large,
                holds,
            });
        }
        None => {}
    };
    pair(
        tau_tilde,
        tau,
        "tau~ < t+1/2 implies tau~ = tau",
        "tau~ >= t+1/2 implies tau >= t+1/2",
    );
    pair(
        tau,
        tau_tilde,
        "tau < t+1/2 implies tau = tau~",
        "tau >= t+1/2 implies tau~ >= t+1/2",
    );
    out
}

/// Invariants for an exceptional weight at the given slope.
pub fn compute_slope_invariants(p: u64, r: u64, a_p: &ExtScalar, slope: Slope) -> Result<InvariantBundle, ZigzagError> {
    let prime = Prime::new(p)?;
    if p < 5 {
        return Err(ZigzagError::Precondition(format!("p = {p} must be at least 5")));
    }
    if a_p.prime() != prime {
        return Err(ZigzagError::Precondition("a_p lives over a different prime".into()));
    }
    let b = slope.b();
    if a_p.vpi() != Some(slope.pi_units()) {
        return Err(ZigzagError::Precondition(format!(
            "a_p = {a_p} does not have slope {slope}"
        )));
    }
    if r < slope.min_r() {
        return Err(ZigzagError::Precondition(format!("r = {r} must exceed b = {b}")));
    }
    if !(r - b).is_multiple_of(p - 1) {
        return Err(ZigzagError::OutOfScope(format!(
            "r = {r} is not congruent to {b} mod {}: weight not exceptional",
            p - 1
        )));
    }
    let t = vp_u64(p, r - b);
    let n = (r - b) / ((p - 1) * p.pow(t));
    let c = slope_constant(a_p, &slope.numerator_constant(r), b as i64)?;
    let tau = Valuation::of(&c);
    let (c_tilde, tau_tilde, implications) = if slope == Slope::ThreeHalves {
        let ct = slope_constant(a_p, &binom(r, 3), 3)?;
        let tt = Valuation::of(&ct);
        let checks = lemma51(tau, tt, t);
        if let Some(bad) = checks.iter().find(|c| !c.holds) {
            return Err(ZigzagError::Lemma51(format!(
                "{} fails: tau = {tau}, tau~ = {tt}, t = {t}",
                bad.statement
            )));
        }
        (Some(ct), Some(tt), checks)
    } else {
        (None, None, Vec::new())
    };
    let regime = Regime::locate(tau, t).ok_or_else(|| {
        ZigzagError::Precision(format!(
            "c = {c} is known only modulo pi^{}; cannot place tau against t = {t}",
            c.abs_prec()
        ))
    })?;
    Ok(InvariantBundle {
        p,
        r,
        slope,
        a_p: *a_p,
        b,
        t,
        n,
        c,
        tau,
        c_tilde,
        tau_tilde,
        regime,
        implications,
    })
}

/// Slope 3/2 invariants.
pub fn compute_invariants(p: u64, r: u64, a_p: &ExtScalar) -> Result<InvariantBundle, ZigzagError> {
    compute_slope_invariants(p, r, a_p, Slope::ThreeHalves)
}

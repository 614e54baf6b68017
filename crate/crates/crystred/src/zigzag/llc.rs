use std::fmt;

use serde::Serialize;

use crate::symmod::linalg;

use super::ZigzagError;

/// A scalar of F_p-bar: an element of F_p, or a root of X^2 - trace X + 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lambda {
    Value {
        value: u64,
    },
    /// Both roots are listed when the polynomial splits over F_p.
    RootOf {
        trace: u64,
        roots: Vec<u64>,
    },
}

impl Lambda {
    pub fn value(x: u64) -> Lambda {
        Lambda::Value { value: x }
    }

    pub fn root_of(p: u64, trace: u64) -> Lambda {
        let trace = trace % p;
        let roots = (1..p).filter(|&x| (x * x + 1) % p == trace * x % p).collect();
        Lambda::RootOf { trace, roots }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Lambda::Value { value: 0 })
    }

    /// lam^{-1}. A root of X^2 - dX + 1 inverts to the other root.
    pub fn inverse(&self, p: u64) -> Result<Lambda, ZigzagError> {
        match self {
            Lambda::Value { value: 0 } => Err(ZigzagError::Malformed("0 has no inverse".into())),
            Lambda::Value { value } => Ok(Lambda::value(linalg::inv(p, *value))),
            other => Ok(other.clone()),
        }
    }

    /// lam * nu for nu in F_p^x; roots of a quadratic only take nu = 1.
    fn twisted(&self, p: u64, nu: u64) -> Result<Lambda, ZigzagError> {
        match self {
            Lambda::Value { value } => Ok(Lambda::value(value * nu % p)),
            other if nu == 1 => Ok(other.clone()),
            _ => Err(ZigzagError::Malformed("unramified twist of a quadratic scalar".into())),
        }
    }

    /// Does lam satisfy lam + 1/lam = trace? Checked on listed roots.
    pub fn satisfies_min_poly(&self, p: u64) -> bool {
        match self {
            Lambda::Value { value } => *value != 0,
            Lambda::RootOf { trace, roots } => {
                roots.len() <= 2 && roots.iter().all(|&x| (x * x + 1) % p == trace * x % p)
            }
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Value { value } => write!(f, "{value}"),
            Lambda::RootOf { trace, .. } => write!(f, "root of X^2 - {trace}X + 1"),
        }
    }
}

/// eta = mu_nu * omega^e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Twist {
    pub unramified: u64,
    pub omega: u64,
}

impl Twist {
    pub fn trivial() -> Twist {
        Twist {
            unramified: 1,
            omega: 0,
        }
    }

    pub fn omega(e: u64) -> Twist {
        Twist {
            unramified: 1,
            omega: e,
        }
    }

    fn times_omega(self, p: u64, e: u64) -> Twist {
        Twist {
            unramified: self.unramified,
            omega: (self.omega + e) % (p - 1),
        }
    }
}

/// Galois side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionDescriptor {
    /// ind(omega_2^exponent) (x) twist.
    Irreducible { exponent: u64, twist: Twist },
    /// (mu_lam omega^a + mu_{1/lam} omega^b) (x) twist.
    Reducible {
        lambda: Lambda,
        a: u64,
        b: u64,
        twist: Twist,
    },
}

/// pi(r, lam, eta) = ind V_r / (T - lam) (x) eta(det).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SmoothRepDescriptor {
    pub r: u64,
    pub lambda: Lambda,
    pub eta: Twist,
    /// (r, lam) = (0, +-1) or (p-1, +-1): not irreducible.
    pub corner: bool,
}

impl SmoothRepDescriptor {
    pub fn new(p: u64, r: u64, lambda: Lambda, eta: Twist) -> Self {
        let pm1 = matches!(lambda, Lambda::Value { value } if value == 1 || value == p - 1);
        SmoothRepDescriptor {
            r,
            corner: pm1 && (r == 0 || r == p - 1),
            lambda,
            eta,
        }
    }

    /// Representative used for comparison: pi(r, 0, eta) = pi(p-1-r, 0, eta omega^r),
    /// and supersingulars ignore the sign of the unramified twist.
    pub fn canonical(&self, p: u64) -> SmoothRepDescriptor {
        if !self.lambda.is_zero() {
            return self.clone();
        }
        let flip = |d: &SmoothRepDescriptor| {
            let nu = d.eta.unramified.min(p - d.eta.unramified);
            SmoothRepDescriptor {
                eta: Twist {
                    unramified: nu,
                    omega: d.eta.omega,
                },
                ..d.clone()
            }
        };
        let a = flip(self);
        let b = flip(&SmoothRepDescriptor::new(
            p,
            p - 1 - self.r,
            self.lambda.clone(),
            self.eta.times_omega(p, self.r),
        ));
        a.min(b)
    }
}

impl fmt::Display for SmoothRepDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pi({}, {}, mu_{} omega^{})",
            self.r, self.lambda, self.eta.unramified, self.eta.omega
        )
    }
}

/// Exponent of ind(omega_2^c) (x) omega^e modulo p^2 - 1 up to Frobenius.
fn irreducible_key(p: u64, c: u64, e: u64) -> u64 {
    let m = p * p - 1;
    let c = (c + e * (p + 1)) % m;
    c.min(c * p % m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Galois to smooth.
pub fn llc_forward(p: u64, x: &ReductionDescriptor) -> Result<Vec<SmoothRepDescriptor>, ZigzagError> {
    match x {
        ReductionDescriptor::Irreducible { exponent, twist } => {
            if exponent % (p + 1) == 0 {
                return Err(ZigzagError::Malformed(format!("p + 1 divides the exponent {exponent}")));
            }
            let key = irreducible_key(p, *exponent, twist.omega);
            for e in 0..p - 1 {
                for r in 0..p {
                    if irreducible_key(p, r + 1, e) == key {
                        let eta = Twist {
                            unramified: twist.unramified,
                            omega: e,
                        };
                        return Ok(vec![SmoothRepDescriptor::new(p, r, Lambda::value(0), eta)]);
                    }
                }
            }
            Err(ZigzagError::Malformed(format!(
                "no normal form for ind(omega_2^{exponent})"
            )))
        }
        ReductionDescriptor::Reducible { lambda, a, b, twist } => {
            if lambda.is_zero() {
                return Err(ZigzagError::Malformed("reducible descriptor needs lambda != 0".into()));
            }
            let pm1 = p - 1;
            // (mu_lam omega^{r+1} + mu_{1/lam}) (x) eta omega^b
            let r = ((a + 2 * pm1 - b - 1) % pm1 + pm1) % pm1;
            let eta = twist.times_omega(p, *b);
            let r2 = (2 * pm1 + p - 3 - r) % pm1;
            let mut out = vec![
                SmoothRepDescriptor::new(p, r, lambda.clone(), eta),
                SmoothRepDescriptor::new(p, r2, lambda.inverse(p)?, eta.times_omega(p, r + 1)),
            ];
            out.sort();
            Ok(out)
        }
    }
}

/// Smooth to Galois; the input must be an LLC image.
pub fn llc_inverse(p: u64, pieces: &[SmoothRepDescriptor]) -> Result<ReductionDescriptor, ZigzagError> {
    let candidate = match pieces {
        [one] if one.lambda.is_zero() => ReductionDescriptor::Irreducible {
            exponent: one.r + 1,
            twist: one.eta,
        },
        [first, _] if !first.lambda.is_zero() => ReductionDescriptor::Reducible {
            lambda: first.lambda.clone(),
            a: (first.r + 1) % (p - 1),
            b: 0,
            twist: first.eta,
        },
        _ => {
            return Err(ZigzagError::NotInImage(format!(
                "{} smooth pieces do not form an image",
                pieces.len()
            )))
        }
    };
    if !same_smooth(p, &llc_forward(p, &candidate)?, pieces) {
        return Err(ZigzagError::NotInImage("pieces are not dual to each other".into()));
    }
    Ok(candidate)
}

/// Dispatch on direction for either kind of descriptor.
pub fn llc_map(
    p: u64,
    direction: Direction,
    galois: Option<&ReductionDescriptor>,
    smooth: &[SmoothRepDescriptor],
) -> Result<LlcImage, ZigzagError> {
    match (direction, galois) {
        (Direction::Forward, Some(x)) => Ok(LlcImage::Smooth(llc_forward(p, x)?)),
        (Direction::Inverse, _) => Ok(LlcImage::Galois(llc_inverse(p, smooth)?)),
        (Direction::Forward, None) => Err(ZigzagError::Malformed("forward map needs a Galois descriptor".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "side", content = "value", rename_all = "snake_case")]
pub enum LlcImage {
    Smooth(Vec<SmoothRepDescriptor>),
    Galois(ReductionDescriptor),
}

/// Multiset equality up to the supersingular identifications.
pub fn same_smooth(p: u64, x: &[SmoothRepDescriptor], y: &[SmoothRepDescriptor]) -> bool {
    let norm = |v: &[SmoothRepDescriptor]| {
        let mut out: Vec<SmoothRepDescriptor> = v.iter().map(|d| d.canonical(p)).collect();
        out.sort();
        out
    };
    norm(x) == norm(y)
}

/// Equality of Galois descriptors as representations.
pub fn same_galois(p: u64, x: &ReductionDescriptor, y: &ReductionDescriptor) -> Result<bool, ZigzagError> {
    use ReductionDescriptor::*;
    Ok(match (x, y) {
        (
            Irreducible {
                exponent: c1,
                twist: e1,
            },
            Irreducible {
                exponent: c2,
                twist: e2,
            },
        ) => {
            irreducible_key(p, *c1, e1.omega) == irreducible_key(p, *c2, e2.omega)
                && e1.unramified.min(p - e1.unramified) == e2.unramified.min(p - e2.unramified)
        }
        (Reducible { .. }, Reducible { .. }) => {
            let chars = |d: &ReductionDescriptor| -> Result<Vec<(Lambda, u64)>, ZigzagError> {
                let Reducible { lambda, a, b, twist } = d else {
                    unreachable!()
                };
                let pm1 = p - 1;
                let mut v = vec![
                    (lambda.twisted(p, twist.unramified)?, (a + twist.omega) % pm1),
                    (
                        lambda.inverse(p)?.twisted(p, twist.unramified)?,
                        (b + twist.omega) % pm1,
                    ),
                ];
                v.sort();
                Ok(v)
            };
            chars(x)? == chars(y)?
        }
        _ => false,
    })
}

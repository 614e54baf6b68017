use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::padic::{ExtScalar, Prime};

use super::{Gl2, HeckeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    /// (p^m lam; 0 1)
    Zero,
    /// (1 0; p lam p^{m+1})
    One,
}

/// Canonical representative of a vertex of the tree. The digit word
/// (l_0, ..., l_{m-1}) stands for lam = sum [l_i] p^i.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeVertex {
    pub side: Side,
    pub digits: Vec<u64>,
}

impl TreeVertex {
    pub fn origin() -> Self {
        TreeVertex {
            side: Side::Zero,
            digits: Vec::new(),
        }
    }

    pub fn alpha() -> Self {
        TreeVertex {
            side: Side::One,
            digits: Vec::new(),
        }
    }

    pub fn side0(digits: Vec<u64>) -> Self {
        TreeVertex {
            side: Side::Zero,
            digits,
        }
    }

    pub fn side1(digits: Vec<u64>) -> Self {
        TreeVertex {
            side: Side::One,
            digits,
        }
    }

    /// g0_{n,0}: n zero digits.
    pub fn spine(n: usize) -> Self {
        Self::side0(vec![0; n])
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// Distance from the origin.
    pub fn radius(&self) -> usize {
        match self.side {
            Side::Zero => self.depth(),
            Side::One => self.depth() + 1,
        }
    }

    pub fn is_origin(&self) -> bool {
        self.side == Side::Zero && self.digits.is_empty()
    }

    pub fn check(&self, p: u64) -> Result<(), HeckeError> {
        match self.digits.iter().find(|&&d| d >= p) {
            Some(d) => Err(HeckeError::BadVertex(format!("digit {d} out of range for p = {p}"))),
            None => Ok(()),
        }
    }

    /// lam = sum [l_i] p^i.
    pub fn lambda(&self, prime: Prime) -> ExtScalar {
        let mut acc = ExtScalar::zero(prime);
        for (i, &d) in self.digits.iter().enumerate() {
            acc = acc + ExtScalar::teichmuller(prime, d).shift(2 * i as i64);
        }
        acc
    }

    pub fn matrix(&self, prime: Prime) -> Gl2 {
        let m = self.depth() as i64;
        let lam = self.lambda(prime);
        let one = ExtScalar::one(prime);
        let zero = ExtScalar::zero(prime);
        match self.side {
            Side::Zero => Gl2::new(ExtScalar::pi_pow(prime, 2 * m), lam, zero, one),
            Side::One => Gl2::new(one, zero, lam.shift(2), ExtScalar::pi_pow(prime, 2 * (m + 1))),
        }
    }

    /// One step further out on side 0: append a digit.
    pub fn child(&self, mu: u64) -> Self {
        let mut digits = self.digits.clone();
        digits.push(mu);
        TreeVertex {
            side: self.side,
            digits,
        }
    }

    /// All vertices at distance at most `radius` from the origin.
    pub fn ball(p: u64, radius: usize) -> Vec<TreeVertex> {
        let mut out = vec![TreeVertex::origin()];
        let mut shell0 = vec![TreeVertex::origin()];
        let mut shell1: Vec<TreeVertex> = Vec::new();
        for step in 1..=radius {
            shell0 = shell0.iter().flat_map(|v| (0..p).map(move |mu| v.child(mu))).collect();
            shell1 = if step == 1 {
                vec![TreeVertex::alpha()]
            } else {
                shell1.iter().flat_map(|v| (0..p).map(move |mu| v.child(mu))).collect()
            };
            out.extend(shell0.iter().cloned());
            out.extend(shell1.iter().cloned());
        }
        out
    }
}

impl Ord for TreeVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.side, self.depth(), &self.digits).cmp(&(other.side, other.depth(), &other.digits))
    }
}

impl PartialOrd for TreeVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.side, self.depth()) {
            (Side::Zero, 0) => write!(f, "1"),
            (Side::One, 0) => write!(f, "alpha"),
            (side, m) => {
                let s = if side == Side::Zero { 0 } else { 1 };
                let ds: Vec<String> = self.digits.iter().map(u64::to_string).collect();
                write!(f, "g{s}_{{{m},[{}]}}", ds.join(","))
            }
        }
    }
}

/// Column-reduce g to p^e (p^m beta; 0 1) k and return (m, beta).
fn upper_form(g: &Gl2) -> Result<(i64, ExtScalar), HeckeError> {
    let Gl2 {
        mut a,
        mut b,
        mut c,
        mut d,
    } = *g;
    if d.is_zero() && c.is_zero() {
        return Err(HeckeError::Singular);
    }
    let swap = match (c.vpi(), d.vpi()) {
        (Some(_), None) => true,
        (Some(vc), Some(vd)) => vc < vd,
        _ => false,
    };
    if swap {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut c, &mut d);
    }
    if !c.is_exact_zero() {
        let ratio = c.div(&d)?;
        a = a - b * ratio;
    }
    let (Some(f), Some(e)) = (a.vpi(), d.vpi()) else {
        return Err(HeckeError::Singular);
    };
    if f % 2 != 0 || e % 2 != 0 {
        return Err(HeckeError::NotInQp(format!("{g:?}")));
    }
    Ok(((f - e) / 2, b.div(&d)?))
}

/// Teichmuller digits of an integral beta modulo p^m.
fn teich_digits(prime: Prime, beta: ExtScalar, m: i64) -> Result<Vec<u64>, HeckeError> {
    let mut rest = beta;
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let d = rest.residue()?;
        out.push(d);
        rest = (rest - ExtScalar::teichmuller(prime, d)).shift(-2);
    }
    Ok(out)
}

fn integral(x: &ExtScalar) -> Result<bool, HeckeError> {
    Ok(x.divisible_by_pi(0)?)
}

/// Write g = rep . z . k with rep canonical, z central and k in GL_2(Z_p).
pub fn coset_normalize(g: &Gl2) -> Result<(TreeVertex, Gl2), HeckeError> {
    let prime = g.prime();
    let (m, beta) = upper_form(g)?;
    let vertex = if m >= 0 && integral(&beta)? {
        TreeVertex::side0(teich_digits(prime, beta, m)?)
    } else {
        // g1_{m,lam} = alpha w g0_{m,lam} w
        let moved = Gl2::weyl(prime) * Gl2::alpha(prime).inv()? * *g;
        let (m1, beta1) = upper_form(&moved)?;
        if m1 < 0 || !integral(&beta1)? {
            return Err(HeckeError::Internal(format!("no canonical vertex for {g:?}")));
        }
        TreeVertex::side1(teich_digits(prime, beta1, m1)?)
    };
    let k = vertex.matrix(prime).inv()? * *g;
    let vdet = k.det().vpi().ok_or(HeckeError::Singular)?;
    if vdet % 4 != 0 {
        return Err(HeckeError::Internal(format!("cofactor {k:?} is not in KZ")));
    }
    let k0 = k.shift(-vdet / 2);
    if !k0.in_k() {
        return Err(HeckeError::Internal(format!("cofactor {k0:?} is not in KZ")));
    }
    Ok((vertex, k0))
}

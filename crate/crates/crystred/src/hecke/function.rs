use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::padic::{ExtScalar, Prime};

use super::{coset_normalize, ExtPoly, Gl2, HeckeError, Side, TreeVertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeOp {
    T,
    TPlus,
    TMinus,
}

impl HeckeOp {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "T" | "t" => Some(HeckeOp::T),
            "T+" | "t+" | "plus" => Some(HeckeOp::TPlus),
            "T-" | "t-" | "minus" => Some(HeckeOp::TMinus),
            _ => None,
        }
    }
}

/// Finitely supported function on the tree with values in Sym^r over E,
/// i.e. a finite sum of [g, v].
#[derive(Clone, PartialEq, Eq)]
pub struct TreeFunction {
    prime: Prime,
    r: usize,
    terms: BTreeMap<TreeVertex, ExtPoly>,
}

impl TreeFunction {
    pub fn new(prime: Prime, r: usize) -> Self {
        TreeFunction {
            prime,
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(vertex: TreeVertex, value: ExtPoly) -> Self {
        let mut f = Self::new(value.prime(), value.degree());
        f.add_term(vertex, value);
        f
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeVertex, &ExtPoly)> {
        self.terms.iter()
    }

    pub fn get(&self, vertex: &TreeVertex) -> Option<&ExtPoly> {
        self.terms.get(vertex)
    }

    pub fn support(&self) -> impl Iterator<Item = &TreeVertex> {
        self.terms.keys()
    }

    /// Add [vertex, value]; exact zeros are dropped.
    pub fn add_term(&mut self, vertex: TreeVertex, value: ExtPoly) {
        assert_eq!(value.degree(), self.r, "degree mismatch");
        let merged = match self.terms.remove(&vertex) {
            Some(old) => old.add(&value),
            None => value,
        };
        if !merged.is_exact_zero() {
            self.terms.insert(vertex, merged);
        }
    }

    pub fn add(&self, other: &TreeFunction) -> TreeFunction {
        let mut out = self.clone();
        for (v, val) in &other.terms {
            out.add_term(v.clone(), val.clone());
        }
        out
    }

    pub fn sub(&self, other: &TreeFunction) -> TreeFunction {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TreeFunction {
        self.map_values(|v| v.neg())
    }

    pub fn scale(&self, s: &ExtScalar) -> TreeFunction {
        self.map_values(|v| v.scale(s))
    }

    fn map_values(&self, f: impl Fn(&ExtPoly) -> ExtPoly) -> TreeFunction {
        let mut out = Self::new(self.prime, self.r);
        for (v, val) in &self.terms {
            out.add_term(v.clone(), f(val));
        }
        out
    }

    /// Lower bound for the pi-valuation of every coefficient.
    pub fn min_vpi(&self) -> i64 {
        self.terms.values().map(ExtPoly::min_vpi).min().unwrap_or(i64::MAX)
    }

    /// g . f, where g . [h, v] = [gh, v].
    pub fn translate(&self, g: &Gl2) -> Result<TreeFunction, HeckeError> {
        let mut out = Self::new(self.prime, self.r);
        for (x, val) in &self.terms {
            let (rep, k) = coset_normalize(&(*g * x.matrix(self.prime)))?;
            out.add_term(rep, val.act(&k)?);
        }
        Ok(out)
    }

    /// g0_{1,[mu]} . f. On side 0 this prepends the digit mu.
    pub fn translate_child(&self, mu: u64) -> Result<TreeFunction, HeckeError> {
        if self.terms.keys().all(|x| x.side == Side::Zero) {
            let mut out = Self::new(self.prime, self.r);
            for (x, val) in &self.terms {
                let mut digits = Vec::with_capacity(x.depth() + 1);
                digits.push(mu);
                digits.extend_from_slice(&x.digits);
                out.add_term(TreeVertex::side0(digits), val.clone());
            }
            return Ok(out);
        }
        self.translate(&Gl2::child(self.prime, mu))
    }

    pub fn hecke(&self, op: HeckeOp) -> Result<TreeFunction, HeckeError> {
        let pieces: Vec<Vec<(TreeVertex, ExtPoly)>> = self
            .terms
            .par_iter()
            .map(|(x, val)| {
                let mut out = Vec::new();
                if op != HeckeOp::TMinus {
                    out.extend(plus_terms(self.prime, x, val)?);
                }
                if op != HeckeOp::TPlus {
                    out.push(minus_term(self.prime, x, val)?);
                }
                Ok(out)
            })
            .collect::<Result<_, HeckeError>>()?;
        let mut out = Self::new(self.prime, self.r);
        for (v, val) in pieces.into_iter().flatten() {
            out.add_term(v, val);
        }
        Ok(out)
    }

    /// (T - a) f.
    pub fn hecke_minus_scalar(&self, a: &ExtScalar) -> Result<TreeFunction, HeckeError> {
        Ok(self.hecke(HeckeOp::T)?.sub(&self.scale(a)))
    }
}

/// T+[g, v] = sum_lam [g g0_{1,[lam]}, v(X, -[lam]X + pY)].
pub(super) fn plus_terms(
    prime: Prime,
    x: &TreeVertex,
    val: &ExtPoly,
) -> Result<Vec<(TreeVertex, ExtPoly)>, HeckeError> {
    let p = prime.p();
    (0..p)
        .map(|mu| {
            let img = val.outward(&ExtScalar::teichmuller(prime, mu));
            if x.side == Side::Zero {
                Ok((x.child(mu), img))
            } else {
                let (rep, k) = coset_normalize(&(x.matrix(prime) * Gl2::child(prime, mu)))?;
                Ok((rep, img.act(&k)?))
            }
        })
        .collect()
}

/// T-[g, v] = [g alpha, v(pX, Y)].
pub(super) fn minus_term(prime: Prime, x: &TreeVertex, val: &ExtPoly) -> Result<(TreeVertex, ExtPoly), HeckeError> {
    let img = val.inward();
    match (x.side, x.digits.split_last()) {
        (Side::Zero, None) => Ok((TreeVertex::alpha(), img)),
        (Side::Zero, Some((&last, rest))) => Ok((
            TreeVertex::side0(rest.to_vec()),
            img.shear(&ExtScalar::teichmuller(prime, last)),
        )),
        (Side::One, _) => {
            let (rep, k) = coset_normalize(&(x.matrix(prime) * Gl2::alpha(prime)))?;
            Ok((rep, img.act(&k)?))
        }
    }
}

impl fmt::Debug for TreeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TreeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(v, val)| format!("[{v}, {val}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

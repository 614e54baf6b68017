use std::collections::BTreeMap;
use std::fmt;

use crate::padic::Prime;
use crate::symmod::{linalg, FpPoly, GammaElement, JhFactor, QuotientBasis};

use super::{coset_normalize, Gl2, HeckeError, Side, TreeFunction, TreeVertex};

/// Finitely supported function on the tree with values in V_m (x) det^twist over F_p.
#[derive(Clone, PartialEq, Eq)]
pub struct FpTreeFunction {
    p: u64,
    m: usize,
    twist: u64,
    terms: BTreeMap<TreeVertex, FpPoly>,
}

impl FpTreeFunction {
    pub fn new(p: u64, m: usize, twist: u64) -> Self {
        FpTreeFunction {
            p,
            m,
            twist,
            terms: BTreeMap::new(),
        }
    }

    pub fn for_factor(p: u64, factor: JhFactor) -> Self {
        Self::new(p, factor.m, factor.twist)
    }

    pub fn single(p: u64, twist: u64, vertex: TreeVertex, value: FpPoly) -> Self {
        let mut f = Self::new(p, value.degree(), twist);
        f.add_term(vertex, value);
        f
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn twist(&self) -> u64 {
        self.twist
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeVertex, &FpPoly)> {
        self.terms.iter()
    }

    pub fn get(&self, vertex: &TreeVertex) -> Option<&FpPoly> {
        self.terms.get(vertex)
    }

    pub fn add_term(&mut self, vertex: TreeVertex, value: FpPoly) {
        assert_eq!(value.degree(), self.m, "degree mismatch");
        let merged = match self.terms.remove(&vertex) {
            Some(old) => old.add(&value),
            None => value,
        };
        if !merged.is_zero() {
            self.terms.insert(vertex, merged);
        }
    }

    pub fn add(&self, other: &FpTreeFunction) -> FpTreeFunction {
        let mut out = self.clone();
        for (v, val) in &other.terms {
            out.add_term(v.clone(), val.clone());
        }
        out
    }

    pub fn scale(&self, c: u64) -> FpTreeFunction {
        let mut out = Self::new(self.p, self.m, self.twist);
        for (v, val) in &self.terms {
            out.add_term(v.clone(), val.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &FpTreeFunction) -> FpTreeFunction {
        self.add(&other.scale(self.p - 1))
    }

    /// Value of k in KZ acting on V_m (x) det^twist, centre stripped.
    fn act(&self, k: &Gl2, value: &FpPoly) -> Result<FpPoly, HeckeError> {
        let [a, b, c, d] = k.entries().map(|x| x.residue());
        let g = GammaElement::new(self.p, a?, b?, c?, d?).map_err(|e| HeckeError::Internal(e.to_string()))?;
        Ok(value.act(&g).scale(linalg::pow(self.p, g.det(), self.twist)))
    }

    /// g . f, where g . [h, v] = [gh, v].
    pub fn translate(&self, g: &Gl2) -> Result<FpTreeFunction, HeckeError> {
        let prime = g.prime();
        let mut out = Self::new(self.p, self.m, self.twist);
        for (x, val) in &self.terms {
            let (rep, k) = coset_normalize(&(*g * x.matrix(prime)))?;
            out.add_term(rep, self.act(&k, val)?);
        }
        Ok(out)
    }

    /// The Hecke operator T = T+ + T- reduced mod p.
    pub fn hecke(&self) -> Result<FpTreeFunction, HeckeError> {
        let p = self.p;
        let prime = Prime::new(p)?;
        let mut out = Self::new(p, self.m, self.twist);
        for (x, val) in &self.terms {
            // T+: v(X, -mu X) is a multiple of X^m
            for mu in 0..p {
                let neg = p - mu;
                let s = val
                    .coeffs
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, c)| (acc + c * linalg::pow(p, neg, j as u64)) % p);
                if s == 0 {
                    continue;
                }
                let img = FpPoly::monomial(p, self.m, 0).scale(s);
                if x.side == Side::Zero {
                    out.add_term(x.child(mu), img);
                } else {
                    let (rep, k) = coset_normalize(&(x.matrix(prime) * Gl2::child(prime, mu)))?;
                    out.add_term(rep, self.act(&k, &img)?);
                }
            }
            // T-: v(0, Y) keeps the Y^m coefficient
            let top = val.coeffs[self.m];
            if top == 0 {
                continue;
            }
            let img = FpPoly::monomial(p, self.m, self.m).scale(top);
            match (x.side, x.digits.split_last()) {
                (Side::Zero, None) => out.add_term(TreeVertex::alpha(), img),
                (Side::Zero, Some((&last, rest))) => {
                    let shear = GammaElement::new(p, 1, last, 0, 1).map_err(|e| HeckeError::Internal(e.to_string()))?;
                    out.add_term(TreeVertex::side0(rest.to_vec()), img.act(&shear));
                }
                (Side::One, _) => {
                    let (rep, k) = coset_normalize(&(x.matrix(prime) * Gl2::alpha(prime)))?;
                    out.add_term(rep, self.act(&k, &img)?);
                }
            }
        }
        Ok(out)
    }

    /// Evaluate a polynomial in T, coefficients listed from the constant term up.
    pub fn apply_poly_in_t(&self, coeffs: &[u64]) -> Result<FpTreeFunction, HeckeError> {
        let mut out = Self::new(self.p, self.m, self.twist);
        let mut power = self.clone();
        for (i, &c) in coeffs.iter().enumerate() {
            if i > 0 {
                power = power.hecke()?;
            }
            out = out.add(&power.scale(c % self.p));
        }
        Ok(out)
    }
}

/// Reduce mod pi and push each value through the projection onto `target`.
pub fn reduce_and_project(
    f: &TreeFunction,
    target: JhFactor,
    basis: &QuotientBasis,
) -> Result<FpTreeFunction, HeckeError> {
    let p = f.prime().p();
    let mut out = FpTreeFunction::for_factor(p, target);
    for (v, val) in f.iter() {
        let reduced = val.reduce().map_err(|e| e.at(v))?;
        let image = basis.project(&reduced, target).map_err(|e| HeckeError::Projection {
            vertex: v.to_string(),
            cause: e,
        })?;
        out.add_term(v.clone(), image);
    }
    Ok(out)
}

impl fmt::Debug for FpTreeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FpTreeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(v, val)| format!("[{v}, {val}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

//! Symmetric powers V_r = Sym^r F_p^2 as GL_2(F_p)-modules and the quotient
//! V_r / (X_{r-1} + V_r**) with its Jordan-Holder pieces.

pub mod linalg;
mod quotient;

use std::fmt;

use serde::Serialize;

pub use quotient::{build_q, q_structure_report, JhFactor, QStructureReport, QuotientBasis, StructureCase};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("need p >= 5, r >= 2p+1 and r = 3 mod (p-1); got p = {p}, r = {r}")]
    Precondition { p: u64, r: u64 },
    #[error("structure mismatch: {0}")]
    Structure(String),
    #[error("projection to {0} is undefined for this weight")]
    Undefined(&'static str),
    #[error("value does not lie in the domain of the {0} projection")]
    OutsideDomain(&'static str),
    #[error("singular matrix")]
    Singular,
}

/// Homogeneous polynomial of degree r over F_p; `coeffs[j]` multiplies X^{r-j} Y^j.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FpPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn zero(p: u64, degree: usize) -> Self {
        FpPoly {
            p,
            coeffs: vec![0; degree + 1],
        }
    }

    /// X^{degree-j} Y^j.
    pub fn monomial(p: u64, degree: usize, j: usize) -> Self {
        let mut out = Self::zero(p, degree);
        out.coeffs[j] = 1;
        out
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<u64>) -> Self {
        FpPoly {
            p,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        let p = self.p;
        FpPoly {
            p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a + b) % p)
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let p = self.p;
        FpPoly {
            p,
            coeffs: self.coeffs.iter().map(|a| a * (c % p) % p).collect(),
        }
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        let p = self.p;
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        FpPoly { p, coeffs: out }
    }

    /// theta = X^p Y - X Y^p.
    pub fn theta(p: u64) -> FpPoly {
        let mut out = Self::zero(p, p as usize + 1);
        out.coeffs[1] = 1;
        out.coeffs[p as usize] = p - 1;
        out
    }

    /// Q with self = theta * Q, if theta divides self.
    pub fn theta_factor(&self) -> Option<FpPoly> {
        let p = self.p;
        let r = self.degree();
        let pu = p as usize;
        if r < pu + 1 {
            return None;
        }
        // dehomogenize in y = Y/X: theta -> y - y^p, divide from the top degree
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; r - pu];
        for d in (pu..=r).rev() {
            let c = rem[d];
            if c == 0 {
                continue;
            }
            // leading coefficient of y - y^p is -1
            let q = linalg::sub(p, 0, c);
            quot[d - pu] = q;
            rem[d] = 0;
            let k = d - pu + 1;
            rem[k] = linalg::sub(p, rem[k], q);
        }
        if rem.iter().any(|&c| c != 0) {
            return None;
        }
        Some(FpPoly { p, coeffs: quot })
    }

    pub fn act(&self, g: &GammaElement) -> FpPoly {
        let rho = rho_matrix(self.p, self.degree(), g);
        FpPoly {
            p: self.p,
            coeffs: linalg::mat_vec(self.p, &rho, &self.coeffs),
        }
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.degree();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(j, c)| {
                let x = match r - j {
                    0 => String::new(),
                    1 => "X".into(),
                    e => format!("X^{e}"),
                };
                let y = match j {
                    0 => String::new(),
                    1 => "Y".into(),
                    e => format!("Y^{e}"),
                };
                let mono = format!("{x}{y}");
                match (*c, mono.is_empty()) {
                    (c, true) => format!("{c}"),
                    (1, false) => mono,
                    (c, false) => format!("{c}*{mono}"),
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Element of GL_2(F_p) acting by P(X, Y) -> P(aX + cY, bX + dY).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GammaElement {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl GammaElement {
    pub fn new(p: u64, a: u64, b: u64, c: u64, d: u64) -> Result<Self, SymError> {
        let g = GammaElement {
            p,
            a: a % p,
            b: b % p,
            c: c % p,
            d: d % p,
        };
        if g.det() == 0 {
            return Err(SymError::Singular);
        }
        Ok(g)
    }

    pub fn identity(p: u64) -> Self {
        GammaElement {
            p,
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    pub fn det(&self) -> u64 {
        linalg::sub(self.p, self.a * self.d % self.p, self.b * self.c % self.p)
    }

    pub fn compose(&self, other: &GammaElement) -> GammaElement {
        let p = self.p;
        GammaElement {
            p,
            a: (self.a * other.a + self.b * other.c) % p,
            b: (self.a * other.b + self.b * other.d) % p,
            c: (self.c * other.a + self.d * other.c) % p,
            d: (self.c * other.b + self.d * other.d) % p,
        }
    }

    /// Torus, unipotent and Weyl generators of GL_2(F_p).
    pub fn generators(p: u64) -> Vec<GammaElement> {
        let g0 = linalg::primitive_root(p);
        vec![
            GammaElement {
                p,
                a: g0,
                b: 0,
                c: 0,
                d: 1,
            },
            GammaElement {
                p,
                a: 1,
                b: 0,
                c: 0,
                d: g0,
            },
            GammaElement {
                p,
                a: 1,
                b: 1,
                c: 0,
                d: 1,
            },
            GammaElement {
                p,
                a: 0,
                b: 1,
                c: 1,
                d: 0,
            },
        ]
    }
}

pub fn gamma_act(g: &GammaElement, poly: &FpPoly) -> FpPoly {
    poly.act(g)
}

/// Pascal's triangle mod p up to row n.
pub fn pascal_mod(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![1u64; m + 1];
        for k in 1..m {
            row[k] = (rows[m - 1][k - 1] + rows[m - 1][k]) % p;
        }
        rows.push(row);
    }
    rows
}

/// Matrix of g on V_r: entry [i][j] is the X^{r-i}Y^i coefficient of g . X^{r-j}Y^j.
pub fn rho_matrix(p: u64, r: usize, g: &GammaElement) -> Vec<Vec<u64>> {
    let pascal = pascal_mod(p, r);
    let pw = |base: u64, e: usize| linalg::pow(p, base, e as u64);
    let mut out = vec![vec![0u64; r + 1]; r + 1];
    for j in 0..=r {
        let m = r - j;
        // (aX + cY)^m
        let first: Vec<u64> = (0..=m)
            .map(|k| pascal[m][k] * pw(g.a, m - k) % p * pw(g.c, k) % p)
            .collect();
        // (bX + dY)^j
        let second: Vec<u64> = (0..=j)
            .map(|k| pascal[j][k] * pw(g.b, j - k) % p * pw(g.d, k) % p)
            .collect();
        for (k1, x) in first.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (k2, y) in second.iter().enumerate() {
                out[k1 + k2][j] = (out[k1 + k2][j] + x * y) % p;
            }
        }
    }
    out
}

/// rho on V_m twisted by det^twist.
pub fn rho_twisted(p: u64, m: usize, twist: u64, g: &GammaElement) -> Vec<Vec<u64>> {
    let scale = linalg::pow(p, g.det(), twist);
    rho_matrix(p, m, g)
        .into_iter()
        .map(|row| row.into_iter().map(|x| x * scale % p).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_swap() {
        let p = 5;
        let poly = FpPoly::from_coeffs(p, vec![1, 2, 3, 4]);
        assert_eq!(poly.act(&GammaElement::identity(p)), poly);
        let w = GammaElement::new(p, 0, 1, 1, 0).unwrap();
        let mono = FpPoly::monomial(p, 5, 2);
        assert_eq!(mono.act(&w), FpPoly::monomial(p, 5, 3));
    }

    #[test]
    fn scalars_act_by_power() {
        let p = 7;
        let poly = FpPoly::from_coeffs(p, vec![1, 0, 5, 2, 6]);
        let u = GammaElement::new(p, 3, 0, 0, 3).unwrap();
        assert_eq!(poly.act(&u), poly.scale(linalg::pow(p, 3, 4)));
    }

    #[test]
    fn theta_divides_itself() {
        let p = 5;
        let th = FpPoly::theta(p);
        assert_eq!(th.theta_factor().unwrap(), FpPoly::monomial(p, 0, 0));
        assert!(FpPoly::monomial(p, 11, 0).theta_factor().is_none());
        let x = FpPoly::monomial(p, 1, 0);
        let sq = th.mul(&th).mul(&x);
        let once = sq.theta_factor().unwrap();
        assert_eq!(once, th.mul(&x));
        assert_eq!(once.theta_factor().unwrap(), x);
    }

    #[test]
    fn theta_transforms_by_det() {
        let p = 7;
        let th = FpPoly::theta(p);
        for g in GammaElement::generators(p) {
            assert_eq!(th.act(&g), th.scale(g.det()));
        }
    }

    #[test]
    fn action_composes() {
        let p = 5;
        let poly = FpPoly::from_coeffs(p, vec![1, 2, 0, 4, 3, 1, 0, 2]);
        let gens = GammaElement::generators(p);
        for g in &gens {
            for h in &gens {
                // (gh) . P = g . (h . P)
                assert_eq!(poly.act(&g.compose(h)), poly.act(h).act(g));
            }
        }
    }
}

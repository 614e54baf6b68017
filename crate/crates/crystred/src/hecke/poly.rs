use std::fmt;

use crate::padic::{ExtScalar, Prime};
use crate::symmod::FpPoly;

use super::{Gl2, HeckeError};

/// Homogeneous degree-r polynomial over E; `coeffs[j]` multiplies X^{r-j} Y^j.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtPoly {
    prime: Prime,
    coeffs: Vec<ExtScalar>,
}

impl ExtPoly {
    pub fn zero(prime: Prime, r: usize) -> Self {
        ExtPoly {
            prime,
            coeffs: vec![ExtScalar::zero(prime); r + 1],
        }
    }

    pub fn monomial(prime: Prime, r: usize, j: usize) -> Self {
        Self::term(ExtScalar::one(prime), r, j)
    }

    /// c X^{r-j} Y^j.
    pub fn term(c: ExtScalar, r: usize, j: usize) -> Self {
        let mut out = Self::zero(c.prime(), r);
        out.coeffs[j] = c;
        out
    }

    pub fn from_coeffs(prime: Prime, coeffs: Vec<ExtScalar>) -> Self {
        assert!(!coeffs.is_empty());
        ExtPoly { prime, coeffs }
    }

    /// Integer coefficients.
    pub fn from_i64(prime: Prime, coeffs: &[i64]) -> Self {
        Self::from_coeffs(prime, coeffs.iter().map(|&c| ExtScalar::from_i64(prime, c)).collect())
    }

    /// Lift of a mod p polynomial with digits in [0, p).
    pub fn lift(prime: Prime, poly: &FpPoly) -> Self {
        Self::from_coeffs(
            prime,
            poly.coeffs
                .iter()
                .map(|&c| ExtScalar::from_i64(prime, c as i64))
                .collect(),
        )
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExtScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> ExtScalar {
        self.coeffs[j]
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(ExtScalar::is_exact_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ExtScalar::is_zero)
    }

    /// Lower bound for the pi-valuation of all coefficients.
    pub fn min_vpi(&self) -> i64 {
        self.coeffs.iter().map(ExtScalar::min_vpi).min().unwrap_or(i64::MAX)
    }

    pub fn add(&self, other: &ExtPoly) -> ExtPoly {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| *x + *y).collect();
        ExtPoly {
            prime: self.prime,
            coeffs,
        }
    }

    pub fn sub(&self, other: &ExtPoly) -> ExtPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExtPoly {
        ExtPoly {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|x| -*x).collect(),
        }
    }

    pub fn scale(&self, s: &ExtScalar) -> ExtPoly {
        ExtPoly {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|x| *x * *s).collect(),
        }
    }

    /// v(X, uX + Y), a Taylor shift of the dehomogenized polynomial.
    pub fn shear(&self, u: &ExtScalar) -> ExtPoly {
        if u.is_exact_zero() {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let r = self.degree();
        for i in 0..r {
            for j in (i..r).rev() {
                if !c[j + 1].is_exact_zero() {
                    c[j] = c[j] + *u * c[j + 1];
                }
            }
        }
        ExtPoly {
            prime: self.prime,
            coeffs: c,
        }
    }

    /// v(Y, X).
    pub fn swap(&self) -> ExtPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        ExtPoly {
            prime: self.prime,
            coeffs,
        }
    }

    /// v(xX, yY).
    pub fn stretch(&self, x: &ExtScalar, y: &ExtScalar) -> ExtPoly {
        let r = self.degree();
        let one = ExtScalar::one(self.prime);
        let mut xp = vec![one; r + 1];
        let mut yp = vec![one; r + 1];
        for i in 1..=r {
            xp[i] = xp[i - 1] * *x;
            yp[i] = yp[i - 1] * *y;
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| *c * xp[r - j] * yp[j])
            .collect();
        ExtPoly {
            prime: self.prime,
            coeffs,
        }
    }

    /// v(X, -lam X + pY), the value carried to a child by T+.
    pub fn outward(&self, lam: &ExtScalar) -> ExtPoly {
        let mut out = self.shear(&-*lam);
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            *c = c.shift(2 * j as i64);
        }
        out
    }

    /// v(pX, Y), the value carried by T-.
    pub fn inward(&self) -> ExtPoly {
        let r = self.degree();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.shift(2 * (r - j) as i64))
            .collect();
        ExtPoly {
            prime: self.prime,
            coeffs,
        }
    }

    /// k . v = v(aX + cY, bX + dY) for k in GL_2(Z_p).
    pub fn act(&self, k: &Gl2) -> Result<ExtPoly, HeckeError> {
        if !k.in_k() {
            return Err(HeckeError::NotInK(format!("{k:?}")));
        }
        if k.a.vpi() != Some(0) {
            // k = w (w k), and w k has a unit in the corner
            let wk = Gl2::new(k.c, k.d, k.a, k.b);
            return Ok(self.act_unit_corner(&wk)?.swap());
        }
        self.act_unit_corner(k)
    }

    /// k = (1 0; l 1) diag(a, det/a) (1 u; 0 1) with u = b/a, l = c/a.
    fn act_unit_corner(&self, k: &Gl2) -> Result<ExtPoly, HeckeError> {
        let ainv = k.a.inv()?;
        let u = k.b * ainv;
        let l = k.c * ainv;
        let delta = k.det() * ainv;
        let step = self.shear(&u).stretch(&k.a, &delta);
        Ok(step.swap().shear(&l).swap())
    }

    /// Reduction modulo pi; fails on non-integral or undetermined coefficients.
    pub fn reduce(&self) -> Result<FpPoly, HeckeError> {
        let p = self.prime.p();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.residue().map_err(|e| HeckeError::NonIntegral {
                    monomial: j,
                    value: c.to_string(),
                    cause: e.to_string(),
                })
            })
            .collect::<Result<Vec<u64>, _>>()?;
        Ok(FpPoly { p, coeffs })
    }
}

impl fmt::Debug for ExtPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExtPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.degree();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(j, c)| format!("({c})*X^{}Y^{j}", r - j))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binom::binom;

    fn f5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn shear_matches_binomial_expansion() {
        // oracle: X^{r-j}(uX+Y)^j = sum_i C(j,i) u^{j-i} X^{r-i} Y^i
        let prime = f5();
        let r = 9;
        let u = ExtScalar::from_i64(prime, 3);
        for j in 0..=r {
            let got = ExtPoly::monomial(prime, r, j).shear(&u);
            for i in 0..=r {
                let expect = if i <= j {
                    ExtScalar::from_bigint(prime, &binom(j as u64, i as i64)) * u.pow((j - i) as i64).unwrap()
                } else {
                    ExtScalar::zero(prime)
                };
                assert!((got.coeff(i) - expect).is_zero(), "j={j} i={i}");
            }
        }
    }

    #[test]
    fn outward_of_y_power() {
        // Y^r -> (-lam X + p Y)^r; coefficient of X^r is (-lam)^r
        let prime = f5();
        let r = 7;
        let lam = ExtScalar::teichmuller(prime, 2);
        let img = ExtPoly::monomial(prime, r, r).outward(&lam);
        assert_eq!(img.coeff(0), (-lam).pow(r as i64).unwrap());
        assert_eq!(img.coeff(r), ExtScalar::from_i64(prime, 5).pow(r as i64).unwrap());
    }

    #[test]
    fn action_is_left_action() {
        let prime = f5();
        let v = ExtPoly::from_i64(prime, &[1, 2, 0, 4, 3, 1]);
        let g = Gl2::from_i64(prime, [2, 1, 5, 3]);
        let h = Gl2::from_i64(prime, [0, 1, 1, 7]);
        let lhs = v.act(&(g * h)).unwrap();
        let rhs = v.act(&h).unwrap().act(&g).unwrap();
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn action_of_scalar_unit() {
        let prime = f5();
        let v = ExtPoly::from_i64(prime, &[1, 2, 0, 4]);
        let u = ExtScalar::from_i64(prime, 3);
        let img = v.act(&Gl2::diag(u, u)).unwrap();
        assert!(img.sub(&v.scale(&u.pow(3).unwrap())).is_zero());
    }

    #[test]
    fn reduction_rejects_non_integral() {
        let prime = f5();
        let v = ExtPoly::term(ExtScalar::pi_pow(prime, -1), 3, 0);
        assert!(matches!(v.reduce(), Err(HeckeError::NonIntegral { monomial: 0, .. })));
    }
}

use std::fmt;
use std::ops::Mul;

use crate::padic::{ExtScalar, PadicError, Prime};

/// 2x2 matrix over E. Entries are expected to lie in Q_p.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Gl2 {
    pub a: ExtScalar,
    pub b: ExtScalar,
    pub c: ExtScalar,
    pub d: ExtScalar,
}

impl Gl2 {
    pub fn new(a: ExtScalar, b: ExtScalar, c: ExtScalar, d: ExtScalar) -> Self {
        Gl2 { a, b, c, d }
    }

    pub fn from_i64(prime: Prime, [a, b, c, d]: [i64; 4]) -> Self {
        let e = |x| ExtScalar::from_i64(prime, x);
        Gl2::new(e(a), e(b), e(c), e(d))
    }

    pub fn identity(prime: Prime) -> Self {
        Self::from_i64(prime, [1, 0, 0, 1])
    }

    /// diag(1, p).
    pub fn alpha(prime: Prime) -> Self {
        Self::from_i64(prime, [1, 0, 0, prime.p() as i64])
    }

    pub fn weyl(prime: Prime) -> Self {
        Self::from_i64(prime, [0, 1, 1, 0])
    }

    pub fn upper(u: ExtScalar) -> Self {
        let prime = u.prime();
        Gl2::new(ExtScalar::one(prime), u, ExtScalar::zero(prime), ExtScalar::one(prime))
    }

    pub fn diag(x: ExtScalar, y: ExtScalar) -> Self {
        let z = ExtScalar::zero(x.prime());
        Gl2::new(x, z, z, y)
    }

    /// (p [mu]; 0 1), one step out from the origin.
    pub fn child(prime: Prime, mu: u64) -> Self {
        Gl2::new(
            ExtScalar::from_i64(prime, prime.p() as i64),
            ExtScalar::teichmuller(prime, mu),
            ExtScalar::zero(prime),
            ExtScalar::one(prime),
        )
    }

    pub fn prime(&self) -> Prime {
        self.a.prime()
    }

    pub fn det(&self) -> ExtScalar {
        self.a * self.d - self.b * self.c
    }

    pub fn inv(&self) -> Result<Gl2, PadicError> {
        let di = self.det().inv()?;
        Ok(Gl2::new(self.d * di, -self.b * di, -self.c * di, self.a * di))
    }

    pub fn scale(&self, s: ExtScalar) -> Gl2 {
        Gl2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Multiply every entry by pi^k.
    pub fn shift(&self, k: i64) -> Gl2 {
        Gl2::new(self.a.shift(k), self.b.shift(k), self.c.shift(k), self.d.shift(k))
    }

    pub fn entries(&self) -> [ExtScalar; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Entrywise equality up to the known precision.
    pub fn approx_eq(&self, other: &Gl2) -> bool {
        self.entries()
            .iter()
            .zip(other.entries())
            .all(|(x, y)| (*x - y).is_zero())
    }

    /// Entries in O_E and determinant a unit.
    pub fn in_k(&self) -> bool {
        self.entries().iter().all(|x| x.min_vpi() >= 0) && self.det().vpi() == Some(0)
    }
}

impl Mul for Gl2 {
    type Output = Gl2;
    fn mul(self, o: Gl2) -> Gl2 {
        Gl2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Debug for Gl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let prime = Prime::new(5).unwrap();
        let g = Gl2::from_i64(prime, [3, 7, 10, 2]);
        let one = g * g.inv().unwrap();
        assert!(one.approx_eq(&Gl2::identity(prime)));
    }

    #[test]
    fn child_times_alpha_is_central_unipotent() {
        let prime = Prime::new(7).unwrap();
        let g = Gl2::child(prime, 3) * Gl2::alpha(prime);
        let expect = Gl2::upper(ExtScalar::teichmuller(prime, 3)).shift(2);
        assert_eq!(g, expect);
    }
}

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use super::PadicError;

/// Tables shared by every scalar over one prime. Leaked once per prime.
#[derive(Debug)]
pub struct PrimeData {
    pub(crate) p: u64,
    /// Largest m with p^m <= 2^62.
    pub(crate) mmax: u32,
    pub(crate) pow: Vec<u64>,
    /// Teichmuller lifts of 0..p modulo p^mmax.
    pub(crate) teich: Vec<u64>,
}

/// Handle to the per-prime tables. Cheap to copy.
#[derive(Clone, Copy)]
pub struct Prime(pub(crate) &'static PrimeData);

impl PartialEq for Prime {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p
    }
}
impl Eq for Prime {}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prime({})", self.0.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl Prime {
    /// Odd primes below 2^16.
    pub fn new(p: u64) -> Result<Prime, PadicError> {
        if !(3..1 << 16).contains(&p) || !is_prime(p) {
            return Err(PadicError::BadPrime(p));
        }
        static REGISTRY: OnceLock<Mutex<HashMap<u64, &'static PrimeData>>> = OnceLock::new();
        let mut reg = REGISTRY.get_or_init(Default::default).lock().unwrap();
        let data = *reg.entry(p).or_insert_with(|| Box::leak(Box::new(PrimeData::build(p))));
        Ok(Prime(data))
    }

    pub fn p(self) -> u64 {
        self.0.p
    }

    /// Maximal relative precision in pi-digits.
    pub fn max_prec(self) -> u32 {
        2 * self.0.mmax
    }

    pub(crate) fn modulus(self) -> u64 {
        self.0.pow[self.0.mmax as usize]
    }

    pub(crate) fn pow(self, e: u32) -> u64 {
        self.0.pow[e as usize]
    }

    pub(crate) fn teich_raw(self, residue: u64) -> u64 {
        self.0.teich[(residue % self.0.p) as usize]
    }
}

impl PrimeData {
    fn build(p: u64) -> PrimeData {
        let mut pow = vec![1u64];
        while let Some(next) = pow.last().unwrap().checked_mul(p) {
            if next > 1 << 62 {
                break;
            }
            pow.push(next);
        }
        let mmax = (pow.len() - 1) as u32;
        let modulus = pow[mmax as usize];
        let teich = (0..p)
            .map(|lam| {
                let mut x = lam;
                // each step gains one p-adic digit
                for _ in 0..mmax {
                    let mut acc = 1u64;
                    let mut base = x;
                    let mut e = p;
                    while e > 0 {
                        if e & 1 == 1 {
                            acc = mulmod(acc, base, modulus);
                        }
                        base = mulmod(base, base, modulus);
                        e >>= 1;
                    }
                    x = acc;
                }
                x
            })
            .collect();
        PrimeData { p, mmax, pow, teich }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_primes() {
        assert!(Prime::new(2).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(5).is_ok());
    }

    #[test]
    fn digit_budget() {
        assert_eq!(Prime::new(5).unwrap().max_prec(), 52);
        assert_eq!(Prime::new(7).unwrap().max_prec(), 44);
        assert_eq!(Prime::new(11).unwrap().max_prec(), 34);
    }

    #[test]
    fn same_tables_shared() {
        let a = Prime::new(7).unwrap();
        let b = Prime::new(7).unwrap();
        assert!(std::ptr::eq(a.0, b.0));
    }
}

//! Helpers shared by the integration tests.
#![allow(dead_code)]

use crystred::hecke::Gl2;
use crystred::padic::{ExtScalar, Prime};
use rand::Rng;

/// Random element of KZ: a matrix over Z/p^digits with unit determinant,
/// times a random power of p.
pub fn random_kz(rng: &mut impl Rng, prime: Prime, digits: u32) -> Gl2 {
    let p = prime.p() as i64;
    let bound = p.pow(digits);
    loop {
        let [a, b, c, d]: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..bound));
        if (a * d - b * c).rem_euclid(p) == 0 {
            continue;
        }
        let z = rng.gen_range(-2..=2);
        return Gl2::from_i64(prime, [a, b, c, d]).scale(ExtScalar::pi_pow(prime, 2 * z));
    }
}

/// a_p = pi^3 (u_0 + u_1 pi + ...).
pub fn slope_three_halves(prime: Prime, digits: &[u64]) -> ExtScalar {
    ExtScalar::from_digits(prime, 3, digits, prime.max_prec())
}

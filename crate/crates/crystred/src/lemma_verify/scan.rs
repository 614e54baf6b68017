use serde::Serialize;

use crate::padic::{ExtScalar, Prime};
use crate::zigzag::{InvariantBundle, Regime};

use super::{Instance, LemmaVerifyError};

/// How a witness was found, for reproducing it.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRecord {
    pub procedure: String,
    pub r: u64,
    /// u_0, u_1, ... in a_p = pi^3 (u_0 + u_1 pi + ...).
    pub digits: Vec<u64>,
    pub a_p: String,
    pub tried: usize,
}

/// Digit words of length `len` with a nonzero leading digit, in lexicographic order.
fn words(p: u64, len: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (p - 1) * p.pow(len as u32 - 1);
    (0..total).map(move |mut k| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev().take(len - 1) {
            *slot = k % p;
            k /= p;
        }
        w[0] = 1 + k;
        w
    })
}

/// First instance, scanning r in the given order and then a_p = pi^3 u over
/// digit words of increasing length, whose invariants satisfy `accept`.
pub fn scan_for(
    p: u64,
    rs: &[u64],
    prec: u32,
    max_len: usize,
    accept: impl Fn(&InvariantBundle) -> bool,
) -> Result<Option<(Instance, ScanRecord)>, LemmaVerifyError> {
    let prime = Prime::new(p)?;
    let mut tried = 0;
    for &r in rs {
        for len in 1..=max_len {
            for digits in words(p, len) {
                tried += 1;
                let a_p = ExtScalar::from_digits(prime, 3, &digits, prec);
                let Ok(inst) = Instance::new(p, r, &a_p, prec) else {
                    continue;
                };
                if accept(&inst.invariants) {
                    let record = ScanRecord {
                        procedure: format!(
                            "r in {rs:?}, then words u_0..u_{{L-1}} with u_0 != 0 for L = 1..{max_len} in lexicographic order; a_p = pi^3 u at {prec} pi-digits"
                        ),
                        r,
                        digits,
                        a_p: inst.a_p.to_string(),
                        tried,
                    };
                    return Ok(Some((inst, record)));
                }
            }
        }
    }
    Ok(None)
}

pub fn scan_for_regimes(
    p: u64,
    rs: &[u64],
    prec: u32,
    regimes: &[Regime],
) -> Result<Option<(Instance, ScanRecord)>, LemmaVerifyError> {
    scan_for(p, rs, prec, 5, |inv| regimes.contains(&inv.regime))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_enumerate_units() {
        let all: Vec<Vec<u64>> = words(5, 2).collect();
        assert_eq!(all.len(), 20);
        assert_eq!(all[0], vec![1, 0]);
        assert_eq!(all[19], vec![4, 4]);
    }

    #[test]
    fn finds_each_window_at_t_one() {
        for regime in [
            Regime::BelowT,
            Regime::AtT,
            Regime::AtHalf,
            Regime::AtOne,
            Regime::AboveOne,
        ] {
            let (inst, rec) = scan_for_regimes(5, &[23, 43], 24, &[regime]).unwrap().expect("witness");
            assert_eq!(inst.invariants.regime, regime);
            assert_eq!(inst.r, rec.r);
        }
    }
}

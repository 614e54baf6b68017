//! Explicit building-block functions on the tree, their telescoping
//! identities under T - a_p, and the image computations that bound the
//! factors F_1, F_2, F_3 of the reduction.

mod blocks;
mod props;
mod scan;
mod search;
mod telescoping;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::binom::BinomError;
use crate::hecke::HeckeError;
use crate::padic::{ExtScalar, HalfInt, PadicError, Prime};
use crate::symmod::SymError;
use crate::zigzag::{compute_invariants, InvariantBundle, Valuation, ZigzagError};

pub use blocks::{build_block, BlockId};
pub use props::{build_prop_function, expected_image, verify_section_prop, PropId};
pub use scan::{scan_for, scan_for_regimes, ScanRecord};
pub use search::{bounded_preimage_search, lemma62_bounded_search, lemma62_control, MAX_SEARCH_RADIUS};
pub use telescoping::{telescoping_claim, verify_telescoping, TelescopingClaim};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LemmaVerifyError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Binom(#[from] BinomError),
    #[error(transparent)]
    Zigzag(#[from] ZigzagError),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("precision insufficient: {0}")]
    Precision(String),
    #[error("unknown identifier {0:?}")]
    UnknownId(String),
}

/// A weight r = 3 + n(p-1)p^t with a slope-3/2 eigenvalue a_p, held at
/// relative precision K (in pi-digits).
#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub p: u64,
    pub r: u64,
    pub a_p: ExtScalar,
    pub prec: u32,
    pub invariants: InvariantBundle,
    #[serde(skip)]
    prime: Prime,
}

impl Instance {
    /// Smallest admissible K for a given t.
    pub fn min_prec(t: u32) -> u32 {
        2 * (t + 5)
    }

    pub fn new(p: u64, r: u64, a_p: &ExtScalar, prec: u32) -> Result<Instance, LemmaVerifyError> {
        let prime = Prime::new(p)?;
        if p <= 3 {
            return Err(LemmaVerifyError::Precondition(format!("p = {p} must exceed 3")));
        }
        if r < 2 * p + 1 || !(r - 3).is_multiple_of(p - 1) {
            return Err(LemmaVerifyError::Precondition(format!(
                "need r >= 2p+1 and r = 3 mod (p-1); got p = {p}, r = {r}"
            )));
        }
        if a_p.vpi() != Some(3) {
            return Err(LemmaVerifyError::Precondition(format!(
                "a_p = {a_p} must have valuation 3/2"
            )));
        }
        if prec > prime.max_prec() {
            return Err(LemmaVerifyError::Precision(format!(
                "K = {prec} exceeds the working precision {} for p = {p}",
                prime.max_prec()
            )));
        }
        let a_p = if a_p.rel_prec() > prec {
            a_p.with_rel_prec(prec)
        } else {
            *a_p
        };
        let invariants = compute_invariants(p, r, &a_p)?;
        let need = Self::min_prec(invariants.t);
        if prec < need {
            return Err(LemmaVerifyError::Precondition(format!(
                "K = {prec} is below 2(t+5) = {need}"
            )));
        }
        Ok(Instance {
            p,
            r,
            a_p,
            prec,
            invariants,
            prime,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn t(&self) -> u32 {
        self.invariants.t
    }

    pub fn c(&self) -> ExtScalar {
        self.invariants.c
    }

    pub fn c_tilde(&self) -> ExtScalar {
        self.invariants.c_tilde.expect("slope 3/2 invariants carry c~")
    }

    pub fn tau(&self) -> Valuation {
        self.invariants.tau
    }

    pub fn tau_tilde(&self) -> Valuation {
        self.invariants.tau_tilde.expect("slope 3/2 invariants carry tau~")
    }

    /// t + k/2 as a half-integer.
    pub fn t_plus(&self, halves: i64) -> HalfInt {
        HalfInt(2 * self.t() as i64 + halves)
    }

    /// tau against t + k/2.
    pub fn tau_cmp(&self, halves: i64) -> Result<Ordering, LemmaVerifyError> {
        let bound = self.t_plus(halves);
        self.tau()
            .cmp_to(bound)
            .ok_or_else(|| LemmaVerifyError::Precision(format!("tau = {} cannot be compared with {bound}", self.tau())))
    }

    /// Exact tau; fails when c vanishes to the working precision.
    pub fn tau_exact(&self) -> Result<HalfInt, LemmaVerifyError> {
        self.tau()
            .exact()
            .ok_or_else(|| LemmaVerifyError::Precision(format!("tau = {} is not exact", self.tau())))
    }

    pub fn int(&self, n: i64) -> ExtScalar {
        ExtScalar::from_i64(self.prime, n)
    }

    pub fn ri(&self) -> i64 {
        self.r as i64
    }

    /// p^k as an element of E.
    pub fn p_pow(&self, k: i64) -> ExtScalar {
        ExtScalar::pi_pow(self.prime, 2 * k)
    }

    pub fn key(&self) -> String {
        format!("p={} r={} a_p={}", self.p, self.r, self.a_p)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (t = {}, tau = {}, {})",
            self.key(),
            self.t(),
            self.tau(),
            self.invariants.regime
        )
    }
}

pub(crate) fn hypothesis(ok: bool, what: impl FnOnce() -> String) -> Result<(), LemmaVerifyError> {
    if ok {
        Ok(())
    } else {
        Err(LemmaVerifyError::Hypothesis(what()))
    }
}

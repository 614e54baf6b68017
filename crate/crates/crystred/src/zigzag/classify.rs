use std::cmp::Ordering;

use serde::Serialize;

use crate::padic::{ExtScalar, HalfInt};
use crate::report::VerificationReport;

use super::invariants::{compute_slope_invariants, InvariantBundle, Slope};
use super::llc::{llc_forward, same_smooth, Lambda, ReductionDescriptor, SmoothRepDescriptor, Twist};
use super::ninepart::{assemble_llc, ninepart_expectation, PresentationConstants};
use super::{Regime, ZigzagError};

/// How the selected branch is backed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Slope 3/2 with r >= 2p+1: the case the verifiers exercise.
    Verified,
    /// Slope 3/2 with r = p+2: known by other means; reported, not derived.
    ExternallyKnown,
    /// Slopes 1/2 and 1: earlier results restated as case tables.
    Recalled,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub invariants: InvariantBundle,
    /// 1-based branch index in the case table.
    pub branch_index: usize,
    pub branch: &'static str,
    pub descriptor: ReductionDescriptor,
    pub scope: Scope,
    pub constants: PresentationConstants,
}

fn residue_of(x: &ExtScalar, what: &str) -> Result<u64, ZigzagError> {
    x.residue()
        .map_err(|e| ZigzagError::Precision(format!("residue of {what} = {x}: {e}")))
}

fn int(x: &ExtScalar, n: i64) -> ExtScalar {
    ExtScalar::from_i64(x.prime(), n)
}

/// lambda_1 = residue of b/(b-r) c.
fn lambda1(inv: &InvariantBundle) -> Result<u64, ZigzagError> {
    let (b, r) = (inv.b as i64, inv.r as i64);
    let x = inv.c.scale_i64(b).div(&int(&inv.c, b - r))?;
    residue_of(&x, "b c/(b-r)")
}

/// d = residue of (b-1)/((b-1-r)(b-r)) c/p.
fn d_bar(inv: &InvariantBundle) -> Result<u64, ZigzagError> {
    let (b, r) = (inv.b as i64, inv.r as i64);
    let den = int(&inv.c, (b - 1 - r) * (b - r)).shift(2);
    let x = inv.c.scale_i64(b - 1).div(&den)?;
    residue_of(&x, "d")
}

fn tetrachotomy(
    inv: &InvariantBundle,
) -> Result<(usize, &'static str, ReductionDescriptor, PresentationConstants), ZigzagError> {
    let p = inv.p;
    let mut consts = PresentationConstants::default();
    let out = match inv.regime {
        Regime::BelowT => (
            1,
            "tau<t",
            ReductionDescriptor::Irreducible {
                exponent: inv.b + 1,
                twist: Twist::trivial(),
            },
        ),
        Regime::AtT => {
            let l = lambda1(inv)?;
            consts.lambda1 = Some(l);
            let lambda = Lambda::value(l);
            (
                2,
                "tau=t",
                ReductionDescriptor::Reducible {
                    lambda,
                    a: inv.b,
                    b: 1,
                    twist: Twist::trivial(),
                },
            )
        }
        Regime::BelowHalf | Regime::AtHalf | Regime::BelowOne => (
            3,
            "t<tau<t+1",
            ReductionDescriptor::Irreducible {
                exponent: inv.b + p,
                twist: Twist::trivial(),
            },
        ),
        Regime::AtOne | Regime::AboveOne => {
            let d = d_bar(inv)?;
            consts.d = Some(d);
            let lambda = Lambda::root_of(p, d);
            (
                4,
                "tau>=t+1",
                ReductionDescriptor::Reducible {
                    lambda,
                    a: inv.b - 1,
                    b: 2,
                    twist: Twist::trivial(),
                },
            )
        }
    };
    Ok((out.0, out.1, out.2, consts))
}

fn dichotomy(inv: &InvariantBundle) -> Result<(usize, &'static str, ReductionDescriptor), ZigzagError> {
    let t = HalfInt::from_int(inv.t as i64);
    let order = inv
        .tau
        .cmp_to(t)
        .ok_or_else(|| ZigzagError::Precision(format!("tau = {} against t = {}", inv.tau, inv.t)))?;
    Ok(match order {
        Ordering::Less => (
            1,
            "tau<t",
            ReductionDescriptor::Irreducible {
                exponent: inv.b + 1,
                twist: Twist::trivial(),
            },
        ),
        _ => {
            // lambda + 1/lambda = residue of c/(1-r)
            let x = inv.c.div(&int(&inv.c, 1 - inv.r as i64))?;
            let trace = residue_of(&x, "c/(1-r)")?;
            let lambda = Lambda::root_of(inv.p, trace);
            (
                2,
                "tau>=t",
                ReductionDescriptor::Reducible {
                    lambda,
                    a: inv.b,
                    b: 1,
                    twist: Twist::trivial(),
                },
            )
        }
    })
}

fn trichotomy(inv: &InvariantBundle) -> Result<(usize, &'static str, ReductionDescriptor), ZigzagError> {
    let t = HalfInt::from_int(inv.t as i64);
    let order = inv
        .tau
        .cmp_to(t)
        .ok_or_else(|| ZigzagError::Precision(format!("tau = {} against t = {}", inv.tau, inv.t)))?;
    Ok(match order {
        Ordering::Less => (
            1,
            "tau<t",
            ReductionDescriptor::Irreducible {
                exponent: inv.b + 1,
                twist: Twist::trivial(),
            },
        ),
        Ordering::Equal => {
            let lambda = Lambda::value(lambda1(inv)?);
            (
                2,
                "tau=t",
                ReductionDescriptor::Reducible {
                    lambda,
                    a: inv.b,
                    b: 1,
                    twist: Twist::trivial(),
                },
            )
        }
        Ordering::Greater => (
            3,
            "tau>t",
            ReductionDescriptor::Irreducible {
                exponent: inv.b + inv.p,
                twist: Twist::trivial(),
            },
        ),
    })
}

/// Reduction of V_{k, a_p} for an exceptional weight at the given slope.
pub fn classify(p: u64, r: u64, a_p: &ExtScalar, slope: Slope) -> Result<Classification, ZigzagError> {
    let invariants = compute_slope_invariants(p, r, a_p, slope)?;
    let (branch_index, branch, descriptor, constants, scope) = match slope {
        Slope::ThreeHalves => {
            let (i, name, d, c) = tetrachotomy(&invariants)?;
            let scope = if r > 2 * p {
                Scope::Verified
            } else {
                Scope::ExternallyKnown
            };
            (i, name, d, c, scope)
        }
        Slope::Half => {
            let (i, name, d) = dichotomy(&invariants)?;
            (i, name, d, PresentationConstants::default(), Scope::Recalled)
        }
        Slope::One => {
            let (i, name, d) = trichotomy(&invariants)?;
            (i, name, d, PresentationConstants::default(), Scope::Recalled)
        }
    };
    Ok(Classification {
        invariants,
        branch_index,
        branch,
        descriptor,
        scope,
        constants,
    })
}

/// The forward image of the classification against the smooth representation
/// assembled from the surviving F_i.
pub fn check_llc_consistency(
    cl: &Classification,
) -> Result<(VerificationReport, Vec<SmoothRepDescriptor>), ZigzagError> {
    let p = cl.invariants.p;
    let mut report = VerificationReport::new(
        "llc-consistency",
        format!("LL(classify) matches the surviving factors in {}", cl.invariants.regime),
    );
    if cl.invariants.slope != Slope::ThreeHalves {
        return Err(ZigzagError::OutOfScope(
            "the factor table exists for slope 3/2 only".into(),
        ));
    }
    let forward = llc_forward(p, &cl.descriptor)?;
    let part = ninepart_expectation(cl.invariants.regime);
    let mut consts = cl.constants;
    if consts.lambda1.is_none() && cl.invariants.regime == Regime::AtT {
        consts.lambda1 = Some(lambda1(&cl.invariants)?);
    }
    let assembled = assemble_llc(p, &part, consts)?;
    for n in &assembled.notes {
        report.note(n.clone());
    }
    if !same_smooth(p, &forward, &assembled.pieces) {
        let show = |v: &[SmoothRepDescriptor]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" + ");
        report.fail(format!(
            "forward image {} but factors give {}",
            show(&forward),
            show(&assembled.pieces)
        ));
    }
    Ok((report, forward))
}

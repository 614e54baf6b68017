use serde::Serialize;

use crate::symmod::linalg;

use super::llc::{Lambda, SmoothRepDescriptor, Twist};
use super::{Regime, ZigzagError};

/// The Hecke polynomial P in a presentation F_i <<- ind J_i / P(T).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeckeRelation {
    /// T
    T,
    /// T - 1/lambda_1
    TMinusInverseLambda1,
    /// T - lambda_1
    TMinusLambda1,
    /// T^2 + 1
    TSquaredPlusOne,
    /// T^2 - dT + 1
    TSquaredMinusDTPlusOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FactorStatus {
    Vanishes,
    Quotient {
        relation: HeckeRelation,
    },
    /// No statement is made about this factor in this window.
    Unstated,
    /// The vanishing is expected but not established here.
    NotAsserted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NinePart {
    pub regime: Regime,
    pub f1: FactorStatus,
    pub f2: FactorStatus,
    pub f3: FactorStatus,
}

impl NinePart {
    pub fn factors(&self) -> [(usize, FactorStatus); 3] {
        [(1, self.f1), (2, self.f2), (3, self.f3)]
    }
}

pub fn ninepart_expectation(regime: Regime) -> NinePart {
    use FactorStatus::*;
    use HeckeRelation::*;
    let q = |relation| Quotient { relation };
    let (f1, f2, f3) = match regime {
        Regime::BelowT => (Unstated, Vanishes, Vanishes),
        Regime::AtT => (q(TMinusInverseLambda1), q(TMinusLambda1), Vanishes),
        Regime::BelowHalf => (Vanishes, Unstated, NotAsserted),
        Regime::AtHalf => (Vanishes, q(T), q(T)),
        Regime::BelowOne => (Vanishes, Vanishes, q(T)),
        Regime::AtOne => (Vanishes, Vanishes, q(TSquaredMinusDTPlusOne)),
        Regime::AboveOne => (Vanishes, Vanishes, q(TSquaredPlusOne)),
    };
    NinePart { regime, f1, f2, f3 }
}

/// (m, twist) of J_i = V_m (x) D^twist.
fn factor_shape(p: u64, i: usize) -> (u64, u64) {
    match i {
        1 => (p - 4, 3),
        2 => (1, 1),
        _ => (p - 2, 2),
    }
}

/// Residues feeding the presentations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PresentationConstants {
    pub lambda1: Option<u64>,
    pub d: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assembly {
    pub pieces: Vec<SmoothRepDescriptor>,
    pub notes: Vec<String>,
}

/// Semisimple smooth representation assembled from the surviving F_i.
pub fn assemble_llc(p: u64, part: &NinePart, consts: PresentationConstants) -> Result<Assembly, ZigzagError> {
    let mut pieces = Vec::new();
    let mut notes = Vec::new();
    let need = |x: Option<u64>, name: &str| {
        x.ok_or_else(|| ZigzagError::Malformed(format!("{name} is required in {}", part.regime)))
    };
    for (i, status) in part.factors() {
        let (m, tw) = factor_shape(p, i);
        let eta = Twist::omega(tw);
        let FactorStatus::Quotient { relation } = status else {
            continue;
        };
        match relation {
            HeckeRelation::T => pieces.push(SmoothRepDescriptor::new(p, m, Lambda::value(0), eta)),
            HeckeRelation::TMinusLambda1 => pieces.push(SmoothRepDescriptor::new(
                p,
                m,
                Lambda::value(need(consts.lambda1, "lambda_1")?),
                eta,
            )),
            HeckeRelation::TMinusInverseLambda1 => {
                let l = need(consts.lambda1, "lambda_1")?;
                if l == 0 {
                    return Err(ZigzagError::Malformed("lambda_1 = 0".into()));
                }
                pieces.push(SmoothRepDescriptor::new(p, m, Lambda::value(linalg::inv(p, l)), eta));
            }
            HeckeRelation::TSquaredPlusOne | HeckeRelation::TSquaredMinusDTPlusOne => {
                let d = if relation == HeckeRelation::TSquaredPlusOne {
                    0
                } else {
                    need(consts.d, "d")?
                };
                let lam = Lambda::root_of(p, d);
                pieces.push(SmoothRepDescriptor::new(p, m, lam.clone(), eta));
                pieces.push(SmoothRepDescriptor::new(p, m, lam, eta));
            }
        }
    }
    if pieces.is_empty() {
        let lone: Vec<usize> = part
            .factors()
            .iter()
            .filter(|(_, s)| *s == FactorStatus::Unstated)
            .map(|(i, _)| *i)
            .collect();
        let [i] = lone[..] else {
            return Err(ZigzagError::Malformed(format!(
                "no presentation and {} unconstrained factors in {}",
                lone.len(),
                part.regime
            )));
        };
        let (m, tw) = factor_shape(p, i);
        pieces.push(SmoothRepDescriptor::new(p, m, Lambda::value(0), Twist::omega(tw)));
        notes.push(format!(
            "F{i} is the only survivor; a lone quotient of ind J{i} must be supersingular"
        ));
    }
    if part.factors().iter().any(|(_, s)| *s == FactorStatus::NotAsserted) {
        notes.push(format!("vanishing of some F_i is not asserted in {}", part.regime));
    }
    let supersingular = pieces.iter().filter(|d| d.lambda.is_zero()).count();
    if supersingular > 0 {
        if supersingular != pieces.len() {
            return Err(ZigzagError::Malformed(
                "supersingular and principal series pieces mixed".into(),
            ));
        }
        let first = pieces[0].canonical(p);
        if pieces.iter().any(|d| d.canonical(p) != first) {
            return Err(ZigzagError::Malformed("distinct supersingular pieces".into()));
        }
        if pieces.len() > 1 {
            notes.push("supersingular presentations coincide".into());
        }
        pieces.truncate(1);
    }
    pieces.sort();
    Ok(Assembly { pieces, notes })
}

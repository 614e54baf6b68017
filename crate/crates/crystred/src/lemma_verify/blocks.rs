use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::hecke::{ExtPoly, TreeFunction, TreeVertex};
use crate::padic::ExtScalar;

use super::{hypothesis, Instance, LemmaVerifyError};

/// The telescoping building blocks. Parameters are Teichmuller digits in 1..p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockId {
    Chi,
    ChiPrime(u64),
    Phi,
    Xi,
    XiPrime,
    XiDblPrime,
    Psi(u64),
    PsiPrime(u64),
}

impl BlockId {
    /// One representative of every block, parameters set to 1.
    pub const ALL: [BlockId; 8] = [
        BlockId::Chi,
        BlockId::ChiPrime(1),
        BlockId::Phi,
        BlockId::Xi,
        BlockId::XiPrime,
        BlockId::XiDblPrime,
        BlockId::Psi(1),
        BlockId::PsiPrime(1),
    ];

    pub fn name(self) -> &'static str {
        match self {
            BlockId::Chi => "chi",
            BlockId::ChiPrime(_) => "chi_prime",
            BlockId::Phi => "phi",
            BlockId::Xi => "xi",
            BlockId::XiPrime => "xi_prime",
            BlockId::XiDblPrime => "xi_dblprime",
            BlockId::Psi(_) => "psi",
            BlockId::PsiPrime(_) => "psi_prime",
        }
    }

    pub fn parameter(self) -> Option<u64> {
        match self {
            BlockId::ChiPrime(x) | BlockId::Psi(x) | BlockId::PsiPrime(x) => Some(x),
            _ => None,
        }
    }

    pub fn with_parameter(self, x: u64) -> BlockId {
        match self {
            BlockId::ChiPrime(_) => BlockId::ChiPrime(x),
            BlockId::Psi(_) => BlockId::Psi(x),
            BlockId::PsiPrime(_) => BlockId::PsiPrime(x),
            other => other,
        }
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(x) => write!(f, "{}({x})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for BlockId {
    type Err = LemmaVerifyError;

    /// `chi`, `chi_prime(2)`, `psi(1)`, ...; a missing parameter means 1.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let unknown = || LemmaVerifyError::UnknownId(text.to_string());
        let (name, param) = match text.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(unknown)?;
                (name.trim(), Some(inner.trim().parse::<u64>().map_err(|_| unknown())?))
            }
            None => (text, None),
        };
        let base = match name.replace('-', "_").as_str() {
            "chi" => BlockId::Chi,
            "chi_prime" | "chi'" => BlockId::ChiPrime(1),
            "phi" => BlockId::Phi,
            "xi" => BlockId::Xi,
            "xi_prime" | "xi'" => BlockId::XiPrime,
            "xi_dblprime" | "xi''" => BlockId::XiDblPrime,
            "psi" => BlockId::Psi(1),
            "psi_prime" | "psi'" => BlockId::PsiPrime(1),
            _ => return Err(unknown()),
        };
        match (base.parameter(), param) {
            (None, Some(_)) => Err(unknown()),
            (_, Some(x)) => Ok(base.with_parameter(x)),
            _ => Ok(base),
        }
    }
}

/// sum of c_j X^{r-j} Y^j.
pub(crate) fn poly(inst: &Instance, terms: &[(usize, ExtScalar)]) -> ExtPoly {
    let r = inst.r as usize;
    terms.iter().fold(ExtPoly::zero(inst.prime(), r), |acc, (j, c)| {
        acc.add(&ExtPoly::term(*c, r, *j))
    })
}

pub(crate) fn mono(inst: &Instance, j: usize) -> ExtPoly {
    ExtPoly::monomial(inst.prime(), inst.r as usize, j)
}

/// X^{r-2}Y^2 + (r-3)X^pY^{r-p} - (r-2)XY^{r-1}
pub(crate) fn p_poly(inst: &Instance) -> ExtPoly {
    let (r, p) = (inst.r as usize, inst.p as usize);
    poly(
        inst,
        &[
            (2, inst.int(1)),
            (r - p, inst.int(inst.ri() - 3)),
            (r - 1, inst.int(2 - inst.ri())),
        ],
    )
}

/// Y^r - X^{r-3}Y^3
pub(crate) fn top_minus_three(inst: &Instance) -> ExtPoly {
    poly(inst, &[(inst.r as usize, inst.int(1)), (3, inst.int(-1))])
}

pub(crate) fn teich_inv(inst: &Instance, x: u64) -> Result<ExtScalar, LemmaVerifyError> {
    Ok(ExtScalar::teichmuller(inst.prime(), x).inv()?)
}

/// g0_{n,[mu]}: digits (mu, 0, ..., 0) of length n.
pub(crate) fn mu_vertex(mu: u64, n: usize) -> TreeVertex {
    let mut digits = vec![0; n];
    if n > 0 {
        digits[0] = mu;
    }
    TreeVertex::side0(digits)
}

/// sum_{n in range} coeff(n) [vertex(n), value].
fn series(
    inst: &Instance,
    range: std::ops::RangeInclusive<usize>,
    coeff: impl Fn(usize) -> Result<ExtScalar, LemmaVerifyError>,
    vertex: impl Fn(usize) -> TreeVertex,
    value: &ExtPoly,
) -> Result<TreeFunction, LemmaVerifyError> {
    let mut f = TreeFunction::new(inst.prime(), inst.r as usize);
    for n in range {
        f.add_term(vertex(n), value.scale(&coeff(n)?));
    }
    Ok(f)
}

fn param(inst: &Instance, x: u64, name: &str) -> Result<(), LemmaVerifyError> {
    hypothesis((1..inst.p).contains(&x), || {
        format!("{name} = {x} must be a nonzero residue mod {}", inst.p)
    })
}

/// (1/(p k)) sum_{n=1}^{2t+2} (a_p/p)^n [g0_{n,0}, P]. k = p gives xi', k = c gives xi''.
pub(crate) fn xi_family(inst: &Instance, k: &ExtScalar) -> Result<TreeFunction, LemmaVerifyError> {
    let t = inst.t() as usize;
    let pre = (inst.p_pow(1) * *k).inv()?;
    let ratio = inst.a_p.div(&inst.p_pow(1))?;
    series(
        inst,
        1..=2 * t + 2,
        |n| Ok(pre * ratio.pow(n as i64)?),
        TreeVertex::spine,
        &p_poly(inst),
    )
}

/// (1/(p k)) sum_{n=1}^{t+1} a_p^n [g0_{n,[mu]}, [mu]^{-1}(Y^r - X^{r-3}Y^3)]. k = p gives psi, k = c gives psi'.
pub(crate) fn psi_family(inst: &Instance, mu: u64, k: &ExtScalar) -> Result<TreeFunction, LemmaVerifyError> {
    let t = inst.t() as usize;
    let pre = (inst.p_pow(1) * *k).inv()?;
    let value = top_minus_three(inst).scale(&teich_inv(inst, mu)?);
    series(
        inst,
        1..=t + 1,
        |n| Ok(pre * inst.a_p.pow(n as i64)?),
        |n| mu_vertex(mu, n),
        &value,
    )
}

/// sum_{n=0}^{t} a_p^n [g0_{n,0}, s (Y^r - X^{r-3}Y^3)]
fn chi_with(inst: &Instance, s: &ExtScalar) -> Result<TreeFunction, LemmaVerifyError> {
    let value = top_minus_three(inst).scale(s);
    series(
        inst,
        0..=inst.t() as usize,
        |n| Ok(inst.a_p.pow(n as i64)?),
        TreeVertex::spine,
        &value,
    )
}

/// Check the block's hypothesis on tau against t.
pub(crate) fn check_block_hypothesis(id: BlockId, inst: &Instance) -> Result<(), LemmaVerifyError> {
    let tau = inst.tau();
    let t = inst.t();
    match id {
        BlockId::Chi => Ok(()),
        BlockId::ChiPrime(x) => {
            param(inst, x, "lambda")?;
            hypothesis(inst.tau_cmp(0)? != Ordering::Greater, || {
                format!("{id} needs tau <= t; tau = {tau}, t = {t}")
            })
        }
        BlockId::Phi => hypothesis(inst.tau_cmp(0)? != Ordering::Greater, || {
            format!("phi needs tau <= t; tau = {tau}, t = {t}")
        }),
        BlockId::Xi | BlockId::XiPrime => hypothesis(inst.tau_cmp(1)? == Ordering::Greater, || {
            format!("{id} needs tau > t+1/2; tau = {tau}, t = {t}")
        }),
        BlockId::Psi(x) => {
            param(inst, x, "mu")?;
            hypothesis(inst.tau_cmp(2)? != Ordering::Less, || {
                format!("{id} needs tau >= t+1; tau = {tau}, t = {t}")
            })
        }
        BlockId::XiDblPrime => hypothesis(inst.tau_cmp(2)? == Ordering::Less, || {
            format!("{id} needs tau < t+1; tau = {tau}, t = {t}")
        }),
        BlockId::PsiPrime(x) => {
            param(inst, x, "mu")?;
            hypothesis(inst.tau_cmp(2)? == Ordering::Less, || {
                format!("{id} needs tau < t+1; tau = {tau}, t = {t}")
            })
        }
    }
}

/// The block exactly as defined: a finite sum with prefactors evaluated in E.
pub fn build_block(id: BlockId, inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    check_block_hypothesis(id, inst)?;
    build_unchecked(id, inst)
}

pub(crate) fn build_unchecked(id: BlockId, inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    let t = inst.t() as usize;
    let p1 = inst.p_pow(1);
    match id {
        BlockId::Chi => chi_with(inst, &inst.int(1)),
        BlockId::ChiPrime(lam) => chi_with(inst, &teich_inv(inst, lam)?),
        BlockId::Phi => {
            let ratio = inst.p_pow(2).div(&inst.a_p)?;
            let value = poly(inst, &[(2, inst.int(1)), (inst.r as usize - 1, inst.int(-1))]);
            series(
                inst,
                0..=2 * t + 1,
                |n| Ok(ratio.pow(n as i64)?),
                TreeVertex::spine,
                &value,
            )
        }
        BlockId::Xi => {
            // -1/(p^2 (3-r)) sum_{n=0}^{2t+1} (a_p/p)^{n+1} [g0_{n,0}, P]
            let pre = -(inst.p_pow(2) * inst.int(3 - inst.ri())).inv()?;
            let ratio = inst.a_p.div(&p1)?;
            series(
                inst,
                0..=2 * t + 1,
                |n| Ok(pre * ratio.pow(n as i64 + 1)?),
                TreeVertex::spine,
                &p_poly(inst),
            )
        }
        BlockId::XiPrime => xi_family(inst, &p1),
        BlockId::XiDblPrime => xi_family(inst, &inst.c()),
        BlockId::Psi(mu) => psi_family(inst, mu, &p1),
        BlockId::PsiPrime(mu) => psi_family(inst, mu, &inst.c()),
    }
}

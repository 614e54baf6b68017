use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::binom::{binom, build_beta};
use crate::hecke::{reduce_and_project, ExtPoly, FpTreeFunction, TreeFunction, TreeVertex};
use crate::padic::ExtScalar;
use crate::report::{Status, VerificationReport};
use crate::symmod::{build_q, linalg, FpPoly, JhFactor, SymError};

use super::blocks::{build_unchecked, mono, poly, psi_family, teich_inv, xi_family};
use super::{hypothesis, BlockId, Instance, LemmaVerifyError};

/// The image computations bounding F_1, F_2 and F_3, by regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropId {
    /// F_1, tau >= t.
    F1,
    /// F_2, tau <= t.
    F2LeT,
    /// F_2, tau > t + 1/2.
    F2Gt,
    /// F_3, tau <= t.
    F3LeT,
    /// F_3, tau < t + 1.
    F3LtT1,
    /// F_3, tau >= t + 1.
    F3GeT1,
}

impl PropId {
    pub const ALL: [PropId; 6] = [
        PropId::F1,
        PropId::F2LeT,
        PropId::F2Gt,
        PropId::F3LeT,
        PropId::F3LtT1,
        PropId::F3GeT1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropId::F1 => "F1",
            PropId::F2LeT => "F2_le_t",
            PropId::F2Gt => "F2_gt",
            PropId::F3LeT => "F3_le_t",
            PropId::F3LtT1 => "F3_lt_t1",
            PropId::F3GeT1 => "F3_ge_t1",
        }
    }

    pub fn factor(self, p: u64) -> JhFactor {
        match self {
            PropId::F1 => JhFactor::j1(p),
            PropId::F2LeT | PropId::F2Gt => JhFactor::j2(p),
            _ => JhFactor::j3(p),
        }
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropId {
    type Err = LemmaVerifyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let key = text.trim().to_ascii_lowercase().replace('-', "_");
        PropId::ALL
            .into_iter()
            .find(|id| id.name().to_ascii_lowercase() == key)
            .ok_or_else(|| LemmaVerifyError::UnknownId(text.to_string()))
    }
}

/// sum_{lam != 0} g0_{1,[lam]} f + (1-p) g0_{1,0} f
fn star(inst: &Instance, f: &TreeFunction) -> Result<TreeFunction, LemmaVerifyError> {
    let mut out = f.translate_child(0)?.scale(&inst.int(1 - inst.p as i64));
    for lam in 1..inst.p {
        out = out.add(&f.translate_child(lam)?);
    }
    Ok(out)
}

fn at_origin(value: ExtPoly) -> TreeFunction {
    TreeFunction::single(TreeVertex::origin(), value)
}

fn big(inst: &Instance, n: &BigInt) -> ExtScalar {
    ExtScalar::from_bigint(inst.prime(), n)
}

/// Indices j in [lo, hi] with j = class mod (p-1).
fn class_range(inst: &Instance, lo: u64, hi: u64, class: u64) -> impl Iterator<Item = u64> {
    let m = inst.p - 1;
    (lo..=hi).filter(move |j| j % m == class % m)
}

/// sum_j C(n, j) X^{r-j}Y^j over the listed j.
fn binom_poly(inst: &Instance, n: u64, js: impl Iterator<Item = u64>) -> ExtPoly {
    let terms: Vec<(usize, ExtScalar)> = js.map(|j| (j as usize, big(inst, &binom(n, j as i64)))).collect();
    poly(inst, &terms)
}

fn residue(x: &ExtScalar, what: &str) -> Result<u64, LemmaVerifyError> {
    x.residue()
        .map_err(|e| LemmaVerifyError::Precision(format!("residue of {what} = {x}: {e}")))
}

fn check_regime(id: PropId, inst: &Instance) -> Result<(), LemmaVerifyError> {
    let (tau, t) = (inst.tau(), inst.t());
    let needs = |cond: bool, what: &str| hypothesis(cond, || format!("{id} needs {what}; tau = {tau}, t = {t}"));
    match id {
        PropId::F1 => needs(inst.tau_cmp(0)? != Ordering::Less, "tau >= t"),
        PropId::F2LeT => {
            needs(inst.tau_cmp(0)? != Ordering::Greater, "tau <= t")?;
            needs(inst.tau_tilde().exact() == tau.exact(), "tau = tau~")?;
            needs(t >= 1, "t >= 1 for J2 to be defined")
        }
        PropId::F2Gt => {
            needs(inst.tau_cmp(1)? == Ordering::Greater, "tau > t+1/2")?;
            needs(t >= 1, "t >= 1 for J2 to be defined")
        }
        PropId::F3LeT => needs(inst.tau_cmp(0)? != Ordering::Greater, "tau <= t"),
        PropId::F3LtT1 => needs(inst.tau_cmp(2)? == Ordering::Less, "tau < t+1"),
        PropId::F3GeT1 => needs(inst.tau_cmp(2)? != Ordering::Less, "tau >= t+1"),
    }
}

fn f1_function(inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    let (p, r) = (inst.p, inst.r);
    let js: Vec<u64> = class_range(inst, 1, r - 1, 3).collect();
    let s = |i: i64| -> BigInt { js.iter().map(|&j| binom(j, i) * binom(r, j as i64)).sum() };
    let (s0, s1) = (s(0), s(1));
    let pm1 = BigInt::from(p - 1);
    let a = ExtScalar::from_ratio(inst.prime(), &(BigInt::from(p + 2) * &s0 - &s1), &pm1)?;
    let b = ExtScalar::from_ratio(inst.prime(), &(&s1 - BigInt::from(3) * &s0), &pm1)?;
    let inner = binom_poly(inst, r, js.iter().copied())
        .sub(&mono(inst, 3).scale(&a))
        .sub(&mono(inst, (p + 2) as usize).scale(&b));
    let three_r = inst.int(3 - inst.ri());
    let pre0 = inst.int(p as i64 - 1).div(&(inst.p_pow(1) * inst.a_p * three_r))?;
    let f0 = at_origin(inner.scale(&pre0));
    let chi = build_unchecked(BlockId::Chi, inst)?;
    let f_inf = star(inst, &chi)?.scale(&(inst.p_pow(1) * three_r).inv()?);
    Ok(f0.add(&f_inf))
}

fn f2_le_t_function(inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    let (p, r) = (inst.p, inst.r);
    let ct = inst.c_tilde();
    let a_ = mono(inst, 1);
    let b_ = binom_poly(inst, r - 2, class_range(inst, 2, r - 3, 1));
    let c_ = mono(inst, p as usize);
    let phi_js: Vec<u64> = class_range(inst, 2, r - 2, 1).collect();
    let s0: BigInt = phi_js.iter().map(|&j| binom(r, j as i64)).sum();
    let phi = binom_poly(inst, r, phi_js.iter().copied()).sub(&c_.scale(&big(inst, &s0)));
    let one_p = inst.int(1 - p as i64);
    let c_r2 = big(inst, &binom(r, 2));
    let b_coeff = (c_r2 * inst.p_pow(3)).div(&(inst.int(3) * inst.a_p * inst.a_p))?;
    let f0 = a_
        .add(&b_.scale(&b_coeff))
        .scale(&one_p.div(&(inst.p_pow(1) * ct))?)
        .add(&c_.scale(&inst.int(p as i64 - 1).div(&inst.a_p)?));
    let f1 = star(inst, &at_origin(phi))?.scale(&-(inst.int(3) * inst.a_p * ct).inv()?);
    let chi = build_unchecked(BlockId::Chi, inst)?;
    let mut psi = TreeFunction::new(inst.prime(), r as usize);
    for mu in 1..p {
        let w = teich_inv(inst, mu)?.pow(2)?;
        psi = psi.add(&chi.translate_child(mu)?.scale(&w));
    }
    let f_inf = star(inst, &psi)?.scale(&(inst.int(3) * ct * one_p).inv()?);
    Ok(at_origin(f0).add(&f1).add(&f_inf))
}

fn f2_gt_function(inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    let (p, r) = (inst.p, inst.r);
    let ri = inst.ri();
    let pre = inst
        .int((p as i64 - 1) * (ri - 2))
        .div(&(inst.p_pow(2) * inst.int(3 - ri)))?;
    let second = inst.int(ri - 2).div(&(inst.int(2) * inst.p_pow(1)))?;
    let f0 = binom_poly(inst, r - 1, class_range(inst, 2, r - 2, 2))
        .scale(&pre)
        .add(&mono(inst, 2).scale(&second));
    let xi = build_unchecked(BlockId::Xi, inst)?;
    Ok(at_origin(f0).add(&star(inst, &xi)?))
}

fn f3_le_t_function(inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    let (p, r) = (inst.p, inst.r);
    let c = inst.c();
    let beta = build_beta(p, r)?;
    let terms = class_range(inst, 2, r - 2, 2)
        .map(|j| {
            let b = beta
                .get(j)
                .ok_or_else(|| LemmaVerifyError::Precondition(format!("beta_{j} is not defined")))?;
            Ok((j as usize, big(inst, b)))
        })
        .collect::<Result<Vec<_>, LemmaVerifyError>>()?;
    let f0 = poly(inst, &terms).scale(&inst.int(p as i64 - 1).div(&(inst.a_p * c))?);
    let mut f_inf = TreeFunction::new(inst.prime(), r as usize);
    for lam in 1..p {
        f_inf = f_inf.add(&build_unchecked(BlockId::ChiPrime(lam), inst)?.translate_child(lam)?);
    }
    f_inf = f_inf.scale(&c.inv()?);
    let phi = build_unchecked(BlockId::Phi, inst)?.translate_child(0)?;
    let w = inst.int(inst.ri() * (p as i64 - 1)).div(&(inst.p_pow(1) * c))?;
    Ok(at_origin(f0).add(&f_inf).add(&phi.scale(&w)))
}

/// The tau < t+1 function with c replaced by k. Taking k = -(2-r)(3-r)p/2
/// gives the tau >= t+1 function.
fn f3_family(inst: &Instance, k: &ExtScalar) -> Result<TreeFunction, LemmaVerifyError> {
    let (p, r) = (inst.p, inst.r);
    let ri = inst.ri();
    let js: Vec<u64> = class_range(inst, 2, r - 2, 2).collect();
    let s: BigInt = js.iter().map(|&j| binom(r - 1, j as i64)).sum();
    let tt: BigInt = js.iter().map(|&j| BigInt::from(j) * binom(r - 1, j as i64)).sum();
    let ka = *k * inst.a_p;
    let two_minus = mono(inst, 2).sub(&mono(inst, (p + 1) as usize));
    let f0 = binom_poly(inst, r - 1, js.iter().copied())
        .scale(&inst.int(1 - p as i64))
        .add(&mono(inst, 2).scale(&(inst.int(p as i64 - 1) * big(inst, &s))))
        .add(&two_minus.scale(&big(inst, &(BigInt::from(2) * &s - &tt))))
        .scale(&ka.inv()?);
    let kp2r = *k * inst.p_pow(1) * inst.int(2 - ri);
    let first = poly(inst, &[(2, inst.int(1)), (r as usize - 1, inst.int(2 - ri))]);
    let tail = binom_poly(inst, r, class_range(inst, 2, r - p, 2));
    let f1 = star(inst, &at_origin(first))?
        .scale(&-kp2r.inv()?)
        .add(&star(inst, &at_origin(tail))?.scale(&inst.int(1 - p as i64).div(&kp2r)?))
        .add(
            &star(inst, &at_origin(mono(inst, 2)))?
                .scale(&-(inst.int(3 * (3 - ri)).div(&(inst.int(2) * *k * inst.int(2 - ri)))?)),
        );
    let two_r_sq = inst.int((2 - ri) * (2 - ri));
    let xi = star(inst, &xi_family(inst, k)?)?.scale(&inst.int(p as i64 * ri - 2).div(&two_r_sq)?);
    let mut psi = TreeFunction::new(inst.prime(), r as usize);
    for mu in 1..p {
        psi = psi.add(&star(inst, &psi_family(inst, mu, k)?)?);
    }
    let psi = psi.scale(&inst.int(ri - 2).inv()?);
    Ok(at_origin(f0).add(&f1).add(&xi).add(&psi))
}

fn ge_constant(inst: &Instance) -> Result<ExtScalar, LemmaVerifyError> {
    let ri = inst.ri();
    Ok(-(inst.int((2 - ri) * (3 - ri)) * inst.p_pow(1)).div(&inst.int(2))?)
}

/// The function f whose (T - a_p)-image the proposition computes.
pub fn build_prop_function(id: PropId, inst: &Instance) -> Result<TreeFunction, LemmaVerifyError> {
    check_regime(id, inst)?;
    match id {
        PropId::F1 => f1_function(inst),
        PropId::F2LeT => f2_le_t_function(inst),
        PropId::F2Gt => f2_gt_function(inst),
        PropId::F3LeT => f3_le_t_function(inst),
        PropId::F3LtT1 => f3_family(inst, &inst.c()),
        PropId::F3GeT1 => f3_family(inst, &ge_constant(inst)?),
    }
}

/// Claimed image in ind J_i, with the constants it depends on.
pub fn expected_image(id: PropId, inst: &Instance) -> Result<(FpTreeFunction, String, Vec<String>), LemmaVerifyError> {
    let p = inst.p;
    let factor = id.factor(p);
    let mut generator = FpTreeFunction::for_factor(p, factor);
    generator.add_term(TreeVertex::origin(), FpPoly::monomial(p, factor.m, 0));
    let three_r = inst.int(3 - inst.ri());
    let inv3 = linalg::inv(p, 3);
    let mut consts = Vec::new();
    let (image, claim) = match id {
        PropId::F1 => {
            let lt = residue(&(inst.int(3) * inst.c_tilde()).div(&three_r)?, "3c~/(3-r)")?;
            consts.push(format!("lambda~ = {lt}"));
            let coeffs = [linalg::sub(p, 0, inv3), linalg::mul(p, lt, inv3)];
            (
                generator.apply_poly_in_t(&coeffs)?,
                format!("(1/3)(lambda~ T - 1)[1, X^(p-4)] with lambda~ = {lt}"),
            )
        }
        PropId::F2LeT => {
            let li = residue(&three_r.div(&(inst.int(3) * inst.c_tilde()))?, "(3-r)/(3c~)")?;
            consts.push(format!("1/lambda~ = {li}"));
            (
                generator.apply_poly_in_t(&[p - 1, li])?,
                format!("(T/lambda~ - 1)[1, X] with 1/lambda~ = {li}"),
            )
        }
        PropId::F2Gt => {
            let k = residue(&-(inst.a_p * inst.a_p).div(&inst.p_pow(3))?, "-a_p^2/p^3")?;
            consts.push(format!("-a_p^2/p^3 = {k} mod p"));
            let mut h = FpTreeFunction::for_factor(p, factor);
            for lam in 0..p {
                h.add_term(TreeVertex::side0(vec![lam]), FpPoly::monomial(p, 1, 1).scale(k));
            }
            (h, format!("{k} * sum_lam [g0_{{1,[lam]}}, Y]"))
        }
        PropId::F3LeT => {
            let num = inst.int(3) * (inst.p_pow(3) - inst.a_p * inst.a_p);
            let k = residue(
                &num.div(&(inst.p_pow(1) * inst.a_p * inst.c()))?,
                "3(p^3-a_p^2)/(p a_p c)",
            )?;
            consts.push(format!("3(p^3-a_p^2)/(p a_p c) = {k} mod p"));
            let mut h = FpTreeFunction::for_factor(p, factor);
            h.add_term(TreeVertex::spine(1), FpPoly::monomial(p, factor.m, 0).scale(k));
            (h, format!("{k} [g0_{{1,0}}, X^(p-2)]"))
        }
        PropId::F3LtT1 => (generator.apply_poly_in_t(&[0, 1])?, "T[1, X^(p-2)]".to_string()),
        PropId::F3GeT1 => {
            let d = ge_constant(inst)?;
            let d_bar = residue(&-inst.c().div(&d)?, "2c/((2-r)(3-r)p)")?;
            consts.push(format!("d = {d_bar}"));
            (
                generator.apply_poly_in_t(&[1, linalg::sub(p, 0, d_bar), 1])?,
                format!("(T^2 - {d_bar} T + 1)[1, X^(p-2)]"),
            )
        }
    };
    Ok((image, claim, consts))
}

/// lambda from c and lambda~ from c~ agree when tau~ = t.
fn lambda_consistency(inst: &Instance, report: &mut VerificationReport) -> Result<(), LemmaVerifyError> {
    if inst.tau_tilde().exact() != Some(inst.t_plus(0)) {
        return Ok(());
    }
    let three_r = inst.int(3 - inst.ri());
    let l = residue(&(inst.int(3) * inst.c()).div(&three_r)?, "3c/(3-r)")?;
    let lt = residue(&(inst.int(3) * inst.c_tilde()).div(&three_r)?, "3c~/(3-r)")?;
    if l == lt {
        report.note(format!("lambda = lambda~ = {l}"));
    } else {
        report.fail(format!("lambda = {l} but lambda~ = {lt}"));
    }
    Ok(())
}

/// Compute (T - a_p) f, reduce, project to ind J_i and compare literally
/// with the claimed image.
pub fn verify_section_prop(id: PropId, inst: &Instance) -> Result<VerificationReport, LemmaVerifyError> {
    let p = inst.p;
    if id == PropId::F3LtT1 && (inst.r - 2).is_multiple_of(p) {
        let mut report = VerificationReport::new(format!("prop:{id}"), "T[1, X^(p-2)] (requires v(2-r) = 0)");
        report.status = Status::NotAsserted;
        report.note(format!(
            "instance {inst}: v(2-r) > 0, the image computation does not apply"
        ));
        return Ok(report);
    }
    let f = build_prop_function(id, inst)?;
    let basis = build_q(p, inst.r as usize)?;
    let factor = id.factor(p);
    if basis.factor(factor.name).is_none() {
        return Err(SymError::Undefined("J2").into());
    }
    let image = f.hecke_minus_scalar(&inst.a_p)?;
    let (expected, claim, consts) = expected_image(id, inst)?;
    let mut report = VerificationReport::new(
        format!("prop:{id}"),
        format!("image of (T-a_p)f in ind {} is {claim}", factor.name),
    );
    report.note(format!("instance {inst}"));
    for c in consts {
        report.note(c);
    }
    let got = reduce_and_project(&image, factor, &basis)?;
    let diff = got.sub(&expected);
    if let Some((v, val)) = diff.iter().next() {
        let at = |g: &FpTreeFunction| g.get(v).map_or("0".to_string(), |x| x.to_string());
        report.fail(format!(
            "at {v}: image {} but claimed {} (difference {val})",
            at(&got),
            at(&expected)
        ));
    }
    match id {
        PropId::F1 | PropId::F2LeT => lambda_consistency(inst, &mut report)?,
        PropId::F3LeT if expected.is_empty() => report.fail("claimed image vanishes: the generator is not hit"),
        _ => {}
    }
    Ok(report)
}

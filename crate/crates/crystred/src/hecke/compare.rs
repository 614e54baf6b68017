use serde::Serialize;

use crate::padic::HalfInt;
use crate::report::VerificationReport;

use super::TreeFunction;

/// Monomials a residual may carry at a weaker integrality scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualShape {
    /// Indices j of the allowed monomials X^{r-j} Y^j.
    pub allowed: Vec<usize>,
    /// The allowed part must be divisible by p^scale.
    pub scale: HalfInt,
}

impl ResidualShape {
    /// {X^r, X^{r-1}Y}.
    pub fn low(scale: HalfInt) -> Self {
        ResidualShape {
            allowed: vec![0, 1],
            scale,
        }
    }

    /// {X^{r-1}Y, XY^{r-1}}.
    pub fn outer(r: usize, scale: HalfInt) -> Self {
        ResidualShape {
            allowed: vec![1, r - 1],
            scale,
        }
    }
}

/// Is f - g = O(p^s), after letting `shape` absorb its monomials?
/// Allowed monomials need valuation min(scale, s); the rest need s.
pub fn big_o_compare(
    f: &TreeFunction,
    g: &TreeFunction,
    s: HalfInt,
    shape: Option<&ResidualShape>,
) -> VerificationReport {
    let mut report = VerificationReport::new("big-o", format!("difference is O(p^{s})"));
    report.required = Some(s);
    let diff = f.sub(g);
    let r = f.r();
    let mut min_rest: Option<i64> = None;
    let mut min_shape: Option<i64> = None;
    for (v, val) in diff.iter() {
        for (j, c) in val.coeffs().iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            let allowed = shape.is_some_and(|sh| sh.allowed.contains(&j));
            let need = match shape {
                Some(sh) if allowed => sh.scale.min(s).pi_units(),
                _ => s.pi_units(),
            };
            let slot = if allowed { &mut min_shape } else { &mut min_rest };
            match c.vpi() {
                Some(vpi) => {
                    *slot = Some(slot.map_or(vpi, |m| m.min(vpi)));
                    if vpi < need {
                        report.fail(format!(
                            "[{v}, X^{}Y^{j}] has valuation {} < {}",
                            r - j,
                            HalfInt(vpi),
                            HalfInt(need)
                        ));
                    }
                }
                None if c.abs_prec() < need => {
                    report.fail(format!(
                        "[{v}, X^{}Y^{j}] known only modulo p^{}, cannot certify p^{}",
                        r - j,
                        HalfInt(c.abs_prec()),
                        HalfInt(need)
                    ));
                }
                None => {}
            }
        }
    }
    report.min_valuation = min_rest.map(HalfInt);
    if let Some(m) = min_shape {
        report.note(format!("shaped part has minimal valuation {}", HalfInt(m)));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::{ExtPoly, TreeVertex};
    use crate::padic::{ExtScalar, Prime};

    #[test]
    fn valuation_threshold() {
        let prime = Prime::new(5).unwrap();
        let f = TreeFunction::single(
            TreeVertex::origin(),
            ExtPoly::term(ExtScalar::from_i64(prime, 25), 11, 0),
        );
        let zero = TreeFunction::new(prime, 11);
        assert!(big_o_compare(&f, &zero, HalfInt::from_int(2), None).passed());
        let rep = big_o_compare(&f, &zero, HalfInt(5), None);
        assert!(!rep.passed());
        assert_eq!(rep.min_valuation, Some(HalfInt(4)));
        assert!(big_o_compare(&f, &f, HalfInt::from_int(20), None).passed());
    }

    #[test]
    fn shape_absorbs_allowed_monomials() {
        let prime = Prime::new(5).unwrap();
        let r = 11;
        let mut val = ExtPoly::term(ExtScalar::from_i64(prime, 5), r, 1);
        val = val.add(&ExtPoly::term(ExtScalar::from_i64(prime, 125), r, 5));
        let f = TreeFunction::single(TreeVertex::spine(1), val);
        let zero = TreeFunction::new(prime, r);
        let s = HalfInt::from_int(3);
        assert!(!big_o_compare(&f, &zero, s, None).passed());
        assert!(big_o_compare(&f, &zero, s, Some(&ResidualShape::low(HalfInt::from_int(1)))).passed());
        assert!(!big_o_compare(&f, &zero, s, Some(&ResidualShape::low(HalfInt::from_int(2)))).passed());
    }
}

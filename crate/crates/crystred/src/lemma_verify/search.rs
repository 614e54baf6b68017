use std::collections::{BTreeMap, HashMap};

use crate::hecke::{FpTreeFunction, TreeVertex};
use crate::padic::Prime;
use crate::report::VerificationReport;
use crate::symmod::{linalg, FpPoly, JhFactor};

use super::LemmaVerifyError;

/// Largest radius the search accepts.
pub const MAX_SEARCH_RADIUS: usize = 4;

type Sparse = BTreeMap<usize, u64>;

/// Row-echelon store of sparse vectors keyed by leading index, each
/// remembering which inserted generators it combines.
struct SparseEchelon {
    p: u64,
    rows: HashMap<usize, (Sparse, Sparse)>,
}

impl SparseEchelon {
    fn new(p: u64) -> Self {
        SparseEchelon {
            p,
            rows: HashMap::new(),
        }
    }

    fn axpy(p: u64, dst: &mut Sparse, src: &Sparse, c: u64) {
        for (&k, &v) in src {
            let e = dst.entry(k).or_insert(0);
            *e = linalg::sub(p, *e, linalg::mul(p, c, v));
            if *e == 0 {
                dst.remove(&k);
            }
        }
    }

    /// Reduce on leading entries. The result is zero iff v is in the span.
    fn reduce(&self, mut v: Sparse, mut combo: Sparse) -> (Sparse, Sparse) {
        while let Some((&lead, &coef)) = v.iter().next() {
            let Some((row, rcombo)) = self.rows.get(&lead) else {
                break;
            };
            Self::axpy(self.p, &mut v, row, coef);
            Self::axpy(self.p, &mut combo, rcombo, coef);
        }
        (v, combo)
    }

    fn insert(&mut self, v: Sparse, tag: usize) {
        let (v, combo) = self.reduce(v, Sparse::from([(tag, 1)]));
        let Some((&lead, &coef)) = v.iter().next() else { return };
        let inv = linalg::inv(self.p, coef);
        let scale = |m: Sparse| {
            m.into_iter()
                .map(|(k, x)| (k, linalg::mul(self.p, x, inv)))
                .collect::<Sparse>()
        };
        self.rows.insert(lead, (scale(v), scale(combo)));
    }
}

/// Coordinates of J2-valued functions: (vertex, monomial index).
struct Coordinates {
    index: BTreeMap<(TreeVertex, usize), usize>,
}

impl Coordinates {
    fn of(&mut self, v: &TreeVertex, j: usize) -> usize {
        let n = self.index.len();
        *self.index.entry((v.clone(), j)).or_insert(n)
    }

    fn vector(&mut self, f: &FpTreeFunction) -> Sparse {
        let mut out = Sparse::new();
        for (v, val) in f.iter() {
            for (j, &c) in val.coeffs.iter().enumerate() {
                if c != 0 {
                    out.insert(self.of(v, j), c);
                }
            }
        }
        out
    }
}

/// Some f supported in the ball of the given radius with T f = target.
pub fn bounded_preimage_search(
    target: &FpTreeFunction,
    radius: usize,
) -> Result<Option<FpTreeFunction>, LemmaVerifyError> {
    if radius > MAX_SEARCH_RADIUS {
        return Err(LemmaVerifyError::Precondition(format!(
            "radius {radius} exceeds {MAX_SEARCH_RADIUS}"
        )));
    }
    let (p, m, twist) = (target.p(), target.m(), target.twist());
    Prime::new(p)?;
    let mut coords = Coordinates { index: BTreeMap::new() };
    let mut unknowns = Vec::new();
    let mut ech = SparseEchelon::new(p);
    for v in TreeVertex::ball(p, radius) {
        for j in 0..=m {
            let basis = FpTreeFunction::single(p, twist, v.clone(), FpPoly::monomial(p, m, j));
            let image = coords.vector(&basis.hecke()?);
            ech.insert(image, unknowns.len());
            unknowns.push((v.clone(), j));
        }
    }
    let rhs = coords.vector(target);
    let (rest, combo) = ech.reduce(rhs, Sparse::new());
    if !rest.is_empty() {
        return Ok(None);
    }
    // v - sum c_i T e_i = 0 after reduction, so v = sum (-combo_i) T e_i
    let mut f = FpTreeFunction::new(p, m, twist);
    for (tag, c) in combo {
        let (v, j) = &unknowns[tag];
        f.add_term(v.clone(), FpPoly::monomial(p, m, *j).scale(linalg::sub(p, 0, c)));
    }
    Ok(Some(f))
}

fn j2_function(p: u64) -> FpTreeFunction {
    FpTreeFunction::for_factor(p, JhFactor::j2(p))
}

/// h = sum_{lam in F_p} [g0_{1,[lam]}, Y] in ind J2.
fn obstruction(p: u64) -> FpTreeFunction {
    let mut h = j2_function(p);
    for lam in 0..p {
        h.add_term(TreeVertex::side0(vec![lam]), FpPoly::monomial(p, 1, 1));
    }
    h
}

/// No J2-valued f supported in the ball of the given radius has T f = h.
pub fn lemma62_bounded_search(p: u64, radius: usize) -> Result<VerificationReport, LemmaVerifyError> {
    let h = obstruction(p);
    let mut report = VerificationReport::new(
        "bounded-nonmembership",
        format!("sum_lam [g0_{{1,[lam]}}, Y] has no T-preimage supported within radius {radius} (p = {p})"),
    );
    let vertices = TreeVertex::ball(p, radius).len();
    report.note(format!("{} unknowns over {vertices} vertices", 2 * vertices));
    if let Some(f) = bounded_preimage_search(&h, radius)? {
        report.fail(format!("preimage found: {f}"));
    }
    Ok(report)
}

/// Control: the planted target T[1, X] must be solved.
pub fn lemma62_control(p: u64, radius: usize) -> Result<VerificationReport, LemmaVerifyError> {
    let mut planted = j2_function(p);
    planted.add_term(TreeVertex::origin(), FpPoly::monomial(p, 1, 0));
    let target = planted.hecke()?;
    let mut report = VerificationReport::new(
        "bounded-search-control",
        format!("T[1, X] has a preimage within radius {radius}"),
    );
    match bounded_preimage_search(&target, radius)? {
        Some(f) if f.hecke()? == target => report.note(format!("solution {f}")),
        Some(f) => report.fail(format!("returned {f} does not solve the system")),
        None => report.fail("no solution found for the planted target"),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstruction_small_radii() {
        for r in 0..=2 {
            let rep = lemma62_bounded_search(5, r).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn planted_solution_is_found() {
        let rep = lemma62_control(5, 1).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.notes.iter().any(|n| n.contains("solution")));
    }

    #[test]
    fn radius_guard() {
        assert!(bounded_preimage_search(&obstruction(5), 5).is_err());
    }

    /// Dense oracle: rank comparison of [A] and [A | h].
    #[test]
    fn agrees_with_dense_rank_oracle() {
        let p = 5;
        for radius in 0..=1 {
            let verts = TreeVertex::ball(p, radius);
            let mut coords = Coordinates { index: BTreeMap::new() };
            let mut cols = Vec::new();
            for v in &verts {
                for j in 0..=1 {
                    let e = FpTreeFunction::single(p, 1, v.clone(), FpPoly::monomial(p, 1, j));
                    cols.push(coords.vector(&e.hecke().unwrap()));
                }
            }
            let h = coords.vector(&obstruction(p));
            let dim = coords.index.len();
            let dense = |s: &Sparse| (0..dim).map(|i| *s.get(&i).unwrap_or(&0)).collect::<Vec<u64>>();
            let a: Vec<Vec<u64>> = cols.iter().map(dense).collect();
            let rank_a = linalg::Echelon::spanned_by(p, dim, a.iter()).rank();
            let mut ah = a.clone();
            ah.push(dense(&h));
            let rank_ah = linalg::Echelon::spanned_by(p, dim, ah.iter()).rank();
            assert_eq!(rank_ah, rank_a + 1, "radius {radius}");
        }
    }
}

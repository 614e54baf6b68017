use serde::Serialize;

use super::linalg::{self, Echelon};
use super::{rho_matrix, rho_twisted, FpPoly, GammaElement, SymError};

type Mat = Vec<Vec<u64>>;

/// V_m twisted by det^twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JhFactor {
    pub name: &'static str,
    pub m: usize,
    pub twist: u64,
}

impl JhFactor {
    pub fn j1(p: u64) -> Self {
        JhFactor {
            name: "J1",
            m: p as usize - 4,
            twist: 3,
        }
    }
    pub fn j2(_p: u64) -> Self {
        JhFactor {
            name: "J2",
            m: 1,
            twist: 1,
        }
    }
    pub fn j3(p: u64) -> Self {
        JhFactor {
            name: "J3",
            m: p as usize - 2,
            twist: 2,
        }
    }
    pub fn parse(p: u64, text: &str) -> Option<Self> {
        match text.to_ascii_uppercase().as_str() {
            "J1" => Some(Self::j1(p)),
            "J2" => Some(Self::j2(p)),
            "J3" => Some(Self::j3(p)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureCase {
    /// r != 3 mod p: two factors.
    Two,
    /// r = 3 mod p: three factors.
    Three,
}

/// A / B for subspaces B of A of F_p^dim.
#[derive(Clone, Debug)]
struct Subquotient {
    p: u64,
    bottom: Echelon,
    reps: Vec<Vec<u64>>,
    rep_pivots: Vec<usize>,
}

impl Subquotient {
    fn new(p: u64, top: &Echelon, bottom: &Echelon) -> Self {
        let mut reps = Echelon::new(p, top.ambient_dim());
        for row in top.rows() {
            reps.insert(&bottom.reduce(row));
        }
        Subquotient {
            p,
            bottom: bottom.clone(),
            reps: reps.rows().to_vec(),
            rep_pivots: reps.pivots().to_vec(),
        }
    }

    fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of v modulo B, or `None` when v is not in A.
    fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut red = self.bottom.reduce(v);
        let coords: Vec<u64> = self.rep_pivots.iter().map(|&c| red[c]).collect();
        for (row, &c) in self.reps.iter().zip(&coords) {
            for (x, y) in red.iter_mut().zip(row) {
                *x = linalg::sub(p, *x, linalg::mul(p, c, *y));
            }
        }
        red.iter().all(|&x| x == 0).then_some(coords)
    }

    fn action(&self, rho: &Mat) -> Mat {
        let d = self.dim();
        let mut out = vec![vec![0; d]; d];
        for (j, rep) in self.reps.iter().enumerate() {
            let img = linalg::mat_vec(self.p, rho, rep);
            let c = self.coords(&img).expect("subquotient is not stable");
            for i in 0..d {
                out[i][j] = c[i];
            }
        }
        out
    }
}

/// Span of the Gamma-orbits of `seeds`.
fn closure(p: u64, dim: usize, seeds: &[Vec<u64>], rhos: &[Mat]) -> Echelon {
    let mut span = Echelon::new(p, dim);
    let mut queue: Vec<Vec<u64>> = Vec::new();
    for s in seeds {
        if span.insert(s) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        for rho in rhos {
            let img = linalg::mat_vec(p, rho, &v);
            if span.insert(&img) {
                queue.push(img);
            }
        }
    }
    span
}

/// Gamma-maps M -> N: all H with H rho_M(g) = rho_N(g) H for the generators.
fn hom_space(p: u64, rho_m: &[Mat], rho_n: &[Mat]) -> Vec<Mat> {
    let dm = rho_m[0].len();
    let dn = rho_n[0].len();
    let idx = |a: usize, b: usize| a * dm + b;
    let mut eqs = Vec::new();
    for (gm, gn) in rho_m.iter().zip(rho_n) {
        for a in 0..dn {
            for c in 0..dm {
                let mut row = vec![0u64; dn * dm];
                for b in 0..dm {
                    row[idx(a, b)] = linalg::add(p, row[idx(a, b)], gm[b][c]);
                }
                for d in 0..dn {
                    row[idx(d, c)] = linalg::sub(p, row[idx(d, c)], gn[a][d]);
                }
                eqs.push(row);
            }
        }
    }
    linalg::nullspace(p, &eqs, dn * dm)
        .into_iter()
        .map(|flat| flat.chunks(dm).map(<[u64]>::to_vec).collect())
        .collect()
}

/// Existence of a Gamma-equivariant retraction of M onto its subspace S
/// (given by coordinates of a basis of S inside M).
fn retraction_exists(p: u64, rho_m: &[Mat], rho_s: &[Mat], incl: &[Vec<u64>]) -> bool {
    let dm = rho_m[0].len();
    let ds = rho_s[0].len();
    let idx = |a: usize, b: usize| a * dm + b;
    let mut eqs = Vec::new();
    let mut rhs = Vec::new();
    for (gm, gs) in rho_m.iter().zip(rho_s) {
        for a in 0..ds {
            for c in 0..dm {
                let mut row = vec![0u64; ds * dm];
                for b in 0..dm {
                    row[idx(a, b)] = linalg::add(p, row[idx(a, b)], gm[b][c]);
                }
                for d in 0..ds {
                    row[idx(d, c)] = linalg::sub(p, row[idx(d, c)], gs[a][d]);
                }
                eqs.push(row);
                rhs.push(0);
            }
        }
    }
    // R . incl_k = e_k
    for (k, col) in incl.iter().enumerate() {
        for a in 0..ds {
            let mut row = vec![0u64; ds * dm];
            for b in 0..dm {
                row[idx(a, b)] = col[b];
            }
            eqs.push(row);
            rhs.push(u64::from(a == k));
        }
    }
    linalg::solve(p, &eqs, &rhs, ds * dm).is_some()
}

/// Normalized Gamma-map from a subquotient of V_r onto a factor.
#[derive(Clone, Debug)]
struct Projection {
    factor: JhFactor,
    domain: Subquotient,
    hom: Mat,
}

impl Projection {
    fn build(
        p: u64,
        factor: JhFactor,
        domain: Subquotient,
        gens: &[GammaElement],
        rhos: &[Mat],
        anchor: &[u64],
    ) -> Result<Self, SymError> {
        if domain.dim() != factor.m + 1 {
            return Err(SymError::Structure(format!(
                "{} piece has dimension {}, expected {}",
                factor.name,
                domain.dim(),
                factor.m + 1
            )));
        }
        let rho_m: Vec<Mat> = rhos.iter().map(|r| domain.action(r)).collect();
        let rho_j: Vec<Mat> = gens.iter().map(|g| rho_twisted(p, factor.m, factor.twist, g)).collect();
        let homs = hom_space(p, &rho_m, &rho_j);
        if homs.len() != 1 {
            return Err(SymError::Structure(format!(
                "Hom into {} has dimension {}",
                factor.name,
                homs.len()
            )));
        }
        let hom = homs.into_iter().next().unwrap();
        let coords = domain
            .coords(anchor)
            .ok_or_else(|| SymError::Structure(format!("{} anchor outside the domain", factor.name)))?;
        let image = linalg::mat_vec(p, &hom, &coords);
        if image[0] == 0 || image[1..].iter().any(|&x| x != 0) {
            return Err(SymError::Structure(format!(
                "{} anchor maps to {:?}",
                factor.name, image
            )));
        }
        let s = linalg::inv(p, image[0]);
        let hom = hom
            .into_iter()
            .map(|row| row.into_iter().map(|x| x * s % p).collect())
            .collect();
        Ok(Projection { factor, domain, hom })
    }

    fn apply(&self, v: &[u64]) -> Result<FpPoly, SymError> {
        let coords = self.domain.coords(v).ok_or(SymError::OutsideDomain(self.factor.name))?;
        Ok(FpPoly {
            p: self.domain.p,
            coeffs: linalg::mat_vec(self.domain.p, &self.hom, &coords),
        })
    }
}

/// The quotient Q = V_r / (X_{r-1} + V_r**) and its filtration
/// W subset W + <theta X^{r-p-1}> subset W + V_r* subset V_r.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub p: u64,
    pub r: usize,
    pub case: StructureCase,
    x_span: Echelon,
    v_star: Echelon,
    v_star2: Echelon,
    w: Echelon,
    w_star: Echelon,
    w_two: Echelon,
    j1: Projection,
    j2: Option<Projection>,
    j3: Projection,
    gens: Vec<GammaElement>,
    rhos: Vec<Mat>,
}

fn theta_multiples(p: u64, r: usize, power: u32) -> Vec<Vec<u64>> {
    let th = FpPoly::theta(p);
    let mut factor = FpPoly::monomial(p, 0, 0);
    for _ in 0..power {
        factor = factor.mul(&th);
    }
    let shift = factor.degree();
    if shift > r {
        return Vec::new();
    }
    (0..=r - shift)
        .map(|i| factor.mul(&FpPoly::monomial(p, r - shift, i)).coeffs)
        .collect()
}

fn sum_space(a: &Echelon, b: &Echelon) -> Echelon {
    let mut out = a.clone();
    for row in b.rows() {
        out.insert(row);
    }
    out
}

/// theta X^{r-p-1-i} Y^i as a vector of V_r.
fn theta_mono(p: u64, r: usize, i: usize) -> Vec<u64> {
    FpPoly::theta(p).mul(&FpPoly::monomial(p, r - p as usize - 1, i)).coeffs
}

pub fn build_q(p: u64, r: usize) -> Result<QuotientBasis, SymError> {
    let pu = p as usize;
    let prime_ok = p >= 5 && (2..p).all(|d| !p.is_multiple_of(d));
    if !prime_ok || r < 2 * pu + 1 || !(r - 3).is_multiple_of(pu - 1) {
        return Err(SymError::Precondition { p, r: r as u64 });
    }
    let dim = r + 1;
    let gens = GammaElement::generators(p);
    let rhos: Vec<Mat> = gens.iter().map(|g| rho_matrix(p, r, g)).collect();

    let x_span = closure(p, dim, &[FpPoly::monomial(p, r, 1).coeffs], &rhos);
    let v_star2 = Echelon::spanned_by(p, dim, theta_multiples(p, r, 2).iter());
    let v_star = Echelon::spanned_by(p, dim, theta_multiples(p, r, 1).iter());
    let w = sum_space(&x_span, &v_star2);
    let w_star = sum_space(&w, &v_star);
    let j2_gen = closure(p, dim, &[theta_mono(p, r, 0)], &rhos);
    let w_two = sum_space(&w, &j2_gen);

    let case = if r as u64 % p == 3 {
        StructureCase::Three
    } else {
        StructureCase::Two
    };
    let expected = match case {
        StructureCase::Two => 2 * pu - 4,
        StructureCase::Three => 2 * pu - 2,
    };
    let dim_q = dim - w.rank();
    if dim_q != expected {
        return Err(SymError::Structure(format!("dim Q = {dim_q}, expected {expected}")));
    }

    let full = Echelon::spanned_by(
        p,
        dim,
        (0..dim)
            .map(|j| FpPoly::monomial(p, r, j).coeffs)
            .collect::<Vec<_>>()
            .iter(),
    );
    let j1 = Projection::build(
        p,
        JhFactor::j1(p),
        Subquotient::new(p, &full, &w_star),
        &gens,
        &rhos,
        &FpPoly::monomial(p, r, 3).coeffs,
    )?;
    let j3 = Projection::build(
        p,
        JhFactor::j3(p),
        Subquotient::new(p, &w_star, &w_two),
        &gens,
        &rhos,
        &theta_mono(p, r, 1),
    )?;
    let j2_piece = Subquotient::new(p, &w_two, &w);
    let j2 = match case {
        StructureCase::Two => {
            if j2_piece.dim() != 0 {
                return Err(SymError::Structure(format!(
                    "J2 piece has dimension {} in the two-factor case",
                    j2_piece.dim()
                )));
            }
            None
        }
        StructureCase::Three => Some(Projection::build(
            p,
            JhFactor::j2(p),
            j2_piece,
            &gens,
            &rhos,
            &theta_mono(p, r, 0),
        )?),
    };
    Ok(QuotientBasis {
        p,
        r,
        case,
        x_span,
        v_star,
        v_star2,
        w,
        w_star,
        w_two,
        j1,
        j2,
        j3,
        gens,
        rhos,
    })
}

impl QuotientBasis {
    pub fn dim_q(&self) -> usize {
        self.r + 1 - self.w.rank()
    }

    pub fn dim_x_span(&self) -> usize {
        self.x_span.rank()
    }

    /// Image of P in the factor. J3 needs P in W + V*, J2 needs P in W + <theta X^{r-p-1}>.
    pub fn project(&self, poly: &FpPoly, target: JhFactor) -> Result<FpPoly, SymError> {
        assert_eq!(poly.degree(), self.r);
        match target.name {
            "J1" => self.j1.apply(&poly.coeffs),
            "J3" => self.j3.apply(&poly.coeffs),
            "J2" => self.j2.as_ref().ok_or(SymError::Undefined("J2"))?.apply(&poly.coeffs),
            _ => Err(SymError::Undefined("unknown factor")),
        }
    }

    pub fn factor(&self, name: &str) -> Option<JhFactor> {
        match name {
            "J1" => Some(self.j1.factor),
            "J2" => self.j2.as_ref().map(|j| j.factor),
            "J3" => Some(self.j3.factor),
            _ => None,
        }
    }

    /// Whether P lies in W = X_{r-1} + V_r**, i.e. dies in Q.
    pub fn dies_in_q(&self, poly: &FpPoly) -> bool {
        self.w.contains(&poly.coeffs)
    }

    pub fn in_w_star(&self, poly: &FpPoly) -> bool {
        self.w_star.contains(&poly.coeffs)
    }

    pub fn in_w_two(&self, poly: &FpPoly) -> bool {
        self.w_two.contains(&poly.coeffs)
    }

    /// Whether every listed subspace is stable under the generators.
    pub fn subspaces_stable(&self) -> bool {
        let p = self.p;
        [
            &self.x_span,
            &self.v_star,
            &self.v_star2,
            &self.w,
            &self.w_star,
            &self.w_two,
        ]
        .iter()
        .all(|space| {
            space.rows().iter().all(|row| {
                self.rhos
                    .iter()
                    .all(|rho| space.contains(&linalg::mat_vec(p, rho, row)))
            })
        })
    }

    /// Two-factor case: 0 -> J3 -> Q -> J1 -> 0 admits a Gamma-splitting.
    fn sequence_splits(&self) -> bool {
        let full_dim = self.r + 1;
        let full = Echelon::spanned_by(
            self.p,
            full_dim,
            (0..full_dim)
                .map(|j| FpPoly::monomial(self.p, self.r, j).coeffs)
                .collect::<Vec<_>>()
                .iter(),
        );
        let q = Subquotient::new(self.p, &full, &self.w);
        let sub = Subquotient::new(self.p, &self.w_star, &self.w);
        let rho_q: Vec<Mat> = self.rhos.iter().map(|r| q.action(r)).collect();
        let rho_s: Vec<Mat> = self.rhos.iter().map(|r| sub.action(r)).collect();
        let incl: Vec<Vec<u64>> = sub.reps.iter().map(|v| q.coords(v).unwrap()).collect();
        retraction_exists(self.p, &rho_q, &rho_s, &incl)
    }

    /// Three-factor case: V*/V** retracts onto its J2 part.
    fn theta_extension_splits(&self) -> bool {
        let m = Subquotient::new(self.p, &self.v_star, &self.v_star2);
        let sub_space = sum_space(
            &self.v_star2,
            &closure(self.p, self.r + 1, &[theta_mono(self.p, self.r, 0)], &self.rhos),
        );
        let sub = Subquotient::new(self.p, &sub_space, &self.v_star2);
        let rho_m: Vec<Mat> = self.rhos.iter().map(|r| m.action(r)).collect();
        let rho_s: Vec<Mat> = self.rhos.iter().map(|r| sub.action(r)).collect();
        let incl: Vec<Vec<u64>> = sub.reps.iter().map(|v| m.coords(v).unwrap()).collect();
        retraction_exists(self.p, &rho_m, &rho_s, &incl)
    }

    pub fn generators(&self) -> &[GammaElement] {
        &self.gens
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorInfo {
    pub name: &'static str,
    pub m: usize,
    pub twist: u64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnchorCheck {
    pub source: String,
    pub target: &'static str,
    pub expected: String,
    pub image: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QStructureReport {
    pub schema: u32,
    pub p: u64,
    pub r: usize,
    pub case: StructureCase,
    pub dim_q: usize,
    pub expected_dim_q: usize,
    pub factors: Vec<FactorInfo>,
    /// Two-factor case: the sequence splits.
    pub split: Option<bool>,
    /// Three-factor case: V*/V** is a non-split extension of J3 by J2.
    pub theta_extension_nonsplit: Option<bool>,
    pub anchors: Vec<AnchorCheck>,
    pub pass: bool,
}

pub fn q_structure_report(p: u64, r: usize) -> Result<QStructureReport, SymError> {
    let q = build_q(p, r)?;
    let pu = p as usize;
    let mut factors = vec![FactorInfo {
        name: "J1",
        m: pu - 4,
        twist: 3,
        dim: pu - 3,
    }];
    if q.j2.is_some() {
        factors.push(FactorInfo {
            name: "J2",
            m: 1,
            twist: 1,
            dim: 2,
        });
    }
    factors.push(FactorInfo {
        name: "J3",
        m: pu - 2,
        twist: 2,
        dim: pu - 1,
    });
    let expected_dim_q = match q.case {
        StructureCase::Two => 2 * pu - 4,
        StructureCase::Three => 2 * pu - 2,
    };

    let mut anchors = Vec::new();
    let mut check = |source: String, poly: FpPoly, target: JhFactor, expected: FpPoly| {
        let image = q.project(&poly, target);
        let pass = image.as_ref().map(|img| *img == expected).unwrap_or(false);
        anchors.push(AnchorCheck {
            source,
            target: target.name,
            expected: expected.to_string(),
            image: image.map(|i| i.to_string()).unwrap_or_else(|e| e.to_string()),
            pass,
        });
    };
    let j1 = JhFactor::j1(p);
    let j3 = JhFactor::j3(p);
    check(
        "X^{r-3}Y^3".into(),
        FpPoly::monomial(p, r, 3),
        j1,
        FpPoly::monomial(p, pu - 4, 0),
    );
    for i in 0..=2 {
        check(
            format!("X^{{r-{i}}}Y^{i}"),
            FpPoly::monomial(p, r, i),
            j1,
            FpPoly::zero(p, pu - 4),
        );
    }
    let theta_x = FpPoly {
        p,
        coeffs: theta_mono(p, r, 0),
    };
    check("theta X^{r-p-1}".into(), theta_x.clone(), j3, FpPoly::zero(p, pu - 2));
    if q.case == StructureCase::Three {
        check(
            "theta X^{r-p-1}".into(),
            theta_x,
            JhFactor::j2(p),
            FpPoly::monomial(p, 1, 0),
        );
    }
    check(
        "theta X^{r-p-2}Y".into(),
        FpPoly {
            p,
            coeffs: theta_mono(p, r, 1),
        },
        j3,
        FpPoly::monomial(p, pu - 2, 0),
    );
    let two_minus_r = linalg::from_i64(p, 2 - r as i64);
    check(
        "X^{r-2}Y^2".into(),
        FpPoly::monomial(p, r, 2),
        j3,
        FpPoly::monomial(p, pu - 2, 0).scale(two_minus_r),
    );

    let (split, nonsplit) = match q.case {
        StructureCase::Two => (Some(q.sequence_splits()), None),
        StructureCase::Three => (None, Some(!q.theta_extension_splits())),
    };
    let pass = q.dim_q() == expected_dim_q
        && anchors.iter().all(|a| a.pass)
        && split.unwrap_or(true)
        && nonsplit.unwrap_or(true)
        && q.subspaces_stable();
    Ok(QStructureReport {
        schema: 1,
        p,
        r,
        case: q.case,
        dim_q: q.dim_q(),
        expected_dim_q,
        factors,
        split,
        theta_extension_nonsplit: nonsplit,
        anchors,
        pass,
    })
}

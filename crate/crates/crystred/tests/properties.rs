mod support;

use std::cmp::Ordering;

use clap::Parser;
use crystred::binom::{binom, kummer_carries, residue_class_sum, val_binom, SumRange, SumSpec};
use crystred::cli::{run, Cli};
use crystred::hecke::{coset_normalize, ExtPoly, HeckeOp, Side, TreeFunction, TreeVertex};
use crystred::lemma_verify::{verify_telescoping, BlockId, Instance, LemmaVerifyError};
use crystred::padic::{ExtScalar, HalfInt, Prime};
use crystred::symmod::{build_q, FpPoly, GammaElement, JhFactor};
use crystred::zigzag::{check_llc_consistency, classify, compute_invariants, Lambda, Slope};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::{random_kz, slope_three_halves};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![5u64, 7, 11])
}

fn scalar(p: u64) -> impl Strategy<Value = ExtScalar> {
    (-3i64..5, prop::collection::vec(0u64..p, 1..10), 1u64..p).prop_map(move |(v, mut d, lead)| {
        d[0] = lead;
        ExtScalar::from_digits(prime(p), v, &d, prime(p).max_prec())
    })
}

fn same(a: ExtScalar, b: ExtScalar) -> bool {
    (a - b).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms((p, a, b, c) in small_prime().prop_flat_map(|p| (Just(p), scalar(p), scalar(p), scalar(p)))) {
        prop_assert!(same((a + b) + c, a + (b + c)));
        prop_assert!(same(a + b, b + a));
        prop_assert!(same((a * b) * c, a * (b * c)));
        prop_assert!(same(a * b, b * a));
        prop_assert!(same(a * (b + c), a * b + a * c));
        prop_assert!(same(a - a, ExtScalar::zero(prime(p))));
        prop_assert!(same(a * a.inv().unwrap(), ExtScalar::one(prime(p))));
    }

    #[test]
    fn valuation_rules((a, b) in small_prime().prop_flat_map(|p| (scalar(p), scalar(p)))) {
        let (va, vb) = (a.vpi().unwrap(), b.vpi().unwrap());
        prop_assert_eq!((a * b).vpi(), Some(va + vb));
        match (a + b).vpi() {
            Some(v) => {
                prop_assert!(v >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(v, va.min(vb));
                }
            }
            None => prop_assert_eq!(va, vb),
        }
    }

    #[test]
    fn teichmuller_is_multiplicative(p in small_prime(), l in 0u64..11, m in 0u64..11) {
        let (l, m) = (l % p, m % p);
        let pr = prime(p);
        let lhs = ExtScalar::teichmuller(pr, l) * ExtScalar::teichmuller(pr, m);
        prop_assert!(same(lhs, ExtScalar::teichmuller(pr, l * m % p)));
    }

    #[test]
    fn teichmuller_power_sums(p in small_prime(), i in 0i64..40) {
        let pr = prime(p);
        let mut sum = ExtScalar::zero(pr);
        for l in 1..p {
            sum = sum + ExtScalar::teichmuller(pr, l).pow(i).unwrap();
        }
        let expected = if i % (p as i64 - 1) == 0 { p as i64 - 1 } else { 0 };
        prop_assert!(same(sum, ExtScalar::from_i64(pr, expected)), "i = {}: {}", i, sum);
    }

    #[test]
    fn val_binom_counts_carries(p in small_prime(), n in 0u64..10_000, k in 0u64..10_000) {
        let k = k % (n + 1);
        prop_assert_eq!(val_binom(p, n, k), kummer_carries(p, n, k));
        // independent: strip factors of p from the exact coefficient
        let mut c = binom(n, k as i64);
        let mut v = 0;
        let pb = BigInt::from(p);
        while &c % &pb == BigInt::from(0) {
            c /= &pb;
            v += 1;
        }
        prop_assert_eq!(val_binom(p, n, k), v);
    }

    #[test]
    fn class_sums_partition_the_full_sum(p in small_prime(), r in 0u64..200, weight in 0u64..5) {
        let total: BigInt = (weight..=r).map(|j| binom(j, weight as i64) * binom(r, j as i64)).sum();
        let parts: BigInt = (0..p - 1)
            .map(|class| residue_class_sum(SumSpec { p, r, class, weight, range: SumRange::All }).value)
            .sum();
        prop_assert_eq!(parts, total);
    }
}

fn gamma(p: u64) -> impl Strategy<Value = GammaElement> {
    (0..p, 0..p, 0..p, 0..p).prop_filter_map("singular", move |(a, b, c, d)| GammaElement::new(p, a, b, c, d).ok())
}

fn fp_poly(p: u64, deg: usize) -> impl Strategy<Value = FpPoly> {
    prop::collection::vec(0..p, deg + 1).prop_map(move |c| FpPoly::from_coeffs(p, c))
}

/// Weights r = 3 + n(p-1)p^t usable for the quotient Q.
fn q_weight() -> impl Strategy<Value = (u64, usize)> {
    prop::sample::select(vec![
        (5u64, 11usize),
        (5, 15),
        (5, 23),
        (5, 43),
        (7, 15),
        (7, 21),
        (7, 45),
    ])
}

fn pow_mod(p: u64, x: u64, e: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * x % p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_action_is_a_left_action(
        (g, h, poly) in (small_prime(), 0usize..30).prop_flat_map(|(p, deg)| (gamma(p), gamma(p), fp_poly(p, deg)))
    ) {
        prop_assert_eq!(poly.act(&h).act(&g), poly.act(&g.compose(&h)));
    }

    #[test]
    fn theta_transforms_by_determinant((p, g) in small_prime().prop_flat_map(|p| (Just(p), gamma(p)))) {
        prop_assert_eq!(FpPoly::theta(p).act(&g), FpPoly::theta(p).scale(g.det()));
    }

    #[test]
    fn filtration_is_stable(
        ((p, r), g, h, cof, cof2) in q_weight().prop_flat_map(|(p, r)| {
            let top2 = r.saturating_sub(2 * p as usize + 2);
            (Just((p, r)), gamma(p), gamma(p), fp_poly(p, r - p as usize - 1), fp_poly(p, top2))
        })
    ) {
        let q = build_q(p, r).unwrap();
        // X_{r-1} is spanned by the orbit of X^{r-1}Y and dies in Q
        let x = FpPoly::monomial(p, r, 1).act(&h);
        prop_assert!(q.dies_in_q(&x.act(&g)));
        // theta-multiples span V*, inside W + V*
        let v = FpPoly::theta(p).mul(&cof);
        prop_assert!(q.in_w_star(&v));
        prop_assert!(q.in_w_star(&v.act(&g)));
        // theta^2-multiples die in Q
        if r >= 2 * p as usize + 2 {
            let v2 = FpPoly::theta(p).mul(&FpPoly::theta(p)).mul(&cof2);
            prop_assert!(q.dies_in_q(&v2.act(&g)));
        }
    }

    #[test]
    fn projections_are_equivariant(
        ((p, r), g, h, full, cof, c) in q_weight().prop_flat_map(|(p, r)| {
            (Just((p, r)), gamma(p), gamma(p), fp_poly(p, r), fp_poly(p, r - p as usize - 1), 1..p)
        })
    ) {
        let q = build_q(p, r).unwrap();
        let check = |poly: &FpPoly, target: JhFactor| -> Result<(), TestCaseError> {
            let lhs = q.project(&poly.act(&g), target).unwrap();
            let rhs = q.project(poly, target).unwrap().act(&g).scale(pow_mod(p, g.det(), target.twist));
            prop_assert_eq!(lhs, rhs, "{} at r = {}", target.name, r);
            Ok(())
        };
        check(&full, JhFactor::j1(p))?;
        check(&FpPoly::theta(p).mul(&cof), JhFactor::j3(p))?;
        if let Some(j2) = q.factor("J2") {
            let gen = FpPoly::theta(p).mul(&FpPoly::monomial(p, r - p as usize - 1, 0));
            check(&gen.act(&h).scale(c).add(&gen), j2)?;
        }
    }

    #[test]
    fn low_monomials_die_in_j1((p, r) in q_weight(), i in 0usize..3) {
        let q = build_q(p, r).unwrap();
        prop_assert!(q.project(&FpPoly::monomial(p, r, i), JhFactor::j1(p)).unwrap().is_zero());
    }
}

fn tree_function(p: u64, r: usize) -> impl Strategy<Value = TreeFunction> {
    let verts = TreeVertex::ball(p, 2);
    let n = verts.len();
    prop::collection::vec((0..n, prop::collection::vec(-30i64..30, r + 1)), 1..5).prop_map(move |terms| {
        let mut f = TreeFunction::new(prime(p), r);
        for (i, coeffs) in terms {
            f.add_term(verts[i].clone(), ExtPoly::from_i64(prime(p), &coeffs));
        }
        f
    })
}

fn hecke_pair() -> impl Strategy<Value = (u64, TreeFunction, TreeFunction)> {
    (prop::sample::select(vec![5u64, 7]), 3usize..9)
        .prop_flat_map(|(p, r)| (Just(p), tree_function(p, r), tree_function(p, r)))
}

/// One step toward alpha from a side-0 vertex.
fn parent(v: &TreeVertex) -> TreeVertex {
    match v.depth() {
        0 => TreeVertex::alpha(),
        m => TreeVertex::side0(v.digits[..m - 1].to_vec()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hecke_is_linear_and_splits(
        (p, f, g) in hecke_pair(),
        a in -20i64..20,
        b in -20i64..20,
    ) {
        let (sa, sb) = (ExtScalar::from_i64(prime(p), a), ExtScalar::from_i64(prime(p), b));
        let t = |h: &TreeFunction| h.hecke(HeckeOp::T).unwrap();
        let lhs = t(&f.scale(&sa).add(&g.scale(&sb)));
        let rhs = t(&f).scale(&sa).add(&t(&g).scale(&sb));
        prop_assert!(lhs.sub(&rhs).iter().all(|(_, v)| v.is_zero()));
        let split = f.hecke(HeckeOp::TPlus).unwrap().add(&f.hecke(HeckeOp::TMinus).unwrap());
        prop_assert!(t(&f).sub(&split).iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn hecke_support_geometry((p, f, _) in hecke_pair()) {
        for (v, val) in f.iter() {
            let single = TreeFunction::single(v.clone(), val.clone());
            if v.side == Side::Zero {
                let children: Vec<TreeVertex> = (0..p).map(|mu| v.child(mu)).collect();
                for (w, _) in single.hecke(HeckeOp::TPlus).unwrap().iter() {
                    prop_assert!(children.contains(w), "T+ of {} reached {}", v, w);
                }
                for (w, _) in single.hecke(HeckeOp::TMinus).unwrap().iter() {
                    prop_assert_eq!(w, &parent(v));
                }
            }
            // every vertex: T lands on neighbours only
            let image = single.hecke(HeckeOp::T).unwrap();
            prop_assert!(image.len() <= p as usize + 1);
            for (w, _) in image.iter() {
                prop_assert_eq!(w.radius().abs_diff(v.radius()), 1, "{} -> {}", v, w);
            }
        }
    }

    #[test]
    fn coset_normalization_is_unique(p in prop::sample::select(vec![5u64, 7]), seed in any::<u64>()) {
        let pr = prime(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let verts = TreeVertex::ball(p, 3);
        let v = &verts[(seed % verts.len() as u64) as usize];
        for _ in 0..20 {
            let k = random_kz(&mut rng, pr, 6);
            let (w, _) = coset_normalize(&(v.matrix(pr) * k)).unwrap();
            prop_assert_eq!(&w, v);
        }
    }
}

/// A p = 5, r = 23 instance from digits, or None outside the hypotheses.
fn instance(p: u64, r: u64, digits: &[u64], prec: u32) -> Option<Instance> {
    Instance::new(p, r, &slope_three_halves(prime(p), digits), prec).ok()
}

fn unit_digits(p: u64, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<u64>> {
    (1..p, prop::collection::vec(0..p, len)).prop_map(|(lead, mut rest)| {
        rest.insert(0, lead);
        rest
    })
}

fn weight() -> impl Strategy<Value = (u64, u64)> {
    prop::sample::select(vec![(5u64, 23u64), (5, 43), (7, 45)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn telescoping_survives_more_precision((p, r) in weight(), digits in unit_digits(5, 0..4)) {
        let digits: Vec<u64> = digits.iter().map(|d| d % p).collect();
        prop_assume!(digits[0] != 0);
        let (Some(lo), Some(hi)) = (instance(p, r, &digits, 24), instance(p, r, &digits, 40)) else {
            return Err(TestCaseError::reject("outside hypotheses"));
        };
        for id in BlockId::ALL {
            match verify_telescoping(id, &lo) {
                Ok(rep) if rep.passed() => {
                    let again = verify_telescoping(id, &hi).unwrap();
                    prop_assert!(again.passed(), "{} at K = 40: {:?}", id, again);
                    let (m, req) = (again.min_valuation, again.required.unwrap());
                    prop_assert!(m.is_none_or(|m| m >= req));
                }
                Ok(rep) => prop_assert!(false, "{} fails at K = 24: {:?}", id, rep),
                Err(LemmaVerifyError::Hypothesis(_)) => {
                    prop_assert!(matches!(verify_telescoping(id, &hi), Err(LemmaVerifyError::Hypothesis(_))));
                }
                Err(e) => prop_assert!(false, "{}: {}", id, e),
            }
        }
    }
}

/// residue of b c / (b - r)
fn lambda_from(c: &ExtScalar, r: u64) -> u64 {
    c.scale_i64(3)
        .div(&ExtScalar::from_i64(c.prime(), 3 - r as i64))
        .unwrap()
        .residue()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn lambda_agrees_with_lambda_tilde((p, r) in weight(), digits in prop::collection::vec(0u64..7, 1..5)) {
        let digits: Vec<u64> = digits.iter().map(|d| d % p).collect();
        prop_assume!(digits[0] != 0);
        let inv = compute_invariants(p, r, &slope_three_halves(prime(p), &digits)).unwrap();
        let t = HalfInt::from_int(inv.t as i64);
        let tilde = inv.tau_tilde.unwrap();
        prop_assume!(tilde.cmp_to(t) == Some(Ordering::Equal));
        let lam = lambda_from(&inv.c, r);
        let lam_tilde = lambda_from(inv.c_tilde.as_ref().unwrap(), r);
        prop_assert_eq!(lam, lam_tilde);
        prop_assert_ne!(lam, 0);
    }

    #[test]
    fn branch_ignores_deep_digits((p, r) in weight(), digits in prop::collection::vec(0u64..7, 1..5), tail in prop::collection::vec(0u64..7, 1..4), extra in 0i64..4) {
        let digits: Vec<u64> = digits.iter().map(|d| d % p).collect();
        prop_assume!(digits[0] != 0);
        let pr = prime(p);
        let a = slope_three_halves(pr, &digits);
        let base = classify(p, r, &a, Slope::ThreeHalves).unwrap();
        let depth = 2 * base.invariants.t as i64 + 3 + extra;
        let unit = ExtScalar::one(pr) + ExtScalar::from_digits(pr, depth, &tail, pr.max_prec());
        let moved = classify(p, r, &(a * unit), Slope::ThreeHalves).unwrap();
        prop_assert_eq!(base.branch_index, moved.branch_index);
        prop_assert_eq!(&base.descriptor, &moved.descriptor);
        prop_assert_eq!(base.constants, moved.constants);
    }

    #[test]
    fn scalars_invert_and_satisfy_min_polys(p in small_prime(), x in 1u64..11, d in 0u64..11) {
        let x = x % p;
        prop_assume!(x != 0);
        let l = Lambda::value(x);
        let Lambda::Value { value: inv } = l.inverse(p).unwrap() else { unreachable!() };
        prop_assert_eq!(x * inv % p, 1);
        let root = Lambda::root_of(p, d % p);
        prop_assert!(root.satisfies_min_poly(p));
        prop_assert_eq!(root.inverse(p).unwrap(), root);
    }

    #[test]
    fn classification_matches_factor_assembly((p, r) in weight(), digits in prop::collection::vec(0u64..7, 1..5)) {
        let digits: Vec<u64> = digits.iter().map(|d| d % p).collect();
        prop_assume!(digits[0] != 0);
        let cl = classify(p, r, &slope_three_halves(prime(p), &digits), Slope::ThreeHalves).unwrap();
        let (rep, _) = check_llc_consistency(&cl).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cli_output_is_byte_identical((p, r) in weight(), digits in unit_digits(5, 0..3), cmd in 0usize..3) {
        let digits: Vec<u64> = digits.iter().map(|d| d % p).collect();
        prop_assume!(digits[0] != 0);
        let ap = format!(
            "pi^3*({})",
            digits.iter().enumerate().map(|(i, d)| format!("{d}*pi^{i}")).collect::<Vec<_>>().join(" + ")
        );
        let (p, r) = (p.to_string(), r.to_string());
        let args: Vec<&str> = match cmd {
            0 => vec!["crystred", "classify", "--p", &p, "--r", &r, "--ap", &ap],
            1 => vec!["crystred", "verify-lemma", "chi", "--p", &p, "--r", &r, "--ap", &ap, "--prec", "30"],
            _ => vec!["crystred", "q-structure", "--p", &p, "--r", &r],
        };
        let once = |args: &[&str]| run(&Cli::try_parse_from(args).unwrap()).map(|o| o.emit(None).unwrap()).map_err(|e| e.to_string());
        prop_assert_eq!(once(&args), once(&args));
    }
}

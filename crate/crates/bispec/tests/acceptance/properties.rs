//! Randomized property suites (200 exact cases each), driven by the
//! proptest runner. `run_all` is invoked from the acceptance suite so the
//! whole battery reports as a single line.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use bispec::context::{BiSeries, Context};
use bispec::darboux::DarbouxTransform;
use bispec::exactnum::{Poly, RatFunc, Var, G};
use bispec::grassmannian::{concomitant_pairing, AdelicPlane, QuasiExp};
use bispec::orealg::OreOp;
use bispec::parser::Expr;
use bispec::solver::{
    concomitant_decomposition_check, concomitant_derivative_identity_check,
};

const CASES: u32 = 200;

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

fn g_small() -> impl Strategy<Value = G> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| G::from_frac(n, d))
}

fn g_gauss() -> impl Strategy<Value = G> {
    (g_small(), -2i64..=2).prop_map(|(re, im)| &re + &(&G::from_int(im) * &G::i()))
}

fn poly(var: Var, max_len: usize) -> impl Strategy<Value = Poly> {
    proptest::collection::vec(g_small(), 0..=max_len).prop_map(move |v| Poly::new(var, v))
}

/// Rational function with denominator a power of x, so evaluation away
/// from the origin never hits a pole.
fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(Var::X, 3), 0usize..=2)
        .prop_map(|(n, k)| RatFunc::new(n, Poly::monomial(Var::X, G::one(), k)))
}

fn oreop(max_order: usize) -> impl Strategy<Value = OreOp> {
    proptest::collection::vec(ratfunc(), 0..=max_order + 1)
        .prop_map(|v| OreOp::new(Var::X, v))
}

fn poly_op(max_order: usize) -> impl Strategy<Value = OreOp> {
    proptest::collection::vec(poly(Var::X, 3), 0..=max_order + 1).prop_map(|v| {
        OreOp::new(
            Var::X,
            v.into_iter().map(RatFunc::from_poly).collect::<Vec<_>>(),
        )
    })
}

/// Random word in the named generators of a context dialect, as a tree.
fn gen_word(symbols: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    proptest::collection::vec((0..symbols.len(), 0u32..=2), 0..=2).prop_map(|items| {
        Expr::Prod(
            items
                .into_iter()
                .map(|(i, p)| Expr::Pow(Box::new(Expr::Symbol(symbols[i].into())), p))
                .collect(),
        )
    })
}

fn adjoint_involution_and_antihom() {
    runner()
        .run(&(oreop(2), oreop(2)), |(a, b)| {
            prop_assert_eq!(a.adjoint().adjoint(), a.clone());
            prop_assert_eq!(a.mul(&b).adjoint(), b.adjoint().mul(&a.adjoint()));
            prop_assert_eq!(a.add(&b).adjoint(), a.adjoint().add(&b.adjoint()));
            Ok(())
        })
        .unwrap();
}

fn product_associativity_and_apply() {
    runner()
        .run(&(oreop(1), oreop(2), oreop(1), ratfunc()), |(a, b, c, f)| {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b).apply(&f), a.apply(&b.apply(&f)));
            Ok(())
        })
        .unwrap();
}

fn symmetric_decompose_roundtrip() {
    runner()
        .run(
            &proptest::collection::vec(ratfunc(), 1..=3),
            |parts| {
                let d = OreOp::d(Var::X);
                let mut op = OreOp::zero(Var::X);
                for (j, a) in parts.iter().enumerate() {
                    op = op.add(&d.pow(j).mul(&OreOp::from_ratfunc(a.clone())).mul(&d.pow(j)));
                }
                prop_assert!(op.is_formally_symmetric());
                let rec = op.symmetric_decompose().unwrap();
                let mut back = OreOp::zero(Var::X);
                for (j, a) in rec.iter().enumerate() {
                    back = back.add(&d.pow(j).mul(&OreOp::from_ratfunc(a.clone())).mul(&d.pow(j)));
                }
                prop_assert_eq!(back, op);
                Ok(())
            },
        )
        .unwrap();
}

fn concomitant_derivative_identity() {
    runner()
        .run(
            &(oreop(4), poly(Var::X, 5), poly(Var::X, 5)),
            |(d, f, g)| {
                prop_assert!(concomitant_derivative_identity_check(&d, &f, &g));
                Ok(())
            },
        )
        .unwrap();
}

fn concomitant_decomposition_identity() {
    runner()
        .run(
            &(poly_op(3), poly_op(3), poly(Var::X, 4), poly(Var::X, 4)),
            |(a, b, f, g)| {
                prop_assert!(
                    concomitant_decomposition_check(&a, &b, &f, &g, &G::from_int(2)).unwrap()
                );
                Ok(())
            },
        )
        .unwrap();
}

fn fourier_antihomomorphism() {
    let contexts = [
        (Context::exp(), &["x", "Dx"][..]),
        (Context::airy(), &["x", "Dx"][..]),
        (
            Context::bessel(G::from_frac(1, 2)).unwrap(),
            &["S", "BB", "X2"][..],
        ),
    ];
    for (ctx, symbols) in contexts {
        runner()
            .run(&(gen_word(symbols), gen_word(symbols)), |(t1, t2)| {
                let g1 = ctx.fourier(&t1).unwrap();
                let g2 = ctx.fourier(&t2).unwrap();
                let g12 = ctx.fourier(&Expr::Prod(vec![t1, t2])).unwrap();
                prop_assert_eq!(&g12.x_op, &g1.x_op.mul(&g2.x_op));
                prop_assert_eq!(&g12.y_op, &g2.y_op.mul(&g1.y_op));
                Ok(())
            })
            .unwrap();
    }
}

fn exp_truncation_oracle() {
    let ctx = Context::exp();
    let n = 12usize;
    let series = BiSeries::exp_truncation(n);
    runner()
        .run(&gen_word(&["x", "Dx"]), |tree| {
            let g = ctx.fourier(&tree).unwrap();
            let ord = g
                .order()
                .unwrap_or(0)
                .max(g.co_order().unwrap_or(0));
            prop_assert!(series
                .apply_op(&g.x_op)
                .agrees_with(&series.apply_op(&g.y_op), n - ord - 2));
            Ok(())
        })
        .unwrap();
}

fn sigma_invariance_of_candidates() {
    let exp = Context::exp();
    let bessel = Context::bessel(G::from_frac(1, 2)).unwrap();
    // rank-one transform: candidates must also stay σ-invariant
    let u = bispec::parser::parse_raw_op("x*Dx - 1", Var::X, &bispec::parser::ParamEnv::new())
        .unwrap();
    let t = DarbouxTransform::build(&exp, exp.wrap_raw(&u).unwrap(), None, None).unwrap();
    // pre-expand the generating sets once per (l, m); the runner then
    // samples which operator of which set to check
    let mut sets: Vec<Vec<(OreOp, OreOp)>> = vec![];
    for l in 0..=2usize {
        for m in 0..=2usize {
            let mut ops = vec![];
            for ctx in [&exp, &bessel] {
                for b in ctx.sym_basis(l, m) {
                    ops.push((b.gen.x_op.clone(), b.gen.y_op.clone()));
                }
            }
            for c in t.candidate_space(l + 1, m, None).unwrap() {
                ops.push((c.x_op, c.y_op));
            }
            sets.push(ops);
        }
    }
    runner()
        .run(&(0usize..sets.len(), 0usize..32), |(s, i)| {
            let ops = &sets[s];
            let (x, y) = &ops[i % ops.len()];
            prop_assert_eq!(&x.sigma(), x);
            prop_assert_eq!(&y.sigma(), y);
            Ok(())
        })
        .unwrap();
}

/// Random σ-symmetric exponent multiset together with single-exponent jet
/// functions inside the corresponding kernel.
fn plane_data() -> impl Strategy<Value = (Vec<(G, usize)>, Vec<QuasiExp>)> {
    let block = (g_gauss(), 1usize..=2, proptest::collection::vec(any::<bool>(), 2));
    proptest::collection::vec(block, 1..=2).prop_map(|blocks| {
        let mut exps: Vec<(G, usize)> = vec![];
        let mut v: Vec<QuasiExp> = vec![];
        for (c, m, jets) in blocks {
            if exps.iter().any(|(e, _)| *e == c || *e == -&c) {
                continue;
            }
            exps.push((c.clone(), m));
            if !c.is_zero() {
                exps.push((-&c, m));
            }
            for (j, take) in jets.iter().enumerate().take(m) {
                if *take {
                    v.push(QuasiExp::exp_monomial(c.clone(), j));
                }
            }
        }
        if v.is_empty() {
            v.push(QuasiExp::exp_monomial(exps[0].0.clone(), 0));
        }
        (exps, v)
    })
}

fn pairing_constancy_and_antisymmetry() {
    runner()
        .run(&plane_data(), |(exps, v)| {
            // zero blocks must have even multiplicity for formal symmetry
            let mut exps = exps;
            for (c, m) in exps.iter_mut() {
                if c.is_zero() && *m % 2 == 1 {
                    *m += 1;
                }
            }
            let plane = AdelicPlane::from_parts(exps, v).unwrap();
            // constancy is asserted inside the pairing computation (the
            // symbolic derivative of each form must vanish identically)
            let m = concomitant_pairing(&plane.d_exponents, &plane.v).unwrap();
            for i in 0..m.len() {
                for j in 0..m.len() {
                    prop_assert_eq!(&m[i][j], &-&m[j][i]);
                }
            }
            Ok(())
        })
        .unwrap();
}

pub fn run_all() {
    let suites: &[(&str, fn())] = &[
        ("adjoint involution/anti-homomorphism", adjoint_involution_and_antihom),
        ("product associativity + apply", product_associativity_and_apply),
        ("symmetric decompose roundtrip", symmetric_decompose_roundtrip),
        ("concomitant derivative identity", concomitant_derivative_identity),
        ("concomitant decomposition identity", concomitant_decomposition_identity),
        ("fourier anti-homomorphism", fourier_antihomomorphism),
        ("exp truncation oracle", exp_truncation_oracle),
        ("sigma invariance of candidates", sigma_invariance_of_candidates),
        ("pairing constancy + antisymmetry", pairing_constancy_and_antisymmetry),
    ];
    for (name, f) in suites {
        let t0 = std::time::Instant::now();
        f();
        println!(
            "  property suite `{name}`: ok ({CASES} cases, {:.2?})",
            t0.elapsed()
        );
    }
}

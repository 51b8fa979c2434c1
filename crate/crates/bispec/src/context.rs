//! The three elementary bispectral contexts (exponential, Airy, Bessel),
//! their generalized Fourier anti-isomorphisms computed on generator
//! expression trees, and the symmetric double-filtration bases.
//!
//! The Fourier map is only defined on expression trees over a context's
//! generators: the image of a tree is obtained by mapping each generator to
//! its partner and reversing every product. For the exponential and Airy
//! contexts raw operators (polynomial coefficients in `x` and `Dx`) are
//! auto-wrapped into trees; Bessel operators must be entered as words in
//! the generators `BB`, `S`, `X2`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::exactnum::{G, Poly, RatFunc, Var};
use crate::orealg::OreOp;
use crate::parser::{Dialect, Expr, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("Bessel parameter must be a rational non-integer (got {0})")]
    InvalidBesselParameter(String),
    #[error("operator has non-polynomial coefficients and cannot be wrapped as a generator word")]
    NotWrappable,
    #[error("expression does not expand consistently: {0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextKind {
    Exp,
    Airy,
    Bessel,
}

impl fmt::Display for ContextKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextKind::Exp => "exp",
            ContextKind::Airy => "airy",
            ContextKind::Bessel => "bessel",
        })
    }
}

/// One of the three elementary bispectral contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub kind: ContextKind,
    /// Bessel parameter ν ∈ Q∖Z; `None` for exp/airy.
    pub nu: Option<G>,
}

impl Context {
    pub fn exp() -> Self {
        Context {
            kind: ContextKind::Exp,
            nu: None,
        }
    }

    pub fn airy() -> Self {
        Context {
            kind: ContextKind::Airy,
            nu: None,
        }
    }

    pub fn bessel(nu: G) -> Result<Self, ContextError> {
        if !nu.is_real() || nu.re.denom().is_one() {
            return Err(ContextError::InvalidBesselParameter(nu.to_string()));
        }
        Ok(Context {
            kind: ContextKind::Bessel,
            nu: Some(nu),
        })
    }

    pub fn dialect(&self) -> Dialect {
        match self.kind {
            ContextKind::Bessel => Dialect::BesselGenerators,
            _ => Dialect::RawX,
        }
    }

    /// ν(ν+1) for the Bessel potential.
    fn nu_potential(&self) -> G {
        let nu = self.nu.as_ref().expect("bessel context");
        nu * &(nu + &G::one())
    }

    /// The generator table: (symbol, x-side operator, y-side partner).
    pub fn generator_images(&self) -> Vec<(String, OreOp, OreOp)> {
        let x = OreOp::from_poly(Poly::var_poly(Var::X));
        let dx = OreOp::d(Var::X);
        let y = OreOp::from_poly(Poly::var_poly(Var::Y));
        let dy = OreOp::d(Var::Y);
        match self.kind {
            ContextKind::Exp => vec![
                ("x".to_string(), x, dy),
                ("Dx".to_string(), dx, y),
            ],
            ContextKind::Airy => {
                // x ↦ Dy² − y,  Dx ↦ Dy
                let airy_y = dy.pow(2).sub(&y);
                vec![
                    ("x".to_string(), x, airy_y),
                    ("Dx".to_string(), dx, dy),
                ]
            }
            ContextKind::Bessel => {
                let c = self.nu_potential();
                let pot_x = RatFunc::new(
                    Poly::constant(Var::X, c.clone()),
                    Poly::monomial(Var::X, G::one(), 2),
                );
                let pot_y = RatFunc::new(
                    Poly::constant(Var::Y, c),
                    Poly::monomial(Var::Y, G::one(), 2),
                );
                let bb_x = dx.pow(2).sub(&OreOp::from_ratfunc(pot_x));
                let bb_y = dy.pow(2).sub(&OreOp::from_ratfunc(pot_y));
                let s_x = x.mul(&dx);
                let s_y = y.mul(&dy);
                let x2 = OreOp::from_poly(Poly::monomial(Var::X, G::one(), 2));
                let y2 = OreOp::from_poly(Poly::monomial(Var::Y, G::one(), 2));
                vec![
                    ("BB".to_string(), bb_x, y2),
                    ("S".to_string(), s_x, s_y),
                    ("X2".to_string(), x2, bb_y),
                ]
            }
        }
    }

    /// (x-side base operator, its y-side eigenvalue polynomial).
    pub fn base_operator(&self) -> (OreOp, Poly) {
        match self.kind {
            ContextKind::Exp => (OreOp::d(Var::X), Poly::var_poly(Var::Y)),
            ContextKind::Airy => (
                OreOp::d(Var::X)
                    .pow(2)
                    .sub(&OreOp::from_poly(Poly::var_poly(Var::X))),
                Poly::var_poly(Var::Y),
            ),
            ContextKind::Bessel => {
                let imgs = self.generator_images();
                (imgs[0].1.clone(), Poly::monomial(Var::Y, G::one(), 2))
            }
        }
    }

    /// (y-side base operator, its x-side eigenvalue polynomial).
    pub fn base_operator_y(&self) -> (OreOp, Poly) {
        match self.kind {
            ContextKind::Exp => (OreOp::d(Var::Y), Poly::var_poly(Var::X)),
            ContextKind::Airy => (
                OreOp::d(Var::Y)
                    .pow(2)
                    .sub(&OreOp::from_poly(Poly::var_poly(Var::Y))),
                Poly::var_poly(Var::X),
            ),
            ContextKind::Bessel => {
                let imgs = self.generator_images();
                (imgs[2].2.clone(), Poly::monomial(Var::X, G::one(), 2))
            }
        }
    }

    fn image_maps(&self) -> (BTreeMap<String, OreOp>, BTreeMap<String, OreOp>) {
        let mut xs = BTreeMap::new();
        let mut ys = BTreeMap::new();
        for (name, xo, yo) in self.generator_images() {
            xs.insert(name.clone(), xo);
            ys.insert(name, yo);
        }
        (xs, ys)
    }

    /// Expands a generator tree to its pair of operators: the x-side by a
    /// direct evaluation, the y-side by the anti-homomorphic (product-
    /// reversing) evaluation of the generator partners.
    pub fn fourier(&self, tree: &Expr) -> Result<GenExpr, ContextError> {
        let (xs, ys) = self.image_maps();
        let x_op = tree.eval_op(Var::X, &xs, false)?;
        let y_op = tree.eval_op(Var::Y, &ys, true)?;
        Ok(GenExpr { tree: tree.clone(), x_op, y_op })
    }

    /// Wraps a raw operator with polynomial coefficients into a generator
    /// tree (exp and Airy contexts only, where the Fourier algebra is all
    /// of the Weyl algebra).
    pub fn wrap_raw(&self, op: &OreOp) -> Result<GenExpr, ContextError> {
        assert!(
            self.kind != ContextKind::Bessel,
            "Bessel operators must be given as generator words"
        );
        let tree = op_to_tree(op).ok_or(ContextError::NotWrappable)?;
        let wrapped = self.fourier(&tree)?;
        debug_assert_eq!(&wrapped.x_op, op);
        Ok(wrapped)
    }

    /// Basis of the formally-symmetric part of the (2ℓ, 2m) double
    /// filtration. Every element is formally symmetric on both sides; the
    /// list has (ℓ+1)(m+1) elements.
    pub fn sym_basis(&self, l: usize, m: usize) -> Vec<SymBasisElem> {
        let mut out = vec![];
        match self.kind {
            ContextKind::Exp => {
                // ∂ʲ x^{2k} ∂ʲ
                for j in 0..=l {
                    for k in 0..=m {
                        let tree = Expr::Prod(vec![
                            Expr::Pow(Box::new(Expr::Symbol("Dx".into())), j as u32),
                            Expr::Pow(Box::new(Expr::Symbol("x".into())), 2 * k as u32),
                            Expr::Pow(Box::new(Expr::Symbol("Dx".into())), j as u32),
                        ]);
                        out.push(self.basis_elem(tree, j, k, Family::ExpJk));
                    }
                }
            }
            ContextKind::Airy => {
                // 𝔞ⱼₖ = 𝔡ʲxᵏ + xᵏ𝔡ʲ with 𝔡 = Dx² − x
                let d_tree = Expr::Sum(vec![
                    Expr::Pow(Box::new(Expr::Symbol("Dx".into())), 2),
                    Expr::Prod(vec![Expr::scalar_int(-1), Expr::Symbol("x".into())]),
                ]);
                for j in 0..=l {
                    for k in 0..=m {
                        let dj = Expr::Pow(Box::new(d_tree.clone()), j as u32);
                        let xk = Expr::Pow(Box::new(Expr::Symbol("x".into())), k as u32);
                        let tree = Expr::Sum(vec![
                            Expr::Prod(vec![dj.clone(), xk.clone()]),
                            Expr::Prod(vec![xk, dj]),
                        ]);
                        out.push(self.basis_elem(tree, j, k, Family::AiryAjk));
                    }
                }
            }
            ContextKind::Bessel => {
                // 𝔞ⱼₖ = 𝔰ᵏ 𝔡ʲ (𝔰*)ᵏ for j+k ≤ ℓ, k ≤ m
                // 𝔟ⱼₖ = 𝔰ᵏ x^{2j} (𝔰*)ᵏ for j+k ≤ m, k ≤ ℓ, j ≥ 1
                // with 𝔰 = S and 𝔰* = −S − 1, kept inside the generator algebra.
                let s = Expr::Symbol("S".into());
                let s_star = Expr::Sum(vec![
                    Expr::Prod(vec![Expr::scalar_int(-1), Expr::Symbol("S".into())]),
                    Expr::scalar_int(-1),
                ]);
                let sandwich = |mid: Expr, k: usize| {
                    Expr::Prod(vec![
                        Expr::Pow(Box::new(s.clone()), k as u32),
                        mid,
                        Expr::Pow(Box::new(s_star.clone()), k as u32),
                    ])
                };
                for j in 0..=l {
                    for k in 0..=(l - j).min(m) {
                        let mid = Expr::Pow(Box::new(Expr::Symbol("BB".into())), j as u32);
                        out.push(self.basis_elem(sandwich(mid, k), j, k, Family::BesselAjk));
                    }
                }
                for j in 1..=m {
                    for k in 0..=(m - j).min(l) {
                        let mid = Expr::Pow(Box::new(Expr::Symbol("X2".into())), j as u32);
                        out.push(self.basis_elem(sandwich(mid, k), j, k, Family::BesselBjk));
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), (l + 1) * (m + 1));
        out
    }

    fn basis_elem(&self, tree: Expr, j: usize, k: usize, family: Family) -> SymBasisElem {
        let gen = self.fourier(&tree).expect("basis words expand");
        assert!(
            gen.x_op.is_formally_symmetric(),
            "basis element ({j},{k}) not symmetric on the x side"
        );
        assert!(
            gen.y_op.is_formally_symmetric(),
            "basis element ({j},{k}) not symmetric on the y side"
        );
        SymBasisElem { gen, j, k, family }
    }
}

/// A Fourier-algebra element: a generator tree together with its expanded
/// x-side operator and anti-homomorphic y-side partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenExpr {
    pub tree: Expr,
    pub x_op: OreOp,
    pub y_op: OreOp,
}

impl GenExpr {
    /// Order of the x-side operator (`None` for zero).
    pub fn order(&self) -> Option<usize> {
        self.x_op.order()
    }

    /// Co-order: order of the y-side partner.
    pub fn co_order(&self) -> Option<usize> {
        self.y_op.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ExpJk,
    AiryAjk,
    BesselAjk,
    BesselBjk,
}

/// One element of a symmetric filtration basis.
#[derive(Debug, Clone)]
pub struct SymBasisElem {
    pub gen: GenExpr,
    pub j: usize,
    pub k: usize,
    pub family: Family,
}

/// Converts an operator with polynomial coefficients into an expression
/// tree over `x`/`Dx` (or `y`/`Dy`); returns `None` if any coefficient has
/// a denominator.
pub fn op_to_tree(op: &OreOp) -> Option<Expr> {
    if op.is_zero() {
        return Some(Expr::scalar_int(0));
    }
    let var_sym = op.var.name().to_string();
    let d_sym = op.var.d_name().to_string();
    let mut terms = vec![];
    for j in 0..=op.order().unwrap() {
        let c = op.coeff(j);
        if c.is_zero() {
            continue;
        }
        let p = c.as_polynomial()?;
        let mut poly_terms = vec![];
        for (k, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut factors = vec![Expr::Scalar(a.clone())];
            if k > 0 {
                factors.push(Expr::Pow(Box::new(Expr::Symbol(var_sym.clone())), k as u32));
            }
            poly_terms.push(Expr::Prod(factors));
        }
        let poly_expr = if poly_terms.len() == 1 {
            poly_terms.pop().unwrap()
        } else {
            Expr::Sum(poly_terms)
        };
        let term = if j == 0 {
            poly_expr
        } else {
            Expr::Prod(vec![
                poly_expr,
                Expr::Pow(Box::new(Expr::Symbol(d_sym.clone())), j as u32),
            ])
        };
        terms.push(term);
    }
    Some(if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Expr::Sum(terms)
    })
}

/// Truncation of e^{xy} to total degree ≤ 2n in a dense bivariate table:
/// entry (a, b) is the coefficient of xᵃyᵇ, so the table is 1/a! on the
/// diagonal. Used as an oracle for the exponential Fourier map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    pub n: usize,
    /// c[a][b] = coefficient of xᵃ yᵇ, 0 ≤ a, b ≤ n.
    pub c: Vec<Vec<G>>,
}

impl BiSeries {
    pub fn exp_truncation(n: usize) -> Self {
        let mut c = vec![vec![G::zero(); n + 1]; n + 1];
        let mut fact = G::one();
        for a in 0..=n {
            if a > 0 {
                fact = &fact * &G::from_int(a as i64);
            }
            c[a][a] = fact.inv().unwrap();
        }
        BiSeries { n, c }
    }

    fn zero_like(&self) -> Self {
        BiSeries {
            n: self.n,
            c: vec![vec![G::zero(); self.n + 1]; self.n + 1],
        }
    }

    /// Applies an x-side operator with polynomial coefficients. Entries
    /// that would be pushed beyond the truncation degree are dropped, so
    /// only coefficients with a, b ≤ n − deg-shift remain trustworthy.
    pub fn apply_op(&self, op: &OreOp) -> Self {
        let along_x = op.var == Var::X;
        let mut out = self.zero_like();
        let Some(ord) = op.order() else { return out };
        for j in 0..=ord {
            let coeff = op.coeff(j);
            if coeff.is_zero() {
                continue;
            }
            let p = coeff
                .as_polynomial()
                .expect("series oracle needs polynomial coefficients");
            // ∂ʲ then multiplication by each monomial of p
            for (deg, a) in p.coeffs().iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for row in 0..=self.n {
                    for col in 0..=self.n {
                        let (src_main, other) = if along_x { (row, col) } else { (col, row) };
                        // target exponent after ∂ʲ (down j) then ·x^deg (up deg)
                        let src = src_main + j;
                        if src > self.n {
                            continue;
                        }
                        let tgt = src_main + deg;
                        if tgt > self.n {
                            continue;
                        }
                        let val = if along_x {
                            &self.c[src][other]
                        } else {
                            &self.c[other][src]
                        };
                        if val.is_zero() {
                            continue;
                        }
                        // falling factorial (src)(src−1)…(src−j+1)
                        let mut fall = G::one();
                        for t in 0..j {
                            fall = &fall * &G::from_int((src - t) as i64);
                        }
                        let add = &(val * &fall) * a;
                        let (ta, tb) = if along_x { (tgt, other) } else { (other, tgt) };
                        out.c[ta][tb] = &out.c[ta][tb] + &add;
                    }
                }
            }
        }
        out
    }

    /// True iff the two tables agree on all entries with a, b ≤ bound.
    pub fn agrees_with(&self, other: &Self, bound: usize) -> bool {
        for a in 0..=bound.min(self.n) {
            for b in 0..=bound.min(self.n) {
                if self.c[a][b] != other.c[a][b] {
                    return false;
                }
            }
        }
        true
    }
}

//! Self-adjoint Darboux-transformation data and the candidate operator
//! subspace searched by the solver.
//!
//! A transform is the validated tuple (context, 𝔲, 𝔴 = b(𝔲), p, q) with
//! bidegree (d₁, d₂) = (ord 𝔲, ord 𝔴), normalized so that (1/p)𝔲 and
//! (1/q)𝔴 are monic. Validation checks the two factorization identities
//!
//!   𝔲*(1/p²)𝔲 = f(base_x)  with  f(eigenvalue_y) ∝ q(y)²,
//!   𝔴*(1/q²)𝔴 = g(base_y)  with  g(eigenvalue_x) ∝ p(x)²,
//!
//! where ∝ tolerates a global nonzero constant (the `unit`): valid data can
//! satisfy them only up to sign (e.g. 𝔲 = x∂−1, p = x has
//! 𝔲*(1/x²)𝔲 = −∂²).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::{Context, ContextError, ContextKind, GenExpr, SymBasisElem};
use crate::exactnum::{G, Poly, RatFunc, Var};
use crate::orealg::{monic_with_unit, OreOp, OreError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DarbouxError {
    #[error("leading coefficient of the transforming operator is not a polynomial")]
    NonPolynomialLeadingCoefficient,
    #[error("factorization check failed on the {side} side: the conjugated product is not a constant-coefficient polynomial in the base operator")]
    FactorizationFails { side: &'static str },
    #[error("eigenvalue polynomial of the factorization is not proportional to the square of the expected leading coefficient")]
    QMismatch,
    #[error("override polynomial is not proportional to the computed leading coefficient")]
    OverrideNotProportional,
    #[error("conjugated operator has a pole outside the allowed locus — transform data invalid")]
    InexactDivision,
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// Validated data of a self-adjoint bispectral Darboux transformation.
#[derive(Debug, Clone)]
pub struct DarbouxTransform {
    pub ctx: Context,
    pub u_expr: GenExpr,
    /// x-side transforming operator (polynomial leading coefficient p).
    pub u: OreOp,
    /// y-side partner b(𝔲) (polynomial leading coefficient q).
    pub w: OreOp,
    pub p: Poly,
    pub q: Poly,
    pub d1: usize,
    pub d2: usize,
    /// Global constant with 𝔲*(1/p²)𝔲 = unit · f_monic(base_x).
    pub unit: G,
    /// Monic rewrite of 𝔲*(1/p²)𝔲 in the base operator.
    pub f_monic: Poly,
}

/// One generator of the candidate subspace: an operator pair that is
/// formally symmetric on both sides, with the y side the (unit-scaled)
/// Fourier partner of the x side by construction.
#[derive(Debug, Clone)]
pub struct CandidatePair {
    pub x_op: OreOp,
    pub y_op: OreOp,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Constant,
    /// p·𝔟ⱼₖ·p for a symmetric-basis element 𝔟ⱼₖ.
    PFamily(usize, usize),
    /// (1/p)𝔲·𝔟ⱼₖ·𝔲*(1/p).
    UFamily(usize, usize),
    /// untransformed basis element (trivial transform).
    Basis(usize, usize),
    /// linear combination of candidates (solver output).
    Combination,
}

/// Family bounds for `candidate_space`, given as double-filtration
/// superscripts (order cap, co-order cap) — both even.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoundsOverride {
    /// (order cap, co-order cap) of the basis conjugated by (1/p)𝔲·…·𝔲*(1/p).
    pub u_family: [usize; 2],
    /// (order cap, co-order cap) of the basis conjugated by p·…·p.
    pub p_family: [usize; 2],
}

fn leading_poly(op: &OreOp) -> Result<Poly, DarbouxError> {
    op.leading_coeff()
        .as_polynomial()
        .cloned()
        .ok_or(DarbouxError::NonPolynomialLeadingCoefficient)
}

/// Checks `f_of_base(eig)` is a nonzero constant multiple of `square`.
fn proportional_to(values: &Poly, square: &Poly) -> Result<G, DarbouxError> {
    if values.is_zero() || square.is_zero() {
        return Err(DarbouxError::QMismatch);
    }
    let c = &values.leading_coeff() / &square.leading_coeff();
    if values == &square.scale(&c) {
        Ok(c)
    } else {
        Err(DarbouxError::QMismatch)
    }
}

/// f(eig) for f returned by `rewrite_in_base` (coefficients of powers of
/// the base operator) and the eigenvalue polynomial `eig`.
fn substitute_eigenvalue(f: &Poly, eig: &Poly) -> Poly {
    let mut acc = Poly::zero(eig.var);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(eig).add(&Poly::constant(eig.var, c.clone()));
    }
    acc
}

fn conjugated_product(op: &OreOp, lead: &Poly) -> Result<(OreOp, Poly), DarbouxError> {
    // op* · (1/lead²) · op, rewritten in powers of the base operator by the
    // caller; here we just form the product.
    let var = op.var;
    let lead_rf = RatFunc::from_poly(lead.clone());
    let inv_sq = RatFunc::one(var)
        .div(&lead_rf.mul(&lead_rf))
        .expect("leading coefficient nonzero");
    Ok((
        op.adjoint().mul(&OreOp::from_ratfunc(inv_sq)).mul(op),
        lead.clone(),
    ))
}

impl DarbouxTransform {
    /// Builds and validates a transform from a generator expression. The
    /// standard normalization takes p and q to be the leading coefficients
    /// of 𝔲 and 𝔴; explicit overrides are accepted only if proportional.
    pub fn build(
        ctx: &Context,
        u_expr: GenExpr,
        p_override: Option<Poly>,
        q_override: Option<Poly>,
    ) -> Result<Self, DarbouxError> {
        let u = u_expr.x_op.clone();
        let w = u_expr.y_op.clone();
        assert!(!u.is_zero(), "transforming operator must be nonzero");
        let d1 = u.order().unwrap();
        let d2 = w.order().unwrap();
        let mut p = leading_poly(&u)?;
        let mut q = leading_poly(&w)?;

        // x-side factorization: u*(1/p²)u = unit·f_monic(base_x),
        // f(eig_y) ∝ q².
        let (base_x, eig_y) = ctx.base_operator();
        let (prod_x, _) = conjugated_product(&u, &p)?;
        let f = prod_x
            .rewrite_in_base(&base_x)
            .map_err(|_: OreError| DarbouxError::FactorizationFails { side: "x" })?;
        let (f_monic, unit) = monic_with_unit(&f);
        proportional_to(&substitute_eigenvalue(&f, &eig_y), &q.mul(&q))?;

        // y-side factorization: w*(1/q²)w = g(base_y), g(eig_x) ∝ p².
        let (base_y, eig_x) = ctx.base_operator_y();
        let (prod_y, _) = conjugated_product(&w, &q)?;
        let g = prod_y
            .rewrite_in_base(&base_y)
            .map_err(|_: OreError| DarbouxError::FactorizationFails { side: "y" })?;
        proportional_to(&substitute_eigenvalue(&g, &eig_x), &p.mul(&p))?;

        if let Some(po) = p_override {
            proportional_to(&po, &p).map_err(|_| DarbouxError::OverrideNotProportional)?;
            p = po;
        }
        if let Some(qo) = q_override {
            proportional_to(&qo, &q).map_err(|_| DarbouxError::OverrideNotProportional)?;
            q = qo;
        }

        Ok(DarbouxTransform {
            ctx: ctx.clone(),
            u_expr,
            u,
            w,
            p,
            q,
            d1,
            d2,
            unit,
            f_monic,
        })
    }

    /// The identity transform (𝔲 = 1, p = q = 1): the candidate space
    /// degenerates to the symmetric basis of the untransformed context.
    pub fn trivial(ctx: &Context) -> Self {
        let one = crate::parser::Expr::scalar_int(1);
        let u_expr = ctx.fourier(&one).expect("constant expands");
        DarbouxTransform {
            ctx: ctx.clone(),
            u: u_expr.x_op.clone(),
            w: u_expr.y_op.clone(),
            u_expr,
            p: Poly::one(Var::X),
            q: Poly::one(Var::Y),
            d1: 0,
            d2: 0,
            unit: G::one(),
            f_monic: Poly::one(Var::X),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.d1 == 0 && self.d2 == 0
    }

    fn allowed_pole_locus(&self, var: Var) -> Poly {
        let lead = match var {
            Var::X => self.p.clone(),
            Var::Y => self.q.with_var(Var::Y),
        };
        if self.ctx.kind == ContextKind::Bessel {
            lead.mul(&Poly::var_poly(var))
        } else {
            lead
        }
    }

    fn check_poles(&self, op: &OreOp) -> Result<(), DarbouxError> {
        let allowed = self.allowed_pole_locus(op.var);
        for c in op.coeffs() {
            let mut den = c.den().clone();
            loop {
                let g = den.gcd(&allowed);
                if g.degree().map_or(true, |d| d == 0) {
                    break;
                }
                den = den.divrem(&g).unwrap().0;
            }
            if den.degree().map_or(false, |d| d > 0) {
                return Err(DarbouxError::InexactDivision);
            }
        }
        Ok(())
    }

    /// p·𝔟·p on the x side, (1/q)𝔴·b(𝔟)·𝔴*(1/q) on the y side.
    pub fn conj_p(&self, b: &SymBasisElem) -> Result<CandidatePair, DarbouxError> {
        let p_op = OreOp::from_poly(self.p.clone());
        let x_op = p_op.mul(&b.gen.x_op).mul(&p_op);
        let q_rf = RatFunc::from_poly(self.q.with_var(Var::Y));
        let inv_q = OreOp::from_ratfunc(RatFunc::one(Var::Y).div(&q_rf).unwrap());
        // group the (mostly polynomial) core first; the 1/q sandwich is
        // where rational-function coefficients appear
        let core = self.w.mul(&b.gen.y_op).mul(&self.w.adjoint());
        let y_op = inv_q.mul(&core).mul(&inv_q);
        self.check_poles(&y_op)?;
        Ok(CandidatePair {
            x_op,
            y_op,
            provenance: Provenance::PFamily(b.j, b.k),
        })
    }

    /// (1/p)𝔲·𝔟·𝔲*(1/p) on the x side, q·b(𝔟)·q on the y side.
    pub fn conj_u(&self, b: &SymBasisElem) -> Result<CandidatePair, DarbouxError> {
        let p_rf = RatFunc::from_poly(self.p.clone());
        let inv_p = OreOp::from_ratfunc(RatFunc::one(Var::X).div(&p_rf).unwrap());
        let core = self.u.mul(&b.gen.x_op).mul(&self.u.adjoint());
        let x_op = inv_p.mul(&core).mul(&inv_p);
        self.check_poles(&x_op)?;
        let q_op = OreOp::from_poly(self.q.with_var(Var::Y));
        let y_op = q_op.mul(&b.gen.y_op).mul(&q_op);
        Ok(CandidatePair {
            x_op,
            y_op,
            provenance: Provenance::UFamily(b.j, b.k),
        })
    }

    /// The generating set of the candidate subspace:
    /// {1} ∪ (1/p)𝔲·basis·𝔲*(1/p) ∪ p·basis·p, with the default family
    /// bounds tied to the target filtration (L, M):
    /// u-family basis from order ≤ 2L−2d₁, co-order ≤ 2M; p-family basis
    /// from order ≤ max(0, 2d₁−2), co-order ≤ 2M−2d₂ (the order cap keeps
    /// the two families independent by order separation).
    ///
    /// With an explicit `bounds` override the returned set is exactly the
    /// two conjugated families and no standalone constant.
    pub fn candidate_space(
        &self,
        l_target: usize,
        m_target: usize,
        bounds: Option<&BoundsOverride>,
    ) -> Result<Vec<CandidatePair>, DarbouxError> {
        if self.is_trivial() && bounds.is_none() {
            return Ok(self
                .ctx
                .sym_basis(l_target, m_target)
                .into_iter()
                .map(|b| CandidatePair {
                    x_op: b.gen.x_op.clone(),
                    y_op: b.gen.y_op.clone(),
                    provenance: Provenance::Basis(b.j, b.k),
                })
                .collect());
        }
        let mut out = vec![];
        let (u_bounds, p_bounds, include_constant) = match bounds {
            Some(b) => {
                assert!(
                    b.u_family.iter().chain(&b.p_family).all(|v| v % 2 == 0),
                    "family bounds must be even filtration superscripts"
                );
                (
                    Some((b.u_family[0] / 2, b.u_family[1] / 2)),
                    Some((b.p_family[0] / 2, b.p_family[1] / 2)),
                    false,
                )
            }
            None => {
                let u = if l_target >= self.d1 {
                    Some((l_target - self.d1, m_target))
                } else {
                    None
                };
                let p = if self.d1 >= 1 && m_target >= self.d2 {
                    Some((self.d1 - 1, m_target - self.d2))
                } else {
                    None
                };
                (u, p, true)
            }
        };
        if include_constant {
            out.push(CandidatePair {
                x_op: OreOp::one(Var::X),
                y_op: OreOp::one(Var::Y),
                provenance: Provenance::Constant,
            });
        }
        if let Some((l, m)) = u_bounds {
            for b in self.ctx.sym_basis(l, m) {
                out.push(self.conj_u(&b)?);
            }
        }
        if let Some((l, m)) = p_bounds {
            for b in self.ctx.sym_basis(l, m) {
                out.push(self.conj_p(&b)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, ParamEnv};

    fn exp_rank1() -> DarbouxTransform {
        let ctx = Context::exp();
        let tree = parse("x*Dx - 1", ctx.dialect(), &ParamEnv::new()).unwrap();
        DarbouxTransform::build(&ctx, ctx.fourier(&tree).unwrap(), None, None).unwrap()
    }

    #[test]
    fn rank1_transform_data() {
        let t = exp_rank1();
        assert_eq!(t.p, Poly::var_poly(Var::X));
        assert_eq!(t.q, Poly::var_poly(Var::Y));
        assert_eq!((t.d1, t.d2), (1, 1));
        assert_eq!(t.unit, G::from_int(-1));
        // f_monic(T) = T²
        assert_eq!(t.f_monic, Poly::from_ints(Var::X, &[0, 0, 1]));
    }

    #[test]
    fn trivial_transform_data() {
        for ctx in [
            Context::exp(),
            Context::airy(),
            Context::bessel(G::from_frac(1, 2)).unwrap(),
        ] {
            let t = DarbouxTransform::trivial(&ctx);
            assert_eq!((t.d1, t.d2), (0, 0));
            assert!(t.p.is_one() && t.q.is_one());
        }
    }

    #[test]
    fn bessel_22_transform_data() {
        // 𝔲 = x²∂² + (2ν−1)x∂ + ν(ν−2) = S² + (2ν−2)S + ν(ν−2)
        let ctx = Context::bessel(G::from_frac(1, 2)).unwrap();
        let mut env = ParamEnv::new();
        env.bind("nu", G::from_frac(1, 2)).unwrap();
        let tree = parse("S^2 + (2*nu - 2)*S + nu*(nu - 2)", ctx.dialect(), &env).unwrap();
        let t = DarbouxTransform::build(&ctx, ctx.fourier(&tree).unwrap(), None, None).unwrap();
        assert_eq!(t.p, Poly::monomial(Var::X, G::one(), 2));
        assert_eq!(t.q, Poly::monomial(Var::Y, G::one(), 2));
        assert_eq!((t.d1, t.d2), (2, 2));
    }

    #[test]
    fn invalid_transform_rejected() {
        // x∂ + x² is not a Darboux datum: (x∂+x²)*(1/x²)(x∂+x²) is not a
        // constant-coefficient polynomial in ∂
        let ctx = Context::exp();
        let tree = parse("x*Dx + x^2", ctx.dialect(), &ParamEnv::new()).unwrap();
        let err = DarbouxTransform::build(&ctx, ctx.fourier(&tree).unwrap(), None, None)
            .unwrap_err();
        assert!(matches!(
            err,
            DarbouxError::FactorizationFails { .. } | DarbouxError::QMismatch
        ));
    }

    #[test]
    fn conj_on_trivial_transform_is_identity() {
        let ctx = Context::exp();
        let t = DarbouxTransform::trivial(&ctx);
        for b in ctx.sym_basis(1, 1) {
            let cp = t.conj_p(&b).unwrap();
            assert_eq!(cp.x_op, b.gen.x_op);
            assert_eq!(cp.y_op, b.gen.y_op);
            let cu = t.conj_u(&b).unwrap();
            assert_eq!(cu.x_op, b.gen.x_op);
            assert_eq!(cu.y_op, b.gen.y_op);
        }
    }

    #[test]
    fn rank1_candidate_space_shape() {
        let t = exp_rank1();
        let cands = t.candidate_space(1, 1, None).unwrap();
        // constant + 2 u-family (from basis of F^{0,2}) + 1 p-family
        assert_eq!(cands.len(), 4);
        // all formally symmetric on both sides
        for c in &cands {
            assert!(c.x_op.is_formally_symmetric(), "{:?}", c.provenance);
            assert!(c.y_op.is_formally_symmetric(), "{:?}", c.provenance);
        }
        // the p-family element is x·1·x = x²
        let p_elem = cands
            .iter()
            .find(|c| matches!(c.provenance, Provenance::PFamily(..)))
            .unwrap();
        assert_eq!(
            p_elem.x_op,
            OreOp::from_poly(Poly::monomial(Var::X, G::one(), 2))
        );
        // conj_u(1) = −∂² + 2/x²
        let u0 = cands
            .iter()
            .find(|c| c.provenance == Provenance::UFamily(0, 0))
            .unwrap();
        let inv_x2 = RatFunc::new(Poly::from_ints(Var::X, &[2]), Poly::from_ints(Var::X, &[0, 0, 1]));
        let expected = OreOp::d(Var::X).pow(2).neg().add(&OreOp::from_ratfunc(inv_x2));
        assert_eq!(u0.x_op, expected);
    }

    #[test]
    fn trivial_candidate_space_is_sym_basis() {
        let ctx = Context::exp();
        let t = DarbouxTransform::trivial(&ctx);
        let cands = t.candidate_space(1, 1, None).unwrap();
        assert_eq!(cands.len(), 4);
        assert!(cands
            .iter()
            .all(|c| matches!(c.provenance, Provenance::Basis(..))));
    }

    #[test]
    fn order_coorder_bookkeeping() {
        // conj_p keeps the order, adds 2d₂ to the co-order;
        // conj_u adds 2d₁ to the order, keeps the co-order.
        let t = exp_rank1();
        for b in t.ctx.sym_basis(2, 2) {
            let ord = b.gen.order().unwrap();
            let cord = b.gen.co_order().unwrap();
            let cp = t.conj_p(&b).unwrap();
            assert_eq!(cp.x_op.order(), Some(ord));
            assert_eq!(cp.y_op.order(), Some(cord + 2 * t.d2));
            let cu = t.conj_u(&b).unwrap();
            assert_eq!(cu.x_op.order(), Some(ord + 2 * t.d1));
            assert_eq!(cu.y_op.order(), Some(cord));
        }
    }
}

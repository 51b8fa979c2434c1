//! Rank-1 adelic planes of quasi-exponential functions and their
//! translation into self-adjoint Darboux data for the exponential context.
//!
//! A plane is given by a constant-coefficient ambient operator
//! d = Π(∂−c)^{m(c)} (its exponent multiset) together with a subspace V of
//! its kernel. The bilinear concomitant of d restricts to a constant
//! symplectic pairing on ker d; planes on which that pairing vanishes and
//! with dim V = (ord d)/2 correspond exactly to factorizations
//! d = ±𝔟*𝔟 with ker 𝔟 = V, and — when additionally stable under
//! x ↦ −x — to self-adjoint transformations of e^{xy}.

use std::fmt;

use thiserror::Error;

use crate::context::{Context, ContextError};
use crate::darboux::{DarbouxError, DarbouxTransform};
use crate::exactnum::{G, Poly, RatFunc, Var};
use crate::orealg::{monic_with_unit, OreOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrassError {
    #[error("functional has no nonzero coefficient")]
    EmptyFunctional,
    #[error("a plane element is not annihilated by the ambient operator")]
    NotInKernel,
    #[error("kernel functions are linearly dependent")]
    DependentKernel,
    #[error("ambient operator is not formally symmetric")]
    NotFormallySymmetric,
    #[error("the concomitant pairing does not vanish on the plane (or the plane has the wrong dimension)")]
    NotLagrangian,
    #[error("the plane is not stable under x ↦ −x")]
    NotSigmaStable,
    #[error(transparent)]
    Darboux(#[from] DarbouxError),
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// A finite sum Σ_c p_c(x)e^{cx} with rational-complex exponents. The
/// representation is unique: exponents are distinct (sorted) and no zero
/// polynomial is stored, so equality of functions is equality of terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiExp {
    /// (exponent, coefficient polynomial) pairs, sorted by exponent.
    terms: Vec<(G, Poly)>,
}

impl QuasiExp {
    fn normalize(mut terms: Vec<(G, Poly)>) -> Self {
        terms.retain(|(_, p)| !p.is_zero());
        terms.sort_by(|a, b| a.0.lex_cmp(&b.0));
        let mut merged: Vec<(G, Poly)> = vec![];
        for (c, p) in terms {
            match merged.last_mut() {
                Some((lc, lp)) if *lc == c => *lp = lp.add(&p),
                _ => merged.push((c, p)),
            }
        }
        merged.retain(|(_, p)| !p.is_zero());
        QuasiExp { terms: merged }
    }

    pub fn zero() -> Self {
        QuasiExp { terms: vec![] }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one(Var::X))
    }

    /// p(x)·e^{cx}
    pub fn exp_term(c: G, p: Poly) -> Self {
        assert_eq!(p.var, Var::X);
        Self::normalize(vec![(c, p)])
    }

    /// x^k·e^{cx}
    pub fn exp_monomial(c: G, k: usize) -> Self {
        Self::exp_term(c, Poly::monomial(Var::X, G::one(), k))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::exp_term(G::zero(), p)
    }

    pub fn terms(&self) -> &[(G, Poly)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a scalar, when the function is a constant.
    pub fn as_constant(&self) -> Option<G> {
        match self.terms.as_slice() {
            [] => Some(G::zero()),
            [(c, p)] if c.is_zero() && p.is_constant() => Some(p.coeff(0)),
            _ => None,
        }
    }

    /// True iff every term has the single exponent `c`.
    pub fn single_exponent(&self) -> Option<&G> {
        match self.terms.as_slice() {
            [(c, _)] => Some(c),
            _ => None,
        }
    }

    pub fn add(&self, other: &QuasiExp) -> QuasiExp {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::normalize(terms)
    }

    pub fn sub(&self, other: &QuasiExp) -> QuasiExp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QuasiExp {
        QuasiExp {
            terms: self.terms.iter().map(|(c, p)| (c.clone(), p.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &G) -> QuasiExp {
        Self::normalize(
            self.terms
                .iter()
                .map(|(c, p)| (c.clone(), p.scale(s)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &QuasiExp) -> QuasiExp {
        let mut terms = vec![];
        for (c1, p1) in &self.terms {
            for (c2, p2) in &other.terms {
                terms.push((c1 + c2, p1.mul(p2)));
            }
        }
        Self::normalize(terms)
    }

    /// d/dx: p e^{cx} ↦ (p′ + c p) e^{cx}.
    pub fn derivative(&self) -> QuasiExp {
        Self::normalize(
            self.terms
                .iter()
                .map(|(c, p)| (c.clone(), p.derivative().add(&p.scale(c))))
                .collect(),
        )
    }

    /// The pullback under x ↦ −x: p(x)e^{cx} ↦ p(−x)e^{−cx}.
    pub fn sigma(&self) -> QuasiExp {
        Self::normalize(
            self.terms
                .iter()
                .map(|(c, p)| (-c, p.subst_neg()))
                .collect(),
        )
    }

    /// Applies a constant-coefficient operator: Σⱼ dⱼ f^{(j)}.
    pub fn apply_const_op(&self, d: &OreOp) -> QuasiExp {
        let mut out = QuasiExp::zero();
        let mut f = self.clone();
        for j in 0..=d.order().unwrap_or(0) {
            let c = d
                .coeff(j)
                .constant_value()
                .expect("operator must have constant coefficients");
            if !c.is_zero() {
                out = out.add(&f.scale(&c));
            }
            f = f.derivative();
        }
        out
    }
}

impl fmt::Display for QuasiExp {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(fm, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, p)| {
                if c.is_zero() {
                    format!("{}", p)
                } else if p.is_one() {
                    format!("exp(({})*x)", c)
                } else {
                    format!("({})*exp(({})*x)", p, c)
                }
            })
            .collect();
        write!(fm, "{}", parts.join(" + "))
    }
}

/// The functional Σⱼ αⱼ δ^{(j)}(y − c) acting on functions of y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionFunctional {
    pub point: G,
    coeffs: Vec<G>,
}

impl ConditionFunctional {
    pub fn new(point: G, mut coeffs: Vec<G>) -> Result<Self, GrassError> {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(GrassError::EmptyFunctional);
        }
        Ok(ConditionFunctional { point, coeffs })
    }

    pub fn coeffs(&self) -> &[G] {
        &self.coeffs
    }
}

/// Pairing of the functional with e^{xy} in y: Σⱼ αⱼ xʲ e^{cx}.
pub fn functional_to_kernel(chi: &ConditionFunctional) -> QuasiExp {
    QuasiExp::exp_term(
        chi.point.clone(),
        Poly::new(Var::X, chi.coeffs.clone()),
    )
}

/// Joint coordinates of quasi-exponentials over the (exponent, degree)
/// monomial basis appearing in `vs`.
fn coordinatize(vs: &[&QuasiExp]) -> Vec<Vec<G>> {
    let mut keys: Vec<(G, usize)> = vec![];
    for v in vs {
        for (c, p) in v.terms() {
            for k in 0..=p.degree().unwrap() {
                if !keys.contains(&(c.clone(), k)) {
                    keys.push((c.clone(), k));
                }
            }
        }
    }
    keys.sort_by(|a, b| a.0.lex_cmp(&b.0).then(a.1.cmp(&b.1)));
    vs.iter()
        .map(|v| {
            keys.iter()
                .map(|(c, k)| {
                    v.terms()
                        .iter()
                        .find(|(vc, _)| vc == c)
                        .map_or(G::zero(), |(_, p)| p.coeff(*k))
                })
                .collect()
        })
        .collect()
}

fn qe_rank(vs: &[&QuasiExp]) -> usize {
    let coords = coordinatize(vs);
    let cols = coords.first().map_or(0, |v| v.len());
    crate::linalg::rank(&coords, cols)
}

/// Determinant of a square matrix of quasi-exponentials, by Laplace
/// expansion along the first column (dimensions here are tiny).
fn qe_det(m: &[Vec<QuasiExp>]) -> QuasiExp {
    let n = m.len();
    if n == 0 {
        return QuasiExp::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = QuasiExp::zero();
    for r in 0..n {
        if m[r][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<QuasiExp>> = m
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| row[1..].to_vec())
            .collect();
        let term = m[r][0].mul(&qe_det(&minor));
        det = if r % 2 == 0 { det.add(&term) } else { det.sub(&term) };
    }
    det
}

/// The order-|V| operator with kernel span V, in cleared form: `u` has
/// polynomial coefficients and `p` is its (monic) leading coefficient, so
/// (1/p)·u is the monic annihilator.
#[derive(Debug, Clone)]
pub struct Annihilator {
    pub u: OreOp,
    pub p: Poly,
}

/// Wronskian-minor construction of the annihilator of span V. The minors
/// Aⱼ are quasi-exponential determinants sharing one common exponential
/// factor (each basis function must carry a single exponent), which
/// cancels in the ratios Aⱼ/A_n and leaves polynomial coefficients.
pub fn annihilator(v: &[QuasiExp]) -> Result<Annihilator, GrassError> {
    let n = v.len();
    assert!(n > 0, "annihilator of the zero space is undefined");
    // rows j = 0..=n of derivatives, columns = basis functions
    let mut derivs: Vec<Vec<QuasiExp>> = vec![v.to_vec()];
    for _ in 0..n {
        derivs.push(derivs.last().unwrap().iter().map(|f| f.derivative()).collect());
    }
    // Aⱼ = det of the rows with index ≠ j; the annihilator applied to f is
    // det[f, f', …, f^{(n)} | columns of V-derivatives] expanded along f
    let mut minors = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let rows: Vec<Vec<QuasiExp>> = derivs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, r)| r.clone())
            .collect();
        minors.push(qe_det(&rows));
    }
    let wronskian = &minors[n];
    if wronskian.is_zero() {
        return Err(GrassError::DependentKernel);
    }
    // all minors share the exponent Σᵢ cᵢ of the basis functions
    let mut polys = Vec::with_capacity(n + 1);
    for a in &minors {
        if a.is_zero() {
            polys.push(Poly::zero(Var::X));
            continue;
        }
        let (c, p) = match a.single_exponent() {
            Some(c) => (c.clone(), a.terms()[0].1.clone()),
            None => return Err(GrassError::DependentKernel),
        };
        if c != wronskian.single_exponent().cloned().unwrap_or_else(G::zero) {
            return Err(GrassError::DependentKernel);
        }
        polys.push(p);
    }
    // scale so that the leading coefficient p is monic
    let lc_inv = polys[n].leading_coeff().inv().expect("nonzero Wronskian");
    let coeffs: Vec<RatFunc> = polys
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let sign = if (n + j) % 2 == 0 { G::one() } else { -G::one() };
            RatFunc::from_poly(a.scale(&(&sign * &lc_inv)))
        })
        .collect();
    let u = OreOp::new(Var::X, coeffs);
    let p = polys[n].make_monic();
    debug_assert!(v.iter().all(|f| f.apply_const_op_allow_poly(&u).is_zero()));
    Ok(Annihilator { u, p })
}

impl QuasiExp {
    /// Applies an operator with polynomial coefficients.
    fn apply_const_op_allow_poly(&self, d: &OreOp) -> QuasiExp {
        let mut out = QuasiExp::zero();
        let mut f = self.clone();
        for j in 0..=d.order().unwrap_or(0) {
            let c = d.coeff(j);
            let cp = c
                .as_polynomial()
                .expect("operator must have polynomial coefficients")
                .clone();
            out = out.add(&f.mul(&QuasiExp::from_poly(cp)));
            f = f.derivative();
        }
        out
    }
}

/// Builds Π(∂ − c)^{m} from the exponent multiset.
pub fn exponents_to_operator(exponents: &[(G, usize)]) -> OreOp {
    let d = OreOp::d(Var::X);
    let mut op = OreOp::one(Var::X);
    for (c, m) in exponents {
        let factor = d.sub(&OreOp::constant(Var::X, c.clone()));
        op = op.mul(&factor.pow(*m));
    }
    op
}

/// The exponent polynomial Π(T − c)^{m}, in the x variable slot.
pub fn exponents_to_polynomial(exponents: &[(G, usize)]) -> Poly {
    let t = Poly::var_poly(Var::X);
    let mut f = Poly::one(Var::X);
    for (c, m) in exponents {
        let factor = t.sub(&Poly::constant(Var::X, c.clone()));
        for _ in 0..*m {
            f = f.mul(&factor);
        }
    }
    f
}

fn normalize_exponents(mut exponents: Vec<(G, usize)>) -> Vec<(G, usize)> {
    exponents.retain(|(_, m)| *m > 0);
    exponents.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let mut merged: Vec<(G, usize)> = vec![];
    for (c, m) in exponents {
        match merged.last_mut() {
            Some((lc, lm)) if *lc == c => *lm += m,
            _ => merged.push((c, m)),
        }
    }
    merged
}

/// A subspace V of ker Π(∂−c)^{m(c)} together with the polynomial q(y) =
/// Π(y−c)^{n(c)}, n(c) = dim(V ∩ {x-polynomial multiples of e^{cx}}).
#[derive(Debug, Clone)]
pub struct AdelicPlane {
    pub d_exponents: Vec<(G, usize)>,
    pub v: Vec<QuasiExp>,
    pub q: Poly,
}

impl AdelicPlane {
    /// Plane of the kernel functions of homogeneous conditions; the
    /// ambient exponent multiset is the σ-symmetrized count of conditions
    /// per support point, so its order is twice the number of conditions.
    pub fn from_conditions(conds: &[ConditionFunctional]) -> Result<Self, GrassError> {
        let mut counts: Vec<(G, usize)> = vec![];
        for c in conds {
            counts = normalize_exponents(
                counts
                    .into_iter()
                    .chain([(c.point.clone(), 1)])
                    .collect(),
            );
        }
        let mut exponents = counts.clone();
        for (c, m) in &counts {
            exponents.push((-c, *m));
        }
        let exponents = normalize_exponents(exponents);
        let v: Vec<QuasiExp> = conds.iter().map(functional_to_kernel).collect();
        Self::from_parts(exponents, v)
    }

    /// Plane from explicit ambient exponents and kernel functions; checks
    /// membership in the ambient kernel and linear independence.
    pub fn from_parts(
        d_exponents: Vec<(G, usize)>,
        v: Vec<QuasiExp>,
    ) -> Result<Self, GrassError> {
        let d_exponents = normalize_exponents(d_exponents);
        let d = exponents_to_operator(&d_exponents);
        for f in &v {
            if !f.apply_const_op(&d).is_zero() {
                return Err(GrassError::NotInKernel);
            }
        }
        let refs: Vec<&QuasiExp> = v.iter().collect();
        if qe_rank(&refs) != v.len() {
            return Err(GrassError::DependentKernel);
        }
        // n(c) = dim(span V ∩ block c), block c = span{xʲe^{cx} : j < m(c)}
        let mut q = Poly::one(Var::Y);
        for (c, m) in &d_exponents {
            let block: Vec<QuasiExp> = (0..*m).map(|j| QuasiExp::exp_monomial(c.clone(), j)).collect();
            let mut joint: Vec<&QuasiExp> = v.iter().collect();
            joint.extend(block.iter());
            let n_c = v.len() + m - qe_rank(&joint);
            let factor = Poly::new(Var::Y, vec![-c, G::one()]);
            for _ in 0..n_c {
                q = q.mul(&factor);
            }
        }
        Ok(AdelicPlane {
            d_exponents,
            v,
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn order(&self) -> usize {
        self.d_exponents.iter().map(|(_, m)| m).sum()
    }
}

/// Gram matrix M_{ij} = C_d(f_i, f_j; p) of the concomitant of the
/// constant-coefficient operator d on V ⊆ ker d. The value is independent
/// of p: the form is computed symbolically and its x-derivative is
/// asserted to vanish (equivalently, evaluations at any two sample points
/// agree), so the constant can be read off exactly.
pub fn concomitant_pairing(
    d_exponents: &[(G, usize)],
    v: &[QuasiExp],
) -> Result<Vec<Vec<G>>, GrassError> {
    let d = exponents_to_operator(d_exponents);
    let m = d.order().unwrap_or(0);
    for f in v {
        if !f.apply_const_op(&d).is_zero() {
            return Err(GrassError::NotInKernel);
        }
    }
    let djs: Vec<G> = (0..=m)
        .map(|j| d.coeff(j).constant_value().expect("constant coefficients"))
        .collect();
    let jets: Vec<Vec<QuasiExp>> = v
        .iter()
        .map(|f| {
            let mut js = vec![f.clone()];
            for _ in 1..m.max(1) {
                js.push(js.last().unwrap().derivative());
            }
            js
        })
        .collect();
    let mut matrix = vec![vec![G::zero(); v.len()]; v.len()];
    for (a, fa) in jets.iter().enumerate() {
        for (b, gb) in jets.iter().enumerate() {
            let mut total = QuasiExp::zero();
            for j in 1..=m {
                if djs[j].is_zero() {
                    continue;
                }
                let mut sign = djs[j].clone();
                for k in 0..j {
                    total = total.add(&fa[j - 1 - k].mul(&gb[k]).scale(&sign));
                    sign = -&sign;
                }
            }
            assert!(
                total.derivative().is_zero(),
                "concomitant must be constant on ker × ker"
            );
            matrix[a][b] = total.as_constant().expect("constant quasi-exponential");
        }
    }
    Ok(matrix)
}

fn check_formally_symmetric(plane: &AdelicPlane) -> Result<(), GrassError> {
    let f = exponents_to_polynomial(&plane.d_exponents);
    if f.subst_neg() != f {
        return Err(GrassError::NotFormallySymmetric);
    }
    Ok(())
}

/// True iff dim V = (ord d)/2 and the concomitant pairing vanishes on V.
pub fn is_lagrangian(plane: &AdelicPlane) -> Result<bool, GrassError> {
    check_formally_symmetric(plane)?;
    if 2 * plane.dim() != plane.order() {
        return Ok(false);
    }
    let m = concomitant_pairing(&plane.d_exponents, &plane.v)?;
    Ok(m.iter().all(|row| row.iter().all(|e| e.is_zero())))
}

/// True iff span V is stable under p(x)e^{cx} ↦ p(−x)e^{−cx}.
pub fn is_sigma_stable(plane: &AdelicPlane) -> bool {
    let images: Vec<QuasiExp> = plane.v.iter().map(|f| f.sigma()).collect();
    let mut joint: Vec<&QuasiExp> = plane.v.iter().collect();
    joint.extend(images.iter());
    qe_rank(&joint) == plane.dim()
}

/// The factorization certificate of a Lagrangian plane: with (u, p) the
/// cleared annihilator of V, checks ((1/p)u)*((1/p)u) = unit·f(∂) where f
/// is the ambient exponent polynomial. Returns false when the conjugated
/// product is not constant-coefficient or has the wrong eigenvalue
/// polynomial.
pub fn factorization_check(plane: &AdelicPlane) -> Result<bool, GrassError> {
    let ann = annihilator(&plane.v)?;
    let p_rf = RatFunc::from_poly(ann.p.clone());
    let inv_p = OreOp::from_ratfunc(RatFunc::one(Var::X).div(&p_rf).unwrap());
    let b = inv_p.mul(&ann.u);
    let prod = b.adjoint().mul(&b);
    let f = match prod.rewrite_in_base(&OreOp::d(Var::X)) {
        Ok(f) => f,
        Err(_) => return Ok(false),
    };
    let (f_monic, _unit) = monic_with_unit(&f);
    let target = exponents_to_polynomial(&plane.d_exponents).make_monic();
    Ok(f_monic == target)
}

/// Translates an accepted plane into validated Darboux data for the
/// exponential context: u from the Wronskian annihilator, p its leading
/// coefficient, q from the condition-count polynomial (cross-checked
/// against the leading coefficient of the Fourier partner of u).
pub fn to_darboux(plane: &AdelicPlane) -> Result<DarbouxTransform, GrassError> {
    check_formally_symmetric(plane)?;
    if !is_lagrangian(plane)? {
        return Err(GrassError::NotLagrangian);
    }
    if !is_sigma_stable(plane) {
        return Err(GrassError::NotSigmaStable);
    }
    let ann = annihilator(&plane.v)?;
    let ctx = Context::exp();
    let gen = ctx.wrap_raw(&ann.u)?;
    let t = DarbouxTransform::build(
        &ctx,
        gen,
        Some(ann.p.clone()),
        Some(plane.q.clone()),
    )?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> G {
        G::from_int(n)
    }

    #[test]
    fn quasi_exp_arithmetic() {
        // d/dx (x) = 1
        let x = QuasiExp::from_poly(Poly::var_poly(Var::X));
        assert_eq!(x.derivative(), QuasiExp::one());
        // e^x · e^{−x} = 1
        let ep = QuasiExp::exp_monomial(g(1), 0);
        let em = QuasiExp::exp_monomial(g(-1), 0);
        assert_eq!(ep.mul(&em), QuasiExp::one());
        // d/dx (x e^{2x}) = (1 + 2x) e^{2x}
        let xe2 = QuasiExp::exp_monomial(g(2), 1);
        assert_eq!(
            xe2.derivative(),
            QuasiExp::exp_term(g(2), Poly::from_ints(Var::X, &[1, 2]))
        );
        // cancellation collapses the representation
        assert!(ep.sub(&ep).is_zero());
    }

    #[test]
    fn functional_kernels() {
        // δ′(y) → x
        let chi = ConditionFunctional::new(G::zero(), vec![G::zero(), G::one()]).unwrap();
        assert_eq!(
            functional_to_kernel(&chi),
            QuasiExp::from_poly(Poly::var_poly(Var::X))
        );
        // δ(y−2) → e^{2x}
        let chi = ConditionFunctional::new(g(2), vec![G::one()]).unwrap();
        assert_eq!(functional_to_kernel(&chi), QuasiExp::exp_monomial(g(2), 0));
        // δ(y) + δ″(y) → 1 + x²
        let chi = ConditionFunctional::new(G::zero(), vec![G::one(), G::zero(), G::one()])
            .unwrap();
        assert_eq!(
            functional_to_kernel(&chi),
            QuasiExp::from_poly(Poly::from_ints(Var::X, &[1, 0, 1]))
        );
        // all-zero coefficient lists are rejected
        assert_eq!(
            ConditionFunctional::new(g(1), vec![G::zero()]).unwrap_err(),
            GrassError::EmptyFunctional
        );
    }

    #[test]
    fn pairing_of_jet_plane() {
        // d = ∂², V = {1, x}: C(f,g) = f′g − fg′
        let exps = vec![(G::zero(), 2usize)];
        let v = vec![QuasiExp::one(), QuasiExp::from_poly(Poly::var_poly(Var::X))];
        let m = concomitant_pairing(&exps, &v).unwrap();
        assert_eq!(m[0][0], G::zero());
        assert_eq!(m[1][1], G::zero());
        assert_eq!(m[0][1], -g(1));
        assert_eq!(m[1][0], g(1));
    }

    #[test]
    fn pairing_requires_kernel_membership() {
        let exps = vec![(G::zero(), 2usize)];
        let v = vec![QuasiExp::from_poly(Poly::from_ints(Var::X, &[0, 0, 1]))];
        assert_eq!(
            concomitant_pairing(&exps, &v).unwrap_err(),
            GrassError::NotInKernel
        );
    }

    #[test]
    fn lagrangian_verdicts() {
        // span{x} in ker ∂² — Lagrangian
        let p1 = AdelicPlane::from_parts(
            vec![(G::zero(), 2)],
            vec![QuasiExp::from_poly(Poly::var_poly(Var::X))],
        )
        .unwrap();
        assert!(is_lagrangian(&p1).unwrap());
        // span{1, x} — wrong dimension
        let p2 = AdelicPlane::from_parts(
            vec![(G::zero(), 2)],
            vec![QuasiExp::one(), QuasiExp::from_poly(Poly::var_poly(Var::X))],
        )
        .unwrap();
        assert!(!is_lagrangian(&p2).unwrap());
        // span{e^x + e^{−x}} in ker(∂²−1): pairing C(f,f) = 0 identically,
        // so a one-dimensional plane of an order-2 operator is Lagrangian
        let f = QuasiExp::exp_monomial(g(1), 0).add(&QuasiExp::exp_monomial(g(-1), 0));
        let p3 = AdelicPlane::from_parts(vec![(g(1), 1), (g(-1), 1)], vec![f]).unwrap();
        assert!(is_lagrangian(&p3).unwrap());
        // span{e^x, e^{−x}} in ker(∂²−1)²: distinct exponents make the
        // constant pairing vanish term by term — Lagrangian
        let p4 = AdelicPlane::from_parts(
            vec![(g(1), 2), (g(-1), 2)],
            vec![QuasiExp::exp_monomial(g(1), 0), QuasiExp::exp_monomial(g(-1), 0)],
        )
        .unwrap();
        assert!(is_lagrangian(&p4).unwrap());
        // span{1, x³} in ker ∂⁴: C(1, x³) = −6 ≠ 0 — not Lagrangian
        let p5 = AdelicPlane::from_parts(
            vec![(G::zero(), 4)],
            vec![
                QuasiExp::one(),
                QuasiExp::from_poly(Poly::monomial(Var::X, G::one(), 3)),
            ],
        )
        .unwrap();
        assert!(!is_lagrangian(&p5).unwrap());
    }

    #[test]
    fn sigma_stability_verdicts() {
        let x_plane = AdelicPlane::from_parts(
            vec![(G::zero(), 2)],
            vec![QuasiExp::from_poly(Poly::var_poly(Var::X))],
        )
        .unwrap();
        assert!(is_sigma_stable(&x_plane));
        let e_plane = AdelicPlane::from_parts(
            vec![(g(1), 1), (g(-1), 1)],
            vec![QuasiExp::exp_monomial(g(1), 0)],
        )
        .unwrap();
        assert!(!is_sigma_stable(&e_plane));
        let pair_plane = AdelicPlane::from_parts(
            vec![(g(1), 1), (g(-1), 1)],
            vec![
                QuasiExp::exp_monomial(g(1), 0),
                QuasiExp::exp_monomial(g(-1), 0),
            ],
        )
        .unwrap();
        assert!(is_sigma_stable(&pair_plane));
    }

    #[test]
    fn annihilator_worked_cases() {
        // V = {x} → u = x∂ − 1, p = x
        let ann = annihilator(&[QuasiExp::from_poly(Poly::var_poly(Var::X))]).unwrap();
        let expected = OreOp::new(
            Var::X,
            vec![
                RatFunc::constant(Var::X, -G::one()),
                RatFunc::from_poly(Poly::var_poly(Var::X)),
            ],
        );
        assert_eq!(ann.u, expected);
        assert_eq!(ann.p, Poly::var_poly(Var::X));
        // V = {1} → u = ∂, p = 1
        let ann = annihilator(&[QuasiExp::one()]).unwrap();
        assert_eq!(ann.u, OreOp::d(Var::X));
        assert!(ann.p.is_one());
        // dependent input is rejected
        let x = QuasiExp::from_poly(Poly::var_poly(Var::X));
        assert_eq!(
            annihilator(&[x.clone(), x.scale(&g(2))]).unwrap_err(),
            GrassError::DependentKernel
        );
    }

    #[test]
    fn annihilator_kills_its_kernel() {
        let v = vec![
            QuasiExp::exp_term(g(2), Poly::from_ints(Var::X, &[1, 3])),
            QuasiExp::exp_monomial(g(-1), 0),
            QuasiExp::from_poly(Poly::from_ints(Var::X, &[0, 1, 1])),
        ];
        let ann = annihilator(&v).unwrap();
        assert_eq!(ann.u.order(), Some(3));
        for f in &v {
            assert!(f.apply_const_op_allow_poly(&ann.u).is_zero());
        }
    }

    #[test]
    fn delta_prime_pipeline() {
        // the worked rank-1 case: condition δ′(y)
        let chi = ConditionFunctional::new(G::zero(), vec![G::zero(), G::one()]).unwrap();
        let plane = AdelicPlane::from_conditions(&[chi]).unwrap();
        assert_eq!(plane.d_exponents, vec![(G::zero(), 2)]);
        assert_eq!(plane.q, Poly::var_poly(Var::Y));
        assert!(is_lagrangian(&plane).unwrap());
        assert!(is_sigma_stable(&plane));
        assert!(factorization_check(&plane).unwrap());
        let t = to_darboux(&plane).unwrap();
        assert_eq!(t.p, Poly::var_poly(Var::X));
        assert_eq!(t.q, Poly::var_poly(Var::X).with_var(Var::Y));
        assert_eq!((t.d1, t.d2), (1, 1));
    }

    #[test]
    fn single_point_condition_is_sigma_unstable() {
        let chi = ConditionFunctional::new(g(1), vec![G::one()]).unwrap();
        let plane = AdelicPlane::from_conditions(&[chi]).unwrap();
        assert!(is_lagrangian(&plane).unwrap());
        assert_eq!(to_darboux(&plane).unwrap_err(), GrassError::NotSigmaStable);
    }

    #[test]
    fn paired_conditions_give_valid_transform() {
        // δ(y−1) and δ(y+1): V = {e^x, e^{−x}}, d = ∂²−1, q = y²−1
        let c1 = ConditionFunctional::new(g(1), vec![G::one()]).unwrap();
        let c2 = ConditionFunctional::new(g(-1), vec![G::one()]).unwrap();
        let plane = AdelicPlane::from_conditions(&[c1, c2]).unwrap();
        assert_eq!(plane.q, Poly::from_ints(Var::Y, &[-1, 0, 1]));
        assert!(is_lagrangian(&plane).unwrap());
        assert!(is_sigma_stable(&plane));
        let t = to_darboux(&plane).unwrap();
        assert_eq!((t.d1, t.d2), (2, 0));
        assert!(t.p.is_one());
    }

    #[test]
    fn perturbed_plane_fails_factorization() {
        // half-jet plane of ∂⁴: {1, x} passes; {1, x³} is half-dimensional
        // and in the kernel but not Lagrangian, and the annihilator product
        // fails the factorization certificate
        let good = AdelicPlane::from_parts(
            vec![(G::zero(), 4)],
            vec![QuasiExp::one(), QuasiExp::from_poly(Poly::var_poly(Var::X))],
        )
        .unwrap();
        assert!(is_lagrangian(&good).unwrap());
        assert!(factorization_check(&good).unwrap());
        let bad = AdelicPlane::from_parts(
            vec![(G::zero(), 4)],
            vec![
                QuasiExp::one(),
                QuasiExp::from_poly(Poly::monomial(Var::X, G::one(), 3)),
            ],
        )
        .unwrap();
        assert!(!is_lagrangian(&bad).unwrap());
        assert!(!factorization_check(&bad).unwrap());
        // the correspondence is two-sided: {1, x²} is also Lagrangian (the
        // odd-jet-gap pairing vanishes) and its annihilator factorizes
        let quirky = AdelicPlane::from_parts(
            vec![(G::zero(), 4)],
            vec![
                QuasiExp::one(),
                QuasiExp::from_poly(Poly::monomial(Var::X, G::one(), 2)),
            ],
        )
        .unwrap();
        assert!(is_lagrangian(&quirky).unwrap());
        assert!(factorization_check(&quirky).unwrap());
    }
}

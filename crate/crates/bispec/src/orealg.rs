//! Differential operators Σ aⱼ(x)∂ʲ with rational-function coefficients.
//!
//! Operators are kept in normal form (coefficient functions to the left of
//! the derivatives), so equality of coefficient sequences is equality of
//! operators. Multiplication pushes derivatives through coefficients with
//! the Leibniz rule; the formal adjoint, the x ↦ −x automorphism, symmetric
//! decomposition, and rewriting in powers of a base operator live here too.

use std::fmt;

use thiserror::Error;

use crate::exactnum::{G, NumError, Poly, RatAccum, RatFunc, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OreError {
    #[error("variable mismatch: expected {expected}, found {found}")]
    VariableMismatch { expected: Var, found: Var },
    #[error("operator is not formally symmetric")]
    NotFormallySymmetric,
    #[error("operator is not a constant-coefficient polynomial in the base operator")]
    NotInBaseAlgebra,
}

/// A differential operator in normal form: coefficient `j` multiplies ∂ʲ.
///
/// Invariant: no trailing zero coefficient; the zero operator has an empty
/// coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreOp {
    pub var: Var,
    coeffs: Vec<RatFunc>,
}

impl OreOp {
    pub fn new(var: Var, mut coeffs: Vec<RatFunc>) -> Self {
        for c in &coeffs {
            assert_eq!(c.var(), var, "coefficient variable mismatch");
        }
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        OreOp { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        OreOp { var, coeffs: vec![] }
    }

    pub fn one(var: Var) -> Self {
        OreOp::from_ratfunc(RatFunc::one(var))
    }

    pub fn constant(var: Var, c: G) -> Self {
        OreOp::from_ratfunc(RatFunc::constant(var, c))
    }

    /// The multiplication operator f(x)·.
    pub fn from_ratfunc(f: RatFunc) -> Self {
        OreOp::new(f.var(), vec![f])
    }

    pub fn from_poly(p: Poly) -> Self {
        OreOp::from_ratfunc(RatFunc::from_poly(p))
    }

    /// The derivative ∂.
    pub fn d(var: Var) -> Self {
        OreOp::new(var, vec![RatFunc::zero(var), RatFunc::one(var)])
    }

    /// c·f(x)·∂ʲ as a single-term operator.
    pub fn term(f: RatFunc, j: usize) -> Self {
        let var = f.var();
        let mut coeffs = vec![RatFunc::zero(var); j + 1];
        coeffs[j] = f;
        OreOp::new(var, coeffs)
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> RatFunc {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| RatFunc::zero(self.var))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order, or `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> RatFunc {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| RatFunc::zero(self.var))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1 && self.coeffs.first().map_or(true, |c| c.is_constant())
    }

    fn check_var(&self, other: &OreOp) -> Result<(), OreError> {
        if self.var != other.var {
            return Err(OreError::VariableMismatch {
                expected: self.var,
                found: other.var,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &OreOp) -> OreOp {
        self.check_var(other).expect("variable mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j).add(&other.coeff(j))).collect();
        OreOp::new(self.var, coeffs)
    }

    pub fn sub(&self, other: &OreOp) -> OreOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> OreOp {
        OreOp {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &G) -> OreOp {
        OreOp::new(self.var, self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    pub fn scale_ratfunc(&self, f: &RatFunc) -> OreOp {
        OreOp::new(self.var, self.coeffs.iter().map(|a| a.mul(f)).collect())
    }

    /// Noncommutative product in normal form:
    /// (a∂ʲ)(b∂ᵏ) = a·Σᵢ C(j,i) b⁽ⁱ⁾ ∂^{j−i+k}.
    pub fn mul(&self, other: &OreOp) -> OreOp {
        self.check_var(other).expect("variable mismatch");
        if self.is_zero() || other.is_zero() {
            return OreOp::zero(self.var);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        // accumulate each output coefficient unreduced; one reducing
        // normalization per coefficient at the end
        let mut out = vec![RatAccum::zero(self.var); n];
        for (k, b) in other.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            // successive derivatives of b, weighted by binomials per j below
            let mut b_derivs = vec![b.clone()];
            for (j, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                while b_derivs.len() <= j {
                    let next = b_derivs.last().unwrap().derivative();
                    b_derivs.push(next);
                }
                let mut binom = G::one();
                for i in 0..=j {
                    // C(j, i), built incrementally
                    if i > 0 {
                        binom = &(&binom * &G::from_int((j - i + 1) as i64))
                            / &G::from_int(i as i64);
                    }
                    let bi = &b_derivs[i];
                    if bi.is_zero() {
                        continue;
                    }
                    let num = a.num().mul(bi.num()).scale(&binom);
                    let den = a.den().mul(bi.den());
                    out[j - i + k].add_term(&num, &den);
                }
            }
        }
        OreOp::new(
            self.var,
            out.into_iter().map(|acc| acc.into_ratfunc()).collect(),
        )
    }

    pub fn pow(&self, n: usize) -> OreOp {
        let mut acc = OreOp::one(self.var);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal adjoint Σⱼ (−1)ʲ ∂ʲ aⱼ, expanded to normal form:
    /// Σⱼ Σₖ (−1)ʲ C(j,k) aⱼ⁽ᵏ⁾ ∂^{j−k}.
    pub fn adjoint(&self) -> OreOp {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![RatFunc::zero(self.var); self.coeffs.len()];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sign = if j % 2 == 0 { G::one() } else { -&G::one() };
            let mut deriv = a.clone();
            let mut binom = G::one();
            for k in 0..=j {
                if k > 0 {
                    deriv = deriv.derivative();
                    binom =
                        &(&binom * &G::from_int((j - k + 1) as i64)) / &G::from_int(k as i64);
                }
                out[j - k] = out[j - k].add(&deriv.scale(&binom).scale(&sign));
            }
        }
        OreOp::new(self.var, out)
    }

    pub fn is_formally_symmetric(&self) -> bool {
        self.adjoint() == *self
    }

    /// The automorphism x ↦ −x, ∂ ↦ −∂.
    pub fn sigma(&self) -> OreOp {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let s = a.subst_neg();
                if j % 2 == 0 {
                    s
                } else {
                    s.neg()
                }
            })
            .collect();
        OreOp::new(self.var, coeffs)
    }

    /// Action on a rational function: Σ aⱼ f⁽ʲ⁾.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(self.var);
        let mut deriv = f.clone();
        for (j, a) in self.coeffs.iter().enumerate() {
            if j > 0 {
                deriv = deriv.derivative();
            }
            if !a.is_zero() {
                acc = acc.add(&a.mul(&deriv));
            }
        }
        acc
    }

    /// For a formally symmetric operator of order 2n, the coefficients
    /// a₀..aₙ with  d = Σⱼ ∂ʲ aⱼ ∂ʲ, found by peeling the leading
    /// coefficient off the top repeatedly.
    pub fn symmetric_decompose(&self) -> Result<Vec<RatFunc>, OreError> {
        if !self.is_formally_symmetric() {
            return Err(OreError::NotFormallySymmetric);
        }
        if self.is_zero() {
            return Ok(vec![RatFunc::zero(self.var)]);
        }
        let ord = self.order().unwrap();
        if ord % 2 != 0 {
            return Err(OreError::NotFormallySymmetric);
        }
        let n = ord / 2;
        let mut parts = vec![RatFunc::zero(self.var); n + 1];
        let mut rem = self.clone();
        for j in (0..=n).rev() {
            if rem.order().map_or(true, |o| o < 2 * j) {
                continue;
            }
            let a = rem.coeff(2 * j);
            parts[j] = a.clone();
            let d = OreOp::d(self.var).pow(j);
            rem = rem.sub(&d.mul(&OreOp::from_ratfunc(a)).mul(&d));
            debug_assert!(rem.order().map_or(true, |o| o < 2 * j));
        }
        debug_assert!(rem.is_zero());
        Ok(parts)
    }

    /// Writes `self = f(base)` for a constant-coefficient polynomial f by
    /// repeated leading-term subtraction. The base must be monic; returns
    /// the raw coefficients of f (index k multiplies base^k), so a global
    /// unit is simply absorbed into f.
    pub fn rewrite_in_base(&self, base: &OreOp) -> Result<Poly, OreError> {
        self.check_var(base).expect("variable mismatch");
        let b_ord = base.order().expect("base operator must be nonzero");
        assert!(b_ord > 0, "base operator must have positive order");
        assert!(base.leading_coeff().is_one(), "base operator must be monic");
        let mut rem = self.clone();
        let mut f = vec![];
        // precomputed powers of base, built lazily
        let mut powers: Vec<OreOp> = vec![OreOp::one(self.var)];
        while let Some(o) = rem.order() {
            if o % b_ord != 0 {
                return Err(OreError::NotInBaseAlgebra);
            }
            let k = o / b_ord;
            let c = rem
                .leading_coeff()
                .constant_value()
                .ok_or(OreError::NotInBaseAlgebra)?;
            if o == 0 {
                f.resize(f.len().max(1), G::zero());
                f[0] = c;
                break;
            }
            while powers.len() <= k {
                let next = powers.last().unwrap().mul(base);
                powers.push(next);
            }
            if f.len() <= k {
                f.resize(k + 1, G::zero());
            }
            f[k] = c.clone();
            rem = rem.sub(&powers[k].scale(&c));
            if rem.order().map_or(false, |o2| o2 >= o) {
                return Err(OreError::NotInBaseAlgebra);
            }
        }
        Ok(Poly::new(self.var, f))
    }

    /// Right division: self = q·b + r with ord r < ord b (coefficients are
    /// rational functions, so this always succeeds for nonzero b).
    pub fn divrem_right(&self, b: &OreOp) -> Result<(OreOp, OreOp), NumError> {
        if b.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let b_ord = b.order().unwrap();
        let mut rem = self.clone();
        let mut quot = OreOp::zero(self.var);
        while let Some(o) = rem.order() {
            if o < b_ord {
                break;
            }
            let c = rem.leading_coeff().div(&b.leading_coeff())?;
            let t = OreOp::term(c, o - b_ord);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(b));
        }
        Ok((quot, rem))
    }

    /// Re-tags the operator into the other variable (coefficients carried
    /// over verbatim).
    pub fn with_var(&self, var: Var) -> OreOp {
        OreOp {
            var,
            coeffs: self.coeffs.iter().map(|c| c.with_var(var)).collect(),
        }
    }

    /// True when every coefficient denominator is 1.
    pub fn has_polynomial_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_polynomial())
    }

    /// True when every coefficient denominator is a power of the variable
    /// (the only pole the Bessel algebra allows is the origin).
    pub fn poles_only_at_origin(&self) -> bool {
        self.coeffs.iter().all(|c| {
            let den = c.den();
            den.coeffs()[..den.coeffs().len().saturating_sub(1)]
                .iter()
                .all(|a| a.is_zero())
        })
    }
}

impl fmt::Display for OreOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_op(self))
    }
}

/// (f_monic, unit) with f = unit · f_monic; unit is 1 for the zero poly.
pub fn monic_with_unit(f: &Poly) -> (Poly, G) {
    if f.is_zero() {
        return (f.clone(), G::one());
    }
    let unit = f.leading_coeff();
    (f.make_monic(), unit)
}

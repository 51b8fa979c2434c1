//! Exact arithmetic tower: Gaussian rationals, dense univariate polynomials,
//! and rational functions over them.
//!
//! Everything here is immutable after construction and kept in canonical
//! form, so structural equality coincides with mathematical equality:
//! - rationals are stored in lowest terms with positive denominator
//!   (guaranteed by `BigRational`),
//! - polynomials never store a leading zero (the zero polynomial has an
//!   empty coefficient vector),
//! - rational functions have a monic denominator coprime to the numerator.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable mismatch: expected {expected}, found {found}")]
    VariableMismatch { expected: Var, found: Var },
    #[error("evaluation point is a pole of the denominator")]
    PoleAtPoint,
}

/// The variable a polynomial or operator lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }

    pub fn d_name(self) -> &'static str {
        match self {
            Var::X => "Dx",
            Var::Y => "Dy",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An element of Q(i): re + im*i with arbitrary-precision rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

pub type G = GaussianRational;

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussianRational {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate a − b·i.
    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Squared modulus a² + b² (a nonnegative rational).
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    /// Total size of all numerators/denominators in bits; used for
    /// deterministic pivot selection in exact elimination.
    pub fn bit_size(&self) -> u64 {
        self.re.numer().bits()
            + self.re.denom().bits()
            + self.im.numer().bits()
            + self.im.denom().bits()
    }

    /// Deterministic total order (lexicographic on (re, im)); used only for
    /// canonical data-structure ordering, not for analytic comparisons.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero");
        self * &inv
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident, $t:ty) => {
        impl $trait for $t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add, GaussianRational);
forward_owned_binop!(Sub, sub, GaussianRational);
forward_owned_binop!(Mul, mul, GaussianRational);
forward_owned_binop!(Div, div, GaussianRational);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical rendering: `a/b+c/d*i`, omitting zero parts; `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&fmt_rational(&self.re));
        }
        if !self.im.is_zero() {
            let im_part = if self.im.is_one() {
                "i".to_string()
            } else if (-self.im.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rational(&self.im))
            };
            if out.is_empty() {
                out.push_str(&im_part);
            } else if im_part.starts_with('-') {
                out.push('-');
                out.push_str(&im_part[1..]);
            } else {
                out.push('+');
                out.push_str(&im_part);
            }
        }
        f.write_str(&out)
    }
}

/// A dense univariate polynomial over Q(i).
///
/// Invariant: `coeffs` has no trailing zero; the zero polynomial is the
/// empty vector (degree "−∞", reported as `None`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub var: Var,
    coeffs: Vec<G>,
}

impl Poly {
    pub fn new(var: Var, mut coeffs: Vec<G>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        Poly {
            var,
            coeffs: vec![],
        }
    }

    pub fn one(var: Var) -> Self {
        Poly::constant(var, G::one())
    }

    pub fn constant(var: Var, c: G) -> Self {
        Poly::new(var, vec![c])
    }

    /// The monomial c·var^k.
    pub fn monomial(var: Var, c: G, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero(var);
        }
        let mut coeffs = vec![G::zero(); k + 1];
        coeffs[k] = c;
        Poly { var, coeffs }
    }

    /// The identity polynomial `var`.
    pub fn var_poly(var: Var) -> Self {
        Poly::monomial(var, G::one(), 1)
    }

    pub fn from_ints(var: Var, ints: &[i64]) -> Self {
        Poly::new(var, ints.iter().map(|&n| G::from_int(n)).collect())
    }

    pub fn coeffs(&self) -> &[G] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> G {
        self.coeffs.get(k).cloned().unwrap_or_else(G::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> G {
        self.coeffs.last().cloned().unwrap_or_else(G::zero)
    }

    fn check_var(&self, other: &Poly) -> Result<(), NumError> {
        if self.var != other.var {
            return Err(NumError::VariableMismatch {
                expected: self.var,
                found: other.var,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_var(other).expect("variable mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(&self.coeff(k) + &other.coeff(k));
        }
        Poly::new(self.var, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_var(other).expect("variable mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.var);
        }
        let mut coeffs = vec![G::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                coeffs[j + k] = &coeffs[j + k] + &(a * b);
            }
        }
        Poly::new(self.var, coeffs)
    }

    pub fn scale(&self, c: &G) -> Poly {
        Poly::new(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: returns (quotient, remainder) with
    /// deg r < deg g.
    pub fn divrem(&self, g: &Poly) -> Result<(Poly, Poly), NumError> {
        self.check_var(g)?;
        if g.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let mut rem = self.coeffs.clone();
        let dg = g.degree().unwrap();
        if self.coeffs.len() < g.coeffs.len() {
            return Ok((Poly::zero(self.var), self.clone()));
        }
        let lead_inv = g.leading_coeff().inv()?;
        let mut quot = vec![G::zero(); self.coeffs.len() - g.coeffs.len() + 1];
        for k in (dg..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = &rem[k] * &lead_inv;
            for (j, gc) in g.coeffs.iter().enumerate() {
                rem[k - dg + j] = &rem[k - dg + j] - &(&q * gc);
            }
            quot[k - dg] = q;
        }
        Ok((Poly::new(self.var, quot), Poly::new(self.var, rem)))
    }

    /// Scale by the integer lcm of all coefficient denominators so every
    /// coefficient becomes a Gaussian integer.
    fn clear_denoms(&self) -> Poly {
        use num_integer::Integer;
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.re.denom());
            l = l.lcm(c.im.denom());
        }
        if l.is_one() {
            return self.clone();
        }
        self.scale(&G::from_rational(BigRational::from_integer(l)))
    }

    /// Monic greatest common divisor; gcd(0,0) = 0. Computed by the
    /// subresultant pseudo-remainder sequence on denominator-cleared
    /// inputs: every remainder stays Gaussian-integer valued with
    /// resultant-bounded growth, unlike the rational Euclidean sequence
    /// whose coefficients explode at high degree.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.make_monic();
        }
        if other.is_zero() {
            return self.make_monic();
        }
        let mut a = self.clear_denoms();
        let mut b = other.clear_denoms();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        let pow = |c: &G, k: usize| {
            let mut acc = G::one();
            for _ in 0..k {
                acc = &acc * c;
            }
            acc
        };
        let mut g = G::one();
        let mut h = G::one();
        loop {
            let delta = a.degree().unwrap() - b.degree().unwrap();
            if b.degree() == Some(0) {
                return Poly::one(self.var);
            }
            // fraction-free pseudo-remainder lc(b)^(δ+1)·a mod b
            let lb = b.leading_coeff();
            let r = a.scale(&pow(&lb, delta + 1)).divrem(&b).unwrap().1;
            if r.is_zero() {
                return b.make_monic();
            }
            a = b;
            // divide out the known subresultant factor g·h^δ
            b = r.scale(&(&g * &pow(&h, delta)).inv().unwrap());
            g = a.leading_coeff();
            if delta > 0 {
                h = &pow(&g, delta) * &pow(&h, delta - 1).inv().unwrap();
            }
        }
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading_coeff().inv().unwrap();
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.var);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &G::from_int(k as i64))
            .collect();
        Poly::new(self.var, coeffs)
    }

    pub fn eval(&self, x: &G) -> G {
        let mut acc = G::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// f(−x) (or f(−y)).
    pub fn subst_neg(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c })
            .collect();
        Poly::new(self.var, coeffs)
    }

    /// Same coefficients read in the other variable.
    pub fn with_var(&self, var: Var) -> Poly {
        Poly {
            var,
            coeffs: self.coeffs.clone(),
        }
    }

    /// x^k ↦ op^k substitution for any ring with one/mul/add/scale shape,
    /// provided by the caller through fold helpers. Kept here for Poly→Poly.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero(inner.var);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(inner.var, c.clone()));
        }
        acc
    }
}

impl fmt::Display for Poly {
    /// Terms in descending degree, e.g. `x^2 - 1`, `(1+i)*x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let term = scalar_monomial_string(c, self.var.name(), k);
            if first {
                f.write_str(&term)?;
                first = false;
            } else if let Some(stripped) = term.strip_prefix('-') {
                write!(f, " - {}", stripped)?;
            } else {
                write!(f, " + {}", term)?;
            }
        }
        Ok(())
    }
}

/// Renders c·v^k so that the result reparses exactly: mixed complex scalars
/// are parenthesized when they multiply a power of the variable.
pub fn scalar_monomial_string(c: &G, var_name: &str, k: usize) -> String {
    let var_pow = match k {
        0 => String::new(),
        1 => var_name.to_string(),
        _ => format!("{}^{}", var_name, k),
    };
    if k == 0 {
        return format!("{}", c);
    }
    if c.is_one() {
        return var_pow;
    }
    if (-c).is_one() {
        return format!("-{}", var_pow);
    }
    let needs_parens = !c.re.is_zero() && !c.im.is_zero();
    if needs_parens {
        format!("({})*{}", c, var_pow)
    } else {
        format!("{}*{}", c, var_pow)
    }
}

/// A rational function num/den over Q(i), canonical form:
/// den monic, gcd(num, den) = 1, zero is 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "denominator cannot be zero");
        num.check_var(&den).expect("variable mismatch");
        let mut rf = RatFunc { num, den };
        rf.normalize();
        rf
    }

    pub fn from_poly(p: Poly) -> Self {
        let var = p.var;
        RatFunc {
            num: p,
            den: Poly::one(var),
        }
    }

    pub fn zero(var: Var) -> Self {
        RatFunc::from_poly(Poly::zero(var))
    }

    pub fn one(var: Var) -> Self {
        RatFunc::from_poly(Poly::one(var))
    }

    pub fn constant(var: Var, c: G) -> Self {
        RatFunc::from_poly(Poly::constant(var, c))
    }

    pub fn var(&self) -> Var {
        self.num.var
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&Poly> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<G> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one(self.den.var);
            return;
        }
        if self.den.is_constant() {
            let inv = self.den.coeff(0).inv().unwrap();
            self.num = self.num.scale(&inv);
            self.den = Poly::one(self.den.var);
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree().map_or(false, |d| d > 0) {
            self.num = self.num.divrem(&g).unwrap().0;
            self.den = self.den.divrem(&g).unwrap().0;
        }
        let lead = self.den.leading_coeff();
        if !lead.is_one() {
            let inv = lead.inv().unwrap();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    /// num/den with den monic, where any common factor already divides
    /// `bound`; reduces against `bound` only and restores canonical form.
    fn reduced_against(num: Poly, den: Poly, bound: &Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero(den.var);
        }
        if den.is_one() {
            return RatFunc { num, den };
        }
        let h = num.gcd(bound);
        if h.is_one() {
            return RatFunc { num, den };
        }
        RatFunc {
            num: num.divrem(&h).unwrap().0,
            den: den.divrem(&h).unwrap().0,
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            let den = self.den.clone();
            return RatFunc::reduced_against(self.num.add(&other.num), den, &self.den);
        }
        let g0 = self.den.gcd(&other.den);
        if g0.is_one() {
            // coprime denominators: the sum is already in lowest terms
            return RatFunc {
                num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                den: self.den.mul(&other.den),
            };
        }
        let d1r = self.den.divrem(&g0).unwrap().0;
        let d2r = other.den.divrem(&g0).unwrap().0;
        let num = self.num.mul(&d2r).add(&other.num.mul(&d1r));
        // any common factor of num and d1r·other.den divides g0
        RatFunc::reduced_against(num, d1r.mul(&other.den), &g0)
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(self.var());
        }
        // cross-cancel num/den pairs so the product needs no further gcd
        let (n1, d2) = Self::cross_cancel(&self.num, &other.den);
        let (n2, d1) = Self::cross_cancel(&other.num, &self.den);
        RatFunc {
            num: n1.mul(&n2),
            den: d1.mul(&d2),
        }
    }

    fn cross_cancel(num: &Poly, den: &Poly) -> (Poly, Poly) {
        if den.is_one() || num.is_constant() {
            return (num.clone(), den.clone());
        }
        let g = num.gcd(den);
        if g.is_one() {
            return (num.clone(), den.clone());
        }
        (num.divrem(&g).unwrap().0, den.divrem(&g).unwrap().0)
    }

    pub fn scale(&self, c: &G) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.var());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, NumError> {
        if other.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(RatFunc::new(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    /// Reduced quotient-rule derivative: with g = gcd(Q, Q′), c = Q/g,
    /// d = Q′/g, (P/Q)' = (P′c − Pd)/(Qc). In characteristic 0 every
    /// repeated factor π^a of Q appears in Q′ with multiplicity exactly
    /// a−1, so π ∤ d and the displayed fraction is already in lowest
    /// terms — no gcd against the (large) numerator is needed.
    pub fn derivative(&self) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative());
        }
        let dq = self.den.derivative();
        let g = self.den.gcd(&dq);
        let c = self.den.divrem(&g).unwrap().0;
        let d = dq.divrem(&g).unwrap().0;
        let num = self.num.derivative().mul(&c).sub(&self.num.mul(&d));
        if num.is_zero() {
            return RatFunc::zero(self.var());
        }
        RatFunc {
            num,
            den: self.den.mul(&c),
        }
    }

    pub fn eval(&self, x: &G) -> Result<G, NumError> {
        let dv = self.den.eval(x);
        if dv.is_zero() {
            return Err(NumError::PoleAtPoint);
        }
        Ok(&self.num.eval(x) / &dv)
    }

    pub fn subst_neg(&self) -> RatFunc {
        RatFunc::new(self.num.subst_neg(), self.den.subst_neg())
    }

    pub fn with_var(&self, var: Var) -> RatFunc {
        RatFunc {
            num: self.num.with_var(var),
            den: self.den.with_var(var),
        }
    }
}

/// Unreduced rational accumulator for summing many terms whose
/// denominators mostly form a divisibility chain (e.g. powers of one
/// normalization polynomial). Terms are merged with cheap exact-division
/// checks and the single reducing gcd is paid once at the end.
#[derive(Debug, Clone)]
pub struct RatAccum {
    num: Poly,
    den: Poly,
}

impl RatAccum {
    pub fn zero(var: Var) -> Self {
        RatAccum {
            num: Poly::zero(var),
            den: Poly::one(var),
        }
    }

    /// Add n/d (need not be reduced; d must be nonzero).
    pub fn add_term(&mut self, n: &Poly, d: &Poly) {
        assert!(!d.is_zero(), "denominator cannot be zero");
        if n.is_zero() {
            return;
        }
        if self.num.is_zero() {
            self.num = n.clone();
            self.den = d.clone();
            return;
        }
        if self.den == *d {
            self.num = self.num.add(n);
            return;
        }
        let (t, r) = self.den.divrem(d).unwrap();
        if r.is_zero() {
            self.num = self.num.add(&n.mul(&t));
            return;
        }
        let (t, r) = d.divrem(&self.den).unwrap();
        if r.is_zero() {
            self.num = self.num.mul(&t).add(n);
            self.den = d.clone();
            return;
        }
        self.num = self.num.mul(d).add(&n.mul(&self.den));
        self.den = self.den.mul(d);
    }

    pub fn into_ratfunc(self) -> RatFunc {
        RatFunc::new(self.num, self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

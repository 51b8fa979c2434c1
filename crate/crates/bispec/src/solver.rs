//! Bilinear-concomitant evaluation and the endpoint linear system whose
//! kernel is the space of bisymmetric operator pairs.
//!
//! For 𝔡 = Σⱼ dⱼ∂ʲ of order m the bilinear concomitant is the boundary form
//!
//!   C_𝔡(f, g; p) = Σ_{j=1}^{m} Σ_{k=0}^{j−1} (−1)ᵏ f^{(j−1−k)}(p) (dⱼg)^{(k)}(p),
//!
//! the exact quantity produced by integrating (𝔡f)g − f(𝔡*g) by parts. An
//! operator pair commutes with the associated integral kernel whenever both
//! sides are formally symmetric and all concomitant values vanish at the
//! contour endpoints; imposing that vanishing on every jet pair gives a
//! linear system over ℚ(i) whose kernel the solver extracts exactly.

use thiserror::Error;

use crate::darboux::{BoundsOverride, CandidatePair, DarbouxError, DarbouxTransform, Provenance};
use crate::exactnum::{G, NumError, Poly, RatFunc, Var};
use crate::linalg::Echelon;
use crate::orealg::OreOp;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("a coefficient of candidate {candidate} has a pole at the {side} endpoint")]
    EndpointAtPole { side: Var, candidate: usize },
    #[error("candidate {candidate} is not σ-invariant on the {side} side, but the {side} endpoint mode is a symmetric pair")]
    NotSigmaInvariant { side: Var, candidate: usize },
    #[error(transparent)]
    Darboux(#[from] DarbouxError),
}

/// Endpoint placement mode for one side of the contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointMode {
    /// Endpoints ±p; conditions are imposed at p and the mirror endpoint is
    /// covered by σ-invariance of the candidates (which is asserted).
    SymmetricPair,
    /// Endpoints p and ∞; only the finite endpoint carries conditions.
    FinitePlusInfinity,
}

/// Contour endpoints for the two sides of the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointSpec {
    pub x_point: G,
    pub y_point: G,
    pub x_mode: EndpointMode,
    pub y_mode: EndpointMode,
}

impl EndpointSpec {
    pub fn point(&self, side: Var) -> &G {
        match side {
            Var::X => &self.x_point,
            Var::Y => &self.y_point,
        }
    }

    pub fn mode(&self, side: Var) -> EndpointMode {
        match side {
            Var::X => self.x_mode,
            Var::Y => self.y_mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemStats {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

/// Basis of the bisymmetric solution space found by `solve`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub solution_basis: Vec<CandidatePair>,
    pub dimension: usize,
    pub nonconstant_witness: Option<CandidatePair>,
    pub system_stats: SystemStats,
    /// Whether the candidate count (after de-duplication) exceeds
    /// L(L+1)/2 + M(M+1)/2 + 1, which guarantees a positive-order solution
    /// a priori. `None` when explicit family bounds decouple the candidate
    /// space from (L, M).
    pub positive_order_guaranteed: Option<bool>,
}

/// Pascal's-triangle row of binomial coefficients C(n, 0..=n).
fn binomial_row(n: usize) -> Vec<G> {
    let mut row = vec![G::one()];
    for k in 1..=n {
        let mut next = vec![G::one()];
        for i in 1..k {
            next.push(&row[i - 1] + &row[i]);
        }
        next.push(G::one());
        row = next;
    }
    row
}

/// Jets dⱼ^{(i)}(p) of the coefficients of `d`, for j ≤ m and i < m,
/// where m = ord d. Returns `Err` if any coefficient has a pole at p.
fn coefficient_jets(d: &OreOp, p: &G) -> Result<Vec<Vec<G>>, NumError> {
    let m = d.order().unwrap_or(0);
    let mut jets = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut c = d.coeff(j);
        let mut row = Vec::with_capacity(m.max(1));
        for _ in 0..m.max(1) {
            row.push(c.eval(p)?);
            c = c.derivative();
        }
        jets.push(row);
    }
    Ok(jets)
}

/// The concomitant double sum from precomputed data: `coef_jets[j][i]` is
/// dⱼ^{(i)}(p) and `f_jet`/`g_jet` hold f^{(a)}(p), g^{(a)}(p) for a < m.
/// The value depends on f and g only through those jets, so callers may
/// substitute formal jets (e.g. of quasi-exponentials) for actual
/// derivatives.
pub fn concomitant_from_jets(coef_jets: &[Vec<G>], f_jet: &[G], g_jet: &[G]) -> G {
    let m = coef_jets.len().saturating_sub(1);
    let mut total = G::zero();
    for j in 1..=m {
        let mut sign = G::one();
        for k in 0..j {
            let fv = &f_jet[j - 1 - k];
            if !fv.is_zero() {
                // (dⱼg)^{(k)}(p) by the Leibniz rule
                let binom = binomial_row(k);
                let mut dg = G::zero();
                for i in 0..=k {
                    let cj = &coef_jets[j][i];
                    let gv = &g_jet[k - i];
                    if !cj.is_zero() && !gv.is_zero() {
                        dg = &dg + &(&binom[i] * &(cj * gv));
                    }
                }
                total = &total + &(&sign * &(fv * &dg));
            }
            sign = -&sign;
        }
    }
    total
}

fn ratfunc_jet(f: &RatFunc, p: &G, len: usize) -> Result<Vec<G>, NumError> {
    let mut jet = Vec::with_capacity(len);
    let mut cur = f.clone();
    for _ in 0..len {
        jet.push(cur.eval(p)?);
        cur = cur.derivative();
    }
    Ok(jet)
}

/// C_𝔡(f, g; p) for rational-function arguments.
pub fn concomitant_rf(d: &OreOp, f: &RatFunc, g: &RatFunc, p: &G) -> Result<G, NumError> {
    let m = d.order().unwrap_or(0);
    if m == 0 {
        // the double sum is empty; still surface poles of f, g at p
        f.eval(p)?;
        g.eval(p)?;
        return Ok(G::zero());
    }
    let jets = coefficient_jets(d, p)?;
    let f_jet = ratfunc_jet(f, p, m)?;
    let g_jet = ratfunc_jet(g, p, m)?;
    Ok(concomitant_from_jets(&jets, &f_jet, &g_jet))
}

/// C_𝔡(f, g; p) for polynomial arguments.
pub fn concomitant(d: &OreOp, f: &Poly, g: &Poly, p: &G) -> Result<G, NumError> {
    concomitant_rf(d, &RatFunc::from_poly(f.clone()), &RatFunc::from_poly(g.clone()), p)
}

/// C_𝔡(f, g; x) left symbolic in the base point.
fn concomitant_symbolic(d: &OreOp, f: &RatFunc, g: &RatFunc) -> RatFunc {
    let var = d.var;
    let m = d.order().unwrap_or(0);
    let mut total = RatFunc::zero(var);
    // f-jets and coefficient derivatives, reused across the double sum
    let mut f_jets = vec![f.clone()];
    for _ in 1..m {
        f_jets.push(f_jets.last().unwrap().derivative());
    }
    for j in 1..=m {
        let mut dg = d.coeff(j).mul(g);
        let mut sign = G::one();
        for k in 0..j {
            total = total.add(&f_jets[j - 1 - k].mul(&dg).scale(&sign));
            sign = -&sign;
            dg = dg.derivative();
        }
    }
    total
}

/// Checks d/dx[C_𝔡(f, g; x)] = (𝔡f)g − f(𝔡*g) as rational functions.
pub fn concomitant_derivative_identity_check(d: &OreOp, f: &Poly, g: &Poly) -> bool {
    let frf = RatFunc::from_poly(f.clone());
    let grf = RatFunc::from_poly(g.clone());
    let lhs = concomitant_symbolic(d, &frf, &grf).derivative();
    let rhs = d.apply(&frf).mul(&grf).sub(&frf.mul(&d.adjoint().apply(&grf)));
    lhs == rhs
}

/// Checks C_{𝔞𝔟}(f, g; p) = C_𝔞(𝔟f, g; p) + C_𝔟(f, 𝔞*g; p).
pub fn concomitant_decomposition_check(
    a: &OreOp,
    b: &OreOp,
    f: &Poly,
    g: &Poly,
    p: &G,
) -> Result<bool, NumError> {
    let frf = RatFunc::from_poly(f.clone());
    let grf = RatFunc::from_poly(g.clone());
    let lhs = concomitant_rf(&a.mul(b), &frf, &grf, p)?;
    let rhs = &concomitant_rf(a, &b.apply(&frf), &grf, p)?
        + &concomitant_rf(b, &frf, &a.adjoint().apply(&grf), p)?;
    Ok(lhs == rhs)
}

/// Rows of the endpoint system for one side. Row (jf, jg) imposes the
/// vanishing of the concomitant on the jet-basis pair with f^{(a)}(p) =
/// δ_{a,jf}·a! (and likewise for g); these span the same conditions as
/// monomial arguments of the same degree. For formally symmetric
/// operators of order 2ℓ the symmetry conditions are exactly captured by
/// jet pairs up to ℓ (the filtration index), not up to the operator
/// order: the conditions factor through the ℓ(ℓ+1)/2 endpoint jets of the
/// symmetric-decomposition coefficients. Jets therefore run through 0..=N
/// with N = ⌈max order/2⌉ + 1, one beyond strict sufficiency.
fn side_rows(
    ops: &[&OreOp],
    side: Var,
    p: &G,
) -> Result<Vec<Vec<G>>, SolveError> {
    let max_ord = ops.iter().filter_map(|o| o.order()).max().unwrap_or(0);
    let n = max_ord.div_ceil(2) + 1;
    let jets: Vec<Vec<Vec<G>>> = ops
        .iter()
        .enumerate()
        .map(|(idx, o)| {
            coefficient_jets(o, p).map_err(|_| SolveError::EndpointAtPole {
                side,
                candidate: idx,
            })
        })
        .collect::<Result<_, _>>()?;
    // factorial-scaled delta jets
    let mut fact = vec![G::one(); n + 1];
    for a in 1..=n {
        fact[a] = &fact[a - 1] * &G::from_int(a as i64);
    }
    let mut rows = Vec::with_capacity((n + 1) * (n + 1));
    for jf in 0..=n {
        for jg in 0..=n {
            let mut row = Vec::with_capacity(ops.len());
            for (op, jet) in ops.iter().zip(&jets) {
                let m = op.order().unwrap_or(0);
                if jf >= m || jg >= m {
                    row.push(G::zero());
                    continue;
                }
                let mut f_jet = vec![G::zero(); m];
                f_jet[jf] = fact[jf].clone();
                let mut g_jet = vec![G::zero(); m];
                g_jet[jg] = fact[jg].clone();
                row.push(concomitant_from_jets(jet, &f_jet, &g_jet));
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Full endpoint system: x-side rows at the x endpoint followed by y-side
/// rows at the y endpoint, one column per candidate.
pub fn assemble_system(
    cands: &[CandidatePair],
    ep: &EndpointSpec,
) -> Result<Vec<Vec<G>>, SolveError> {
    let x_ops: Vec<&OreOp> = cands.iter().map(|c| &c.x_op).collect();
    let y_ops: Vec<&OreOp> = cands.iter().map(|c| &c.y_op).collect();
    let mut rows = side_rows(&x_ops, Var::X, &ep.x_point)?;
    rows.extend(side_rows(&y_ops, Var::Y, &ep.y_point)?);
    Ok(rows)
}

/// Coordinate vectors of operators over a shared polynomial basis: every
/// coefficient is brought over the common denominator of all the given
/// operators, and the resulting numerator coefficients are flattened by
/// (∂-power, monomial degree). Linear relations between the vectors are
/// exactly linear relations between the operators.
pub fn coordinatize_ops(ops: &[&OreOp]) -> Vec<Vec<G>> {
    let var = ops.first().map_or(Var::X, |o| o.var);
    let mut common = Poly::one(var);
    for op in ops {
        for c in op.coeffs() {
            let g = common.gcd(c.den());
            common = common.mul(&c.den().divrem(&g).unwrap().0);
        }
    }
    let cleared: Vec<Vec<Poly>> = ops
        .iter()
        .map(|op| {
            op.coeffs()
                .iter()
                .map(|c| {
                    let extra = common.divrem(c.den()).unwrap().0;
                    c.num().mul(&extra)
                })
                .collect()
        })
        .collect();
    let max_ord = cleared.iter().map(|c| c.len()).max().unwrap_or(1);
    let max_deg = cleared
        .iter()
        .flatten()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    cleared
        .iter()
        .map(|coeffs| {
            let mut v = vec![G::zero(); max_ord * (max_deg + 1)];
            for (j, p) in coeffs.iter().enumerate() {
                for (k, c) in p.coeffs().iter().enumerate() {
                    v[j * (max_deg + 1) + k] = c.clone();
                }
            }
            v
        })
        .collect()
}

fn check_sigma_invariance(cands: &[CandidatePair], ep: &EndpointSpec) -> Result<(), SolveError> {
    for side in [Var::X, Var::Y] {
        if ep.mode(side) != EndpointMode::SymmetricPair {
            continue;
        }
        for (idx, c) in cands.iter().enumerate() {
            let op = match side {
                Var::X => &c.x_op,
                Var::Y => &c.y_op,
            };
            if op.sigma() != *op {
                return Err(SolveError::NotSigmaInvariant {
                    side,
                    candidate: idx,
                });
            }
        }
    }
    Ok(())
}

fn combine(cands: &[CandidatePair], coeffs: &[G]) -> CandidatePair {
    let var_x = cands[0].x_op.var;
    let var_y = cands[0].y_op.var;
    let mut x_op = OreOp::zero(var_x);
    let mut y_op = OreOp::zero(var_y);
    for (c, cand) in coeffs.iter().zip(cands) {
        if !c.is_zero() {
            x_op = x_op.add(&cand.x_op.scale(c));
            y_op = y_op.add(&cand.y_op.scale(c));
        }
    }
    CandidatePair {
        x_op,
        y_op,
        provenance: Provenance::Combination,
    }
}

/// Solves the endpoint system over the candidate space of `t` with target
/// filtration (L, M): de-duplicates the generators by exact rank reduction,
/// imposes the concomitant conditions at the endpoints, and reconstructs
/// the kernel as operator pairs.
pub fn solve(
    t: &DarbouxTransform,
    l_target: usize,
    m_target: usize,
    ep: &EndpointSpec,
    bounds: Option<&BoundsOverride>,
) -> Result<SolveResult, SolveError> {
    let raw = t.candidate_space(l_target, m_target, bounds)?;
    check_sigma_invariance(&raw, ep)?;

    // de-duplicate: keep only candidates whose x-side operators are
    // linearly independent, so the reported dimension counts operators
    let coords = coordinatize_ops(&raw.iter().map(|c| &c.x_op).collect::<Vec<_>>());
    let mut dedup = Echelon::new(coords.first().map_or(0, |v| v.len()));
    let cands: Vec<CandidatePair> = raw
        .into_iter()
        .zip(coords)
        .filter(|(_, v)| dedup.insert(v.clone()))
        .map(|(c, _)| c)
        .collect();

    let rows = assemble_system(&cands, ep)?;
    let mut ech = Echelon::new(cands.len());
    let n_rows = rows.len();
    for r in rows {
        ech.insert(r);
    }
    let kernel = ech.kernel_basis();
    let solution_basis: Vec<CandidatePair> =
        kernel.iter().map(|v| combine(&cands, v)).collect();
    let nonconstant_witness = solution_basis
        .iter()
        .find(|p| p.x_op.order().map_or(false, |o| o > 0))
        .cloned();
    let stats = SystemStats {
        rows: n_rows,
        cols: cands.len(),
        rank: ech.rank(),
    };
    let positive_order_guaranteed = if bounds.is_none() {
        let bound = l_target * (l_target + 1) / 2 + m_target * (m_target + 1) / 2 + 1;
        Some(cands.len() > bound)
    } else {
        None
    };
    Ok(SolveResult {
        dimension: solution_basis.len(),
        solution_basis,
        nonconstant_witness,
        system_stats: stats,
        positive_order_guaranteed,
    })
}

/// The algebraic commutation certificate for a single operator pair: both
/// sides formally symmetric, and every jet-pair concomitant value vanishes
/// at the finite endpoints (both mirror endpoints are checked directly in
/// symmetric-pair mode).
pub fn verify_bisymmetric(pair: &CandidatePair, ep: &EndpointSpec) -> Result<bool, SolveError> {
    for side in [Var::X, Var::Y] {
        let op = match side {
            Var::X => &pair.x_op,
            Var::Y => &pair.y_op,
        };
        if !op.is_formally_symmetric() {
            return Ok(false);
        }
        let mut points = vec![ep.point(side).clone()];
        if ep.mode(side) == EndpointMode::SymmetricPair {
            points.push(-ep.point(side));
        }
        for p in points {
            let single = std::slice::from_ref(op);
            let rows = side_rows(
                &single.iter().collect::<Vec<_>>(),
                side,
                &p,
            )?;
            if rows.iter().any(|r| !r[0].is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

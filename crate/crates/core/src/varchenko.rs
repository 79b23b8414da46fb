//! The Aguiar-Mahajan distance on the topes of a fiber, the Varchenko matrix,
//! its exact determinant, and the product formula over non-tope covectors.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modp;
use crate::packed;
use crate::poly::{FactoredPoly, IntPolynomial, Monomial, Specialization, VarId, VarSpace};
use crate::signvec::{mask_to_indices, CovectorSet, FiberView, Sign, SignVector};

pub const DEFAULT_SYMBOLIC_LIMIT: usize = 16;
/// Largest matrix handled by cofactor expansion in [`VarchenkoMatrix::determinant`].
pub const MINOR_EXPANSION_LIMIT: usize = 16;

pub const DEFAULT_EVALS: usize = 5;

/// `∏_{i ∈ S(v,w) ∩ I} a_i^{v_i}`, or 1 when `v = w`. `free` is the mask of `I`.
pub fn distance(v: &SignVector, w: &SignVector, free: u64) -> Result<Monomial> {
    for t in [v, w] {
        if !t.is_tope() {
            return Err(Error::NotATope(t.to_string()));
        }
    }
    let sep = v.separation(w)? & free;
    Monomial::from_pairs(mask_to_indices(sep).into_iter().map(|i| {
        let var = match v.get(i) {
            Sign::Plus => VarId::plus(i),
            _ => VarId::minus(i),
        };
        (var.index(), 1)
    }))
}

/// `b_u = ∏ a_i^+ a_i^-` over the zero coordinates of `u` inside `free`.
pub fn weight(u: &SignVector, free: u64) -> Result<Monomial> {
    let vars = u.weight_exponents()?;
    Monomial::from_pairs(
        vars.into_iter()
            .filter(|v| free >> v.hyperplane & 1 == 1)
            .map(|v| (v.index(), 1)),
    )
}

/// Tope-indexed matrix of distances; entry `(r, c)` is `v(t_r, t_c)`.
#[derive(Debug, Clone)]
pub struct VarchenkoMatrix {
    topes: Vec<SignVector>,
    entries: Vec<Vec<IntPolynomial>>,
    space: VarSpace,
}

impl VarchenkoMatrix {
    pub fn build(fiber: &FiberView) -> Result<Self> {
        fiber.require_loop_free()?;
        let topes = fiber.topes();
        if topes.is_empty() {
            return Err(Error::EmptyFiber);
        }
        let space = VarSpace::Hyperplanes(fiber.n());
        let free = fiber.free_mask();
        let entries = topes
            .iter()
            .map(|r| {
                topes
                    .iter()
                    .map(|c| Ok(IntPolynomial::from_term(space, distance(r, c, free)?, BigInt::one())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VarchenkoMatrix {
            topes,
            entries,
            space,
        })
    }

    /// A matrix given directly by its entries; used for permuted or
    /// hand-built inputs.
    pub fn from_entries(topes: Vec<SignVector>, entries: Vec<Vec<IntPolynomial>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || topes.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("matrix must be square and tope-indexed".into()));
        }
        let space = entries[0][0].space();
        if entries.iter().flatten().any(|e| e.space() != space) {
            return Err(Error::VarSpaceMismatch);
        }
        Ok(VarchenkoMatrix {
            topes,
            entries,
            space,
        })
    }

    pub fn size(&self) -> usize {
        self.topes.len()
    }

    pub fn topes(&self) -> &[SignVector] {
        &self.topes
    }

    pub fn entries(&self) -> &[Vec<IntPolynomial>] {
        &self.entries
    }

    pub fn entry(&self, r: usize, c: usize) -> &IntPolynomial {
        &self.entries[r][c]
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    /// Reindexes rows and columns simultaneously: new index `k` is old `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> VarchenkoMatrix {
        VarchenkoMatrix {
            topes: perm.iter().map(|&k| self.topes[k]).collect(),
            entries: perm
                .iter()
                .map(|&r| perm.iter().map(|&c| self.entries[r][c].clone()).collect())
                .collect(),
            space: self.space,
        }
    }

    pub fn specialize(&self, spec: &Specialization) -> Result<VarchenkoMatrix> {
        let VarSpace::Hyperplanes(n) = self.space else {
            return Err(Error::Precondition("matrix is already specialized".into()));
        };
        let (target, images) = spec.images(n)?;
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.substitute(target, &images)).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(VarchenkoMatrix {
            topes: self.topes.clone(),
            entries,
            space: target,
        })
    }

    /// Upper bound on the total degree of the determinant: the sum over rows of
    /// the largest entry degree.
    pub fn degree_bound(&self) -> u64 {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.total_degree()).max().unwrap_or(0))
            .sum()
    }

    /// Exact determinant. Univariate matrices go through multi-modular
    /// interpolation. Multivariate ones up to [`MINOR_EXPANSION_LIMIT`] rows use
    /// memoized cofactor expansion, larger ones fraction-free elimination.
    pub fn determinant(&self) -> Result<IntPolynomial> {
        if self.space.nvars() == 1 {
            return self.determinant_by_interpolation();
        }
        if self.size() <= MINOR_EXPANSION_LIMIT {
            if let Some(det) = self.minor_expansion_determinant() {
                return Ok(det);
            }
        }
        self.bareiss_determinant()
    }

    fn max_entry_exponent(&self) -> u64 {
        self.entries
            .iter()
            .flatten()
            .flat_map(|e| e.terms().iter().flat_map(|(m, _)| m.pairs().map(|(_, x)| x as u64)))
            .max()
            .unwrap_or(0)
    }

    /// Cofactor expansion over column subsets, `O(n 2^n)` minor updates. With
    /// monomial entries each update is a shift and a merge. `None` when the
    /// matrix is too large or the packed representation overflows.
    pub fn minor_expansion_determinant(&self) -> Option<IntPolynomial> {
        let n = self.size();
        if n > 20 {
            return None;
        }
        let layout = packed::Layout::new(self.space.nvars(), n as u64 * self.max_entry_exponent().max(1) + 1)?;
        let m: Vec<Vec<packed::Poly>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| packed::from_poly(&layout, e)).collect())
            .collect::<Option<_>>()?;
        let det = packed::minor_expansion(&layout, &m)?;
        Some(packed::to_poly(&layout, self.space, &det))
    }

    /// Applies the symbolic size guard before [`Self::determinant`]. The guard
    /// only restricts multivariate matrices.
    pub fn guarded_determinant(&self, limit: usize, force: bool) -> Result<IntPolynomial> {
        if !force && self.space.nvars() > 1 && self.size() > limit {
            return Err(Error::SizeGuard {
                topes: self.size(),
                limit,
            });
        }
        self.determinant()
    }

    /// Bareiss elimination over the integer polynomial ring. Every division is
    /// exact; a remainder aborts with [`Error::InexactDivision`].
    ///
    /// Runs on packed exponents with machine-word coefficients when they fit,
    /// and on arbitrary-precision polynomials otherwise.
    pub fn bareiss_determinant(&self) -> Result<IntPolynomial> {
        match self.packed_bareiss() {
            Some(r) => r,
            None => self.generic_bareiss(),
        }
    }

    fn packed_bareiss(&self) -> Option<Result<IntPolynomial>> {
        let n = self.size();
        let layout = packed::Layout::new(self.space.nvars(), 2 * n as u64 * self.max_entry_exponent().max(1) + 1)?;
        let mut m: Vec<Vec<packed::Poly>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| packed::from_poly(&layout, e)).collect())
            .collect::<Option<_>>()?;
        let mut negate = false;
        let mut prev: packed::Poly = vec![(0, 1)];
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_empty() {
                let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_empty()) else {
                    return Some(Ok(IntPolynomial::zero(self.space)));
                };
                m.swap(k, r);
                negate = !negate;
            }
            let (upper, lower) = m.split_at_mut(k + 1);
            let pivot_row = &upper[k];
            let step = lower.par_iter_mut().try_for_each(|row| -> std::result::Result<(), packed::DivError> {
                for j in k + 1..n {
                    let num = packed::mul_sub(&layout, &pivot_row[k], &row[j], &row[k], &pivot_row[j])
                        .ok_or(packed::DivError::Overflow)?;
                    row[j] = packed::exact_div(&layout, &num, &prev)?;
                }
                Ok(())
            });
            match step {
                Ok(()) => {}
                Err(packed::DivError::Overflow) => return None,
                Err(packed::DivError::Inexact) => return Some(Err(Error::InexactDivision)),
            }
            prev = m[k][k].clone();
        }
        let det = packed::to_poly(&layout, self.space, &m[n - 1][n - 1]);
        Some(Ok(if negate { -&det } else { det }))
    }

    /// Bareiss on arbitrary-precision polynomials.
    pub fn generic_bareiss(&self) -> Result<IntPolynomial> {
        let n = self.size();
        let mut m = self.entries.clone();
        let mut negate = false;
        let mut prev = IntPolynomial::one(self.space);
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return Ok(IntPolynomial::zero(self.space));
                };
                m.swap(k, r);
                negate = !negate;
            }
            let (upper, lower) = m.split_at_mut(k + 1);
            let pivot_row = &upper[k];
            lower.par_iter_mut().try_for_each(|row| -> Result<()> {
                for j in k + 1..n {
                    let num = pivot_row[k].try_mul(&row[j])?.try_sub(&row[k].try_mul(&pivot_row[j])?)?;
                    row[j] = num.exact_div(&prev)?;
                }
                Ok(())
            })?;
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if negate { -&det } else { det })
    }

    /// Exact univariate determinant from its values modulo several 61-bit
    /// primes. The degree bound fixes the number of sample points; the
    /// coefficient bound `∏_rows Σ_cols ||entry||_1` fixes the number of primes.
    pub fn determinant_by_interpolation(&self) -> Result<IntPolynomial> {
        if self.space.nvars() != 1 {
            return Err(Error::Precondition("interpolation needs a univariate matrix".into()));
        }
        let degree = self.degree_bound() as usize;
        let bound: BigInt = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.l1_norm()).sum::<BigInt>())
            .product();
        let needed = bound * 2 + 1;
        let mut primes = Vec::new();
        let mut modulus = BigInt::one();
        let mut k = 1;
        while modulus <= needed {
            primes = modp::primes_below_2_61(k);
            modulus = primes.iter().map(|&p| BigInt::from(p)).product();
            k += 1;
        }
        let residues: Vec<Vec<u64>> = primes
            .par_iter()
            .map(|&p| {
                let values: Vec<u64> = (0..=degree as u64)
                    .map(|x| {
                        let m = self
                            .entries
                            .iter()
                            .map(|row| row.iter().map(|e| e.eval_mod(&[x], p)).collect())
                            .collect();
                        modp::det_mod(m, p)
                    })
                    .collect();
                interpolate_mod(&values, p)
            })
            .collect();
        let coeffs: Vec<BigInt> = (0..=degree)
            .map(|i| {
                let r: Vec<u64> = residues.iter().map(|c| c[i]).collect();
                crt_symmetric(&r, &primes)
            })
            .collect();
        Ok(IntPolynomial::from_univariate(self.space, &coeffs))
    }

    /// Determinant at one point of GF(p).
    pub fn det_mod(&self, assignment: &[u64], p: u64) -> u64 {
        let m = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval_mod(assignment, p)).collect())
            .collect();
        modp::det_mod(m, p)
    }
}

/// Coefficients of the polynomial of degree `< values.len()` taking
/// `values[x]` at `x = 0, 1, ...`, over GF(p), via Newton divided differences.
fn interpolate_mod(values: &[u64], p: u64) -> Vec<u64> {
    let n = values.len();
    let mut dd = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = modp::sub_mod(dd[i], dd[i - 1], p);
            dd[i] = modp::mul_mod(num, modp::inv_mod(j as u64 % p, p), p);
        }
    }
    let mut coeffs = vec![0u64; n];
    for k in (0..n).rev() {
        // coeffs <- coeffs * (x - k) + dd[k]
        let xk = k as u64 % p;
        let mut next = vec![0u64; n];
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            if i + 1 < n {
                next[i + 1] = modp::add_mod(next[i + 1], coeffs[i], p);
            }
            next[i] = modp::sub_mod(next[i], modp::mul_mod(coeffs[i], xk, p), p);
        }
        next[0] = modp::add_mod(next[0], dd[k], p);
        coeffs = next;
    }
    coeffs
}

/// The integer in `(-M/2, M/2]` with the given residues, `M = ∏ primes`.
fn crt_symmetric(residues: &[u64], primes: &[u64]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, &p) in residues.iter().zip(primes) {
        let pb = BigInt::from(p);
        let xm = (&x % &pb + &pb) % &pb;
        let diff = modp::sub_mod(r, xm.to_u64().expect("residue"), p);
        let minv = modp::inv_mod(((&m % &pb).to_u64().expect("residue")) % p, p);
        let t = modp::mul_mod(diff, minv, p);
        x += &m * BigInt::from(t);
        m *= pb;
    }
    if &x * 2 > m {
        x -= m;
    }
    x
}

/// A non-tope covector of a fiber with its weight and multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub covector: SignVector,
    pub weight: Monomial,
    pub beta: usize,
}

/// Weights and multiplicities of every non-tope fiber member, canonical order.
pub fn faces(fiber: &FiberView) -> Result<Vec<Face>> {
    fiber.require_loop_free()?;
    let free = fiber.free_mask();
    fiber
        .multiplicities()?
        .into_iter()
        .map(|(covector, beta)| {
            Ok(Face {
                covector,
                weight: weight(&covector, free)?,
                beta,
            })
        })
        .collect()
}

/// `∏ (1 - b_v)^{β_v}` over non-tope fiber members with `β_v > 0`.
pub fn product_formula(fiber: &FiberView) -> Result<FactoredPoly> {
    formula_from_faces(fiber.n(), &faces(fiber)?)
}

fn formula_from_faces(n: usize, faces: &[Face]) -> Result<FactoredPoly> {
    let space = VarSpace::Hyperplanes(n);
    let one = IntPolynomial::one(space);
    let mut f = FactoredPoly::new(space);
    for face in faces.iter().filter(|f| f.beta > 0) {
        let b = IntPolynomial::from_term(space, face.weight.clone(), BigInt::one());
        let exp = u32::try_from(face.beta).map_err(|_| Error::ExponentOverflow)?;
        f.push(one.try_sub(&b)?, exp)?;
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Randomized,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// `None` picks symbolic up to the size limit and randomized beyond it.
    pub mode: Option<Mode>,
    pub seed: u64,
    pub evals: usize,
    pub specialization: Specialization,
    pub symbolic_limit: usize,
    pub force_symbolic: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: None,
            seed: 0,
            evals: DEFAULT_EVALS,
            specialization: Specialization::identity(),
            symbolic_limit: DEFAULT_SYMBOLIC_LIMIT,
            force_symbolic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceEntry {
    pub covector: String,
    pub weight: String,
    pub beta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalRecord {
    pub index: usize,
    pub assignment: Vec<u64>,
    pub determinant: u64,
    pub formula: u64,
}

/// Outcome of comparing the determinant with the product formula.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub topes: usize,
    pub faces: Vec<FaceEntry>,
    pub formula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<String>,
    pub agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evals: Option<Vec<EvalRecord>>,
    #[serde(skip)]
    pub formula_poly: FactoredPoly,
    #[serde(skip)]
    pub determinant_poly: Option<IntPolynomial>,
}

/// Checks `det V = ∏ (1 - b_v)^{β_v}` on a fiber, symbolically or at random
/// points modulo a random 61-bit prime. Disagreement is reported, not raised.
pub fn verify(fiber: &FiberView, opts: &VerifyOptions) -> Result<VerificationReport> {
    let faces = faces(fiber)?;
    let matrix = VarchenkoMatrix::build(fiber)?;
    let (target, images) = opts.specialization.images(fiber.n())?;
    let formula = formula_from_faces(fiber.n(), &faces)?;
    let (matrix, formula) = if opts.specialization.is_identity() {
        (matrix, formula)
    } else {
        (
            matrix.specialize(&opts.specialization)?,
            formula.substitute(target, &images)?,
        )
    };
    let formula = formula.collected();
    let face_entries = faces
        .iter()
        .map(|f| {
            let w = IntPolynomial::from_term(VarSpace::Hyperplanes(fiber.n()), f.weight.clone(), BigInt::one())
                .substitute(target, &images)?;
            Ok(FaceEntry {
                covector: f.covector.to_string(),
                weight: w.to_string(),
                beta: f.beta,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mode = opts.mode.unwrap_or(if matrix.size() <= opts.symbolic_limit {
        Mode::Symbolic
    } else {
        Mode::Randomized
    });
    let mut report = VerificationReport {
        mode,
        topes: matrix.size(),
        faces: face_entries,
        formula: formula.to_string(),
        determinant: None,
        agreement: false,
        prime: None,
        degree_bound: None,
        evals: None,
        formula_poly: formula.clone(),
        determinant_poly: None,
    };
    match mode {
        Mode::Symbolic => {
            let det = matrix.guarded_determinant(opts.symbolic_limit, opts.force_symbolic)?;
            report.agreement = formula.expand()? == det;
            report.determinant = Some(det.to_string());
            report.determinant_poly = Some(det);
        }
        Mode::Randomized => {
            let (prime, records) = randomized_evals(&matrix, &formula, opts.seed, opts.evals);
            report.agreement = records.iter().all(|r| r.determinant == r.formula);
            report.prime = Some(prime);
            report.degree_bound = Some(matrix.degree_bound().max(formula.total_degree()));
            report.evals = Some(records);
        }
    }
    Ok(report)
}

/// Evaluates both sides at `evals` random points. Each evaluation draws from its
/// own stream keyed by index, so the log does not depend on the worker count.
pub fn randomized_evals(
    matrix: &VarchenkoMatrix,
    formula: &FactoredPoly,
    seed: u64,
    evals: usize,
) -> (u64, Vec<EvalRecord>) {
    let prime = modp::random_prime_61(&mut ChaCha8Rng::seed_from_u64(seed));
    let nvars = matrix.space().nvars();
    let records = (0..evals)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64 + 1);
            let assignment: Vec<u64> = (0..nvars).map(|_| rng.gen_range(0..prime)).collect();
            EvalRecord {
                index,
                determinant: matrix.det_mod(&assignment, prime),
                formula: formula.eval_mod(&assignment, prime),
                assignment,
            }
        })
        .collect();
    (prime, records)
}

/// `v(C,D) = v(C, F∘D) · v(F∘D, D)` for topes `C`, `D` and a face `F ≤ C`.
pub fn cfd_check(fiber: &FiberView, c: &SignVector, d: &SignVector, f: &SignVector) -> Result<bool> {
    for t in [c, d] {
        if !t.is_tope() || !fiber.contains(t) {
            return Err(Error::NotATope(t.to_string()));
        }
    }
    if !fiber.contains(f) {
        return Err(Error::NotAMember(f.to_string()));
    }
    if !f.leq(c)? {
        return Err(Error::Precondition(format!("{f} is not below {c}")));
    }
    let fd = f.compose(d)?;
    if !fiber.contains(&fd) {
        return Err(Error::NotAMember(fd.to_string()));
    }
    let free = fiber.free_mask();
    let lhs = distance(c, d, free)?;
    let rhs = distance(c, &fd, free)?.try_mul(&distance(&fd, d, free)?)?;
    Ok(lhs == rhs)
}

/// Evaluates both sides of the generalized Witt identity on a verified central
/// covector set, caching poset ranks across queries.
pub struct WittChecker<'a> {
    set: &'a CovectorSet,
    ranks: HashMap<SignVector, usize>,
    topes: Vec<SignVector>,
}

impl<'a> WittChecker<'a> {
    pub fn new(set: &'a CovectorSet) -> Result<Self> {
        if !set.has_zero() {
            return Err(Error::Precondition("set is not central".into()));
        }
        let ranks = set
            .members()
            .iter()
            .copied()
            .zip(set.poset_ranks()?)
            .collect();
        Ok(WittChecker {
            set,
            ranks,
            topes: set.topes(),
        })
    }

    /// Per-tope coefficients `(lhs, rhs)` of both sides for the nested pair
    /// `A < D`, `D` a tope, aligned with the set's topes in canonical order.
    /// Each side is the dot product of its coefficients with the values `x_C`.
    pub fn coefficients(&self, a: &SignVector, d: &SignVector) -> Result<(Vec<i64>, Vec<i64>)> {
        if !self.set.contains(a) {
            return Err(Error::NotAMember(a.to_string()));
        }
        if !d.is_tope() || !self.set.contains(d) {
            return Err(Error::NotATope(d.to_string()));
        }
        if !a.leq(d)? || a == d {
            return Err(Error::Precondition(format!("({a}, {d}) is not a nested face")));
        }
        let sign = |r: usize| if r % 2 == 0 { 1i64 } else { -1 };
        let mut lhs = vec![0i64; self.topes.len()];
        for f in self.set.members() {
            if !(a.leq_unchecked(f) && f.leq_unchecked(d)) {
                continue;
            }
            let s = sign(self.ranks[f]);
            for (k, c) in self.topes.iter().enumerate() {
                if f.compose_unchecked(c) == *d {
                    lhs[k] += s;
                }
            }
        }
        let target = a.compose_unchecked(&d.negate());
        let s = sign(self.ranks[d]);
        let rhs = self
            .topes
            .iter()
            .map(|c| if a.compose_unchecked(c) == target { s } else { 0 })
            .collect();
        Ok((lhs, rhs))
    }

    pub fn topes(&self) -> &[SignVector] {
        &self.topes
    }

    /// Returns `(lhs, rhs)` for the nested pair `A < D`, `D` a tope.
    pub fn sides(&self, a: &SignVector, d: &SignVector, x: impl Fn(&SignVector) -> i64) -> Result<(i128, i128)> {
        let (lhs, rhs) = self.coefficients(a, d)?;
        let dot = |coef: &[i64]| -> i128 {
            coef.iter()
                .zip(&self.topes)
                .map(|(&k, c)| k as i128 * x(c) as i128)
                .sum()
        };
        Ok((dot(&lhs), dot(&rhs)))
    }

    pub fn check(&self, a: &SignVector, d: &SignVector, x: impl Fn(&SignVector) -> i64) -> Result<bool> {
        let (l, r) = self.sides(a, d, x)?;
        Ok(l == r)
    }
}

/// One-shot form of [`WittChecker::check`]. Requires a verified central set.
pub fn witt_check(
    set: &CovectorSet,
    a: &SignVector,
    d: &SignVector,
    x: impl Fn(&SignVector) -> i64,
) -> Result<bool> {
    WittChecker::new(set)?.check(a, d, x)
}

/// Leading integer in absolute value among the determinant's coefficients.
pub fn max_abs_coefficient(p: &IntPolynomial) -> BigInt {
    p.terms().iter().map(|(_, c)| c.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    fn mono(n: usize, s: &str) -> IntPolynomial {
        IntPolynomial::parse(VarSpace::Hyperplanes(n), s).unwrap()
    }

    fn one_line() -> FiberView {
        let s = CovectorSet::new(1, [sv("-"), sv("0"), sv("+")]).unwrap();
        FiberView::whole(Arc::new(s.into_verified().unwrap())).unwrap()
    }

    #[test]
    fn distance_examples() {
        let all = 0b11;
        assert!(distance(&sv("+-"), &sv("+-"), all).unwrap().is_one());
        assert_eq!(distance(&sv("++"), &sv("-+"), all).unwrap(), Monomial::var(0));
        assert_eq!(
            distance(&sv("+-"), &sv("-+"), all).unwrap(),
            Monomial::from_pairs([(0, 1), (3, 1)]).unwrap()
        );
        assert!(matches!(distance(&sv("+0"), &sv("++"), all), Err(Error::NotATope(_))));
        // separation outside I is ignored
        assert!(distance(&sv("++"), &sv("-+"), 0b10).unwrap().is_one());
    }

    #[test]
    fn one_line_matrix_and_determinant() {
        let m = VarchenkoMatrix::build(&one_line()).unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.entry(0, 1), &mono(1, "a1m"));
        assert_eq!(m.entry(1, 0), &mono(1, "a1p"));
        assert!(m.entry(0, 0).is_one());
        assert_eq!(m.determinant().unwrap(), mono(1, "1 - a1p*a1m"));
    }

    #[test]
    fn single_tope_fiber() {
        let s = CovectorSet::new(1, [sv("-"), sv("0"), sv("+")]).unwrap();
        let f = FiberView::new(Arc::new(s), &[], sv("+")).unwrap();
        let m = VarchenkoMatrix::build(&f).unwrap();
        assert_eq!(m.size(), 1);
        assert!(m.determinant().unwrap().is_one());
        assert!(product_formula(&f).unwrap().factors().is_empty());
    }

    #[test]
    fn empty_fiber_rejected() {
        let s = CovectorSet::new(2, [sv("00"), sv("0+"), sv("0-")]).unwrap();
        let f = FiberView::new(Arc::new(s), &[0], sv("0+")).unwrap();
        assert!(matches!(VarchenkoMatrix::build(&f), Err(Error::Loops(_))));
        let s = CovectorSet::new(1, [sv("0")]).unwrap();
        let f = FiberView::new(Arc::new(s), &[], sv("0"));
        assert!(f.is_err());
    }

    #[test]
    fn zero_pivot_swaps_rows() {
        let sp = VarSpace::Hyperplanes(1);
        let e = |s: &str| IntPolynomial::parse(sp, s).unwrap();
        let m = VarchenkoMatrix::from_entries(
            vec![sv("+"), sv("-"), sv("+")],
            vec![
                vec![e("0"), e("a1p"), e("1")],
                vec![e("a1m"), e("0"), e("2")],
                vec![e("1"), e("1"), e("0")],
            ],
        )
        .unwrap();
        // cofactor expansion along the first row
        let expected = e("2*a1p + a1m");
        assert_eq!(m.bareiss_determinant().unwrap(), expected);
    }

    #[test]
    fn interpolation_matches_bareiss_on_univariate() {
        let sp = VarSpace::Collapsed;
        let e = |s: &str| IntPolynomial::parse(sp, s).unwrap();
        let m = VarchenkoMatrix::from_entries(
            vec![sv("+"), sv("-"), sv("+")],
            vec![
                vec![e("1"), e("a^2"), e("-3*a")],
                vec![e("a"), e("1 - a"), e("a^3")],
                vec![e("7"), e("a^2 + 2"), e("1")],
            ],
        )
        .unwrap();
        assert_eq!(
            m.determinant_by_interpolation().unwrap(),
            m.bareiss_determinant().unwrap()
        );
    }

    #[test]
    fn crt_recovers_signed_values() {
        let primes = modp::primes_below_2_61(2);
        for v in [-5i64, 0, 1, i64::MAX, i64::MIN + 1] {
            let b = BigInt::from(v);
            let r: Vec<u64> = primes
                .iter()
                .map(|&p| {
                    let pb = BigInt::from(p);
                    ((&b % &pb + &pb) % &pb).to_u64().unwrap()
                })
                .collect();
            assert_eq!(crt_symmetric(&r, &primes), b);
        }
    }

    #[test]
    fn size_guard() {
        let m = VarchenkoMatrix::build(&one_line()).unwrap();
        assert!(matches!(
            m.guarded_determinant(1, false),
            Err(Error::SizeGuard { topes: 2, limit: 1 })
        ));
        assert!(m.guarded_determinant(1, true).is_ok());
        let u = m.specialize(&Specialization::collapse_all()).unwrap();
        assert!(u.guarded_determinant(1, false).is_ok());
    }

    #[test]
    fn one_line_formula_and_verify() {
        let f = one_line();
        assert_eq!(product_formula(&f).unwrap().to_string(), "(1 - a1p*a1m)");
        let r = verify(&f, &VerifyOptions::default()).unwrap();
        assert_eq!(r.mode, Mode::Symbolic);
        assert!(r.agreement);
        assert_eq!(r.determinant.as_deref(), Some("1 - a1p*a1m"));
    }

    #[test]
    fn randomized_log_is_reproducible() {
        let f = one_line();
        let opts = VerifyOptions {
            mode: Some(Mode::Randomized),
            seed: 42,
            ..Default::default()
        };
        let a = verify(&f, &opts).unwrap();
        let b = verify(&f, &opts).unwrap();
        assert!(a.agreement);
        assert_eq!(a.evals, b.evals);
        assert_eq!(a.prime, b.prime);
        assert_eq!(a.evals.as_ref().unwrap().len(), DEFAULT_EVALS);
    }

    #[test]
    fn cfd_edge_cases() {
        let f = one_line();
        let (c, d) = (sv("+"), sv("-"));
        assert!(cfd_check(&f, &c, &d, &c).unwrap());
        assert!(cfd_check(&f, &c, &d, &sv("0")).unwrap());
        assert!(cfd_check(&f, &c, &d, &d).is_err());
    }

    #[test]
    fn witt_one_line() {
        let s = CovectorSet::new(1, [sv("-"), sv("0"), sv("+")])
            .unwrap()
            .into_verified()
            .unwrap();
        let x = |c: &SignVector| if *c == sv("+") { 11 } else { -4 };
        let w = WittChecker::new(&s).unwrap();
        // F = 0 contributes x_+, F = + contributes -(x_+ + x_-); rhs is -x_-
        assert_eq!(w.sides(&sv("0"), &sv("+"), x).unwrap(), (4, 4));
        assert!(w.check(&sv("0"), &sv("+"), |_| 0).unwrap());
        assert!(w.check(&sv("+"), &sv("+"), x).is_err());
    }
}

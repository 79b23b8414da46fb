//! Sparse multivariate polynomials with arbitrary-precision integer
//! coefficients in the variables `a_i^+`, `a_i^-`.
//!
//! Variable `a_i^+` has index `2(i-1)`, `a_i^-` index `2(i-1)+1`. Monomials are
//! ordered graded-lexicographically with `a1p < a1m < a2p < ...`: total degree
//! first, then the exponent of the highest-indexed variable that differs.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modp;

/// The variable universe a polynomial lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarSpace {
    /// `2n` variables `a_i^+`, `a_i^-` for `n` hyperplanes.
    Hyperplanes(usize),
    /// A single variable `a`: every `a_i^±` collapsed.
    Collapsed,
}

impl VarSpace {
    pub fn nvars(&self) -> usize {
        match *self {
            VarSpace::Hyperplanes(n) => 2 * n,
            VarSpace::Collapsed => 1,
        }
    }

    pub fn var_name(&self, v: usize) -> String {
        match self {
            VarSpace::Hyperplanes(_) => VarId::from_index(v).to_string(),
            VarSpace::Collapsed => "a".to_string(),
        }
    }

    fn parse_var(&self, name: &str) -> Option<usize> {
        match self {
            VarSpace::Collapsed => (name == "a").then_some(0),
            VarSpace::Hyperplanes(n) => {
                let v: VarId = name.parse().ok()?;
                (v.hyperplane < *n).then(|| v.index())
            }
        }
    }
}

/// `a_i^+` or `a_i^-` with a 0-based hyperplane index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub hyperplane: usize,
    pub positive: bool,
}

impl VarId {
    pub fn plus(hyperplane: usize) -> Self {
        VarId {
            hyperplane,
            positive: true,
        }
    }

    pub fn minus(hyperplane: usize) -> Self {
        VarId {
            hyperplane,
            positive: false,
        }
    }

    pub fn index(&self) -> usize {
        2 * self.hyperplane + usize::from(!self.positive)
    }

    pub fn from_index(v: usize) -> Self {
        VarId {
            hyperplane: v / 2,
            positive: v % 2 == 0,
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.positive { 'p' } else { 'm' };
        write!(f, "a{}{}", self.hyperplane + 1, s)
    }
}

impl std::str::FromStr for VarId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("invalid variable name {s:?}"));
        let body = s.strip_prefix('a').ok_or_else(bad)?;
        let (num, positive) = if let Some(n) = body.strip_suffix('p') {
            (n, true)
        } else if let Some(n) = body.strip_suffix('m') {
            (n, false)
        } else {
            return Err(bad());
        };
        let i: usize = num.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        Ok(VarId {
            hyperplane: i - 1,
            positive,
        })
    }
}

/// A power product: sorted `(variable, exponent)` pairs, no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u16, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        Monomial(vec![(v as u16, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut acc: BTreeMap<u16, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            let slot = acc.entry(v as u16).or_default();
            *slot = slot.checked_add(e).ok_or(Error::ExponentOverflow)?;
        }
        Ok(Monomial(acc.into_iter().collect()))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w as usize == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }

    pub fn try_mul(&self, other: &Monomial) -> Result<Monomial> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1.checked_add(b[j].1).ok_or(Error::ExponentOverflow)?;
                    out.push((a[i].0, e));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Monomial(out))
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let d = e.checked_sub(other.0[j].1)?;
                if d > 0 {
                    out.push((v, d));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        (j == other.0.len()).then_some(Monomial(out))
    }

    pub fn try_pow(&self, k: u32) -> Result<Monomial> {
        let pairs = self
            .0
            .iter()
            .map(|&(v, e)| e.checked_mul(k).map(|e| (v, e)).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Monomial(pairs.into_iter().filter(|&(_, e)| e > 0).collect()))
    }

    pub fn eval_mod(&self, assignment: &[u64], p: u64) -> u64 {
        self.0.iter().fold(1 % p, |acc, &(v, e)| {
            modp::mul_mod(acc, modp::pow_mod(assignment[v as usize], e as u64, p), p)
        })
    }

    fn fmt_in(&self, space: VarSpace) -> String {
        self.0
            .iter()
            .map(|&(v, e)| {
                let name = space.var_name(v as usize);
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut a = self.0.iter().rev();
            let mut b = other.0.iter().rev();
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(va, ea)), Some(&(vb, eb))) => {
                        if va != vb {
                            return va.cmp(&vb);
                        }
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial over the integers, terms sorted ascending, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    space: VarSpace,
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPolynomial {
    pub fn zero(space: VarSpace) -> Self {
        IntPolynomial {
            space,
            terms: Vec::new(),
        }
    }

    pub fn one(space: VarSpace) -> Self {
        Self::constant(space, BigInt::one())
    }

    pub fn constant(space: VarSpace, c: impl Into<BigInt>) -> Self {
        Self::from_term(space, Monomial::one(), c.into())
    }

    pub fn var(space: VarSpace, v: usize) -> Self {
        assert!(v < space.nvars(), "variable index out of range");
        Self::from_term(space, Monomial::var(v), BigInt::one())
    }

    pub fn from_term(space: VarSpace, m: Monomial, c: BigInt) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        IntPolynomial { space, terms }
    }

    /// Builds a polynomial from arbitrary terms, merging equal monomials.
    pub fn from_terms(space: VarSpace, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            debug_assert!(m.max_var().is_none_or(|v| v < space.nvars()));
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(space, acc)
    }

    fn from_map(space: VarSpace, acc: HashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<(Monomial, BigInt)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        IntPolynomial { space, terms }
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn constant_term(&self) -> BigInt {
        match self.terms.first() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => BigInt::zero(),
        }
    }

    pub fn leading_term(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.last()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.last().map_or(0, |(m, _)| m.degree())
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c.abs()).sum()
    }

    fn same_space(&self, other: &IntPolynomial) -> Result<()> {
        if self.space != other.space {
            return Err(Error::VarSpaceMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        self.same_space(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        self.same_space(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &IntPolynomial, negate_other: bool) -> IntPolynomial {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let flip = |c: &BigInt| if negate_other { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), flip(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), flip(c))));
        IntPolynomial {
            space: self.space,
            terms: out,
        }
    }

    pub fn try_mul(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        self.same_space(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(IntPolynomial::zero(self.space));
        }
        if self.space.nvars() == 1 {
            return self.mul_univariate(other);
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.try_mul(mb)?).or_default() += ca * cb;
            }
        }
        Ok(Self::from_map(self.space, acc))
    }

    fn mul_univariate(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        let deg = |p: &IntPolynomial| p.total_degree();
        let top = deg(self).checked_add(deg(other)).ok_or(Error::ExponentOverflow)?;
        if top > u32::MAX as u64 {
            return Err(Error::ExponentOverflow);
        }
        let mut dense = vec![BigInt::zero(); top as usize + 1];
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                dense[(ma.degree() + mb.degree()) as usize] += ca * cb;
            }
        }
        let terms = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Monomial::from_pairs([(0, e as u32)]).expect("fits"), c))
            .collect();
        Ok(IntPolynomial {
            space: self.space,
            terms,
        })
    }

    pub fn try_pow(&self, k: u32) -> Result<IntPolynomial> {
        let mut result = IntPolynomial::one(self.space);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn scale(&self, c: &BigInt) -> IntPolynomial {
        if c.is_zero() {
            return IntPolynomial::zero(self.space);
        }
        IntPolynomial {
            space: self.space,
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    /// The exact quotient `self / divisor`; any remainder is an error.
    pub fn exact_div(&self, divisor: &IntPolynomial) -> Result<IntPolynomial> {
        self.same_space(divisor)?;
        let Some((lm, lc)) = divisor.leading_term() else {
            return Err(Error::DivisionByZero);
        };
        if divisor.terms.len() == 1 {
            let terms = self
                .terms
                .iter()
                .map(|(m, c)| {
                    let q = m.checked_div(lm).ok_or(Error::InexactDivision)?;
                    let (qc, r) = c.div_rem(lc);
                    if !r.is_zero() {
                        return Err(Error::InexactDivision);
                    }
                    Ok((q, qc))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(IntPolynomial {
                space: self.space,
                terms,
            });
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.checked_div(lm).ok_or(Error::InexactDivision)?;
            let (qc, r) = c.div_rem(lc);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            for (dm, dc) in &divisor.terms[..divisor.terms.len() - 1] {
                let prod = qm.try_mul(dm)?;
                let entry = rem.entry(prod.clone()).or_default();
                *entry -= &qc * dc;
                if entry.is_zero() {
                    rem.remove(&prod);
                }
            }
            quotient.push((qm, qc));
        }
        quotient.reverse();
        Ok(IntPolynomial {
            space: self.space,
            terms: quotient,
        })
    }

    /// Homomorphic image under `images[v]` for each variable `v` of this
    /// polynomial's space. All images must share `target`.
    pub fn substitute(&self, target: VarSpace, images: &[IntPolynomial]) -> Result<IntPolynomial> {
        if images.len() < self.space.nvars() {
            return Err(Error::Input("substitution map is not total".into()));
        }
        if images.iter().any(|p| p.space != target) {
            return Err(Error::VarSpaceMismatch);
        }
        let mut powers: HashMap<(usize, u32), IntPolynomial> = HashMap::new();
        let mut out = IntPolynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = IntPolynomial::constant(target, c.clone());
            for (v, e) in m.pairs() {
                if !powers.contains_key(&(v, e)) {
                    powers.insert((v, e), images[v].try_pow(e)?);
                }
                t = t.try_mul(&powers[&(v, e)])?;
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    /// Value at `assignment` (one residue per variable) in GF(p).
    pub fn eval_mod(&self, assignment: &[u64], p: u64) -> u64 {
        assert!(assignment.len() >= self.space.nvars(), "assignment is not total");
        let pb = BigInt::from(p);
        self.terms.iter().fold(0, |acc, (m, c)| {
            let c = c.mod_floor(&pb).to_u64().expect("residue fits");
            modp::add_mod(acc, modp::mul_mod(c, m.eval_mod(assignment, p), p), p)
        })
    }

    /// Dense coefficient vector for a univariate polynomial.
    pub fn univariate_coefficients(&self) -> Option<Vec<BigInt>> {
        if self.space.nvars() != 1 {
            return None;
        }
        let mut out = vec![BigInt::zero(); self.total_degree() as usize + 1];
        for (m, c) in &self.terms {
            out[m.degree() as usize] = c.clone();
        }
        Some(out)
    }

    pub fn from_univariate(space: VarSpace, coeffs: &[BigInt]) -> Self {
        assert_eq!(space.nvars(), 1);
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Monomial::from_pairs([(0, e as u32)]).expect("fits"), c.clone()))
            .collect();
        IntPolynomial { space, terms }
    }

    /// Parses the canonical text syntax, e.g. `1 - 2*a1p*a1m + a1p^2*a1m^2`.
    pub fn parse(space: VarSpace, text: &str) -> Result<IntPolynomial> {
        let bad = |msg: String| Error::Input(format!("cannot parse polynomial {text:?}: {msg}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty".into()));
        }
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (k, ch) in s.char_indices() {
            if ch == '+' || ch == '-' {
                if k > 0 {
                    chunks.push((negative, std::mem::take(&mut current)));
                }
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        chunks.push((negative, current));
        let mut terms = Vec::new();
        for (neg, body) in chunks {
            if body.is_empty() {
                return Err(bad("empty term".into()));
            }
            let mut coeff = BigInt::one();
            let mut pairs = Vec::new();
            for factor in body.split('*') {
                if factor.chars().all(|c| c.is_ascii_digit()) && !factor.is_empty() {
                    coeff *= factor.parse::<BigInt>().map_err(|e| bad(e.to_string()))?;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|e| bad(e.to_string()))?),
                    None => (factor, 1),
                };
                let v = space
                    .parse_var(name)
                    .ok_or_else(|| bad(format!("unknown variable {name:?}")))?;
                pairs.push((v, exp));
            }
            if neg {
                coeff = -coeff;
            }
            terms.push((Monomial::from_pairs(pairs)?, coeff));
        }
        Ok(IntPolynomial::from_terms(space, terms))
    }

    /// Canonical comparison used to order factors: degree, then term list.
    pub fn canonical_cmp(&self, other: &IntPolynomial) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.terms.len().cmp(&other.terms.len()))
            .then_with(|| {
                for ((ma, ca), (mb, cb)) in self.terms.iter().rev().zip(other.terms.iter().rev()) {
                    let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", m.fmt_in(self.space))?;
            } else {
                write!(f, "{abs}*{}", m.fmt_in(self.space))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&IntPolynomial> for &IntPolynomial {
            type Output = IntPolynomial;
            fn $method(self, rhs: &IntPolynomial) -> IntPolynomial {
                self.$inner(rhs).expect(concat!("polynomial ", stringify!($method)))
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl std::ops::Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        self.scale(&-BigInt::one())
    }
}

/// A product of polynomial bases raised to positive exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    space: VarSpace,
    factors: Vec<(IntPolynomial, u32)>,
}

impl FactoredPoly {
    pub fn new(space: VarSpace) -> Self {
        FactoredPoly {
            space,
            factors: Vec::new(),
        }
    }

    pub fn from_factors(space: VarSpace, factors: Vec<(IntPolynomial, u32)>) -> Result<Self> {
        if factors.iter().any(|(b, _)| b.space() != space) {
            return Err(Error::VarSpaceMismatch);
        }
        Ok(FactoredPoly { space, factors })
    }

    pub fn push(&mut self, base: IntPolynomial, exponent: u32) -> Result<()> {
        if base.space() != self.space {
            return Err(Error::VarSpaceMismatch);
        }
        self.factors.push((base, exponent));
        Ok(())
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn factors(&self) -> &[(IntPolynomial, u32)] {
        &self.factors
    }

    /// Merges equal bases, drops zero exponents, and sorts canonically.
    pub fn collected(&self) -> FactoredPoly {
        let mut merged: Vec<(IntPolynomial, u32)> = Vec::new();
        for (b, e) in &self.factors {
            if *e == 0 {
                continue;
            }
            match merged.iter_mut().find(|(m, _)| m == b) {
                Some((_, acc)) => *acc += e,
                None => merged.push((b.clone(), *e)),
            }
        }
        merged.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        FactoredPoly {
            space: self.space,
            factors: merged,
        }
    }

    pub fn expand(&self) -> Result<IntPolynomial> {
        self.factors
            .iter()
            .try_fold(IntPolynomial::one(self.space), |acc, (b, e)| acc.try_mul(&b.try_pow(*e)?))
    }

    pub fn total_degree(&self) -> u64 {
        self.factors
            .iter()
            .map(|(b, e)| b.total_degree() * *e as u64)
            .sum()
    }

    pub fn eval_mod(&self, assignment: &[u64], p: u64) -> u64 {
        self.factors.iter().fold(1 % p, |acc, (b, e)| {
            modp::mul_mod(acc, modp::pow_mod(b.eval_mod(assignment, p), *e as u64, p), p)
        })
    }

    pub fn substitute(&self, target: VarSpace, images: &[IntPolynomial]) -> Result<FactoredPoly> {
        let factors = self
            .factors
            .iter()
            .map(|(b, e)| Ok((b.substitute(target, images)?, *e)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FactoredPoly {
            space: target,
            factors,
        })
    }
}

impl fmt::Display for FactoredPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, e)| {
                if *e == 1 {
                    format!("({b})")
                } else {
                    format!("({b})^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// A variable specialization: optionally collapse every variable to `a`,
/// and pin chosen variables to integers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Specialization {
    pub collapse: bool,
    pub values: BTreeMap<VarId, BigInt>,
}

impl Specialization {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn collapse_all() -> Self {
        Specialization {
            collapse: true,
            values: BTreeMap::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        !self.collapse && self.values.is_empty()
    }

    /// Parses `all=a`, `a1p=2,a2m=-1`, combinations of those, or a JSON object
    /// with the same keys.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let mut spec = Specialization::default();
        if text.starts_with('{') {
            let map: BTreeMap<String, serde_json::Value> = serde_json::from_str(text)
                .map_err(|e| Error::Input(format!("invalid specialization JSON: {e}")))?;
            for (k, v) in map {
                let value = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(Error::Input(format!("invalid specialization value {other}"))),
                };
                spec.add_entry(&k, &value)?;
            }
            return Ok(spec);
        }
        for entry in text.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("invalid specialization entry {entry:?}")))?;
            spec.add_entry(k.trim(), v.trim())?;
        }
        Ok(spec)
    }

    fn add_entry(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "all" {
            if value != "a" {
                return Err(Error::Input(format!("`all` may only map to `a`, got {value:?}")));
            }
            self.collapse = true;
            return Ok(());
        }
        let var: VarId = key.parse()?;
        if value == "a" {
            return Err(Error::Input(format!(
                "per-variable collapse of {key} is not supported; use all=a"
            )));
        }
        let v: BigInt = value
            .parse()
            .map_err(|_| Error::Input(format!("invalid integer {value:?} for {key}")))?;
        self.values.insert(var, v);
        Ok(())
    }

    /// Target space and variable images for polynomials over `n` hyperplanes.
    pub fn images(&self, n: usize) -> Result<(VarSpace, Vec<IntPolynomial>)> {
        if let Some(v) = self.values.keys().find(|v| v.hyperplane >= n) {
            return Err(Error::Input(format!("{v} is outside the {n} hyperplanes")));
        }
        let source = VarSpace::Hyperplanes(n);
        let target = if self.collapse { VarSpace::Collapsed } else { source };
        let images = (0..source.nvars())
            .map(|v| match self.values.get(&VarId::from_index(v)) {
                Some(c) => IntPolynomial::constant(target, c.clone()),
                None if self.collapse => IntPolynomial::var(target, 0),
                None => IntPolynomial::var(target, v),
            })
            .collect();
        Ok((target, images))
    }
}

//! Sparse polynomials over packed exponent vectors with `i128` coefficients.
//! Used as the fast path of fraction-free elimination; every operation reports
//! coefficient overflow so the caller can fall back to the exact generic path.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::poly::{IntPolynomial, Monomial, VarSpace};

/// Field layout for `nvars` exponents in a `u128`. Each field has a guard bit
/// above it, so a borrow out of any field is visible after subtraction.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    nvars: usize,
    width: u32,
    guards: u128,
}

impl Layout {
    /// Fails when exponents up to `max_exp` do not fit.
    pub(crate) fn new(nvars: usize, max_exp: u64) -> Option<Self> {
        if nvars == 0 {
            return Some(Layout {
                nvars,
                width: 128,
                guards: 0,
            });
        }
        let width = 128 / nvars as u32;
        if width < 2 || max_exp >= 1u64.checked_shl(width - 1).unwrap_or(u64::MAX) {
            return None;
        }
        let guards = (0..nvars).fold(0u128, |g, v| g | 1u128 << (v as u32 * width + width - 1));
        Some(Layout { nvars, width, guards })
    }

    fn shift(&self, var: usize) -> u32 {
        // variable 0 in the top field; integer order is then lex order
        (self.nvars - 1 - var) as u32 * self.width
    }

    pub(crate) fn pack(&self, m: &Monomial) -> u128 {
        m.pairs().fold(0u128, |acc, (v, e)| acc | (e as u128) << self.shift(v))
    }

    pub(crate) fn unpack(&self, key: u128) -> Monomial {
        let field = (1u128 << (self.width - 1)) - 1;
        Monomial::from_pairs((0..self.nvars).filter_map(|v| {
            let e = (key >> self.shift(v)) & field;
            (e != 0).then_some((v, e as u32))
        }))
        .expect("exponents fit in u32")
    }

    fn divides(&self, d: u128, m: u128) -> bool {
        ((m | self.guards) - d) & self.guards == self.guards
    }

    /// Adding keys multiplies monomials. No field may reach its guard bit.
    fn mul_keys(&self, a: u128, b: u128) -> Option<u128> {
        let s = a.checked_add(b)?;
        (s & self.guards == 0).then_some(s)
    }
}

/// Terms in strictly decreasing key order, no zero coefficients.
pub(crate) type Poly = Vec<(u128, i128)>;

pub(crate) fn from_poly(layout: &Layout, p: &IntPolynomial) -> Option<Poly> {
    let mut out: Poly = p
        .terms()
        .iter()
        .map(|(m, c)| Some((layout.pack(m), i128::try_from(c).ok()?)))
        .collect::<Option<_>>()?;
    out.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    Some(out)
}

pub(crate) fn to_poly(layout: &Layout, space: VarSpace, p: &Poly) -> IntPolynomial {
    IntPolynomial::from_terms(space, p.iter().map(|&(k, c)| (layout.unpack(k), BigInt::from(c))))
}

fn normalize(mut terms: Vec<(u128, i128)>) -> Option<Poly> {
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let mut out: Poly = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 = last.1.checked_add(c)?,
            _ => {
                if out.last().is_some_and(|l| l.1 == 0) {
                    out.pop();
                }
                out.push((k, c));
            }
        }
    }
    if out.last().is_some_and(|l| l.1 == 0) {
        out.pop();
    }
    Some(out)
}

pub(crate) fn mul(layout: &Layout, a: &Poly, b: &Poly) -> Option<Poly> {
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for &(ka, ca) in a {
        for &(kb, cb) in b {
            terms.push((layout.mul_keys(ka, kb)?, ca.checked_mul(cb)?));
        }
    }
    normalize(terms)
}

/// `a*b - c*d`.
pub(crate) fn mul_sub(layout: &Layout, a: &Poly, b: &Poly, c: &Poly, d: &Poly) -> Option<Poly> {
    let mut terms = Vec::with_capacity(a.len() * b.len() + c.len() * d.len());
    for &(ka, ca) in a {
        for &(kb, cb) in b {
            terms.push((layout.mul_keys(ka, kb)?, ca.checked_mul(cb)?));
        }
    }
    for &(kc, cc) in c {
        for &(kd, cd) in d {
            terms.push((layout.mul_keys(kc, kd)?, cc.checked_mul(cd)?.checked_neg()?));
        }
    }
    normalize(terms)
}

/// Sum of two polynomials in the same decreasing order.
fn merge_add(a: &Poly, b: &Poly) -> Option<Poly> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Greater => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = a[i].1.checked_add(b[j].1)?;
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some(out)
}

/// `sign * entry * minor`. A single-term entry shifts every key by the same
/// amount, which keeps the order.
fn scaled(layout: &Layout, entry: &Poly, minor: &Poly, sign: i128) -> Option<Poly> {
    if let [(k, c)] = entry.as_slice() {
        let c = c.checked_mul(sign)?;
        minor
            .iter()
            .map(|&(mk, mc)| Some((layout.mul_keys(mk, *k)?, mc.checked_mul(c)?)))
            .collect()
    } else {
        let p = mul(layout, entry, minor)?;
        p.into_iter().map(|(k, c)| Some((k, c.checked_mul(sign)?))).collect()
    }
}

/// Determinant by cofactor expansion along successive rows, keeping every
/// minor on the first `r` rows indexed by its column set. No division.
pub(crate) fn minor_expansion(layout: &Layout, m: &[Vec<Poly>]) -> Option<Poly> {
    use rayon::prelude::*;
    use std::collections::HashMap;

    let n = m.len();
    assert!(n <= 24, "column sets are bitmasks");
    if n == 0 {
        return Some(vec![(0, 1)]);
    }
    let mut level: HashMap<u32, Poly> = (0..n)
        .filter(|&j| !m[0][j].is_empty())
        .map(|j| (1u32 << j, m[0][j].clone()))
        .collect();
    for r in 1..n {
        let sets = subsets(n, r + 1);
        let next: Vec<(u32, Poly)> = sets
            .par_iter()
            .map(|&set| {
                let mut acc: Poly = Vec::new();
                let mut pos = 0usize;
                for j in 0..n {
                    if set >> j & 1 == 0 {
                        continue;
                    }
                    if let Some(minor) = level.get(&(set & !(1 << j))) {
                        if !m[r][j].is_empty() {
                            let sign = if (r + pos) % 2 == 0 { 1 } else { -1 };
                            acc = merge_add(&acc, &scaled(layout, &m[r][j], minor, sign)?)?;
                        }
                    }
                    pos += 1;
                }
                Some((set, acc))
            })
            .collect::<Option<_>>()?;
        level = next.into_iter().filter(|(_, p)| !p.is_empty()).collect();
    }
    Some(level.remove(&((1u32 << n) - 1)).unwrap_or_default())
}

/// All `k`-element subsets of `0..n` as bitmasks, increasing.
fn subsets(n: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut s: u32 = (1u32 << k) - 1;
    let limit = 1u32 << n;
    while s < limit {
        out.push(s);
        // next set with the same popcount
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum DivError {
    Overflow,
    Inexact,
}

/// Quotient of an exact division by repeated cancellation of leading terms.
pub(crate) fn exact_div(layout: &Layout, a: &Poly, d: &Poly) -> Result<Poly, DivError> {
    let &(lead_k, lead_c) = d.first().ok_or(DivError::Inexact)?;
    if d.len() == 1 && lead_k == 0 && lead_c == 1 {
        return Ok(a.clone());
    }
    let mut rem: BTreeMap<u128, i128> = a.iter().copied().collect();
    let mut q: Poly = Vec::new();
    while let Some((&k, &c)) = rem.iter().next_back() {
        if !layout.divides(lead_k, k) || c % lead_c != 0 {
            return Err(DivError::Inexact);
        }
        let qk = k - lead_k;
        let qc = c / lead_c;
        q.push((qk, qc));
        for &(dk, dc) in d {
            let key = qk + dk;
            let delta = qc.checked_mul(dc).ok_or(DivError::Overflow)?;
            let entry = rem.entry(key).or_insert(0);
            *entry = entry.checked_sub(delta).ok_or(DivError::Overflow)?;
            if *entry == 0 {
                rem.remove(&key);
            }
        }
    }
    Ok(q)
}

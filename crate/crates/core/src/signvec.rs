//! Sign vectors over `{+, -, 0}`, covector sets, and topal fibers.
//!
//! Coordinates are 0-based in the Rust API. Text I/O and error messages use
//! 1-based indices.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::VarId;

pub const MAX_GROUND_SET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn to_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '-' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Plus),
            _ => None,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn mask_to_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// An element of `{+, -, 0}^n`, stored as a pair of disjoint bitmasks.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignVector {
    n: u8,
    plus: u64,
    minus: u64,
}

impl SignVector {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SET {
            return Err(Error::UnsupportedSize(n));
        }
        Ok(SignVector {
            n: n as u8,
            plus: 0,
            minus: 0,
        })
    }

    pub fn from_signs(signs: &[Sign]) -> Result<Self> {
        let mut v = SignVector::zero(signs.len())?;
        for (i, &s) in signs.iter().enumerate() {
            v.set(i, s);
        }
        Ok(v)
    }

    /// Builds a vector from raw masks. Bits at or above `n` and bits set in
    /// both masks are rejected.
    pub fn from_masks(n: usize, plus: u64, minus: u64) -> Result<Self> {
        let base = SignVector::zero(n)?;
        if plus & minus != 0 || (plus | minus) & !full_mask(n) != 0 {
            return Err(Error::Input(format!(
                "invalid sign masks for n={n}: plus={plus:#x} minus={minus:#x}"
            )));
        }
        Ok(SignVector { plus, minus, ..base })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn plus_mask(&self) -> u64 {
        self.plus
    }

    #[inline]
    pub fn minus_mask(&self) -> u64 {
        self.minus
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.plus | self.minus
    }

    #[inline]
    pub fn zero_mask(&self) -> u64 {
        !self.support() & full_mask(self.len())
    }

    pub fn get(&self, i: usize) -> Sign {
        debug_assert!(i < self.len());
        if self.plus >> i & 1 == 1 {
            Sign::Plus
        } else if self.minus >> i & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn set(&mut self, i: usize, s: Sign) {
        assert!(i < self.len(), "coordinate {} out of range", i + 1);
        let bit = 1u64 << i;
        self.plus &= !bit;
        self.minus &= !bit;
        match s {
            Sign::Plus => self.plus |= bit,
            Sign::Minus => self.minus |= bit,
            Sign::Zero => {}
        }
    }

    pub fn signs(&self) -> impl Iterator<Item = Sign> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn is_tope(&self) -> bool {
        self.zero_mask() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.support() == 0
    }

    fn same_len(&self, other: &SignVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// `self ∘ other`: keep our sign where nonzero, otherwise take theirs.
    pub fn compose(&self, other: &SignVector) -> Result<SignVector> {
        self.same_len(other)?;
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &SignVector) -> SignVector {
        let free = !self.support();
        SignVector {
            n: self.n,
            plus: self.plus | (other.plus & free),
            minus: self.minus | (other.minus & free),
        }
    }

    /// Mask of the coordinates where the two vectors carry opposite nonzero signs.
    pub fn separation(&self, other: &SignVector) -> Result<u64> {
        self.same_len(other)?;
        Ok(self.separation_unchecked(other))
    }

    #[inline]
    pub(crate) fn separation_unchecked(&self, other: &SignVector) -> u64 {
        (self.plus & other.minus) | (self.minus & other.plus)
    }

    pub fn negate(&self) -> SignVector {
        SignVector {
            n: self.n,
            plus: self.minus,
            minus: self.plus,
        }
    }

    /// Face order: every coordinate of `self` is 0 or equals the one in `other`.
    pub fn leq(&self, other: &SignVector) -> Result<bool> {
        self.same_len(other)?;
        Ok(self.leq_unchecked(other))
    }

    #[inline]
    pub(crate) fn leq_unchecked(&self, other: &SignVector) -> bool {
        self.plus & !other.plus == 0 && self.minus & !other.minus == 0
    }

    /// Pairs `{a_i^+, a_i^-}` for every zero coordinate, i.e. the weight monomial's
    /// variables. Undefined for topes.
    pub fn weight_exponents(&self) -> Result<Vec<VarId>> {
        if self.is_tope() {
            return Err(Error::WeightOfTope(self.to_string()));
        }
        Ok(mask_to_indices(self.zero_mask())
            .into_iter()
            .flat_map(|i| [VarId::plus(i), VarId::minus(i)])
            .collect())
    }
}

impl Ord for SignVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            let diff = (self.plus ^ other.plus) | (self.minus ^ other.minus);
            if diff == 0 {
                return Ordering::Equal;
            }
            let i = diff.trailing_zeros() as usize;
            self.get(i).cmp(&other.get(i))
        })
    }
}

impl PartialOrd for SignVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.signs() {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector({self})")
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| {
                Sign::from_char(c).ok_or_else(|| Error::Input(format!("invalid sign {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SignVector::from_signs(&signs)
    }
}

/// One failing axiom instance. `j` is 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub u: Option<SignVector>,
    pub v: Option<SignVector>,
    pub j: Option<usize>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(u) = &self.u {
            parts.push(format!("u={u}"));
        }
        if let Some(v) = &self.v {
            parts.push(format!("v={v}"));
        }
        if let Some(j) = self.j {
            parts.push(format!("j={}", j + 1));
        }
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Witness),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => write!(f, "pass"),
            Outcome::Fail(w) if w.u.is_none() => write!(f, "FAIL"),
            Outcome::Fail(w) => write!(f, "FAIL ({w})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub zero: Outcome,
    pub negation: Outcome,
    pub composition: Outcome,
    pub elimination: Outcome,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes().iter().all(|(_, o)| o.passed())
    }

    pub fn outcomes(&self) -> [(&'static str, &Outcome); 4] {
        [
            ("zero", &self.zero),
            ("negation", &self.negation),
            ("composition", &self.composition),
            ("elimination", &self.elimination),
        ]
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, outcome) in self.outcomes() {
            writeln!(f, "  {name}: {outcome}")?;
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "axioms: {verdict}")
    }
}

/// A finite set of sign vectors of equal length, kept in canonical order.
#[derive(Debug, Clone)]
pub struct CovectorSet {
    n: usize,
    members: Vec<SignVector>,
    index: HashMap<SignVector, usize>,
    verified: bool,
}

impl PartialEq for CovectorSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members == other.members
    }
}

impl Eq for CovectorSet {}

impl CovectorSet {
    /// Builds an unverified set. Duplicates and length mismatches are errors.
    pub fn new(n: usize, members: impl IntoIterator<Item = SignVector>) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SET {
            return Err(Error::UnsupportedSize(n));
        }
        let mut members: Vec<SignVector> = members.into_iter().collect();
        for m in &members {
            if m.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: m.len(),
                });
            }
        }
        members.sort();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(w[0].to_string()));
        }
        Ok(Self::from_sorted(n, members))
    }

    /// Like [`CovectorSet::new`] but silently merges duplicates.
    pub fn from_iter_dedup(n: usize, members: impl IntoIterator<Item = SignVector>) -> Result<Self> {
        let mut v: Vec<SignVector> = members.into_iter().collect();
        v.sort();
        v.dedup();
        Self::new(n, v)
    }

    fn from_sorted(n: usize, members: Vec<SignVector>) -> Self {
        let index = members.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        CovectorSet {
            n,
            members,
            index,
            verified: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SignVector] {
        &self.members
    }

    pub fn contains(&self, u: &SignVector) -> bool {
        self.index.contains_key(u)
    }

    pub fn position(&self, u: &SignVector) -> Option<usize> {
        self.index.get(u).copied()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn has_zero(&self) -> bool {
        self.members.first().is_some_and(|_| {
            SignVector::zero(self.n)
                .map(|z| self.contains(&z))
                .unwrap_or(false)
        })
    }

    /// Members with no zero coordinate, in canonical order.
    pub fn topes(&self) -> Vec<SignVector> {
        self.members.iter().filter(|m| m.is_tope()).copied().collect()
    }

    /// Coordinates (0-based) on which every member vanishes.
    pub fn loops(&self) -> Vec<usize> {
        let support = self.members.iter().fold(0u64, |acc, m| acc | m.support());
        mask_to_indices(!support & full_mask(self.n))
    }

    /// The set with one member removed; the result is unverified.
    pub fn without(&self, u: &SignVector) -> CovectorSet {
        let members = self.members.iter().filter(|m| *m != u).copied().collect();
        Self::from_sorted(self.n, members)
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let zero = match SignVector::zero(self.n) {
            Ok(z) if self.contains(&z) => Outcome::Pass,
            _ => Outcome::Fail(Witness {
                u: None,
                v: None,
                j: None,
            }),
        };

        let negation = self
            .members
            .iter()
            .rev()
            .find(|u| !self.contains(&u.negate()))
            .map_or(Outcome::Pass, |u| {
                Outcome::Fail(Witness {
                    u: Some(*u),
                    v: None,
                    j: None,
                })
            });

        let mut composition = Outcome::Pass;
        'comp: for u in self.members.iter().rev() {
            for v in self.members.iter().rev() {
                if !self.contains(&u.compose_unchecked(v)) {
                    composition = Outcome::Fail(Witness {
                        u: Some(*u),
                        v: Some(*v),
                        j: None,
                    });
                    break 'comp;
                }
            }
        }

        let mut elimination = Outcome::Pass;
        'elim: for u in self.members.iter().rev() {
            for v in self.members.iter().rev() {
                let sep = u.separation_unchecked(v);
                if sep == 0 {
                    continue;
                }
                let uv = u.compose_unchecked(v);
                let keep = !sep & full_mask(self.n);
                for j in mask_to_indices(sep) {
                    let bit = 1u64 << j;
                    let found = self.members.iter().any(|w| {
                        w.support() & bit == 0
                            && w.plus & keep == uv.plus & keep
                            && w.minus & keep == uv.minus & keep
                    });
                    if !found {
                        elimination = Outcome::Fail(Witness {
                            u: Some(*u),
                            v: Some(*v),
                            j: Some(j),
                        });
                        break 'elim;
                    }
                }
            }
        }

        AxiomReport {
            zero,
            negation,
            composition,
            elimination,
        }
    }

    /// Validates the covector axioms and marks the set verified on success.
    pub fn into_verified(mut self) -> std::result::Result<CovectorSet, AxiomReport> {
        let report = self.check_axioms();
        if report.passed() {
            self.verified = true;
            Ok(self)
        } else {
            Err(report)
        }
    }

    /// Longest chain length ending at each member, aligned with `members()`.
    fn chain_heights(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by_key(|&i| self.members[i].support().count_ones());
        let mut height = vec![0usize; self.members.len()];
        for (k, &i) in order.iter().enumerate() {
            let vi = self.members[i];
            let mut h = 0;
            for &j in &order[..k] {
                let vj = self.members[j];
                if vj.support() != vi.support() && vj.leq_unchecked(&vi) {
                    h = h.max(height[j] + 1);
                }
            }
            height[i] = h;
        }
        height
    }

    /// Length of a longest chain in the face order.
    pub fn rank(&self) -> Result<usize> {
        if !self.verified {
            return Err(Error::Unverified);
        }
        Ok(self.chain_heights().into_iter().max().unwrap_or(0))
    }

    /// Length of a longest chain from the zero vector up to `u`.
    pub fn poset_rank(&self, u: &SignVector) -> Result<usize> {
        Ok(self.poset_ranks()?[self.require(u)?])
    }

    /// All poset ranks, aligned with `members()`.
    pub fn poset_ranks(&self) -> Result<Vec<usize>> {
        if !self.verified {
            return Err(Error::Unverified);
        }
        Ok(self.chain_heights())
    }

    fn require(&self, u: &SignVector) -> Result<usize> {
        self.position(u)
            .ok_or_else(|| Error::NotAMember(u.to_string()))
    }
}

/// Covectors of a base set agreeing with an anchor outside a free index set.
#[derive(Debug, Clone)]
pub struct FiberView {
    base: Arc<CovectorSet>,
    free: u64,
    anchor: SignVector,
    members: Vec<SignVector>,
    index: HashSet<SignVector>,
}

impl FiberView {
    /// The topal fiber relative to `free` (0-based indices) and `anchor`.
    pub fn new(base: Arc<CovectorSet>, free: &[usize], anchor: SignVector) -> Result<Self> {
        let n = base.n();
        if anchor.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: anchor.len(),
            });
        }
        let mut free_mask = 0u64;
        for &i in free {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i + 1, n });
            }
            free_mask |= 1 << i;
        }
        if !base.contains(&anchor) {
            return Err(Error::NotAMember(anchor.to_string()));
        }
        let fixed = !free_mask & full_mask(n);
        if let Some(i) = mask_to_indices(fixed & anchor.zero_mask()).first() {
            return Err(Error::AnchorZeroAtFixed {
                anchor: anchor.to_string(),
                index: i + 1,
            });
        }
        let members: Vec<SignVector> = base
            .members()
            .iter()
            .filter(|v| v.plus & fixed == anchor.plus & fixed && v.minus & fixed == anchor.minus & fixed)
            .copied()
            .collect();
        let index = members.iter().copied().collect();
        Ok(FiberView {
            base,
            free: free_mask,
            anchor,
            members,
            index,
        })
    }

    /// The whole set viewed as a fiber with every index free. The anchor is the
    /// first member; with no fixed index it constrains nothing.
    pub fn whole(base: Arc<CovectorSet>) -> Result<Self> {
        let anchor = *base.members().first().ok_or(Error::EmptyFiber)?;
        let all: Vec<usize> = (0..base.n()).collect();
        FiberView::new(base, &all, anchor)
    }

    pub fn base(&self) -> &Arc<CovectorSet> {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn anchor(&self) -> &SignVector {
        &self.anchor
    }

    pub fn free_mask(&self) -> u64 {
        self.free
    }

    pub fn free_indices(&self) -> Vec<usize> {
        mask_to_indices(self.free)
    }

    pub fn is_whole(&self) -> bool {
        self.free == full_mask(self.n())
    }

    pub fn members(&self) -> &[SignVector] {
        &self.members
    }

    pub fn contains(&self, u: &SignVector) -> bool {
        self.index.contains(u)
    }

    pub fn topes(&self) -> Vec<SignVector> {
        self.members.iter().filter(|m| m.is_tope()).copied().collect()
    }

    pub fn non_topes(&self) -> Vec<SignVector> {
        self.members.iter().filter(|m| !m.is_tope()).copied().collect()
    }

    /// Free coordinates (0-based) vanishing on every fiber member.
    pub fn loops(&self) -> Vec<usize> {
        let support = self.members.iter().fold(0u64, |acc, m| acc | m.support());
        mask_to_indices(self.free & !support)
    }

    pub fn require_loop_free(&self) -> Result<()> {
        let loops = self.loops();
        if loops.is_empty() {
            Ok(())
        } else {
            Err(Error::Loops(loops.into_iter().map(|i| i + 1).collect()))
        }
    }

    /// The unique maximum of `{w in fiber | w <= t, w_i = 0}`, or `None` when
    /// that set is empty.
    pub fn boundary_max(&self, t: &SignVector, i: usize) -> Result<Option<SignVector>> {
        if !t.is_tope() || !self.contains(t) {
            return Err(Error::NotATope(t.to_string()));
        }
        if i >= self.n() || self.free >> i & 1 == 0 {
            return Err(Error::Precondition(format!(
                "boundary index {} is not a free index",
                i + 1
            )));
        }
        let bit = 1u64 << i;
        let candidates: Vec<&SignVector> = self
            .members
            .iter()
            .filter(|w| w.support() & bit == 0 && w.leq_unchecked(t))
            .collect();
        let Some(top) = candidates.iter().max_by_key(|w| w.support().count_ones()) else {
            return Ok(None);
        };
        if candidates.iter().all(|w| w.leq_unchecked(top)) {
            Ok(Some(**top))
        } else {
            Err(Error::NonUniqueBoundary {
                tope: t.to_string(),
                index: i + 1,
            })
        }
    }

    /// For a free index `i`: the boundary maximum of every tope (or `None`).
    pub fn boundary_column(&self, i: usize) -> Result<Vec<(SignVector, Option<SignVector>)>> {
        self.topes()
            .into_iter()
            .map(|t| Ok((t, self.boundary_max(&t, i)?)))
            .collect()
    }

    /// Half the number of topes whose `i`-boundary maximum is `u`.
    pub fn multiplicity_at(&self, u: &SignVector, i: usize) -> Result<usize> {
        let count = self
            .boundary_column(i)?
            .into_iter()
            .filter(|(_, b)| b.as_ref() == Some(u))
            .count();
        if count % 2 == 1 {
            return Err(Error::OddBoundaryCount {
                covector: u.to_string(),
                index: i + 1,
                count,
            });
        }
        Ok(count / 2)
    }

    fn admissible_indices(&self, u: &SignVector) -> Result<Vec<usize>> {
        if !self.contains(u) {
            return Err(Error::NotAMember(u.to_string()));
        }
        if u.is_tope() {
            return Err(Error::WeightOfTope(u.to_string()));
        }
        let idx = mask_to_indices(u.zero_mask() & self.free);
        if idx.is_empty() {
            return Err(Error::NoAdmissibleIndex(u.to_string()));
        }
        Ok(idx)
    }

    /// The multiplicity of a non-tope member, anchored at its smallest
    /// admissible index and cross-checked against every other one.
    pub fn multiplicity(&self, u: &SignVector) -> Result<usize> {
        let idx = self.admissible_indices(u)?;
        let first = self.multiplicity_at(u, idx[0])?;
        for &j in &idx[1..] {
            let other = self.multiplicity_at(u, j)?;
            if other != first {
                return Err(Error::MultiplicityDisagreement {
                    covector: u.to_string(),
                    first: idx[0] + 1,
                    first_value: first,
                    other: j + 1,
                    other_value: other,
                });
            }
        }
        Ok(first)
    }

    /// Multiplicities of all non-tope members in canonical order. Computes each
    /// boundary column once, with the same cross-checks as [`Self::multiplicity`].
    pub fn multiplicities(&self) -> Result<Vec<(SignVector, usize)>> {
        let mut counts: HashMap<(SignVector, usize), usize> = HashMap::new();
        for i in self.free_indices() {
            for (_, b) in self.boundary_column(i)? {
                if let Some(b) = b {
                    *counts.entry((b, i)).or_default() += 1;
                }
            }
        }
        self.non_topes()
            .into_iter()
            .map(|u| {
                let idx = self.admissible_indices(&u)?;
                let mut value = None;
                for &i in &idx {
                    let count = counts.get(&(u, i)).copied().unwrap_or(0);
                    if count % 2 == 1 {
                        return Err(Error::OddBoundaryCount {
                            covector: u.to_string(),
                            index: i + 1,
                            count,
                        });
                    }
                    match value {
                        None => value = Some((i, count / 2)),
                        Some((first, v)) if v != count / 2 => {
                            return Err(Error::MultiplicityDisagreement {
                                covector: u.to_string(),
                                first: first + 1,
                                first_value: v,
                                other: i + 1,
                                other_value: count / 2,
                            })
                        }
                        Some(_) => {}
                    }
                }
                Ok((u, value.map(|(_, v)| v).unwrap_or(0)))
            })
            .collect()
    }

    /// Number of topes whose `i`-boundary is nonempty.
    pub fn touching_topes(&self, i: usize) -> Result<usize> {
        Ok(self
            .boundary_column(i)?
            .iter()
            .filter(|(_, b)| b.is_some())
            .count())
    }

    /// Structural validity of a fiber that need not contain the zero vector:
    /// anchor agreement, composition closure, elimination within the fiber, and
    /// well-defined boundaries and multiplicities.
    pub fn check(&self) -> FiberReport {
        let fixed = !self.free & full_mask(self.n());
        let anchored = self.members.iter().all(|v| {
            v.plus & fixed == self.anchor.plus & fixed && v.minus & fixed == self.anchor.minus & fixed
        });
        let mut composition = Outcome::Pass;
        'comp: for u in self.members.iter().rev() {
            for v in self.members.iter().rev() {
                if !self.contains(&u.compose_unchecked(v)) {
                    composition = Outcome::Fail(Witness {
                        u: Some(*u),
                        v: Some(*v),
                        j: None,
                    });
                    break 'comp;
                }
            }
        }
        let mut elimination = Outcome::Pass;
        'elim: for u in self.members.iter().rev() {
            for v in self.members.iter().rev() {
                let sep = u.separation_unchecked(v);
                let uv = u.compose_unchecked(v);
                let keep = !sep & full_mask(self.n());
                for j in mask_to_indices(sep) {
                    let bit = 1u64 << j;
                    let found = self.members.iter().any(|w| {
                        w.support() & bit == 0
                            && w.plus & keep == uv.plus & keep
                            && w.minus & keep == uv.minus & keep
                    });
                    if !found {
                        elimination = Outcome::Fail(Witness {
                            u: Some(*u),
                            v: Some(*v),
                            j: Some(j),
                        });
                        break 'elim;
                    }
                }
            }
        }
        let multiplicities = self.multiplicities().map(|_| ()).map_err(|e| e.to_string());
        FiberReport {
            anchored,
            loops: self.loops(),
            composition,
            elimination,
            multiplicities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    pub anchored: bool,
    pub loops: Vec<usize>,
    pub composition: Outcome,
    pub elimination: Outcome,
    pub multiplicities: std::result::Result<(), String>,
}

impl FiberReport {
    pub fn passed(&self) -> bool {
        self.anchored
            && self.loops.is_empty()
            && self.composition.passed()
            && self.elimination.passed()
            && self.multiplicities.is_ok()
    }
}

impl fmt::Display for FiberReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pf = |b: bool| if b { "pass" } else { "FAIL" };
        writeln!(f, "  anchor agreement: {}", pf(self.anchored))?;
        if self.loops.is_empty() {
            writeln!(f, "  loop-free: pass")?;
        } else {
            let l: Vec<String> = self.loops.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(f, "  loop-free: FAIL ({})", l.join(","))?;
        }
        for (name, o) in [("composition", &self.composition), ("elimination", &self.elimination)] {
            match o {
                Outcome::Pass => writeln!(f, "  {name}: pass")?,
                Outcome::Fail(w) => writeln!(f, "  {name}: FAIL ({w})")?,
            }
        }
        match &self.multiplicities {
            Ok(()) => writeln!(f, "  multiplicities: pass")?,
            Err(e) => writeln!(f, "  multiplicities: FAIL ({e})")?,
        }
        write!(f, "fiber: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    fn set(n: usize, items: &[&str]) -> CovectorSet {
        CovectorSet::new(n, items.iter().map(|s| sv(s))).unwrap()
    }

    pub(crate) fn two_lines() -> CovectorSet {
        let mut all = Vec::new();
        for a in ["-", "0", "+"] {
            for b in ["-", "0", "+"] {
                all.push(sv(&format!("{a}{b}")));
            }
        }
        CovectorSet::new(2, all).unwrap().into_verified().unwrap()
    }

    /// Lines x = 0, y = 0, x - y = 0 in the plane: the origin, six rays, six chambers.
    pub(crate) fn three_lines() -> CovectorSet {
        let sg = |v: i32| match v.signum() {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => Sign::Zero,
        };
        let points = [
            (0, 0),
            (1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1),
            (2, 1), (1, 2), (-1, 1), (-2, -1), (-1, -2), (1, -1),
        ];
        let vs = points
            .into_iter()
            .map(|(x, y)| SignVector::from_signs(&[sg(x), sg(y), sg(x - y)]).unwrap());
        CovectorSet::new(3, vs).unwrap().into_verified().unwrap()
    }

    #[test]
    fn compose_examples() {
        assert_eq!(sv("+0").compose(&sv("0-")).unwrap(), sv("+-"));
        assert_eq!(sv("+-").compose(&sv("+-")).unwrap(), sv("+-"));
        assert_eq!(sv("00").compose(&sv("-+")).unwrap(), sv("-+"));
        assert!(matches!(
            sv("+").compose(&sv("+-")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn separation_examples() {
        assert_eq!(mask_to_indices(sv("+-").separation(&sv("--")).unwrap()), vec![0]);
        assert_eq!(sv("+0-").separation(&sv("+0-")).unwrap(), 0);
        assert_eq!(mask_to_indices(sv("+0-").separation(&sv("-0+")).unwrap()), vec![0, 2]);
        assert!(sv("+").separation(&sv("++")).is_err());
    }

    #[test]
    fn negate_examples() {
        assert_eq!(sv("+0-").negate(), sv("-0+"));
        assert_eq!(sv("00").negate(), sv("00"));
        assert_eq!(sv("++").negate().negate(), sv("++"));
    }

    #[test]
    fn leq_examples() {
        assert!(sv("0+").leq(&sv("++")).unwrap());
        assert!(!sv("++").leq(&sv("0+")).unwrap());
        for v in two_lines().members() {
            assert!(sv("00").leq(v).unwrap());
        }
        assert!(sv("0").leq(&sv("00")).is_err());
    }

    #[test]
    fn canonical_order_minus_zero_plus() {
        let mut v = vec![sv("+0"), sv("0+"), sv("-+"), sv("00"), sv("--")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["--", "-+", "00", "0+", "+0"]);
    }

    #[test]
    fn axiom_examples() {
        assert!(set(1, &["0", "+", "-"]).check_axioms().passed());

        let r = set(1, &["0", "+"]).check_axioms();
        assert_eq!(
            r.negation,
            Outcome::Fail(Witness {
                u: Some(sv("+")),
                v: None,
                j: None
            })
        );

        let r = set(2, &["00", "++", "--", "+-", "-+"]).check_axioms();
        assert!(r.zero.passed() && r.negation.passed() && r.composition.passed());
        assert_eq!(
            r.elimination,
            Outcome::Fail(Witness {
                u: Some(sv("++")),
                v: Some(sv("+-")),
                j: Some(1)
            })
        );
    }

    #[test]
    fn duplicate_members_rejected() {
        assert!(matches!(
            CovectorSet::new(1, [sv("+"), sv("+")]),
            Err(Error::Duplicate(_))
        ));
        assert!(CovectorSet::new(65, []).is_err());
    }

    #[test]
    fn loops_examples() {
        assert!(set(1, &["0", "+", "-"]).loops().is_empty());
        assert_eq!(set(2, &["00", "+0", "-0"]).loops(), vec![1]);
        assert!(two_lines().loops().is_empty());
    }

    #[test]
    fn rank_examples() {
        let one = set(1, &["0", "+", "-"]).into_verified().unwrap();
        assert_eq!(one.rank().unwrap(), 1);
        assert_eq!(two_lines().rank().unwrap(), 2);
        let three = three_lines();
        assert_eq!(three.len(), 13);
        assert_eq!(three.rank().unwrap(), 2);
        assert!(matches!(set(1, &["0", "+", "-"]).rank(), Err(Error::Unverified)));
    }

    #[test]
    fn poset_rank_examples() {
        let s = two_lines();
        assert_eq!(s.poset_rank(&sv("00")).unwrap(), 0);
        for t in s.topes() {
            assert_eq!(s.poset_rank(&t).unwrap(), 2);
        }
        assert_eq!(s.poset_rank(&sv("0+")).unwrap(), 1);
        assert!(matches!(
            three_lines().poset_rank(&sv("+-0")),
            Err(Error::NotAMember(_))
        ));
    }

    #[test]
    fn topes_examples() {
        let t = set(1, &["0", "+", "-"]).topes();
        assert_eq!(t, vec![sv("-"), sv("+")]);
        assert_eq!(two_lines().topes().len(), 4);
    }

    #[test]
    fn fiber_examples() {
        let s = Arc::new(two_lines());
        let whole = FiberView::new(s.clone(), &[0, 1], sv("00")).unwrap();
        assert_eq!(whole.members().len(), 9);

        let single = FiberView::new(s.clone(), &[], sv("++")).unwrap();
        assert_eq!(single.members(), &[sv("++")]);

        let f = FiberView::new(s.clone(), &[0], sv("++")).unwrap();
        assert_eq!(f.members(), &[sv("-+"), sv("0+"), sv("++")]);

        assert!(matches!(
            FiberView::new(s.clone(), &[0], sv("+0")),
            Err(Error::AnchorZeroAtFixed { index: 2, .. })
        ));
        let absent = Arc::new(set(2, &["00", "++", "--"]));
        assert!(matches!(
            FiberView::new(absent, &[0], sv("+-")),
            Err(Error::NotAMember(_))
        ));
    }

    #[test]
    fn boundary_examples() {
        let one = Arc::new(set(1, &["0", "+", "-"]));
        let f = FiberView::whole(one).unwrap();
        assert_eq!(f.boundary_max(&sv("+"), 0).unwrap(), Some(sv("0")));

        let f = FiberView::whole(Arc::new(two_lines())).unwrap();
        assert_eq!(f.boundary_max(&sv("++"), 0).unwrap(), Some(sv("0+")));

        let f = FiberView::whole(Arc::new(three_lines())).unwrap();
        // the chamber around (2, 1) is bounded by the rays on y = 0 and x = y
        let far = sv("+++");
        assert_eq!(f.boundary_max(&far, 0).unwrap(), Some(sv("000")));
        assert!(f.boundary_max(&sv("0-+"), 0).is_err());
    }

    #[test]
    fn non_unique_boundary_is_an_error() {
        // two incomparable maxima below ++ with coordinate 1 zero
        let s = Arc::new(set(3, &["+++", "0+0", "00+"]));
        let f = FiberView::whole(s).unwrap();
        assert!(matches!(
            f.boundary_max(&sv("+++"), 0),
            Err(Error::NonUniqueBoundary { index: 1, .. })
        ));
    }

    #[test]
    fn multiplicity_examples() {
        let f = FiberView::whole(Arc::new(set(1, &["0", "+", "-"]))).unwrap();
        assert_eq!(f.multiplicity(&sv("0")).unwrap(), 1);

        let f = FiberView::whole(Arc::new(two_lines())).unwrap();
        assert_eq!(f.multiplicity(&sv("00")).unwrap(), 0);
        assert_eq!(f.multiplicity(&sv("0+")).unwrap(), 1);

        let f = FiberView::whole(Arc::new(three_lines())).unwrap();
        assert_eq!(f.multiplicity(&sv("000")).unwrap(), 1);
        assert!(matches!(f.multiplicity(&sv("+-+")), Err(Error::WeightOfTope(_))));
    }

    #[test]
    fn odd_boundary_count_is_an_error() {
        let f = FiberView::whole(Arc::new(set(1, &["0", "+"]))).unwrap();
        assert!(matches!(
            f.multiplicity(&sv("0")),
            Err(Error::OddBoundaryCount { count: 1, .. })
        ));
    }

    #[test]
    fn weight_exponent_examples() {
        assert_eq!(sv("0+").weight_exponents().unwrap(), vec![VarId::plus(0), VarId::minus(0)]);
        assert_eq!(sv("00").weight_exponents().unwrap().len(), 4);
        assert!(matches!(sv("++").weight_exponents(), Err(Error::WeightOfTope(_))));
    }

    #[test]
    fn multiplicities_match_single_queries() {
        let f = FiberView::whole(Arc::new(three_lines())).unwrap();
        for (u, b) in f.multiplicities().unwrap() {
            assert_eq!(f.multiplicity(&u).unwrap(), b);
        }
    }
}

//! Covector sets of rational hyperplane arrangements.
//!
//! A sign vector is kept when some point of `Q^d` realizes it, which is decided
//! exactly by [`crate::fm::feasible`]. Affine arrangements are handled by
//! homogenizing and taking the fiber on the positive side of the new
//! hyperplane `t = 0`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fm::{self, Constraint, Rel};
use crate::signvec::{CovectorSet, FiberView, Sign, SignVector};

/// `⟨normal, x⟩ = offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: Vec<BigRational>,
    pub offset: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalArrangement {
    dim: usize,
    affine: bool,
    hyperplanes: Vec<Hyperplane>,
}

/// Which fiber of a homogenized arrangement is the original affine one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSelector {
    /// 0-based free indices.
    pub free: Vec<usize>,
    pub anchor: SignVector,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArrangement(format!("not a rational: {s:?}"));
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
    };
    Ok(r)
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(Error::InvalidArrangement(format!(
            "rationals must be integers or \"p/q\" strings, got {other}"
        ))),
    }
}

#[derive(Deserialize, Serialize)]
struct RawHyperplane {
    normal: Vec<Value>,
    #[serde(default)]
    offset: Option<Value>,
}

#[derive(Deserialize, Serialize)]
struct RawArrangement {
    dim: usize,
    #[serde(default)]
    affine: bool,
    hyperplanes: Vec<RawHyperplane>,
}

impl RationalArrangement {
    pub fn new(dim: usize, affine: bool, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArrangement("dimension must be positive".into()));
        }
        if hyperplanes.len() > 64 {
            return Err(Error::UnsupportedSize(hyperplanes.len()));
        }
        for (k, h) in hyperplanes.iter().enumerate() {
            if h.normal.len() != dim {
                return Err(Error::InvalidArrangement(format!(
                    "hyperplane {} has {} coefficients, expected {dim}",
                    k + 1,
                    h.normal.len()
                )));
            }
            if h.normal.iter().all(Zero::is_zero) {
                return Err(Error::InvalidArrangement(format!("hyperplane {} has a zero normal", k + 1)));
            }
            if !affine && !h.offset.is_zero() {
                return Err(Error::InvalidArrangement(format!(
                    "hyperplane {} has a nonzero offset in a central arrangement",
                    k + 1
                )));
            }
        }
        Ok(RationalArrangement {
            dim,
            affine,
            hyperplanes,
        })
    }

    /// Central arrangement from integer normals.
    pub fn central_from_ints(dim: usize, normals: &[Vec<i64>]) -> Result<Self> {
        let hs = normals
            .iter()
            .map(|v| Hyperplane {
                normal: v.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
                offset: BigRational::zero(),
            })
            .collect();
        Self::new(dim, false, hs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawArrangement =
            serde_json::from_str(text).map_err(|e| Error::InvalidArrangement(e.to_string()))?;
        let hs = raw
            .hyperplanes
            .iter()
            .map(|h| {
                Ok(Hyperplane {
                    normal: h.normal.iter().map(rational_from_json).collect::<Result<_>>()?,
                    offset: match &h.offset {
                        Some(v) => rational_from_json(v)?,
                        None => BigRational::zero(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.dim, raw.affine, hs)
    }

    pub fn to_json(&self) -> String {
        let raw = RawArrangement {
            dim: self.dim,
            affine: self.affine,
            hyperplanes: self
                .hyperplanes
                .iter()
                .map(|h| RawHyperplane {
                    normal: h.normal.iter().map(|r| Value::String(format_rational(r))).collect(),
                    offset: Some(Value::String(format_rational(&h.offset))),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("arrangement serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    /// Sign of `⟨h_i, x⟩ - c_i` for each hyperplane.
    pub fn signs_at(&self, x: &[BigRational]) -> Result<SignVector> {
        let signs: Vec<Sign> = self
            .hyperplanes
            .iter()
            .map(|h| {
                let v: BigRational = h.normal.iter().zip(x).map(|(a, b)| a * b).sum::<BigRational>() - &h.offset;
                sign_of(&v)
            })
            .collect();
        SignVector::from_signs(&signs)
    }

    fn constraint(&self, i: usize, s: Sign) -> Constraint {
        let h = &self.hyperplanes[i];
        let (coeffs, constant): (Vec<BigRational>, BigRational) = match s {
            Sign::Minus => (h.normal.iter().map(|a| -a).collect(), h.offset.clone()),
            _ => (h.normal.clone(), -h.offset.clone()),
        };
        let rel = if s == Sign::Zero { Rel::Eq } else { Rel::Gt };
        Constraint::new(coeffs, constant, rel)
    }

    fn prefix_feasible(&self, prefix: &[Sign]) -> bool {
        let cs: Vec<Constraint> = prefix.iter().enumerate().map(|(i, &s)| self.constraint(i, s)).collect();
        fm::feasible(&cs)
    }
}

fn sign_of(v: &BigRational) -> Sign {
    if v.is_positive() {
        Sign::Plus
    } else if v.is_negative() {
        Sign::Minus
    } else {
        Sign::Zero
    }
}

/// Whether some point has exactly the sign pattern `sigma`.
pub fn sign_feasible(arr: &RationalArrangement, sigma: &SignVector) -> Result<bool> {
    if arr.affine {
        return Err(Error::Precondition("homogenize an affine arrangement first".into()));
    }
    if sigma.len() != arr.len() {
        return Err(Error::LengthMismatch {
            left: sigma.len(),
            right: arr.len(),
        });
    }
    let signs: Vec<Sign> = sigma.signs().collect();
    Ok(arr.prefix_feasible(&signs))
}

/// All realized sign vectors of a central arrangement, as a verified set.
///
/// Depth-first over coordinates; a prefix whose constraints are already
/// infeasible is not extended.
pub fn enumerate_covectors(arr: &RationalArrangement) -> Result<CovectorSet> {
    if arr.affine {
        return Err(Error::Precondition("homogenize an affine arrangement first".into()));
    }
    let n = arr.len();
    if n == 0 {
        return Err(Error::UnsupportedSize(0));
    }
    let mut found = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    dfs(arr, &mut prefix, &mut found)?;
    let set = CovectorSet::new(n, found)?;
    let loops = set.loops();
    if !loops.is_empty() {
        return Err(Error::Loops(loops.iter().map(|i| i + 1).collect()));
    }
    set.into_verified().map_err(|report| {
        Error::Precondition(format!("generated set failed the covector axioms:\n{report}"))
    })
}

fn dfs(arr: &RationalArrangement, prefix: &mut Vec<Sign>, out: &mut Vec<SignVector>) -> Result<()> {
    if prefix.len() == arr.len() {
        out.push(SignVector::from_signs(prefix)?);
        return Ok(());
    }
    for s in [Sign::Minus, Sign::Zero, Sign::Plus] {
        prefix.push(s);
        if arr.prefix_feasible(prefix) {
            dfs(arr, prefix, out)?;
        }
        prefix.pop();
    }
    Ok(())
}

/// Central arrangement in one more variable `t`: each `⟨h,x⟩ = c` becomes
/// `⟨h,x⟩ - c t = 0`, and `t = 0` is appended last. The affine faces are the
/// fiber with every original index free and `+` on the new one.
pub fn homogenize(arr: &RationalArrangement) -> Result<(RationalArrangement, FiberSelector)> {
    if !arr.affine {
        return Err(Error::Precondition("arrangement is already central".into()));
    }
    let n = arr.len();
    let mut hs: Vec<Hyperplane> = arr
        .hyperplanes
        .iter()
        .map(|h| {
            let mut normal = h.normal.clone();
            normal.push(-h.offset.clone());
            Hyperplane {
                normal,
                offset: BigRational::zero(),
            }
        })
        .collect();
    let mut t = vec![BigRational::zero(); arr.dim];
    t.push(BigRational::from_integer(1.into()));
    hs.push(Hyperplane {
        normal: t,
        offset: BigRational::zero(),
    });
    let central = RationalArrangement::new(arr.dim + 1, false, hs)?;
    // the covector of the point (0, ..., 0, 1): a member with + at the new index
    let mut origin = vec![BigRational::zero(); arr.dim];
    origin.push(BigRational::from_integer(1.into()));
    let anchor = central.signs_at(&origin)?;
    Ok((
        central,
        FiberSelector {
            free: (0..n).collect(),
            anchor,
        },
    ))
}

/// The face fiber of an arrangement: the whole covector set when central, the
/// `t > 0` fiber of the homogenization when affine.
pub fn arrangement_fiber(arr: &RationalArrangement) -> Result<FiberView> {
    if arr.affine {
        let (central, sel) = homogenize(arr)?;
        let set = Arc::new(enumerate_covectors(&central)?);
        FiberView::new(set, &sel.free, sel.anchor)
    } else {
        FiberView::whole(Arc::new(enumerate_covectors(arr)?))
    }
}

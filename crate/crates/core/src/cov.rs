//! The `.cov` text format: an `n=` header, an optional fiber declaration
//! (`I=` free indices, 1-based, and `u=` anchor), then one sign string per line.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signvec::{CovectorSet, FiberView, SignVector};

/// Fiber declaration from a file header or the command line. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSpec {
    pub free: Vec<usize>,
    pub anchor: Option<SignVector>,
}

impl FiberSpec {
    /// Builds the fiber. Without an anchor the free set must be everything.
    pub fn view(&self, base: Arc<CovectorSet>) -> Result<FiberView> {
        match self.anchor {
            Some(u) => FiberView::new(base, &self.free, u),
            None if self.free.len() == base.n() => FiberView::whole(base),
            None => Err(Error::Input(
                "a fiber with fixed indices needs an anchor (u=...)".into(),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CovFile {
    pub set: CovectorSet,
    pub fiber: Option<FiberSpec>,
}

/// Parses `1,3,5` or ranges like `1-9` into sorted 0-based indices.
pub fn parse_indices(text: &str, n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::Input(format!("bad index list entry {part:?}"));
        let (a, b) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?),
            None => {
                let a = part.parse::<usize>().map_err(|_| bad())?;
                (a, a)
            }
        };
        for i in a..=b {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            out.push(i - 1);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn format_indices(free: &[usize]) -> String {
    free.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse(text: &str) -> Result<CovFile> {
    let mut n: Option<usize> = None;
    let mut free: Option<(usize, String)> = None;
    let mut anchor: Option<(usize, String)> = None;
    let mut members: Vec<(usize, SignVector)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let value = value.trim().to_string();
            match key.trim() {
                "n" => {
                    if n.is_some() {
                        return Err(err("repeated n= header".into()));
                    }
                    let v: usize = value.parse().map_err(|_| err(format!("bad size {value:?}")))?;
                    if !(1..=64).contains(&v) {
                        return Err(Error::UnsupportedSize(v));
                    }
                    n = Some(v);
                }
                "I" if free.is_none() => free = Some((line_no, value)),
                "u" if anchor.is_none() => anchor = Some((line_no, value)),
                "I" | "u" => return Err(err(format!("repeated {}= header", key.trim()))),
                other => return Err(err(format!("unknown header {other:?}"))),
            }
            continue;
        }
        let Some(size) = n else {
            return Err(err("sign vector before the n= header".into()));
        };
        let v: SignVector = line.parse().map_err(|e: Error| err(e.to_string()))?;
        if v.len() != size {
            return Err(err(format!("expected length {size}, got {}", v.len())));
        }
        if let Some((first, _)) = members.iter().find(|(_, w)| *w == v) {
            return Err(err(format!("duplicate of line {first}: {v}")));
        }
        members.push((line_no, v));
    }
    let n = n.ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        message: "missing n= header".into(),
    })?;
    let set = CovectorSet::new(n, members.into_iter().map(|(_, v)| v))?;
    let fiber = match (free, anchor) {
        (None, None) => None,
        (None, Some((line, _))) => {
            return Err(Error::Parse {
                line,
                message: "u= without I=".into(),
            })
        }
        (Some((line, f)), a) => {
            let free = parse_indices(&f, n).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            let anchor = match a {
                Some((line, s)) => Some(s.parse::<SignVector>().map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?),
                None => None,
            };
            Some(FiberSpec { free, anchor })
        }
    };
    Ok(CovFile { set, fiber })
}

/// Canonical text form: header, optional fiber lines, members in canonical order.
pub fn write(set: &CovectorSet, fiber: Option<&FiberSpec>) -> String {
    let mut out = String::new();
    writeln!(out, "n={}", set.n()).unwrap();
    if let Some(f) = fiber {
        writeln!(out, "I={}", format_indices(&f.free)).unwrap();
        if let Some(u) = &f.anchor {
            writeln!(out, "u={u}").unwrap();
        }
    }
    for v in set.members() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

/// Writes a fiber view: its base set plus the declaration that selects it.
pub fn write_fiber(fiber: &FiberView) -> String {
    let spec = FiberSpec {
        free: fiber.free_indices(),
        anchor: (!fiber.is_whole()).then(|| *fiber.anchor()),
    };
    write(fiber.base(), Some(&spec))
}

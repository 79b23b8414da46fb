//! Wiring diagrams of affine pseudoline arrangements and their face sets.
//!
//! Wires are numbered by their starting position, bottom to top. An event
//! `[lo, hi]` reverses the wires currently at positions `lo..=hi`, which is a
//! single crossing point shared by all of them. A face gets `+` at wire `i`
//! when it lies above that wire.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signvec::{CovectorSet, FiberView, Sign, SignVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiringDiagram {
    pub wires: usize,
    pub events: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WiringReport {
    pub errors: Vec<String>,
    /// Pairs of wires (1-based) that never cross.
    pub parallels: Vec<(usize, usize)>,
    /// Number of events by block size.
    pub blocks: BTreeMap<usize, usize>,
}

impl WiringReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for WiringReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for (size, count) in &self.blocks {
            writeln!(f, "events of size {size}: {count}")?;
        }
        if self.parallels.is_empty() {
            writeln!(f, "parallel pairs: none")?;
        } else {
            let ps: Vec<String> = self.parallels.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            writeln!(f, "parallel pairs: {}", ps.join(" "))?;
        }
        write!(f, "diagram: {}", if self.is_valid() { "VALID" } else { "INVALID" })
    }
}

impl WiringDiagram {
    pub fn new(wires: usize, events: Vec<[usize; 2]>) -> Self {
        WiringDiagram { wires, events }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDiagram(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagram serializes")
    }

    pub fn validate(&self) -> WiringReport {
        let n = self.wires;
        let mut report = WiringReport::default();
        if !(1..=64).contains(&n) {
            report.errors.push(format!("wire count {n} is outside 1..=64"));
            return report;
        }
        let mut pos: Vec<usize> = (0..n).collect();
        let mut crossings = vec![vec![0usize; n]; n];
        for (k, &[lo, hi]) in self.events.iter().enumerate() {
            if hi <= lo || hi >= n {
                report
                    .errors
                    .push(format!("event {} has invalid block [{lo}, {hi}]", k + 1));
                continue;
            }
            *report.blocks.entry(hi - lo + 1).or_default() += 1;
            for a in lo..=hi {
                for b in a + 1..=hi {
                    let (x, y) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
                    crossings[x][y] += 1;
                    if crossings[x][y] == 2 {
                        report
                            .errors
                            .push(format!("wires {} and {} cross twice (event {})", x + 1, y + 1, k + 1));
                    }
                }
            }
            pos[lo..=hi].reverse();
        }
        for (x, row) in crossings.iter().enumerate() {
            for (y, &c) in row.iter().enumerate().skip(x + 1) {
                if c == 0 {
                    report.parallels.push((x + 1, y + 1));
                }
            }
        }
        report
    }

    /// Cells, wire segments and crossing points found by a left-to-right sweep,
    /// packaged as a fiber with every index free.
    pub fn faces(&self) -> Result<FiberView> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidDiagram(report.errors.join("; ")));
        }
        let n = self.wires;
        let mut pos: Vec<usize> = (0..n).collect();
        let mut found: BTreeSet<SignVector> = BTreeSet::new();
        // the wire at position p is + for faces at a height above p
        let at = |pos: &[usize], zero: std::ops::Range<usize>, above_below: usize| -> Result<SignVector> {
            let mut v = SignVector::zero(n)?;
            for (p, &w) in pos.iter().enumerate() {
                if zero.contains(&p) {
                    continue;
                }
                v.set(w, if p < above_below { Sign::Plus } else { Sign::Minus });
            }
            Ok(v)
        };
        let column = |pos: &[usize], found: &mut BTreeSet<SignVector>| -> Result<()> {
            for g in 0..=n {
                found.insert(at(pos, 0..0, g)?);
            }
            for p in 0..n {
                found.insert(at(pos, p..p + 1, p)?);
            }
            Ok(())
        };
        column(&pos, &mut found)?;
        for &[lo, hi] in &self.events {
            found.insert(at(&pos, lo..hi + 1, lo)?);
            pos[lo..=hi].reverse();
            column(&pos, &mut found)?;
        }
        let set = CovectorSet::new(n, found)?;
        FiberView::whole(Arc::new(set))
    }
}

/// Face counts keyed by (degree of the weight with every variable collapsed,
/// multiplicity). Topes are not counted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FaceCensus {
    pub topes: usize,
    pub groups: BTreeMap<(u64, usize), usize>,
}

impl FaceCensus {
    pub fn count(&self, degree: u64, beta: usize) -> usize {
        self.groups.get(&(degree, beta)).copied().unwrap_or(0)
    }
}

impl fmt::Display for FaceCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "topes: {}", self.topes)?;
        for ((d, b), c) in &self.groups {
            write!(f, "\nweight a^{d}, beta {b}: {c}")?;
        }
        Ok(())
    }
}

pub fn face_census(fiber: &FiberView) -> Result<FaceCensus> {
    let mut census = FaceCensus {
        topes: fiber.topes().len(),
        ..Default::default()
    };
    let free = fiber.free_mask();
    for (u, beta) in fiber.multiplicities()? {
        let degree = 2 * (u.zero_mask() & free).count_ones() as u64;
        *census.groups.entry((degree, beta)).or_default() += 1;
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let r = WiringDiagram::new(2, vec![[0, 1]]).validate();
        assert!(r.is_valid());
        assert!(r.parallels.is_empty());
        assert!(!WiringDiagram::new(2, vec![[0, 1], [0, 1]]).validate().is_valid());
        let r = WiringDiagram::new(3, vec![[0, 2]]).validate();
        assert!(r.is_valid());
        assert_eq!(r.blocks.get(&3), Some(&1));
        assert_eq!(WiringDiagram::new(3, vec![]).validate().parallels.len(), 3);
        assert!(!WiringDiagram::new(3, vec![[1, 3]]).validate().is_valid());
        assert!(!WiringDiagram::new(3, vec![[1, 1]]).validate().is_valid());
    }

    #[test]
    fn one_crossing() {
        let f = WiringDiagram::new(2, vec![[0, 1]]).faces().unwrap();
        assert_eq!(f.members().len(), 9);
        assert_eq!(f.topes().len(), 4);
        let c = face_census(&f).unwrap();
        assert_eq!(c.count(2, 1), 4);
        assert_eq!(c.count(4, 0), 1);
    }

    #[test]
    fn triple_point() {
        let f = WiringDiagram::new(3, vec![[0, 2]]).faces().unwrap();
        assert_eq!(f.members().len(), 13);
        let c = face_census(&f).unwrap();
        assert_eq!(c.count(2, 1), 6);
        assert_eq!(c.count(6, 1), 1);
        assert!(f.check().passed());
    }

    #[test]
    fn face_shapes() {
        let f = WiringDiagram::new(4, vec![[0, 1], [1, 3], [0, 1]]).faces().unwrap();
        let topes = f.topes();
        for u in f.non_topes() {
            let above = topes.iter().filter(|t| u.leq(t).unwrap()).count();
            if u.zero_mask().count_ones() == 1 {
                assert_eq!(above, 2, "edge {u}");
            }
        }
    }

    #[test]
    fn parallel_wires() {
        let f = WiringDiagram::new(2, vec![]).faces().unwrap();
        let names: Vec<String> = f.members().iter().map(|v| v.to_string()).collect();
        assert_eq!(names, ["--", "0-", "+-", "+0", "++"]);
    }
}

//! Exact Fourier-Motzkin elimination over the rationals, with strict and
//! non-strict inequalities and equalities.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    /// `> 0`
    Gt,
    /// `>= 0`
    Ge,
    /// `= 0`
    Eq,
}

/// `coeffs · x + constant  rel  0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, constant: BigRational, rel: Rel) -> Self {
        Constraint {
            coeffs,
            constant,
            rel,
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Whether a constraint with no variables left holds.
    fn holds_constant(&self) -> bool {
        match self.rel {
            Rel::Gt => self.constant.is_positive(),
            Rel::Ge => !self.constant.is_negative(),
            Rel::Eq => self.constant.is_zero(),
        }
    }

    /// Positive rescaling so the first nonzero coefficient is ±1. Keeps the
    /// working set free of scalar duplicates.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c /= &lead;
            }
            self.constant /= &lead;
        }
        self
    }

    fn scaled_add(&self, a: &BigRational, other: &Constraint, b: &BigRational) -> Constraint {
        Constraint {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x * a + y * b)
                .collect(),
            constant: &self.constant * a + &other.constant * b,
            rel: self.rel.min(other.rel),
        }
    }
}

/// Decides whether some `x ∈ Q^d` satisfies every constraint. All constraints
/// must have the same number of coefficients.
pub fn feasible(constraints: &[Constraint]) -> bool {
    let Some(dim) = constraints.first().map(|c| c.coeffs.len()) else {
        return true;
    };
    debug_assert!(constraints.iter().all(|c| c.coeffs.len() == dim));

    // equalities first: solve for one variable and substitute it away
    let mut eqs: Vec<Constraint> = Vec::new();
    let mut ineqs: Vec<Constraint> = Vec::new();
    for c in constraints {
        if c.rel == Rel::Eq {
            eqs.push(c.clone());
        } else {
            ineqs.push(c.clone());
        }
    }
    while let Some(eq) = eqs.pop() {
        let Some(j) = eq.coeffs.iter().position(|c| !c.is_zero()) else {
            if !eq.holds_constant() {
                return false;
            }
            continue;
        };
        let pivot = eq.coeffs[j].clone();
        let eliminate = |c: &mut Constraint| {
            if c.coeffs[j].is_zero() {
                return;
            }
            let f = -(&c.coeffs[j] / &pivot);
            *c = c.scaled_add(&BigRational::from_integer(1.into()), &eq, &f);
            c.coeffs[j] = BigRational::zero();
        };
        eqs.iter_mut().for_each(eliminate);
        ineqs.iter_mut().for_each(eliminate);
    }

    let mut set: BTreeSet<Constraint> = BTreeSet::new();
    for c in ineqs {
        if c.is_trivial() {
            if !c.holds_constant() {
                return false;
            }
        } else {
            set.insert(c.normalized());
        }
    }

    for j in 0..dim {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for c in set {
            if c.coeffs[j].is_positive() {
                pos.push(c);
            } else if c.coeffs[j].is_negative() {
                neg.push(c);
            } else {
                rest.insert(c);
            }
        }
        for p in &pos {
            for q in &neg {
                let a = q.coeffs[j].abs();
                let b = p.coeffs[j].abs();
                let mut c = p.scaled_add(&a, q, &b);
                c.coeffs[j] = BigRational::zero();
                if c.is_trivial() {
                    if !c.holds_constant() {
                        return false;
                    }
                } else {
                    rest.insert(c.normalized());
                }
            }
        }
        set = rest;
    }
    set.iter().all(Constraint::holds_constant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn c(coeffs: &[i64], k: i64, rel: Rel) -> Constraint {
        Constraint::new(coeffs.iter().map(|&x| q(x)).collect(), q(k), rel)
    }

    #[test]
    fn strictness_matters() {
        // x > 0 and -x >= 0
        assert!(!feasible(&[c(&[1], 0, Rel::Gt), c(&[-1], 0, Rel::Ge)]));
        assert!(feasible(&[c(&[1], 0, Rel::Ge), c(&[-1], 0, Rel::Ge)]));
    }

    #[test]
    fn equality_substitution() {
        // x = y, x > 0, y < 0
        assert!(!feasible(&[
            c(&[1, -1], 0, Rel::Eq),
            c(&[1, 0], 0, Rel::Gt),
            c(&[0, -1], 0, Rel::Gt),
        ]));
        // x = 1, y = 2, x + y - 3 = 0
        assert!(feasible(&[
            c(&[1, 0], -1, Rel::Eq),
            c(&[0, 1], -2, Rel::Eq),
            c(&[1, 1], -3, Rel::Eq),
        ]));
        assert!(!feasible(&[
            c(&[1, 0], -1, Rel::Eq),
            c(&[0, 1], -2, Rel::Eq),
            c(&[1, 1], -4, Rel::Eq),
        ]));
    }

    #[test]
    fn open_triangle() {
        // x > 0, y > 0, x + y < 1
        let base = [c(&[1, 0], 0, Rel::Gt), c(&[0, 1], 0, Rel::Gt), c(&[-1, -1], 1, Rel::Gt)];
        assert!(feasible(&base));
        let mut more = base.to_vec();
        more.push(c(&[1, 1], -1, Rel::Ge));
        assert!(!feasible(&more));
    }

    #[test]
    fn empty_system() {
        assert!(feasible(&[]));
        assert!(!feasible(&[c(&[0, 0], -1, Rel::Ge)]));
    }
}

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varchenko::realizable::{self, RationalArrangement};
use varchenko::wiring::WiringDiagram;
use varchenko::{CovectorSet, FiberView, IntPolynomial, Monomial, SignVector, VarSpace};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

pub fn sv(s: &str) -> SignVector {
    s.parse().unwrap()
}

pub fn poly(n: usize, s: &str) -> IntPolynomial {
    IntPolynomial::parse(VarSpace::Hyperplanes(n), s).unwrap()
}

/// `1 - a_ip a_im` for 1-based `i`.
pub fn one_minus_b(n: usize, hyperplanes: &[usize]) -> IntPolynomial {
    let term: Vec<String> = hyperplanes.iter().map(|i| format!("a{i}p*a{i}m")).collect();
    poly(n, &format!("1 - {}", term.join("*")))
}

pub fn product(n: usize, factors: &[(IntPolynomial, u32)]) -> IntPolynomial {
    factors.iter().fold(IntPolynomial::one(VarSpace::Hyperplanes(n)), |acc, (f, e)| {
        acc.try_mul(&f.try_pow(*e).unwrap()).unwrap()
    })
}

/// A fiber under test, with its central base set when it has one.
pub struct Entry {
    pub name: String,
    pub fiber: FiberView,
}

impl Entry {
    pub fn central(&self) -> Option<&Arc<CovectorSet>> {
        let base = self.fiber.base();
        (base.is_verified() && base.has_zero()).then_some(base)
    }
}

pub fn central_entry(name: &str, arr: &RationalArrangement) -> Entry {
    Entry {
        name: name.into(),
        fiber: FiberView::whole(Arc::new(realizable::enumerate_covectors(arr).unwrap())).unwrap(),
    }
}

pub fn one_line() -> RationalArrangement {
    RationalArrangement::central_from_ints(1, &[vec![1]]).unwrap()
}

pub fn two_lines() -> RationalArrangement {
    RationalArrangement::central_from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap()
}

pub fn three_lines() -> RationalArrangement {
    RationalArrangement::central_from_ints(2, &[vec![1, 0], vec![0, 1], vec![1, -1]]).unwrap()
}

pub fn arrangement_file(name: &str) -> RationalArrangement {
    RationalArrangement::from_json(&read_data(name)).unwrap()
}

pub fn wiring_file(name: &str) -> WiringDiagram {
    WiringDiagram::from_json(&read_data(name)).unwrap()
}

/// The hand-built fixtures.
pub fn named_corpus() -> Vec<Entry> {
    let mut out = vec![
        central_entry("one line", &one_line()),
        central_entry("two lines", &two_lines()),
        central_entry("three lines", &three_lines()),
        central_entry(
            "three planes",
            &RationalArrangement::central_from_ints(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap(),
        ),
        central_entry(
            "four planes through a line",
            &RationalArrangement::central_from_ints(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0], vec![1, -1, 0]])
                .unwrap(),
        ),
    ];
    // the half-plane x > y cut out of the three-line set
    let three = realizable::enumerate_covectors(&three_lines()).unwrap();
    out.push(Entry {
        name: "three lines, half-plane fiber".into(),
        fiber: FiberView::new(Arc::new(three), &[0, 1], sv("+-+")).unwrap(),
    });
    for (name, file) in [
        ("parallel affine lines", "parallel_lines.json"),
        ("pappus arrangement", "pappus_arrangement.json"),
    ] {
        out.push(Entry {
            name: name.into(),
            fiber: realizable::arrangement_fiber(&arrangement_file(file)).unwrap(),
        });
    }
    for (name, file) in [("pappus wiring", "pappus.json"), ("non-pappus wiring", "nonpappus.json")] {
        out.push(Entry {
            name: name.into(),
            fiber: wiring_file(file).faces().unwrap(),
        });
    }
    out
}

/// Central arrangement with small integer normals, `d <= max_d`, `n <= max_n`.
/// Repeated and parallel normals are allowed.
pub fn random_arrangement(rng: &mut impl Rng, max_d: usize, max_n: usize) -> RationalArrangement {
    let d = rng.gen_range(1..=max_d);
    let n = rng.gen_range(1..=max_n);
    let normals: Vec<Vec<i64>> = (0..n)
        .map(|_| loop {
            let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect();
    RationalArrangement::central_from_ints(d, &normals).unwrap()
}

/// A random valid wiring diagram: events of size 2 or 3 on wires that have not
/// crossed yet, stopping at a random point.
pub fn random_wiring(rng: &mut impl Rng, max_n: usize) -> WiringDiagram {
    let n = rng.gen_range(2..=max_n);
    let mut pos: Vec<usize> = (0..n).collect();
    let mut crossed = vec![vec![false; n]; n];
    let mut events = Vec::new();
    let budget = rng.gen_range(0..=n * (n - 1) / 2);
    for _ in 0..budget {
        let mut options = Vec::new();
        for size in [2usize, 3] {
            for lo in 0..n.saturating_sub(size - 1) {
                let hi = lo + size - 1;
                let fresh = (lo..=hi).all(|a| (a + 1..=hi).all(|b| !crossed[pos[a]][pos[b]]));
                if fresh {
                    options.push([lo, hi]);
                }
            }
        }
        let Some(&[lo, hi]) = options.choose(rng) else { break };
        for a in lo..=hi {
            for b in lo..=hi {
                crossed[pos[a]][pos[b]] = true;
            }
        }
        pos[lo..=hi].reverse();
        events.push([lo, hi]);
    }
    WiringDiagram::new(n, events)
}

pub fn random_corpus(seed: u64, arrangements: usize, wirings: usize) -> Vec<Entry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for k in 0..arrangements {
        let arr = random_arrangement(&mut rng, 3, 6);
        out.push(central_entry(&format!("random arrangement {k}"), &arr));
    }
    for k in 0..wirings {
        let wd = random_wiring(&mut rng, 6);
        out.push(Entry {
            name: format!("random wiring {k} {:?}", wd.events),
            fiber: wd.faces().unwrap(),
        });
    }
    out
}

/// Distance monomial computed straight from sign strings.
fn oracle_distance(c: &SignVector, d: &SignVector, free: u64) -> Monomial {
    let mut pairs = Vec::new();
    for (i, (x, y)) in c.to_string().chars().zip(d.to_string().chars()).enumerate() {
        if free >> i & 1 == 1 && x != y {
            pairs.push((2 * i + usize::from(x == '-'), 1));
        }
    }
    Monomial::from_pairs(pairs).unwrap()
}

/// Determinant by expansion over all permutations of the topes.
pub fn leibniz_determinant(fiber: &FiberView) -> IntPolynomial {
    let space = VarSpace::Hyperplanes(fiber.n());
    let topes = fiber.topes();
    let k = topes.len();
    let mut total = IntPolynomial::zero(space);
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let inversions = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        let mut m = Monomial::one();
        for (r, &c) in perm.iter().enumerate() {
            m = m.try_mul(&oracle_distance(&topes[r], &topes[c], fiber.free_mask())).unwrap();
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        total = total.try_add(&IntPolynomial::from_term(space, m, BigInt::from(sign))).unwrap();
        if !next_permutation(&mut perm) {
            break;
        }
    }
    total
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

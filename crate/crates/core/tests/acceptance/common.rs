//! Random triples and vectors for the property suites.

use std::sync::OnceLock;

use exsym::catalog;
use exsym::extensions::{central_extension, restricted_classes, Cochain2};
use exsym::matrix::vector;
use exsym::rational::{frac, int};
use exsym::{ExtrinsicTriple, Matrix, Scalar, Subspace, Vector};
use proptest::test_runner::{Config, FileFailurePersistence, RngSeed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

/// Trials per property.
pub const CASES: u32 = 128;

/// Deterministic proptest configuration; nothing is written to disk.
pub fn config(seed: u64) -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..Config::default()
    }
}

pub fn catalog_triples() -> &'static [(&'static str, ExtrinsicTriple)] {
    static CELL: OnceLock<Vec<(&'static str, ExtrinsicTriple)>> = OnceLock::new();
    CELL.get_or_init(|| {
        catalog::NAMES
            .iter()
            .map(|&n| (n, catalog::build(n).expect("catalog entry")))
            .collect()
    })
}

/// Basis of the theta-odd, D-closed cocycles with values in R, per entry.
fn restricted_bases() -> &'static [Vec<Cochain2>] {
    static CELL: OnceLock<Vec<Vec<Cochain2>>> = OnceLock::new();
    CELL.get_or_init(|| {
        catalog_triples()
            .iter()
            .map(|(_, t)| restricted_classes(t, 1).expect("valid triple").basis())
            .collect()
    })
}

/// `p/q` with `|p| ≤ 4`, `1 ≤ q ≤ 3`.
pub fn small_rational(rng: &mut Rng8) -> Scalar {
    frac(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn combination(rng: &mut Rng8, n: usize, basis: &[Vector]) -> Vector {
    let mut v = vector::zeros(n);
    for b in basis {
        v = vector::axpy(&v, &small_rational(rng), b);
    }
    v
}

pub fn random_in(rng: &mut Rng8, s: &Subspace) -> Vector {
    combination(rng, s.ambient_dim(), &s.basis())
}

pub fn random_vector(rng: &mut Rng8, n: usize) -> Vector {
    (0..n).map(|_| small_rational(rng)).collect()
}

/// Product of a unit lower and a unit upper triangular matrix: determinant 1.
pub fn unimodular(rng: &mut Rng8, n: usize) -> Matrix {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(0.3) {
                l[(i, j)] = int(rng.gen_range(-2..=2));
            }
            if rng.gen_bool(0.3) {
                u[(j, i)] = int(rng.gen_range(-2..=2));
            }
        }
    }
    &l * &u
}

/// A cocycle built from `fiber` random combinations of the restricted basis.
pub fn random_cocycle(rng: &mut Rng8, entry: usize, fiber: usize) -> Cochain2 {
    let basis = &restricted_bases()[entry];
    let base = catalog_triples()[entry].1.dim();
    let mut entries = Vec::new();
    for f in 0..fiber {
        let mut w = Cochain2::zero(base, 1);
        for b in basis {
            w = w.add(&b.scale(&small_rational(rng)));
        }
        entries.extend(w.entries().into_iter().map(|(i, j, _, v)| (i, j, f, v)));
    }
    Cochain2::from_entries(base, fiber, &entries).expect("valid entries")
}

/// A catalog triple, optionally centrally extended, optionally written in a
/// random basis.
pub fn random_triple(rng: &mut Rng8) -> ExtrinsicTriple {
    let entry = rng.gen_range(0..catalog_triples().len());
    let mut t = catalog_triples()[entry].1.clone();
    if rng.gen_bool(0.5) {
        let fiber = rng.gen_range(1..=2);
        let w = random_cocycle(rng, entry, fiber);
        t = central_extension(&t, &w).expect("restricted cocycles extend");
    }
    if rng.gen_bool(0.5) {
        let h = unimodular(rng, t.dim());
        t = t.transport(&h).expect("invertible");
    }
    t
}

//! The orbit model `M = G₊(0) ⊂ g₋` and its extrinsic geometry.
//!
//! Points of `g₋` are given in coordinates relative to the RREF basis of `g₋`
//! (the entries of an ambient vector at the pivot columns). Geometric
//! quantities such as `α`, `A_η` and `h` are returned as ambient vectors of `g`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{format_combination, InnerProduct, LinearMap};
use crate::matrix::{vector, Matrix, Vector};
use crate::rational::{self, Scalar};
use crate::report::ValidationReport;
use crate::subspace::Subspace;
use crate::triples::{tau_d, ExtrinsicTriple, TripleDecomposition};

/// Absolute tolerance for comparisons involving floating orbit points.
pub const ORBIT_TOLERANCE: f64 = 1e-9;

/// Working precision (bits after the binary point) for non-nilpotent
/// exponentials.
const EXP_PRECISION_BITS: u32 = 128;

/// Default per-letter parameter grid for orbit sampling.
pub fn default_grid() -> Vec<Scalar> {
    [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1)]
        .iter()
        .map(|&(p, q)| rational::frac(p, q))
        .collect()
}

pub const MAX_SAMPLE_POINTS: usize = 10_000;

/// An element `(A, a)` of `so(g₋) ⋉ g₋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalIsometry {
    pub linear: LinearMap,
    pub translation: Vector,
}

impl InfinitesimalIsometry {
    /// `[(A, a), (B, b)] = (AB - BA, Ab - Ba)`
    pub fn bracket(&self, other: &Self) -> Self {
        Self {
            linear: &(&self.linear * &other.linear) - &(&other.linear * &self.linear),
            translation: vector::sub(
                &self.linear.mul_vec(&other.translation),
                &other.linear.mul_vec(&self.translation),
            ),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self {
            linear: self.linear.scale(s),
            translation: vector::scale(&self.translation, s),
        }
    }

    /// `[[A, a], [0, 0]]`
    pub fn homogeneous(&self) -> Matrix {
        let m = self.linear.rows();
        Matrix::from_fn(m + 1, m + 1, |i, j| match (i < m, j < m) {
            (true, true) => self.linear[(i, j)].clone(),
            (true, false) => self.translation[i].clone(),
            _ => Scalar::zero(),
        })
    }
}

/// How an affine map was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Exactness {
    Exact,
    /// `error_bound` bounds the ∞-norm of the difference between the true and
    /// the stored homogeneous matrix, hence every entry error too.
    Approximate {
        error_bound: f64,
    },
}

impl Exactness {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::Exact)
    }

    pub fn error_bound(&self) -> f64 {
        match self {
            Exactness::Exact => 0.0,
            Exactness::Approximate { error_bound } => *error_bound,
        }
    }

    fn from_bound(b: f64) -> Self {
        if b == 0.0 {
            Exactness::Exact
        } else {
            Exactness::Approximate { error_bound: b }
        }
    }
}

/// `x ↦ Ax + a` on `g₋`. Approximate maps store dyadic rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineIsometry {
    pub linear: LinearMap,
    pub translation: Vector,
    pub exactness: Exactness,
}

impl AffineIsometry {
    pub fn identity(m: usize) -> Self {
        Self {
            linear: Matrix::identity(m),
            translation: vector::zeros(m),
            exactness: Exactness::Exact,
        }
    }

    pub fn linear_only(linear: LinearMap) -> Self {
        let m = linear.rows();
        Self {
            linear,
            translation: vector::zeros(m),
            exactness: Exactness::Exact,
        }
    }

    fn from_homogeneous(h: &Matrix, exactness: Exactness) -> Self {
        let m = h.rows() - 1;
        let idx: Vec<usize> = (0..m).collect();
        Self {
            linear: h.submatrix(&idx, &idx),
            translation: (0..m).map(|i| h[(i, m)].clone()).collect(),
            exactness,
        }
    }

    pub fn homogeneous(&self) -> Matrix {
        InfinitesimalIsometry {
            linear: self.linear.clone(),
            translation: self.translation.clone(),
        }
        .homogeneous()
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn apply(&self, x: &[Scalar]) -> Vector {
        vector::add(&self.linear.mul_vec(x), &self.translation)
    }

    /// Error bound for `apply(x)` with `x` exact.
    pub fn apply_error(&self, x: &[Scalar]) -> f64 {
        let xn = x.iter().map(rational::abs_upper).fold(1.0, f64::max);
        self.exactness.error_bound() * xn
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        let linear = &self.linear * &other.linear;
        let translation = self.apply(&other.translation);
        let (d1, d2) = (self.exactness.error_bound(), other.exactness.error_bound());
        let bound = if d1 == 0.0 && d2 == 0.0 {
            0.0
        } else {
            let n1 = self.homogeneous().inf_norm_upper();
            let n2 = other.homogeneous().inf_norm_upper();
            (d1 * n2 + n1 * d2 + d1 * d2) * (1.0 + 1e-12)
        };
        Self {
            linear,
            translation,
            exactness: Exactness::from_bound(bound),
        }
    }

    /// Largest entry of `AᵀGA - G`.
    pub fn gram_defect(&self, gram: &Matrix) -> f64 {
        (&(&(&self.linear.transpose() * gram) * &self.linear) - gram).max_abs()
    }
}

/// Exponential of `s·inf`. Nilpotent generators are exponentiated exactly by
/// the terminating series. Otherwise a Taylor series with scaling and
/// squaring is evaluated in dyadic rationals, with a rigorous bound on the
/// truncation and rounding error.
pub fn exp_isometry(inf: &InfinitesimalIsometry, s: &Scalar) -> AffineIsometry {
    let h = inf.scale(s).homogeneous();
    let (e, ex) = exp_homogeneous(&h);
    AffineIsometry::from_homogeneous(&e, ex)
}

/// [`exp_isometry`] with a float parameter, converted exactly.
pub fn exp_isometry_f64(inf: &InfinitesimalIsometry, s: f64) -> Result<AffineIsometry> {
    Ok(exp_isometry(inf, &rational::from_f64(s)?))
}

fn exp_homogeneous(h: &Matrix) -> (Matrix, Exactness) {
    let n = h.rows();
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=n {
        term = (&term * h).scale(&rational::frac(1, k as i64));
        if term.is_zero() {
            return (sum, Exactness::Exact);
        }
        sum = &sum + &term;
    }
    exp_dyadic(h)
}

fn exp_dyadic(h: &Matrix) -> (Matrix, Exactness) {
    let n = h.rows();
    let round = |m: &Matrix| m.map(|x| rational::round_dyadic(x, EXP_PRECISION_BITS));
    // ∞-norm of a matrix whose entries were each rounded by ≤ 2^-(P+1).
    let r = n as f64 * 2f64.powi(-(EXP_PRECISION_BITS as i32) - 1);
    let norm = h.inf_norm_upper();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let b = h.scale(&Scalar::new(BigInt::one(), BigInt::one() << squarings as usize));
    let bn = norm / 2f64.powi(squarings as i32);

    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    let mut term_err = 0.0f64;
    let mut err = 0.0f64;
    let mut k = 0usize;
    let mut factorial_bound = 1.0f64; // bn^k / k!
    loop {
        k += 1;
        term = round(&(&term * &b).scale(&rational::frac(1, k as i64)));
        term_err = term_err * bn / k as f64 + r;
        sum = &sum + &term;
        err += term_err;
        factorial_bound *= bn / k as f64;
        // Tail Σ_{i>k} bn^i/i! ≤ bn^{k+1}/(k+1)! / (1 - bn/(k+2)).
        let tail = factorial_bound * bn / (k + 1) as f64 / (1.0 - bn / (k + 2) as f64);
        if tail < 2f64.powi(-(EXP_PRECISION_BITS as i32)) || k > 400 {
            err += tail;
            break;
        }
    }
    let mut e = sum;
    for _ in 0..squarings {
        let ne = e.inf_norm_upper();
        e = round(&(&e * &e));
        err = 2.0 * ne * err + err * err + r;
    }
    (
        e,
        Exactness::Approximate {
            error_bound: err * (1.0 + 1e-9),
        },
    )
}

/// One factor `exp(param · φ(direction))` of a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    /// Ambient vector of `g`, required to lie in `g₊`.
    pub direction: Vector,
    pub param: Scalar,
}

/// A product of exponentials, applied right to left.
pub type Word = Vec<Letter>;

pub fn inverse_word(word: &[Letter]) -> Word {
    word.iter()
        .rev()
        .map(|l| Letter {
            direction: l.direction.clone(),
            param: -l.param.clone(),
        })
        .collect()
}

/// Serializes a letter as `direction@param`, e.g. `2*b3 + H@1/2`.
pub fn format_letter(labels: &[String], l: &Letter) -> String {
    format!(
        "{}@{}",
        format_combination(labels, &l.direction),
        rational::format(&l.param)
    )
}

pub fn format_word(labels: &[String], word: &[Letter]) -> String {
    word.iter()
        .map(|l| format_letter(labels, l))
        .collect::<Vec<_>>()
        .join("; ")
}

/// `word(0)` together with the word that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    pub word: Word,
    /// Coordinates in the RREF basis of `g₋`; dyadic approximations when
    /// `exactness` is approximate.
    pub coords: Vector,
    pub exactness: Exactness,
}

impl OrbitPoint {
    pub fn to_f64(&self) -> Vec<f64> {
        vector::to_f64(&self.coords)
    }
}

/// How words are generated from a parameter grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    /// All grid tuples for the letters `X_1 … X_L` (generators cycle).
    Product,
    /// One letter per generator and grid value.
    Single,
}

/// Cached data for working with the orbit of a triple.
#[derive(Clone, Debug)]
pub struct OrbitModel<'a> {
    triple: &'a ExtrinsicTriple,
    dec: &'a TripleDecomposition,
    /// `τ_D` on `g`.
    tau: LinearMap,
    /// Gram matrix of `g₋` in its RREF basis.
    gram_minus: Matrix,
    /// `g₋⁻` in `g₋` coordinates.
    tangent_coords: Subspace,
}

impl<'a> OrbitModel<'a> {
    pub fn new(triple: &'a ExtrinsicTriple) -> Result<Self> {
        let dec = triple.decomposition()?;
        let tau = tau_d(triple)?;
        let gram_minus = dec.g_minus.restricted_gram(triple.form().gram());
        let tangent_vs = dec
            .g_mm
            .basis()
            .iter()
            .map(|v| dec.g_minus.try_coordinates(v, "g-"))
            .collect::<Result<Vec<_>>>()?;
        let tangent_coords = Subspace::span(dec.g_minus.dim(), &tangent_vs);
        Ok(Self {
            triple,
            dec,
            tau,
            gram_minus,
            tangent_coords,
        })
    }

    pub fn triple(&self) -> &ExtrinsicTriple {
        self.triple
    }

    pub fn decomposition(&self) -> &TripleDecomposition {
        self.dec
    }

    pub fn tau(&self) -> &LinearMap {
        &self.tau
    }

    /// `dim g₋`
    pub fn ambient_dim(&self) -> usize {
        self.dec.g_minus.dim()
    }

    pub fn gram_minus(&self) -> &Matrix {
        &self.gram_minus
    }

    pub fn restricted_form(&self) -> InnerProduct {
        InnerProduct::new(self.gram_minus.clone()).expect("restricted Gram matrix is symmetric")
    }

    /// Labels for `g₋` coordinates: the basis label when the RREF basis vector
    /// is a standard unit vector, otherwise the combination.
    pub fn coordinate_labels(&self) -> Vec<String> {
        self.dec
            .g_minus
            .basis()
            .iter()
            .map(|v| self.triple.format_vector(v))
            .collect()
    }

    pub fn to_coords(&self, v: &[Scalar]) -> Result<Vector> {
        self.dec.g_minus.try_coordinates(v, "g-")
    }

    pub fn to_ambient(&self, coords: &[Scalar]) -> Vector {
        self.dec.g_minus.from_coordinates(coords)
    }

    pub fn generators(&self) -> Vec<Vector> {
        self.dec.g_plus.basis()
    }

    pub fn phi(&self, x: &[Scalar]) -> Result<InfinitesimalIsometry> {
        let x = self
            .dec
            .g_plus
            .try_coordinates(x, "g+")
            .map(|c| self.dec.g_plus.from_coordinates(&c))?;
        let alg = self.triple.algebra();
        let ad = alg.ad(&x);
        let linear = self
            .dec
            .g_minus
            .restrict_map(&ad, "g-")
            .map_err(|_| Error::Inconsistent("[g+, g-] is not contained in g-".into()))?;
        let dx = vector::neg(&self.triple.d().mul_vec(&x));
        let translation = self
            .to_coords(&dx)
            .map_err(|_| Error::Inconsistent("D(g+) is not contained in g-".into()))?;
        Ok(InfinitesimalIsometry { linear, translation })
    }

    pub fn letter_map(&self, l: &Letter) -> Result<AffineIsometry> {
        Ok(exp_isometry(&self.phi(&l.direction)?, &l.param))
    }

    /// The affine map `exp(l₁) ∘ … ∘ exp(l_k)`.
    pub fn word_map(&self, word: &[Letter]) -> Result<AffineIsometry> {
        let mut g = AffineIsometry::identity(self.ambient_dim());
        for l in word {
            g = g.compose(&self.letter_map(l)?);
        }
        Ok(g)
    }

    pub fn point(&self, word: &[Letter]) -> Result<OrbitPoint> {
        let g = self.word_map(word)?;
        Ok(OrbitPoint {
            word: word.to_vec(),
            coords: g.translation,
            exactness: g.exactness,
        })
    }

    /// Evaluates the words independently, in parallel; output order follows
    /// input order.
    pub fn sample(&self, words: &[Word]) -> Result<Vec<OrbitPoint>> {
        words.par_iter().map(|w| self.point(w)).collect()
    }

    pub fn generator_letter(&self, index: usize, param: Scalar) -> Letter {
        Letter {
            direction: self.dec.g_plus.basis_vector(index),
            param,
        }
    }

    /// Words over `grid`. In product mode, position `i` uses generator
    /// `i mod dim g₊`; the result is truncated to `cap` words.
    pub fn grid_words(&self, grid: &[Scalar], max_len: usize, mode: SampleMode, cap: usize) -> Vec<Word> {
        let gens = self.dec.g_plus.dim();
        if gens == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        match mode {
            SampleMode::Single => {
                'outer: for a in 0..gens {
                    for p in grid {
                        if out.len() >= cap {
                            break 'outer;
                        }
                        out.push(vec![self.generator_letter(a, p.clone())]);
                    }
                }
            }
            SampleMode::Product => {
                let len = max_len.max(1);
                let mut idx = vec![0usize; len];
                'prod: loop {
                    if out.len() >= cap || grid.is_empty() {
                        break;
                    }
                    out.push(
                        idx.iter()
                            .enumerate()
                            .map(|(pos, &g)| self.generator_letter(pos % gens, grid[g].clone()))
                            .collect(),
                    );
                    for pos in (0..len).rev() {
                        idx[pos] += 1;
                        if idx[pos] < grid.len() {
                            continue 'prod;
                        }
                        idx[pos] = 0;
                    }
                    break;
                }
            }
        }
        out
    }

    /// `T₀M = g₋⁻`, after checking `g₋ ∩ (g₋⁻)^⊥ = g₋⁺`.
    pub fn tangent_space(&self) -> Result<Subspace> {
        self.check_normal_identity()?;
        Ok(self.dec.g_mm.clone())
    }

    /// `T₀^⊥M = g₋⁺`, after the same check.
    pub fn normal_space(&self) -> Result<Subspace> {
        self.check_normal_identity()?;
        Ok(self.dec.g_mp.clone())
    }

    fn check_normal_identity(&self) -> Result<()> {
        let perp = self.dec.g_mm.perp(self.triple.form().gram());
        if self.dec.g_minus.intersection(&perp) == self.dec.g_mp {
            Ok(())
        } else {
            Err(Error::NormalSpaceMismatch)
        }
    }

    fn br(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.triple.algebra().br(x, y)
    }

    fn d(&self, x: &[Scalar]) -> Vector {
        self.triple.d().mul_vec(x)
    }

    fn require(&self, s: &Subspace, v: &[Scalar], name: &str) -> Result<()> {
        s.try_coordinates(v, name).map(|_| ())
    }

    /// `α(u, v) = [Du, v]`
    pub fn second_fundamental_form(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vector> {
        self.require(&self.dec.g_mm, u, "g--")?;
        self.require(&self.dec.g_mm, v, "g--")?;
        Ok(self.br(&self.d(u), v))
    }

    /// `A_η u = -[Du, η]`
    pub fn shape_operator(&self, eta: &[Scalar], u: &[Scalar]) -> Result<Vector> {
        self.require(&self.dec.g_mp, eta, "g-+")?;
        self.require(&self.dec.g_mm, u, "g--")?;
        Ok(vector::neg(&self.br(&self.d(u), eta)))
    }

    /// Matrix of `A_η` on `g₋⁻` in its RREF basis.
    pub fn shape_operator_matrix(&self, eta: &[Scalar]) -> Result<Matrix> {
        let cols = self
            .dec
            .g_mm
            .basis()
            .iter()
            .map(|u| {
                let a = self.shape_operator(eta, u)?;
                self.dec.g_mm.try_coordinates(&a, "g--")
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_cols(self.dec.g_mm.dim(), &cols))
    }

    /// `h = (1/m) Σ G^{ij} α(u_i, u_j)` over the RREF basis of `g₋⁻`.
    pub fn mean_curvature(&self) -> Result<Vector> {
        self.mean_curvature_in_basis(&self.dec.g_mm.basis())
    }

    /// Mean curvature computed from an arbitrary basis of `g₋⁻`.
    pub fn mean_curvature_in_basis(&self, basis: &[Vector]) -> Result<Vector> {
        let n = self.triple.dim();
        let m = basis.len();
        if Subspace::span(n, basis) != self.dec.g_mm || m != self.dec.g_mm.dim() {
            return Err(Error::NotInSubspace("g-- (basis)".into()));
        }
        if m == 0 {
            return Ok(vector::zeros(n));
        }
        let form = self.triple.form();
        let g = Matrix::from_fn(m, m, |i, j| form.eval(&basis[i], &basis[j]));
        let ginv = g.inverse().ok_or(Error::DegenerateTangent)?;
        let mut h = vector::zeros(n);
        for i in 0..m {
            for j in 0..m {
                if !ginv[(i, j)].is_zero() {
                    let a = self.br(&self.d(&basis[i]), &basis[j]);
                    h = vector::axpy(&h, &ginv[(i, j)], &a);
                }
            }
        }
        Ok(vector::scale(&h, &rational::frac(1, m as i64)))
    }

    /// `R^M(u, v)w = -[[Du, Dv], w]`
    pub fn curvature_tangent(&self, u: &[Scalar], v: &[Scalar], w: &[Scalar]) -> Result<Vector> {
        for x in [u, v, w] {
            self.require(&self.dec.g_mm, x, "g--")?;
        }
        Ok(vector::neg(&self.br(&self.br(&self.d(u), &self.d(v)), w)))
    }

    /// `R^⊥(u, v)η = -[[Du, Dv], η]`
    pub fn curvature_normal(&self, u: &[Scalar], v: &[Scalar], eta: &[Scalar]) -> Result<Vector> {
        self.require(&self.dec.g_mm, u, "g--")?;
        self.require(&self.dec.g_mm, v, "g--")?;
        self.require(&self.dec.g_mp, eta, "g-+")?;
        Ok(vector::neg(&self.br(&self.br(&self.d(u), &self.d(v)), eta)))
    }

    /// Span of `α(u_i, u_j)` over the tangent basis.
    pub fn image_of_alpha(&self) -> Subspace {
        let basis = self.dec.g_mm.basis();
        let mut vs = Vec::new();
        for (i, u) in basis.iter().enumerate() {
            for v in &basis[i..] {
                vs.push(self.br(&self.d(u), v));
            }
        }
        Subspace::span(self.triple.dim(), &vs)
    }

    /// `s₀ = τ_D|g₋`
    pub fn reflection_at_origin(&self) -> AffineIsometry {
        let lin = self
            .dec
            .g_minus
            .restrict_map(&self.tau, "g-")
            .expect("tau_D preserves g-");
        AffineIsometry::linear_only(lin)
    }

    /// `s_p = g s₀ g⁻¹` for `p = g(0)`.
    pub fn reflection(&self, p: &OrbitPoint) -> Result<AffineIsometry> {
        let s0 = self.reflection_at_origin();
        if p.word.is_empty() {
            return Ok(s0);
        }
        let g = self.word_map(&p.word)?;
        let ginv = self.word_map(&inverse_word(&p.word))?;
        Ok(g.compose(&s0).compose(&ginv))
    }

    /// The letters of `word` with directions replaced by `τ_D` of them.
    pub fn tau_word(&self, word: &[Letter]) -> Word {
        word.iter()
            .map(|l| Letter {
                direction: self.tau.mul_vec(&l.direction),
                param: l.param.clone(),
            })
            .collect()
    }

    /// (a) `τ_D ∘ φ(X) = φ(τ_D X) ∘ τ_D` exactly for each generator; (b) for
    /// each sample point, `s₀(word(0)) = (τ_D word)(0)`.
    pub fn check_extrinsic_symmetry(&self, sample: &[OrbitPoint]) -> Result<ValidationReport> {
        let mut r = ValidationReport::new();
        let s0 = self.reflection_at_origin().linear;
        let labels = self.triple.labels();
        let mut witness = None;
        for x in self.generators() {
            let f = self.phi(&x)?;
            let ft = self.phi(&self.tau.mul_vec(&x))?;
            let lin_ok = &s0 * &f.linear == &ft.linear * &s0;
            let tr_ok = s0.mul_vec(&f.translation) == ft.translation;
            if !(lin_ok && tr_ok) {
                witness = Some(format!("generator {}", format_combination(labels, &x)));
                break;
            }
        }
        r.record("tau_D phi(X) = phi(tau_D X) tau_D", witness);

        let mut worst = 0.0f64;
        let mut witness = None;
        for p in sample {
            let lhs = s0.mul_vec(&p.coords);
            let q = self.point(&self.tau_word(&p.word))?;
            let tol = p.exactness.error_bound() * s0.inf_norm_upper() + q.exactness.error_bound();
            if p.exactness.is_exact() && q.exactness.is_exact() {
                if lhs != q.coords {
                    witness = Some(format!("word {}", format_word(labels, &p.word)));
                    break;
                }
            } else {
                let diff = vector::to_f64(&vector::sub(&lhs, &q.coords))
                    .into_iter()
                    .fold(0.0, |m: f64, x| m.max(x.abs()));
                worst = worst.max(diff);
                if diff > tol + ORBIT_TOLERANCE {
                    witness = Some(format!("word {} off by {:e}", format_word(labels, &p.word), diff));
                    break;
                }
            }
        }
        r.record(format!("s_0 maps {} sampled points into M", sample.len()), witness);
        Ok(r)
    }

    /// Reflection at `p` in the embedding space: `-Id` on the embedded tangent
    /// space, `+Id` on its orthogonal complement.
    pub fn embedded_reflection(&self, emb: &Embedding, p: &OrbitPoint) -> Result<AffineIsometry> {
        if !p.exactness.is_exact() {
            return Err(Error::InexactInput("embedded reflection".into()));
        }
        let g = self.word_map(&p.word)?;
        let big = emb.injection.rows();
        let tangent: Vec<Vector> = self
            .tangent_coords
            .basis()
            .iter()
            .map(|u| emb.injection.mul_vec(&g.linear.mul_vec(u)))
            .collect();
        let linear = if tangent.is_empty() {
            Matrix::identity(big)
        } else {
            let t = Matrix::from_cols(big, &tangent);
            let gp = emb.ambient.gram();
            let tg = &t.transpose() * gp;
            let inv = (&tg * &t).inverse().ok_or(Error::DegenerateTangent)?;
            let proj = &(&t * &inv) * &tg;
            &Matrix::identity(big) - &proj.scale(&rational::int(2))
        };
        let x = emb.injection.mul_vec(&p.coords);
        let translation = vector::sub(&x, &linear.mul_vec(&x));
        Ok(AffineIsometry {
            linear,
            translation,
            exactness: Exactness::Exact,
        })
    }

    /// Orbit export: a header of `word` and the `g₋` coordinate labels, then one
    /// row per point. Exact coordinates are written as `p/q`, others with 17
    /// significant digits.
    pub fn write_csv<W: std::io::Write>(&self, points: &[OrbitPoint], out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Inconsistent(format!("CSV write failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["word".to_string()];
        header.extend(self.coordinate_labels());
        w.write_record(&header).map_err(io)?;
        let labels = self.triple.labels();
        for p in points {
            let mut row = vec![format_word(labels, &p.word)];
            for c in &p.coords {
                row.push(if p.exactness.is_exact() {
                    rational::format(c)
                } else {
                    format!("{:.16e}", rational::to_f64(c))
                });
            }
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Inconsistent(format!("CSV write failed: {e}")))
    }
}

/// A non-degenerate inner product space containing `g₋` isometrically.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub ambient: InnerProduct,
    /// `dim V' × dim g₋` inclusion.
    pub injection: Matrix,
}

/// Adds one partner per radical basis vector `r_i`: the partner `p_j` pairs
/// with a vector `x` by `x[pivot_j]`, so `⟨r_i, p_j⟩ = δ_ij` for the RREF
/// radical basis, and partners are mutually isotropic.
pub fn embed_nondegenerate(v: &InnerProduct) -> Result<Embedding> {
    let n = v.dim();
    let radical = Subspace::kernel_of(v.gram());
    let k = radical.dim();
    let piv = radical.pivots().to_vec();
    let gram = Matrix::from_fn(n + k, n + k, |i, j| match (i < n, j < n) {
        (true, true) => v.gram()[(i, j)].clone(),
        (true, false) if piv[j - n] == i => Scalar::one(),
        (false, true) if piv[i - n] == j => Scalar::one(),
        _ => Scalar::zero(),
    });
    let ambient = InnerProduct::new(gram)?;
    if !ambient.is_nondegenerate() {
        return Err(Error::Inconsistent("embedding space is degenerate".into()));
    }
    let injection = Matrix::from_fn(n + k, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() });
    Ok(Embedding { ambient, injection })
}

/// Smallest `k ≥ 1` with `m^k = 0`, if `m` is nilpotent.
pub fn nilpotency_index(m: &Matrix) -> Option<usize> {
    let n = m.rows();
    if n == 0 {
        return Some(1);
    }
    let mut p = m.clone();
    for k in 1..=n {
        if p.is_zero() {
            return Some(k);
        }
        p = &p * m;
    }
    None
}

impl fmt::Display for OrbitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", vector::format(&self.coords))
    }
}

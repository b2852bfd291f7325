//! Lie algebras given by structure constants, inner products, and the
//! subspaces and quotients built from them.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{vector, Matrix, Vector};
use crate::rational::{self, Scalar};
use crate::subspace::Subspace;

pub type LinearMap = Matrix;

/// A finite-dimensional Lie algebra with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
///
/// Antisymmetry is enforced on construction; the Jacobi identity is not, so a
/// value may be provisional until [`LieAlgebra::check_jacobi`] comes back empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    /// `table[i * dim + j]` is `[e_i, e_j]`.
    table: Vec<Vector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Vector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `⟨[e_i,e_j],e_k⟩ + ⟨e_j,[e_i,e_k]⟩`
    pub value: Scalar,
}

impl LieAlgebra {
    pub fn abelian(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            labels,
            table: vec![vector::zeros(n); n * n],
        }
    }

    /// Builds the algebra from brackets `[e_i, e_j] = v` (0-based indices);
    /// `[e_j, e_i] = -v` is filled in. Unlisted pairs bracket to zero.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, Vector)]) -> Result<Self> {
        let mut alg = Self::abelian(labels);
        let n = alg.dim();
        for (i, j, v) in brackets {
            if *i >= n || *j >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: (*i).max(*j) + 1,
                });
            }
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if i == j {
                if !vector::is_zero(v) {
                    return Err(Error::Parse(format!("[e{0}, e{0}] must vanish", i + 1)));
                }
                continue;
            }
            alg.table[i * n + j] = v.clone();
            alg.table[j * n + i] = vector::neg(v);
        }
        Ok(alg)
    }

    /// Convenience constructor with integer structure constants:
    /// entries `(i, j, k, c)` mean `[e_i, e_j] ∋ c·e_k`.
    pub fn from_constants(labels: &[&str], constants: &[(usize, usize, usize, Scalar)]) -> Self {
        let n = labels.len();
        let mut brackets: Vec<(usize, usize, Vector)> = Vec::new();
        for (i, j, k, c) in constants {
            match brackets.iter_mut().find(|(a, b, _)| a == i && b == j) {
                Some((_, _, v)) => v[*k] += c,
                None => {
                    let mut v = vector::zeros(n);
                    v[*k] = c.clone();
                    brackets.push((*i, *j, v));
                }
            }
        }
        Self::from_brackets(labels.iter().map(|s| s.to_string()).collect(), &brackets).expect("valid constant table")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `[e_i, e_j]`
    pub fn basis_bracket(&self, i: usize, j: usize) -> &Vector {
        &self.table[i * self.dim() + j]
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.basis_bracket(i, j)[k]
    }

    /// Unit vector `e_i`.
    pub fn e(&self, i: usize) -> Vector {
        vector::unit(self.dim(), i)
    }

    /// Vector from `(label, coefficient)` pairs. Panics on unknown labels.
    pub fn vec_of(&self, terms: &[(&str, Scalar)]) -> Vector {
        let mut v = vector::zeros(self.dim());
        for (l, c) in terms {
            let i = self.index_of(l).unwrap_or_else(|| panic!("unknown basis label {l}"));
            v[i] += c;
        }
        v
    }

    /// Human-readable linear combination, e.g. `-2*sigma_X + 1/2*X`.
    pub fn format_vector(&self, v: &[Scalar]) -> String {
        format_combination(&self.labels, v)
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vector> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.br(x, y))
    }

    /// Bracket without the length check (panics on mismatch).
    pub(crate) fn br(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let n = self.dim();
        assert!(x.len() == n && y.len() == n, "bracket dimension mismatch");
        let mut out = vector::zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                let c = &self.table[i * n + j];
                if vector::is_zero(c) {
                    continue;
                }
                let f = xi * yj;
                for (o, ck) in out.iter_mut().zip(c) {
                    if !ck.is_zero() {
                        *o += &f * ck;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad x`.
    pub fn adjoint(&self, x: &[Scalar]) -> Result<LinearMap> {
        self.check_len(x)?;
        Ok(self.ad(x))
    }

    pub(crate) fn ad(&self, x: &[Scalar]) -> LinearMap {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.br(x, &self.e(j))).collect();
        Matrix::from_cols(n, &cols)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            vector::is_zero(self.basis_bracket(i, i))
                && (0..n).all(|j| *self.basis_bracket(i, j) == vector::neg(self.basis_bracket(j, i)))
        })
    }

    /// Cyclic sums `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]` that
    /// fail to vanish, over `i < j < k`.
    pub fn check_jacobi(&self) -> Vec<JacobiViolation> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (self.e(i), self.e(j), self.e(k));
                    let s = vector::add(
                        &vector::add(
                            &self.br(self.basis_bracket(i, j), &ek),
                            &self.br(self.basis_bracket(j, k), &ei),
                        ),
                        &self.br(self.basis_bracket(k, i), &ej),
                    );
                    if !vector::is_zero(&s) {
                        out.push(JacobiViolation { i, j, k, value: s });
                    }
                }
            }
        }
        out
    }

    /// Triples where `⟨[e_i,e_j],e_k⟩ + ⟨e_j,[e_i,e_k]⟩ ≠ 0`.
    pub fn check_invariance(&self, form: &InnerProduct) -> Vec<InvarianceViolation> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = form.eval(self.basis_bracket(i, j), &self.e(k));
                    let b = form.eval(&self.e(j), self.basis_bracket(i, k));
                    let value = a + b;
                    if !value.is_zero() {
                        out.push(InvarianceViolation { i, j, k, value });
                    }
                }
            }
        }
        out
    }

    /// `⟨x, y⟩ = tr(ad x ∘ ad y)`
    pub fn killing_form(&self) -> InnerProduct {
        let n = self.dim();
        let ads: Vec<Matrix> = (0..n).map(|i| self.ad(&self.e(i))).collect();
        let gram = Matrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace());
        InnerProduct { gram }
    }

    pub fn metric_radical(&self, form: &InnerProduct) -> Subspace {
        Subspace::kernel_of(&form.gram)
    }

    /// `{x : ad x = 0}`
    pub fn centre(&self) -> Subspace {
        let n = self.dim();
        // Column i is ad(e_i) flattened; the centre is the kernel.
        let m = Matrix::from_fn(n * n, n, |row, i| {
            let (a, b) = (row / n, row % n);
            self.basis_bracket(i, b)[a].clone()
        });
        Subspace::kernel_of(&m)
    }

    pub fn span_of_brackets(&self, u: &Subspace, w: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for x in u.basis() {
            for y in w.basis() {
                vs.push(self.br(&x, &y));
            }
        }
        Subspace::span(self.dim(), &vs)
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        s.contains_subspace(&self.span_of_brackets(s, &Subspace::full(self.dim())))
    }

    pub fn is_central(&self, s: &Subspace) -> bool {
        self.span_of_brackets(s, &Subspace::full(self.dim())).is_zero()
    }

    /// Quotient by a central ideal inside the metric radical. The complement
    /// of `r` is spanned by the non-pivot standard coordinates of its RREF
    /// basis; the section maps quotient coordinates onto that complement.
    pub fn quotient_by_central_ideal(&self, form: &InnerProduct, r: &Subspace) -> Result<Quotient> {
        let n = self.dim();
        if r.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.ambient_dim(),
            });
        }
        if !self.is_central(r) {
            return Err(Error::NotCentral);
        }
        if !self.metric_radical(form).contains_subspace(r) {
            return Err(Error::NotInRadical);
        }
        let keep = r.non_pivots();
        let m = keep.len();
        let section = Matrix::from_fn(n, m, |i, j| {
            if i == keep[j] {
                rational::one()
            } else {
                rational::zero()
            }
        });
        // π(v) = coordinates of v - (R-part); subtracting the radical part
        // means reading off the non-pivot entries after reducing against r.
        let projection = quotient_projection(r, &keep);
        let labels: Vec<String> = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let mut brackets = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let v = projection.mul_vec(self.basis_bracket(keep[a], keep[b]));
                if !vector::is_zero(&v) {
                    brackets.push((a, b, v));
                }
            }
        }
        let algebra = LieAlgebra::from_brackets(labels, &brackets)?;
        let gram = &(&section.transpose() * &form.gram) * &section;
        // Well-definedness: the induced form must not depend on the section.
        let pulled = &(&projection.transpose() * &gram) * &projection;
        if pulled != form.gram {
            return Err(Error::NotInRadical);
        }
        Ok(Quotient {
            algebra,
            form: InnerProduct { gram },
            projection,
            section,
        })
    }

    fn check_len(&self, x: &[Scalar]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

pub fn format_combination(labels: &[String], v: &[Scalar]) -> String {
    let mut out = String::new();
    for (c, l) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Scalar::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag != rational::one() {
            out.push_str(&rational::format(&mag));
            out.push('*');
        }
        out.push_str(l);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Projection `g → g/R` in quotient coordinates indexed by `keep`.
fn quotient_projection(r: &Subspace, keep: &[usize]) -> Matrix {
    let n = r.ambient_dim();
    let cols: Vec<Vector> = (0..n)
        .map(|j| {
            let mut v = vector::unit(n, j);
            // Remove the component along r using its pivots.
            for (row, &p) in r.pivots().iter().enumerate() {
                if !v[p].is_zero() {
                    let c = v[p].clone();
                    v = vector::axpy(&v, &-c, &r.basis_vector(row));
                }
            }
            keep.iter().map(|&k| v[k].clone()).collect()
        })
        .collect();
    Matrix::from_cols(keep.len(), &cols)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub algebra: LieAlgebra,
    pub form: InnerProduct,
    /// `g → g/R`
    pub projection: LinearMap,
    /// `g/R → g`, onto the coordinate complement of `R`.
    pub section: LinearMap,
}

/// Symmetric, possibly degenerate bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProduct {
    gram: Matrix,
}

impl InnerProduct {
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        if let Some((i, j)) = first_asymmetry(&gram) {
            return Err(Error::Parse(format!(
                "Gram matrix is not symmetric at ({}, {})",
                i + 1,
                j + 1
            )));
        }
        Ok(Self { gram })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            gram: Matrix::zeros(n, n),
        }
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        Self {
            gram: Matrix::diagonal(entries),
        }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        vector::dot(x, &self.gram.mul_vec(y))
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rank() == self.dim()
    }

    /// Pullback `h*⟨,⟩`, i.e. Gram matrix `hᵀ G h`.
    pub fn pullback(&self, h: &Matrix) -> InnerProduct {
        InnerProduct {
            gram: &(&h.transpose() * &self.gram) * h,
        }
    }

    /// `(negative, positive, null)` counts by Sylvester's law of inertia.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature(&self.gram)
    }
}

fn first_asymmetry(m: &Matrix) -> Option<(usize, usize)> {
    let n = m.rows();
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)] != m[(j, i)] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Inertia of a symmetric matrix via exact congruence diagonalization.
pub fn signature(gram: &Matrix) -> (usize, usize, usize) {
    let mut a = gram.clone();
    let n = a.rows();
    let (mut neg, mut pos) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[(i, i)].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // All diagonal entries vanish; use e_i + e_j for some a_ij ≠ 0.
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[(i, j)].is_zero());
                let Some((i, j)) = pair else { break };
                // Row/col operation: e_i ← e_i + e_j.
                for k in 0..n {
                    let v = &a[(i, k)] + &a[(j, k)];
                    a[(i, k)] = v;
                }
                for k in 0..n {
                    let v = &a[(k, i)] + &a[(k, j)];
                    a[(k, i)] = v;
                }
                i
            }
        };
        let d = a[(p, p)].clone();
        if d > Scalar::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if a[(i, p)].is_zero() {
                continue;
            }
            let f = &a[(i, p)] / &d;
            for k in 0..n {
                let v = &a[(i, k)] - &f * &a[(p, k)];
                a[(i, k)] = v;
            }
            for k in 0..n {
                let v = &a[(k, i)] - &f * &a[(k, p)];
                a[(k, i)] = v;
            }
        }
    }
    (neg, pos, n - neg - pos)
}

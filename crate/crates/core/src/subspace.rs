//! Linear subspaces stored in canonical reduced row-echelon form.
//!
//! Two subspaces are equal exactly when their stored bases are equal, so
//! `==` on [`Subspace`] is subspace equality.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{vector, Matrix, Vector};
use crate::rational::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    /// RREF rows, no zero rows.
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Matrix::zeros(0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Matrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span(ambient_dim: usize, vectors: &[Vector]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let (r, pivots) = Matrix::from_rows(ambient_dim, vectors).rref();
        let rows: Vec<usize> = (0..pivots.len()).collect();
        let all: Vec<usize> = (0..ambient_dim).collect();
        Self {
            ambient_dim,
            basis: r.submatrix(&rows, &all),
            pivots,
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let vs: Vec<Vector> = indices.iter().map(|&i| vector::unit(ambient_dim, i)).collect();
        Self::span(ambient_dim, &vs)
    }

    /// Null space of a matrix with `ambient_dim` columns.
    pub fn kernel_of(m: &Matrix) -> Self {
        Self::span(m.cols(), &m.kernel())
    }

    /// Column space of a matrix.
    pub fn image_of(m: &Matrix) -> Self {
        Self::span(m.rows(), &m.col_vectors())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Canonical basis vectors (RREF rows).
    pub fn basis(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        self.basis.row(i)
    }

    /// Basis vectors as the columns of an `ambient_dim × dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        self.basis.transpose()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v ∉ self`.
    /// For an RREF basis these are the entries of `v` at the pivot columns.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient_dim, "vector length mismatch");
        let coords: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let recon = self.from_coordinates(&coords);
        (recon == v).then_some(coords)
    }

    pub fn try_coordinates(&self, v: &[Scalar], name: &str) -> Result<Vector> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        self.coordinates(v)
            .ok_or_else(|| Error::NotInSubspace(name.to_string()))
    }

    pub fn from_coordinates(&self, coords: &[Scalar]) -> Vector {
        assert_eq!(coords.len(), self.dim());
        vector::combination(self.ambient_dim, coords, &self.basis())
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut vs = self.basis();
        vs.extend(other.basis());
        Subspace::span(self.ambient_dim, &vs)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient_dim);
        }
        // Solve Σ a_i u_i = Σ b_j w_j.
        let u = self.basis_matrix();
        let w = other.basis_matrix();
        let stacked = u.hstack(&-&w);
        let vs: Vec<Vector> = stacked.kernel().iter().map(|k| u.mul_vec(&k[..self.dim()])).collect();
        Subspace::span(self.ambient_dim, &vs)
    }

    /// The complement spanned by the non-pivot standard coordinates.
    pub fn coordinate_complement(&self) -> Subspace {
        let free: Vec<usize> = (0..self.ambient_dim).filter(|c| !self.pivots.contains(c)).collect();
        Subspace::coordinate(self.ambient_dim, &free)
    }

    pub fn non_pivots(&self) -> Vec<usize> {
        (0..self.ambient_dim).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Orthogonal complement `{x : ⟨x, u⟩ = 0 for all u ∈ self}` with respect
    /// to a (possibly degenerate) Gram matrix.
    pub fn perp(&self, gram: &Matrix) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient_dim);
        }
        Subspace::kernel_of(&(&self.basis * gram))
    }

    /// Image under a linear map.
    pub fn image(&self, map: &Matrix) -> Subspace {
        let vs: Vec<Vector> = self.basis().iter().map(|v| map.mul_vec(v)).collect();
        Subspace::span(map.rows(), &vs)
    }

    /// Gram matrix of the canonical basis.
    pub fn restricted_gram(&self, gram: &Matrix) -> Matrix {
        let b = self.basis_matrix();
        &(&b.transpose() * gram) * &b
    }

    /// Matrix of `map` restricted to this subspace, in canonical coordinates.
    /// Fails if the subspace is not invariant.
    pub fn restrict_map(&self, map: &Matrix, name: &str) -> Result<Matrix> {
        let cols = self
            .basis()
            .iter()
            .map(|v| self.try_coordinates(&map.mul_vec(v), name))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_cols(self.dim(), &cols))
    }

    pub fn is_invariant_under(&self, map: &Matrix) -> bool {
        self.basis().iter().all(|v| self.contains(&map.mul_vec(v)))
    }

    pub fn is_isotropic(&self, gram: &Matrix) -> bool {
        self.restricted_gram(gram).is_zero()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis().iter().map(|v| vector::format(v)).collect();
        write!(
            f,
            "Subspace(dim {} in {}: [{}])",
            self.dim(),
            self.ambient_dim,
            rows.join(", ")
        )
    }
}

/// True if the family of subspaces is independent and spans the ambient space.
pub fn is_direct_sum_decomposition(parts: &[&Subspace], ambient_dim: usize) -> bool {
    let total: usize = parts.iter().map(|s| s.dim()).sum();
    if total != ambient_dim {
        return false;
    }
    let mut vs = Vec::new();
    for p in parts {
        vs.extend(p.basis());
    }
    Subspace::span(ambient_dim, &vs).dim() == ambient_dim
}

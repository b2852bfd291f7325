//! The quadratic extension `dd = l* ⊕ a ⊕ l` of a Lie algebra with involution
//! `(l, θ_l)` by an orthogonal module `(a, ⟨,⟩_a, θ_a, ρ)`.
//!
//! Basis order: the duals `σ_L` of the `l` basis, then the `a` basis, then
//! the `l` basis.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lie::{InnerProduct, LieAlgebra, LinearMap};
use crate::matrix::{vector, Matrix, Vector};
use crate::rational::Scalar;
use crate::triples::{validate, ExtrinsicTriple};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadExtData {
    pub l: LieAlgebra,
    pub theta_l: LinearMap,
    pub a_labels: Vec<String>,
    pub form_a: InnerProduct,
    pub theta_a: LinearMap,
    /// `ρ(L_i)` for each basis vector `L_i` of `l`.
    pub rho: Vec<Matrix>,
}

/// `(dd, ⟨,⟩, θ)` before a derivation is attached.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricInvolutiveAlgebra {
    pub algebra: LieAlgebra,
    pub form: InnerProduct,
    pub theta: LinearMap,
    /// `dim l`
    pub l_dim: usize,
    /// `dim a`
    pub a_dim: usize,
}

/// How `D` is specified on `dd`.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivationSpec {
    /// `D = ad(ξ)` for `ξ ∈ dd`.
    Inner(Vector),
    /// `D = -(D_l)* ⊕ D_a ⊕ D_l`.
    Blocks { d_l: Matrix, d_a: Matrix },
}

impl QuadExtData {
    pub fn l_dim(&self) -> usize {
        self.l.dim()
    }

    pub fn a_dim(&self) -> usize {
        self.a_labels.len()
    }

    /// `ρ(v) = Σ vᵢ ρ(Lᵢ)`
    pub fn rho_of(&self, v: &[Scalar]) -> Matrix {
        let p = self.a_dim();
        v.iter()
            .zip(&self.rho)
            .filter(|(c, _)| !c.is_zero())
            .fold(Matrix::zeros(p, p), |acc, (c, m)| &acc + &m.scale(c))
    }

    /// Every violated invariant of the input data.
    pub fn check(&self) -> Vec<String> {
        let k = self.l_dim();
        let p = self.a_dim();
        let mut out = Vec::new();
        let shape = |m: &Matrix, n: usize| m.rows() == n && m.cols() == n;
        if !shape(&self.theta_l, k) {
            out.push(format!("theta_l must be {k}x{k}"));
        }
        if self.form_a.dim() != p || !shape(&self.theta_a, p) {
            out.push(format!("a_form and theta_a must be {p}x{p}"));
        }
        if self.rho.len() != k || self.rho.iter().any(|m| !shape(m, p)) {
            out.push(format!("rho needs {k} matrices of size {p}x{p}"));
        }
        if !out.is_empty() {
            return out;
        }
        if let Some(v) = self.l.check_jacobi().first() {
            out.push(format!("l fails Jacobi on ({}, {}, {})", v.i + 1, v.j + 1, v.k + 1));
        }
        if !(&self.theta_l * &self.theta_l).is_identity() {
            out.push("theta_l^2 != Id".into());
        }
        for i in 0..k {
            for j in i + 1..k {
                let lhs = self.theta_l.mul_vec(self.l.basis_bracket(i, j));
                let rhs = self.l.br(&self.theta_l.col(i), &self.theta_l.col(j));
                if lhs != rhs {
                    out.push(format!("theta_l is not an automorphism on ({}, {})", i + 1, j + 1));
                }
            }
        }
        if !self.form_a.is_nondegenerate() {
            out.push("a_form is degenerate".into());
        }
        if !(&self.theta_a * &self.theta_a).is_identity() {
            out.push("theta_a^2 != Id".into());
        }
        if self.form_a.pullback(&self.theta_a) != self.form_a {
            out.push("theta_a is not an isometry".into());
        }
        let g = self.form_a.gram();
        for i in 0..k {
            let r = &self.rho[i];
            if &r.transpose() * g != -&(g * r) {
                out.push(format!("rho({}) is not antisymmetric", self.l.label(i)));
            }
            for j in i + 1..k {
                let comm = &(r * &self.rho[j]) - &(&self.rho[j] * r);
                if comm != self.rho_of(self.l.basis_bracket(i, j)) {
                    out.push(format!(
                        "rho is not a homomorphism on ({}, {})",
                        self.l.label(i),
                        self.l.label(j)
                    ));
                }
            }
            let lhs = &self.theta_a * &self.rho_of(&self.theta_l.col(i));
            let rhs = r * &self.theta_a;
            if lhs != rhs {
                out.push(format!("theta_a rho(theta_l {0}) != rho({0}) theta_a", self.l.label(i)));
            }
        }
        out
    }
}

pub fn build_dd(q: &QuadExtData) -> Result<MetricInvolutiveAlgebra> {
    let failures = q.check();
    if !failures.is_empty() {
        return Err(Error::Preconditions(failures));
    }
    let k = q.l_dim();
    let p = q.a_dim();
    let n = 2 * k + p;
    let (z0, a0, l0) = (0, k, k + p);
    let mut labels: Vec<String> = q.l.labels().iter().map(|s| format!("sigma_{s}")).collect();
    labels.extend(q.a_labels.iter().cloned());
    labels.extend(q.l.labels().iter().cloned());

    let mut brackets: Vec<(usize, usize, Vector)> = Vec::new();
    let mut push = |i: usize, j: usize, v: Vector| {
        if !vector::is_zero(&v) {
            brackets.push((i, j, v));
        }
    };
    let ga = q.form_a.gram();
    // [σ_a, A], [σ_a, σ_b] vanish; [σ_a, L_i] = -[L_i, σ_a].
    for a in 0..p {
        for b in a..p {
            // [A_a, A_b] = Σ_i ⟨ρ(L_i)A_a, A_b⟩ σ_i
            let mut v = vector::zeros(n);
            for i in 0..k {
                v[z0 + i] = vector::dot(&q.rho[i].col(a), &ga.col(b));
            }
            if a != b {
                push(a0 + a, a0 + b, v);
            }
        }
        for i in 0..k {
            // [A_a, L_i] = -ρ(L_i)A_a
            let mut v = vector::zeros(n);
            for (c, x) in q.rho[i].col(a).into_iter().enumerate() {
                v[a0 + c] = -x;
            }
            push(a0 + a, l0 + i, v);
        }
    }
    for z in 0..k {
        for i in 0..k {
            // [σ_z, L_i] = -ad*(L_i)σ_z = σ_z ∘ ad L_i, i.e. Σ_b c_{ib}^z σ_b
            let mut v = vector::zeros(n);
            for b in 0..k {
                v[z0 + b] = q.l.structure_constant(i, b, z).clone();
            }
            push(z0 + z, l0 + i, v);
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let mut v = vector::zeros(n);
            for (c, x) in q.l.basis_bracket(i, j).iter().enumerate() {
                v[l0 + c] = x.clone();
            }
            push(l0 + i, l0 + j, v);
        }
    }
    let algebra = LieAlgebra::from_brackets(labels, &brackets)?;

    let gram = Matrix::from_fn(n, n, |i, j| {
        if i < a0 && j >= l0 {
            if j - l0 == i {
                Scalar::from_integer(1.into())
            } else {
                Scalar::zero()
            }
        } else if j < a0 && i >= l0 {
            if i - l0 == j {
                Scalar::from_integer(1.into())
            } else {
                Scalar::zero()
            }
        } else if (a0..l0).contains(&i) && (a0..l0).contains(&j) {
            ga[(i - a0, j - a0)].clone()
        } else {
            Scalar::zero()
        }
    });
    let form = InnerProduct::new(gram)?;
    let theta_dual = q.theta_l.transpose();
    let theta = block_diag(&[&theta_dual, &q.theta_a, &q.theta_l]);

    let out = MetricInvolutiveAlgebra {
        algebra,
        form,
        theta,
        l_dim: k,
        a_dim: p,
    };
    let mut problems = Vec::new();
    if !out.algebra.check_jacobi().is_empty() {
        problems.push("Jacobi identity".to_string());
    }
    if !out.algebra.check_invariance(&out.form).is_empty() {
        problems.push("form invariance".to_string());
    }
    let t = ExtrinsicTriple::new(
        out.algebra.clone(),
        out.form.clone(),
        out.theta.clone(),
        Matrix::zeros(n, n),
    )?;
    let rep = validate(&t);
    for name in ["theta^2 = Id", "theta automorphism", "theta isometry"] {
        if rep.get(name).is_some_and(|c| !c.passed) {
            problems.push(name.to_string());
        }
    }
    if !problems.is_empty() {
        return Err(Error::Inconsistent(format!(
            "dd construction failed: {}",
            problems.join(", ")
        )));
    }
    Ok(out)
}

pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = Matrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m[(off + i, off + j)] = b[(i, j)].clone();
            }
        }
        off += b.rows();
    }
    m
}

impl MetricInvolutiveAlgebra {
    /// Index of the first `l` basis vector.
    pub fn l_offset(&self) -> usize {
        self.l_dim + self.a_dim
    }

    pub fn derivation(&self, spec: &DerivationSpec) -> Result<Matrix> {
        let n = self.algebra.dim();
        match spec {
            DerivationSpec::Inner(xi) => self.algebra.adjoint(xi),
            DerivationSpec::Blocks { d_l, d_a } => {
                if d_l.rows() != self.l_dim || d_l.cols() != self.l_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.l_dim,
                        found: d_l.rows(),
                    });
                }
                if d_a.rows() != self.a_dim || d_a.cols() != self.a_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.a_dim,
                        found: d_a.rows(),
                    });
                }
                let dual = -&d_l.transpose();
                let d = block_diag(&[&dual, d_a, d_l]);
                debug_assert_eq!(d.rows(), n);
                Ok(d)
            }
        }
    }
}

/// Attaches `D` and validates the resulting triple.
pub fn attach_phi(g: &MetricInvolutiveAlgebra, spec: &DerivationSpec) -> Result<ExtrinsicTriple> {
    let d = g.derivation(spec)?;
    let t = ExtrinsicTriple::new(g.algebra.clone(), g.form.clone(), g.theta.clone(), d)?;
    let rep = validate(&t);
    if !rep.all_passed() {
        return Err(Error::InvalidTriple(rep.failure_messages()));
    }
    Ok(t)
}

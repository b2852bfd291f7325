//! Second Lie algebra cohomology with trivial coefficients, the restricted
//! class space, central extensions by the metric radical and their inverse.
//!
//! Conventions for a base algebra `g₀` and trivial module `R`:
//!
//! * `(d¹σ)(x, y) = -σ([x, y])`
//! * `(d²ω)(x, y, z) = -ω([x,y], z) + ω([x,z], y) - ω([y,z], x)`
//! * `(θ*ω)(x, y) = ω(θx, θy)`, `(Dω)(x, y) = ω(Dx, y) + ω(x, Dy)`
//!
//! Cochains are flattened with index `pair·r + fiber`, where `pair` runs over
//! `i < j` lexicographically and `r = dim R`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lie::{InnerProduct, LieAlgebra};
use crate::matrix::{vector, Matrix, Vector};
use crate::rational::{self, Scalar};
use crate::subspace::Subspace;
use crate::triples::{is_full, validate, ExtrinsicTriple};

/// An alternating 2-cochain on `g₀` with values in `R = ℝ^fiber_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain2 {
    base_dim: usize,
    fiber_dim: usize,
    /// One antisymmetric matrix `ω_f(e_i, e_j)` per fiber coordinate.
    coeffs: Vec<Matrix>,
}

impl Cochain2 {
    pub fn zero(base_dim: usize, fiber_dim: usize) -> Self {
        Self {
            base_dim,
            fiber_dim,
            coeffs: vec![Matrix::zeros(base_dim, base_dim); fiber_dim],
        }
    }

    /// From entries `(i, j, fiber, value)` meaning `ω(e_i, e_j)_fiber = value`
    /// (0-based, `i ≠ j`); `ω(e_j, e_i)` is filled in. Repeated entries add up.
    pub fn from_entries(base_dim: usize, fiber_dim: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mut w = Self::zero(base_dim, fiber_dim);
        for (i, j, f, v) in entries {
            if *i >= base_dim || *j >= base_dim {
                return Err(Error::DimensionMismatch {
                    expected: base_dim,
                    found: (*i).max(*j) + 1,
                });
            }
            if *f >= fiber_dim {
                return Err(Error::DimensionMismatch {
                    expected: fiber_dim,
                    found: f + 1,
                });
            }
            if i == j {
                return Err(Error::Parse(format!("cochain entry ({0}, {0}) must vanish", i + 1)));
            }
            w.coeffs[*f][(*i, *j)] += v;
            w.coeffs[*f][(*j, *i)] -= v;
        }
        Ok(w)
    }

    pub fn from_coords(base_dim: usize, fiber_dim: usize, coords: &[Scalar]) -> Self {
        let pairs = pairs(base_dim);
        assert_eq!(coords.len(), pairs.len() * fiber_dim);
        let mut w = Self::zero(base_dim, fiber_dim);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for f in 0..fiber_dim {
                let c = &coords[p * fiber_dim + f];
                if !c.is_zero() {
                    w.coeffs[f][(i, j)] = c.clone();
                    w.coeffs[f][(j, i)] = -c.clone();
                }
            }
        }
        w
    }

    pub fn coords(&self) -> Vector {
        let mut out = Vec::new();
        for (i, j) in pairs(self.base_dim) {
            for f in 0..self.fiber_dim {
                out.push(self.coeffs[f][(i, j)].clone());
            }
        }
        out
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn coefficient_matrix(&self, fiber: usize) -> &Matrix {
        &self.coeffs[fiber]
    }

    /// Nonzero entries `(i, j, fiber, value)` with `i < j`.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for (i, j) in pairs(self.base_dim) {
            for f in 0..self.fiber_dim {
                let v = &self.coeffs[f][(i, j)];
                if !v.is_zero() {
                    out.push((i, j, f, v.clone()));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Matrix::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.coeffs.iter().all(|m| *m == -&m.transpose())
    }

    /// `ω(x, y)` as a fiber vector.
    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.coeffs.iter().map(|m| vector::dot(x, &m.mul_vec(y))).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            base_dim: self.base_dim,
            fiber_dim: self.fiber_dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self {
            base_dim: self.base_dim,
            fiber_dim: self.fiber_dim,
            coeffs: self.coeffs.iter().map(|m| m.scale(c)).collect(),
        }
    }

    /// `(θ*ω)(x, y) = ω(θx, θy)`
    pub fn pull_back(&self, theta: &Matrix) -> Self {
        let tt = theta.transpose();
        Self {
            base_dim: self.base_dim,
            fiber_dim: self.fiber_dim,
            coeffs: self.coeffs.iter().map(|m| &(&tt * m) * theta).collect(),
        }
    }

    /// `(Dω)(x, y) = ω(Dx, y) + ω(x, Dy)`
    pub fn derive(&self, d: &Matrix) -> Self {
        let dt = d.transpose();
        Self {
            base_dim: self.base_dim,
            fiber_dim: self.fiber_dim,
            coeffs: self.coeffs.iter().map(|m| &(&dt * m) + &(m * d)).collect(),
        }
    }

    /// Span of all values `ω(e_i, e_j)` in the fiber.
    pub fn value_span(&self) -> Subspace {
        let vs: Vec<Vector> = pairs(self.base_dim)
            .into_iter()
            .map(|(i, j)| self.coeffs.iter().map(|m| m[(i, j)].clone()).collect())
            .collect();
        Subspace::span(self.fiber_dim, &vs)
    }
}

/// Index pairs `i < j` in lexicographic order.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn triples_of(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((i, j, k));
            }
        }
    }
    out
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// An alternating 3-cochain, stored on `i < j < k` triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain3 {
    pub base_dim: usize,
    pub fiber_dim: usize,
    /// `values[t]` is the fiber vector on the `t`-th triple.
    pub values: Vec<Vector>,
}

impl Cochain3 {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| vector::is_zero(v))
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> Option<&Vector> {
        triples_of(self.base_dim)
            .iter()
            .position(|&t| t == (i, j, k))
            .map(|p| &self.values[p])
    }
}

/// `ω` evaluated on `(x, e_k)` for `x = [e_i, e_j]`, accumulating into `out`
/// with sign `sign`.
fn add_term(g0: &LieAlgebra, w: &Cochain2, i: usize, j: usize, k: usize, sign: i64, out: &mut Vector) {
    let x = g0.basis_bracket(i, j);
    let val = w.eval(x, &g0.e(k));
    *out = vector::axpy(out, &rational::int(sign), &val);
}

pub fn differential2(g0: &LieAlgebra, w: &Cochain2) -> Result<Cochain3> {
    let n = g0.dim();
    if w.base_dim != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.base_dim,
        });
    }
    let values = triples_of(n)
        .into_iter()
        .map(|(i, j, k)| {
            let mut v = vector::zeros(w.fiber_dim);
            add_term(g0, w, i, j, k, -1, &mut v);
            add_term(g0, w, i, k, j, 1, &mut v);
            add_term(g0, w, j, k, i, -1, &mut v);
            v
        })
        .collect();
    Ok(Cochain3 {
        base_dim: n,
        fiber_dim: w.fiber_dim,
        values,
    })
}

/// `(d¹σ)(x, y) = -σ([x, y])` for `σ` given as a `fiber_dim × base_dim` matrix.
pub fn differential1(g0: &LieAlgebra, sigma: &Matrix) -> Cochain2 {
    let n = g0.dim();
    let r = sigma.rows();
    let mut entries = Vec::new();
    for (i, j) in pairs(n) {
        let v = sigma.mul_vec(g0.basis_bracket(i, j));
        for (f, c) in v.into_iter().enumerate() {
            if !c.is_zero() {
                entries.push((i, j, f, -c));
            }
        }
    }
    Cochain2::from_entries(n, r, &entries).expect("indices in range")
}

/// Matrix of `d²: C² → C³` in flattened coordinates.
pub fn d2_matrix(g0: &LieAlgebra, fiber_dim: usize) -> Matrix {
    let n = g0.dim();
    let r = fiber_dim;
    let tri = triples_of(n);
    let np = n * n.saturating_sub(1) / 2;
    let mut m = Matrix::zeros(tri.len() * r, np * r);
    // ω(e_l, e_k) in terms of pair coordinates.
    let put = |row_t: usize, l: usize, k: usize, coeff: &Scalar, m: &mut Matrix| {
        if l == k || coeff.is_zero() {
            return;
        }
        let (p, s) = if l < k {
            (pair_index(n, l, k), coeff.clone())
        } else {
            (pair_index(n, k, l), -coeff.clone())
        };
        for f in 0..r {
            m[(row_t * r + f, p * r + f)] += &s;
        }
    };
    for (t, &(i, j, k)) in tri.iter().enumerate() {
        for (a, b, c, sign) in [(i, j, k, -1), (i, k, j, 1), (j, k, i, -1)] {
            let x = g0.basis_bracket(a, b);
            for (l, cl) in x.iter().enumerate() {
                if !cl.is_zero() {
                    put(t, l, c, &(cl * rational::int(sign)), &mut m);
                }
            }
        }
    }
    m
}

/// Matrix of `d¹: C¹ → C²`; `C¹` is flattened as `basis·r + fiber`.
pub fn d1_matrix(g0: &LieAlgebra, fiber_dim: usize) -> Matrix {
    let n = g0.dim();
    let r = fiber_dim;
    let ps = pairs(n);
    let mut m = Matrix::zeros(ps.len() * r, n * r);
    for (p, &(i, j)) in ps.iter().enumerate() {
        for (l, c) in g0.basis_bracket(i, j).iter().enumerate() {
            if !c.is_zero() {
                for f in 0..r {
                    m[(p * r + f, l * r + f)] = -c.clone();
                }
            }
        }
    }
    m
}

/// `Z²`, `B²` and a canonical complement representing `H² = Z²/B²`, all in
/// flattened cochain coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologySpace {
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub cocycles: Subspace,
    pub coboundaries: Subspace,
    /// Normal forms modulo `B²` of a cocycle basis, in RREF. Its basis vectors
    /// are the class representatives.
    pub classes: Subspace,
}

impl CohomologySpace {
    pub fn dim_z2(&self) -> usize {
        self.cocycles.dim()
    }

    pub fn dim_b2(&self) -> usize {
        self.coboundaries.dim()
    }

    pub fn dim_h2(&self) -> usize {
        self.classes.dim()
    }

    pub fn class_reps(&self) -> Vec<Cochain2> {
        self.classes
            .basis()
            .iter()
            .map(|c| Cochain2::from_coords(self.base_dim, self.fiber_dim, c))
            .collect()
    }

    /// Reduces `v` against the RREF rows of `B²`, zeroing its `B²` pivots.
    pub fn normal_form(&self, v: &[Scalar]) -> Vector {
        let mut v = v.to_vec();
        for (row, &p) in self.coboundaries.pivots().iter().enumerate() {
            if !v[p].is_zero() {
                let c = -v[p].clone();
                v = vector::axpy(&v, &c, &self.coboundaries.basis_vector(row));
            }
        }
        v
    }

    /// Class coordinates of `ω`, or `None` if `ω` is not closed.
    pub fn class_of(&self, w: &Cochain2) -> Option<Vector> {
        let v = w.coords();
        if !self.cocycles.contains(&v) {
            return None;
        }
        self.classes.coordinates(&self.normal_form(&v))
    }

    pub fn is_coboundary(&self, w: &Cochain2) -> bool {
        self.coboundaries.contains(&w.coords())
    }
}

pub fn cohomology2(g0: &LieAlgebra, fiber_dim: usize) -> CohomologySpace {
    let n = g0.dim();
    let cocycles = Subspace::kernel_of(&d2_matrix(g0, fiber_dim));
    let coboundaries = Subspace::image_of(&d1_matrix(g0, fiber_dim));
    let mut space = CohomologySpace {
        base_dim: n,
        fiber_dim,
        cocycles,
        coboundaries,
        classes: Subspace::zero(n * n.saturating_sub(1) / 2 * fiber_dim),
    };
    let reduced: Vec<Vector> = space.cocycles.basis().iter().map(|z| space.normal_form(z)).collect();
    space.classes = Subspace::span(space.cocycles.ambient_dim(), &reduced);
    space
}

/// `H²(g₀, R)^{D₀}_-`: classes with `θ*a = -a` and `D a = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedClasses {
    pub cohomology: CohomologySpace,
    /// Induced actions on class coordinates.
    pub theta_action: Matrix,
    pub d_action: Matrix,
    /// The restricted subspace, in class coordinates.
    pub space: Subspace,
}

impl RestrictedClasses {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Representatives of a basis of the restricted space.
    pub fn basis(&self) -> Vec<Cochain2> {
        let reps = self.cohomology.class_reps();
        let c = &self.cohomology;
        self.space
            .basis()
            .iter()
            .map(|coef| {
                reps.iter()
                    .zip(coef)
                    .fold(Cochain2::zero(c.base_dim, c.fiber_dim), |acc, (rep, k)| {
                        acc.add(&rep.scale(k))
                    })
            })
            .collect()
    }

    /// Whether the class of `ω` lies in the restricted space (`false` if `ω`
    /// is not closed).
    pub fn contains(&self, w: &Cochain2) -> bool {
        self.cohomology.class_of(w).is_some_and(|c| self.space.contains(&c))
    }
}

pub fn restricted_classes(t0: &ExtrinsicTriple, fiber_dim: usize) -> Result<RestrictedClasses> {
    let rep = validate(t0);
    if !rep.all_passed() {
        return Err(Error::Preconditions(rep.failure_messages()));
    }
    let g0 = t0.algebra();
    let coh = cohomology2(g0, fiber_dim);
    let n = g0.dim();
    let theta = t0.theta();
    let d = t0.d();
    let as_cochain = |v: &Vector| Cochain2::from_coords(n, fiber_dim, v);
    // The actions must map B² into B² and Z² into Z² to descend to H².
    for (name, space) in [("B^2", &coh.coboundaries), ("Z^2", &coh.cocycles)] {
        for v in space.basis() {
            let w = as_cochain(&v);
            if !space.contains(&w.pull_back(theta).coords()) || !space.contains(&w.derive(d).coords()) {
                return Err(Error::ActionNotDescending(name.to_string()));
            }
        }
    }
    let reps = coh.class_reps();
    let h = reps.len();
    let class = |w: Cochain2| coh.class_of(&w).expect("actions preserve cocycles");
    let theta_cols: Vec<Vector> = reps.iter().map(|w| class(w.pull_back(theta))).collect();
    let d_cols: Vec<Vector> = reps.iter().map(|w| class(w.derive(d))).collect();
    let theta_action = Matrix::from_cols(h, &theta_cols);
    let d_action = Matrix::from_cols(h, &d_cols);
    let stacked = d_action.vstack(&(&theta_action + &Matrix::identity(h)));
    let space = Subspace::kernel_of(&stacked);
    Ok(RestrictedClasses {
        cohomology: coh,
        theta_action,
        d_action,
        space,
    })
}

/// Failed conditions among `dω = 0`, `θ*ω = -ω`, `Dω = 0`.
pub fn cocycle_condition_failures(t0: &ExtrinsicTriple, w: &Cochain2) -> Vec<String> {
    let mut out = Vec::new();
    match differential2(t0.algebra(), w) {
        Err(e) => {
            out.push(e.to_string());
            return out;
        }
        Ok(dw) if !dw.is_zero() => out.push("d omega != 0".into()),
        Ok(_) => {}
    }
    if w.pull_back(t0.theta()) != w.scale(&rational::int(-1)) {
        out.push("theta* omega != -omega".into());
    }
    if !w.derive(t0.d()).is_zero() {
        out.push("D omega != 0".into());
    }
    out
}

/// The extension `g₀ ⊕ R` with `[x + r, y + s] = [x, y]₀ + ω(x, y)`, form
/// `⟨,⟩₀ ⊕ 0`, `θ = θ₀ ⊕ -Id` and `D = D₀ ⊕ 0`.
pub fn central_extension(t0: &ExtrinsicTriple, w: &Cochain2) -> Result<ExtrinsicTriple> {
    let labels: Vec<String> = (1..=w.fiber_dim).map(|i| format!("r{i}")).collect();
    central_extension_with_labels(t0, w, &labels)
}

pub fn central_extension_with_labels(
    t0: &ExtrinsicTriple,
    w: &Cochain2,
    fiber_labels: &[String],
) -> Result<ExtrinsicTriple> {
    let n = t0.dim();
    let r = w.fiber_dim;
    if fiber_labels.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: fiber_labels.len(),
        });
    }
    let mut failures: Vec<String> = validate(t0).failure_messages();
    failures.extend(cocycle_condition_failures(t0, w));
    if !failures.is_empty() {
        return Err(Error::Preconditions(failures));
    }
    let g0 = t0.algebra();
    let total = n + r;
    let mut brackets = Vec::new();
    for (i, j) in pairs(n) {
        let mut v = g0.basis_bracket(i, j).clone();
        v.extend(w.coeffs.iter().map(|m| m[(i, j)].clone()));
        if !vector::is_zero(&v) {
            brackets.push((i, j, v));
        }
    }
    let mut labels = t0.labels().to_vec();
    labels.extend(fiber_labels.iter().cloned());
    let algebra = LieAlgebra::from_brackets(labels, &brackets)?;
    let block = |m0: &Matrix, tail: Scalar| {
        Matrix::from_fn(total, total, |i, j| {
            if i < n && j < n {
                m0[(i, j)].clone()
            } else if i == j && i >= n {
                tail.clone()
            } else {
                Scalar::zero()
            }
        })
    };
    let form = InnerProduct::new(block(t0.form().gram(), Scalar::zero()))?;
    let theta = block(t0.theta(), rational::int(-1));
    let d = block(t0.d(), Scalar::zero());
    ExtrinsicTriple::new(algebra, form, theta, d)
}

/// Result of splitting a weak triple along its metric radical `R`.
#[derive(Clone, Debug)]
pub struct Extracted {
    pub quotient: ExtrinsicTriple,
    pub cocycle: Cochain2,
    pub radical: Subspace,
    /// `g → g/R`
    pub projection: Matrix,
    /// `g/R → g`, commuting with `θ` and `D`.
    pub section: Matrix,
    pub fiber_labels: Vec<String>,
}

impl Extracted {
    /// `g/R ⊕ R → g, (x, r) ↦ s(x) + Σ rᵢ Rᵢ`.
    pub fn canonical_map(&self) -> Matrix {
        let mut cols = self.section.col_vectors();
        cols.extend(self.radical.basis());
        Matrix::from_cols(self.section.rows(), &cols)
    }
}

/// The section with image `g₊ ⊕ g₋⁻ ⊕ (g₋⁺ ∩ C)`, `C` the coordinate
/// complement of `R`. It commutes with `θ` and `D`, so the cocycle it
/// produces satisfies `θ*ω = -ω` and `Dω = 0` on the nose.
pub fn equivariant_section(t: &ExtrinsicTriple, radical: &Subspace, projection: &Matrix) -> Result<Matrix> {
    let dec = t.decomposition()?;
    if !dec.g_mp.contains_subspace(radical) {
        return Err(Error::Inconsistent("metric radical is not contained in g-+".into()));
    }
    let image = dec
        .g_plus
        .sum(&dec.g_mm)
        .sum(&dec.g_mp.intersection(&radical.coordinate_complement()));
    let b = image.basis_matrix();
    let pb = projection * &b;
    let inv = pb.inverse().ok_or(Error::Singular)?;
    Ok(&b * &inv)
}

/// `ω(X, Y) = [sX, sY] - s[X, Y]₀` in radical coordinates.
pub fn cocycle_for_section(
    t: &ExtrinsicTriple,
    quotient: &LieAlgebra,
    radical: &Subspace,
    section: &Matrix,
) -> Result<Cochain2> {
    let m = quotient.dim();
    let alg = t.algebra();
    let mut entries = Vec::new();
    for (i, j) in pairs(m) {
        let v = vector::sub(
            &alg.br(&section.col(i), &section.col(j)),
            &section.mul_vec(quotient.basis_bracket(i, j)),
        );
        let c = radical.try_coordinates(&v, "metric radical")?;
        for (f, x) in c.into_iter().enumerate() {
            if !x.is_zero() {
                entries.push((i, j, f, x));
            }
        }
    }
    Cochain2::from_entries(m, radical.dim(), &entries)
}

pub fn extract_cocycle(t: &ExtrinsicTriple) -> Result<Extracted> {
    let alg = t.algebra();
    let radical = alg.metric_radical(t.form());
    if !alg.is_central(&radical) {
        return Err(Error::NotCentral);
    }
    let q = alg.quotient_by_central_ideal(t.form(), &radical)?;
    let section = equivariant_section(t, &radical, &q.projection)?;
    let theta0 = &(&q.projection * t.theta()) * &section;
    let d0 = &(&q.projection * t.d()) * &section;
    let quotient = ExtrinsicTriple::new(q.algebra.clone(), q.form.clone(), theta0, d0)?;
    let cocycle = cocycle_for_section(t, &q.algebra, &radical, &section)?;
    let bad = cocycle_condition_failures(&quotient, &cocycle);
    if !bad.is_empty() {
        return Err(Error::Inconsistent(bad.join("; ")));
    }
    let fiber_labels = radical.basis().iter().map(|v| alg.format_vector(v)).collect();
    Ok(Extracted {
        quotient,
        cocycle,
        radical,
        projection: q.projection,
        section,
        fiber_labels,
    })
}

/// `g₀` full and `ω(g₀, g₀) = R`; cross-checked against the fullness of the
/// extension itself.
pub fn is_full_extension(t0: &ExtrinsicTriple, w: &Cochain2) -> Result<bool> {
    let predicted = is_full(t0)?.full && w.value_span().dim() == w.fiber_dim;
    let built = is_full(&central_extension(t0, w)?)?.full;
    if predicted != built {
        return Err(Error::Inconsistent(format!(
            "fullness criterion gives {predicted}, extension is full: {built}"
        )));
    }
    Ok(predicted)
}

//! (Weak) extrinsic symmetric triples `(g, ⟨,⟩, θ, D)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{InnerProduct, LieAlgebra, LinearMap};
use crate::matrix::{vector, Matrix, Vector};
use crate::rational::{self, Scalar};
use crate::report::ValidationReport;
use crate::subspace::{is_direct_sum_decomposition, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Gram matrix invertible on all of `g`.
    Nondegenerate,
    /// Gram matrix invertible on `g₊ ⊕ g₋⁻` only.
    Weak,
}

/// θ-eigenspaces (subscripts), `ker D` / `ker(D² + Id)` (superscripts) and
/// their four intersections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleDecomposition {
    pub g_plus: Subspace,
    pub g_minus: Subspace,
    pub g_up: Subspace,
    pub g_down: Subspace,
    pub g_pp: Subspace,
    pub g_pm: Subspace,
    pub g_mp: Subspace,
    pub g_mm: Subspace,
}

impl TripleDecomposition {
    fn compute(theta: &Matrix, d: &Matrix) -> Result<Self> {
        let n = theta.rows();
        let id = Matrix::identity(n);
        let g_plus = Subspace::kernel_of(&(theta - &id));
        let g_minus = Subspace::kernel_of(&(theta + &id));
        if !is_direct_sum_decomposition(&[&g_plus, &g_minus], n) {
            return Err(Error::DecompositionFailed(
                "theta eigenspaces for ±1 do not span g".into(),
            ));
        }
        let g_up = Subspace::kernel_of(d);
        let g_down = Subspace::kernel_of(&(&(d * d) + &id));
        if !is_direct_sum_decomposition(&[&g_up, &g_down], n) {
            return Err(Error::DecompositionFailed(format!(
                "dim ker D = {}, dim ker(D^2 + Id) = {}, n = {}",
                g_up.dim(),
                g_down.dim(),
                n
            )));
        }
        let g_pp = g_plus.intersection(&g_up);
        let g_pm = g_plus.intersection(&g_down);
        let g_mp = g_minus.intersection(&g_up);
        let g_mm = g_minus.intersection(&g_down);
        if !is_direct_sum_decomposition(&[&g_pp, &g_pm, &g_mp, &g_mm], n) {
            return Err(Error::DecompositionFailed(
                "theta and tau_D are not simultaneously diagonalizable".into(),
            ));
        }
        Ok(Self {
            g_plus,
            g_minus,
            g_up,
            g_down,
            g_pp,
            g_pm,
            g_mp,
            g_mm,
        })
    }

    /// `[dim g₊⁺, dim g₊⁻, dim g₋⁺, dim g₋⁻]`
    pub fn dims(&self) -> [usize; 4] {
        [self.g_pp.dim(), self.g_pm.dim(), self.g_mp.dim(), self.g_mm.dim()]
    }
}

/// A candidate extrinsic symmetric triple. Construction only checks shapes;
/// use [`validate`] for the axioms. The decomposition and flavor are computed
/// once, on construction.
#[derive(Clone, Debug)]
pub struct ExtrinsicTriple {
    algebra: LieAlgebra,
    form: InnerProduct,
    theta: LinearMap,
    d: LinearMap,
    decomposition: Result<TripleDecomposition>,
    flavor: Option<Flavor>,
}

impl PartialEq for ExtrinsicTriple {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.form == other.form && self.theta == other.theta && self.d == other.d
    }
}

impl ExtrinsicTriple {
    pub fn new(algebra: LieAlgebra, form: InnerProduct, theta: LinearMap, d: LinearMap) -> Result<Self> {
        let n = algebra.dim();
        for (m, _name) in [(form.gram(), "gram"), (&theta, "theta"), (&d, "D")] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if m.rows() != n { m.rows() } else { m.cols() },
                });
            }
        }
        let decomposition = TripleDecomposition::compute(&theta, &d);
        let flavor = infer_flavor(&form, decomposition.as_ref().ok());
        Ok(Self {
            algebra,
            form,
            theta,
            d,
            decomposition,
            flavor,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn form(&self) -> &InnerProduct {
        &self.form
    }

    pub fn theta(&self) -> &LinearMap {
        &self.theta
    }

    pub fn d(&self) -> &LinearMap {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn labels(&self) -> &[String] {
        self.algebra.labels()
    }

    pub fn decomposition(&self) -> Result<&TripleDecomposition> {
        self.decomposition.as_ref().map_err(Clone::clone)
    }

    pub fn flavor(&self) -> Option<Flavor> {
        self.flavor
    }

    pub fn vec_of(&self, terms: &[(&str, Scalar)]) -> Vector {
        self.algebra.vec_of(terms)
    }

    pub fn format_vector(&self, v: &[Scalar]) -> String {
        self.algebra.format_vector(v)
    }

    /// Same data with `D` replaced.
    pub fn with_d(&self, d: LinearMap) -> Result<Self> {
        Self::new(self.algebra.clone(), self.form.clone(), self.theta.clone(), d)
    }

    /// The triple transported along an invertible `h`, so that `h` becomes an
    /// isomorphism from `self` to the result.
    pub fn transport(&self, h: &Matrix) -> Result<Self> {
        let hinv = h.inverse().ok_or(Error::Singular)?;
        let n = self.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let x = hinv.col(i);
                let y = hinv.col(j);
                let v = h.mul_vec(&self.algebra.br(&x, &y));
                if !vector::is_zero(&v) {
                    brackets.push((i, j, v));
                }
            }
        }
        let algebra = LieAlgebra::from_brackets(self.labels().to_vec(), &brackets)?;
        let form = self.form.pullback(&hinv);
        let theta = &(h * &self.theta) * &hinv;
        let d = &(h * &self.d) * &hinv;
        Self::new(algebra, form, theta, d)
    }
}

fn infer_flavor(form: &InnerProduct, dec: Option<&TripleDecomposition>) -> Option<Flavor> {
    if form.is_nondegenerate() {
        return Some(Flavor::Nondegenerate);
    }
    let dec = dec?;
    let s = dec.g_plus.sum(&dec.g_mm);
    (s.restricted_gram(form.gram()).rank() == s.dim()).then_some(Flavor::Weak)
}

pub fn decompose(t: &ExtrinsicTriple) -> Result<TripleDecomposition> {
    t.decomposition().cloned()
}

/// Checks every axiom and records each one, with a witness on failure.
pub fn validate(t: &ExtrinsicTriple) -> ValidationReport {
    let alg = &t.algebra;
    let labels = alg.labels();
    let n = t.dim();
    let gram = t.form.gram();
    let id = Matrix::identity(n);
    let pair = |i: usize, j: usize| format!("({}, {})", labels[i], labels[j]);
    let mut r = ValidationReport::new();

    r.record(
        "bracket antisymmetry",
        (!alg.is_antisymmetric()).then(|| "structure tensor not antisymmetric".to_string()),
    );
    r.record(
        "Jacobi identity",
        alg.check_jacobi().first().map(|v| {
            format!(
                "cyclic sum on ({}, {}, {}) = {}",
                labels[v.i],
                labels[v.j],
                labels[v.k],
                alg.format_vector(&v.value)
            )
        }),
    );
    r.record(
        "form symmetric",
        first_mismatch(gram, &gram.transpose()).map(|(i, j)| format!("at {}", pair(i, j))),
    );
    r.record(
        "form invariance",
        alg.check_invariance(&t.form).first().map(|v| {
            format!(
                "<[{a},{b}],{c}> + <{b},[{a},{c}]> = {}",
                rational::format(&v.value),
                a = labels[v.i],
                b = labels[v.j],
                c = labels[v.k]
            )
        }),
    );

    let theta = &t.theta;
    r.record(
        "theta^2 = Id",
        first_mismatch(&(theta * theta), &id).map(|(i, j)| format!("entry {}", pair(i, j))),
    );
    r.record(
        "theta automorphism",
        first_non_hom(alg, theta, alg).map(|(i, j)| format!("on {}", pair(i, j))),
    );
    r.record(
        "theta isometry",
        first_mismatch(&(&(&theta.transpose() * gram) * theta), gram)
            .map(|(i, j)| format!("Gram entry {}", pair(i, j))),
    );

    let d = &t.d;
    let d3 = &(d * d) * d;
    r.record(
        "D^3 = -D",
        first_mismatch(&d3, &-d).map(|(i, j)| format!("entry {}", pair(i, j))),
    );
    r.record(
        "D theta = -theta D",
        first_mismatch(&(d * theta), &-&(theta * d)).map(|(i, j)| format!("entry {}", pair(i, j))),
    );
    r.record(
        "D antisymmetric",
        first_mismatch(&(&d.transpose() * gram), &-&(gram * d))
            .map(|(i, j)| format!("<D{a},{b}> + <{a},D{b}> != 0", a = labels[i], b = labels[j])),
    );
    r.record(
        "D derivation",
        first_non_derivation(alg, d).map(|(i, j)| format!("on {}", pair(i, j))),
    );

    match t.decomposition() {
        Ok(dec) => {
            r.pass("four-fold decomposition");
            let span = alg.span_of_brackets(&dec.g_pm, &dec.g_pm);
            r.record(
                "[g+-, g+-] = g++",
                (span != dec.g_pp)
                    .then(|| format!("bracket span has dim {}, g++ has dim {}", span.dim(), dec.g_pp.dim())),
            );
        }
        Err(e) => {
            r.fail("four-fold decomposition", e.to_string());
            r.fail("[g+-, g+-] = g++", "decomposition unavailable");
        }
    }
    r.record(
        "non-degeneracy",
        t.flavor
            .is_none()
            .then(|| "Gram matrix is singular on g and on g+ + g--".to_string()),
    );
    r
}

fn first_mismatch(a: &Matrix, b: &Matrix) -> Option<(usize, usize)> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)] != b[(i, j)] {
                return Some((i, j));
            }
        }
    }
    None
}

/// First basis pair where `h[x,y]₁ ≠ [hx,hy]₂`.
fn first_non_hom(src: &LieAlgebra, h: &Matrix, dst: &LieAlgebra) -> Option<(usize, usize)> {
    let n = src.dim();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = h.mul_vec(src.basis_bracket(i, j));
            let rhs = dst.br(&h.col(i), &h.col(j));
            if lhs != rhs {
                return Some((i, j));
            }
        }
    }
    None
}

fn first_non_derivation(alg: &LieAlgebra, d: &Matrix) -> Option<(usize, usize)> {
    let n = alg.dim();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = d.mul_vec(alg.basis_bracket(i, j));
            let rhs = vector::add(&alg.br(&d.col(i), &alg.e(j)), &alg.br(&alg.e(i), &d.col(j)));
            if lhs != rhs {
                return Some((i, j));
            }
        }
    }
    None
}

/// `+Id` on `ker D`, `-Id` on `ker(D² + Id)`, as a difference of projections.
pub fn tau_d(t: &ExtrinsicTriple) -> Result<LinearMap> {
    let dec = t.decomposition()?;
    let mut cols = dec.g_up.basis();
    cols.extend(dec.g_down.basis());
    let b = Matrix::from_cols(t.dim(), &cols);
    let signs: Vec<Scalar> = (0..t.dim())
        .map(|i| {
            if i < dec.g_up.dim() {
                rational::one()
            } else {
                rational::int(-1)
            }
        })
        .collect();
    let binv = b.inverse().ok_or(Error::Singular)?;
    Ok(&(&b * &Matrix::diagonal(&signs)) * &binv)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fullness {
    pub full: bool,
    /// `[g₊⁻, g₋⁻]`
    pub bracket_span: Subspace,
}

/// Tests `[g₊⁻, g₋⁻] = g₋⁺` and the equivalent `[g⁻, g⁻] = g⁺`; the two must
/// agree.
pub fn is_full(t: &ExtrinsicTriple) -> Result<Fullness> {
    let dec = t.decomposition()?;
    let alg = &t.algebra;
    let bracket_span = alg.span_of_brackets(&dec.g_pm, &dec.g_mm);
    let bracket_criterion = bracket_span == dec.g_mp;
    let eigen_criterion = alg.span_of_brackets(&dec.g_down, &dec.g_down) == dec.g_up;
    if bracket_criterion != eigen_criterion {
        return Err(Error::FullnessDisagreement {
            bracket_criterion,
            eigen_criterion,
        });
    }
    Ok(Fullness {
        full: bracket_criterion,
        bracket_span,
    })
}

/// Solutions of `ad(ξ) = D`: the affine space `xi + centre`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerDerivation {
    /// Particular solution with every free RREF variable set to zero.
    pub xi: Vector,
    /// Homogeneous solutions (the centre of `g`).
    pub solution_space: Subspace,
    /// A solution lying in `g₋`, if one exists.
    pub xi_in_g_minus: Option<Vector>,
}

pub fn find_inner_xi(t: &ExtrinsicTriple) -> Option<InnerDerivation> {
    let n = t.dim();
    let alg = &t.algebra;
    // Column i is vec(ad e_i); solve Σ ξ_i vec(ad e_i) = vec(D).
    let m = Matrix::from_fn(n * n, n, |row, i| alg.basis_bracket(i, row % n)[row / n].clone());
    let rhs: Vector = (0..n * n).map(|row| t.d[(row / n, row % n)].clone()).collect();
    let xi = m.solve(&rhs)?;
    let solution_space = alg.centre();
    // ξ + z ∈ g₋ ⇔ (θ + Id)(ξ + z) = 0 for some z in the centre.
    let p = &t.theta + &Matrix::identity(n);
    let c = solution_space.basis_matrix();
    let target = vector::neg(&p.mul_vec(&xi));
    let xi_in_g_minus = if solution_space.is_zero() {
        vector::is_zero(&target).then(|| xi.clone())
    } else {
        (&p * &c).solve(&target).map(|coef| vector::add(&xi, &c.mul_vec(&coef)))
    };
    Some(InnerDerivation {
        xi,
        solution_space,
        xi_in_g_minus,
    })
}

/// Checks that `h` is an isomorphism of triples from `t1` to `t2`.
pub fn verify_isomorphism(h: &LinearMap, t1: &ExtrinsicTriple, t2: &ExtrinsicTriple) -> ValidationReport {
    let mut r = ValidationReport::new();
    let (n1, n2) = (t1.dim(), t2.dim());
    if n1 != n2 || h.rows() != n2 || h.cols() != n1 {
        r.fail(
            "dimensions",
            format!("h is {}x{}, triples have dims {} and {}", h.rows(), h.cols(), n1, n2),
        );
        return r;
    }
    r.pass("dimensions");
    r.record(
        "h invertible",
        (h.rank() != n1).then(|| format!("rank {} < {}", h.rank(), n1)),
    );
    let l1 = t1.labels();
    r.record(
        "h homomorphism",
        first_non_hom(&t1.algebra, h, &t2.algebra).map(|(i, j)| format!("on ({}, {})", l1[i], l1[j])),
    );
    r.record(
        "<,>_1 = h*<,>_2",
        first_mismatch(t1.form.gram(), t2.form.pullback(h).gram())
            .map(|(i, j)| format!("Gram entry ({}, {})", l1[i], l1[j])),
    );
    r.record(
        "D_2 h = h D_1",
        first_mismatch(&(&t2.d * h), &(h * &t1.d)).map(|(i, j)| format!("entry ({}, {})", i + 1, j + 1)),
    );
    r.record(
        "theta_2 h = h theta_1",
        first_mismatch(&(&t2.theta * h), &(h * &t1.theta)).map(|(i, j)| format!("entry ({}, {})", i + 1, j + 1)),
    );
    r
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{frac, int};

    /// Heisenberg algebra with the degenerate form diag(1, 0, 1).
    pub(crate) fn parabola() -> ExtrinsicTriple {
        let alg = LieAlgebra::from_constants(&["e1", "e2", "e3"], &[(0, 2, 1, int(1))]);
        let form = InnerProduct::diagonal(&[int(1), int(0), int(1)]);
        let theta = Matrix::diagonal(&[int(1), int(-1), int(-1)]);
        let d = Matrix::from_i64(&[&[0, 0, -1], &[0, 0, 0], &[1, 0, 0]]);
        ExtrinsicTriple::new(alg, form, theta, d).unwrap()
    }

    /// Abelian R^3 with D swapping e1, e2 and g-+ = span{e3}.
    pub(crate) fn abelian_not_full() -> ExtrinsicTriple {
        let alg = LieAlgebra::abelian(vec!["e1".into(), "e2".into(), "e3".into()]);
        let form = InnerProduct::diagonal(&[int(1), int(1), int(1)]);
        let theta = Matrix::diagonal(&[int(1), int(-1), int(-1)]);
        let d = Matrix::from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        ExtrinsicTriple::new(alg, form, theta, d).unwrap()
    }

    #[test]
    fn parabola_is_weak_and_full() {
        let t = parabola();
        let rep = validate(&t);
        assert!(rep.all_passed(), "{rep}");
        assert_eq!(t.flavor(), Some(Flavor::Weak));
        let dec = t.decomposition().unwrap();
        assert_eq!(dec.g_pm, Subspace::coordinate(3, &[0]));
        assert_eq!(dec.g_mp, Subspace::coordinate(3, &[1]));
        assert_eq!(dec.g_mm, Subspace::coordinate(3, &[2]));
        assert!(is_full(&t).unwrap().full);
    }

    #[test]
    fn trivial_d_decomposition() {
        let alg = LieAlgebra::abelian(vec!["a".into(), "b".into()]);
        let t = ExtrinsicTriple::new(
            alg,
            InnerProduct::diagonal(&[int(1), int(-1)]),
            Matrix::identity(2),
            Matrix::zeros(2, 2),
        )
        .unwrap();
        let dec = decompose(&t).unwrap();
        assert!(dec.g_pp.is_full());
        assert_eq!(dec.dims(), [2, 0, 0, 0]);
        assert!(tau_d(&t).unwrap().is_identity());
        let inner = find_inner_xi(&t).unwrap();
        assert!(vector::is_zero(&inner.xi));
        assert!(inner.solution_space.is_full());
    }

    #[test]
    fn abelian_triple_is_not_full() {
        let t = abelian_not_full();
        assert!(validate(&t).all_passed());
        let f = is_full(&t).unwrap();
        assert!(!f.full);
        assert!(f.bracket_span.is_zero());
        assert!(find_inner_xi(&t).is_none());
    }

    #[test]
    fn scaled_d_fails_cubic_identity() {
        let t = parabola();
        let bad = t.with_d(t.d().scale(&int(2))).unwrap();
        let rep = validate(&bad);
        assert!(!rep.get("D^3 = -D").unwrap().passed);
        assert!(rep.get("Jacobi identity").unwrap().passed);
    }

    #[test]
    fn non_split_d_is_rejected() {
        // Nilpotent D: ker D ⊕ ker(D² + Id) is a proper subspace.
        let t = parabola();
        let nil = Matrix::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let bad = t.with_d(nil).unwrap();
        assert!(matches!(bad.decomposition(), Err(Error::DecompositionFailed(_))));
        assert!(!validate(&bad).all_passed());
    }

    #[test]
    fn isomorphism_checks() {
        let t = parabola();
        assert!(verify_isomorphism(&Matrix::identity(3), &t, &t).all_passed());
        let two = Matrix::identity(3).scale(&int(2));
        let rep = verify_isomorphism(&two, &t, &t);
        assert!(!rep.get("<,>_1 = h*<,>_2").unwrap().passed);
        let h = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                int(1)
            } else if i < j {
                frac(1, (i + j + 1) as i64)
            } else {
                int(0)
            }
        });
        let moved = t.transport(&h).unwrap();
        assert!(verify_isomorphism(&h, &t, &moved).all_passed());
        assert!(validate(&moved).all_passed());
        assert_eq!(moved.flavor(), Some(Flavor::Weak));
    }

    #[test]
    fn abelian_permutation_is_isomorphism() {
        let alg = LieAlgebra::abelian(vec!["a".into(), "b".into()]);
        let t = ExtrinsicTriple::new(
            alg,
            InnerProduct::diagonal(&[int(1), int(1)]),
            Matrix::identity(2),
            Matrix::zeros(2, 2),
        )
        .unwrap();
        let swap = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert!(verify_isomorphism(&swap, &t, &t).all_passed());
    }
}

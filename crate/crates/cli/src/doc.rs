//! JSON documents: triples, cocycles and quadratic-extension data.
//!
//! Rationals are strings `"p"` or `"p/q"` (bare JSON integers are accepted
//! too). Matrices are row-major; basis indices are 1-based.

use std::collections::BTreeSet;
use std::fmt;

use exsym::extensions::Cochain2;
use exsym::quadext::{DerivationSpec, QuadExtData};
use exsym::{rational, ExtrinsicTriple, InnerProduct, LieAlgebra, Matrix, Scalar, Vector};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// An input problem, reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<exsym::Error> for InputError {
    fn from(e: exsym::Error) -> Self {
        InputError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, InputError>;

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(InputError(msg.into()))
}

/// A rational kept in its textual form until it is needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub String);

impl Rat {
    pub fn from_scalar(x: &Scalar) -> Self {
        Rat(rational::format(x))
    }

    pub fn parse(&self, at: &str) -> Result<Scalar> {
        let s = self.0.trim();
        let integer = |t: &str| {
            let t = t.strip_prefix('-').unwrap_or(t);
            !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
        };
        let shape_ok = match s.split_once('/') {
            Some((p, q)) => integer(p.trim()) && q.trim().bytes().all(|b| b.is_ascii_digit()) && !q.trim().is_empty(),
            None => integer(s),
        };
        if !shape_ok {
            return fail(format!("{at}: expected an integer or p/q, found {:?}", self.0));
        }
        rational::parse(s).map_err(|e| InputError(format!("{at}: {e}")))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                Ok(Rat(v.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat(v.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat(v.to_string()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rat, E> {
                Err(E::custom(format!(
                    "floating-point value {v}; write rationals as strings"
                )))
            }
        }
        d.deserialize_any(V)
    }
}

pub type RatMatrix = Vec<Vec<Rat>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Rat,
}

/// `[e_i, e_j] ∋ c e_k` entries over a named basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraBlock {
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainEntry {
    pub i: usize,
    pub j: usize,
    pub fiber: usize,
    pub value: Rat,
}

/// A cocycle with values in `R^fiber_dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionBlock {
    pub fiber_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_labels: Option<Vec<String>>,
    pub cocycle: Vec<CochainEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationBlock {
    /// `D = ad(xi)`, coordinates on `l* ⊕ a ⊕ l`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_l: Option<RatMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_a: Option<RatMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadExtBlock {
    pub l: AlgebraBlock,
    pub theta_l: RatMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_basis: Option<Vec<String>>,
    pub a_form: RatMatrix,
    pub theta_a: RatMatrix,
    pub rho: Vec<RatMatrix>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<DerivationBlock>,
}

/// A triple, optionally carrying an extension or quadratic-extension block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<BracketEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<RatMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<RatMatrix>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<RatMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadext: Option<QuadExtBlock>,
}

pub fn parse_document(text: &str) -> Result<TripleDocument> {
    serde_json::from_str(text).map_err(|e| InputError(format!("invalid document: {e}")))
}

pub fn parse_extension(text: &str) -> Result<ExtensionBlock> {
    serde_json::from_str(text).map_err(|e| InputError(format!("invalid cocycle file: {e}")))
}

fn matrix(m: &RatMatrix, rows: usize, cols: usize, name: &str) -> Result<Matrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return fail(format!("{name} must be a {rows}x{cols} matrix"));
    }
    let mut out = Matrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out[(i, j)] = x.parse(&format!("{name}[{}][{}]", i + 1, j + 1))?;
        }
    }
    Ok(out)
}

fn vector(v: &[Rat], n: usize, name: &str) -> Result<Vector> {
    if v.len() != n {
        return fail(format!("{name} must have {n} entries"));
    }
    v.iter()
        .enumerate()
        .map(|(i, x)| x.parse(&format!("{name}[{}]", i + 1)))
        .collect()
}

pub fn export_matrix(m: &Matrix) -> RatMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Rat::from_scalar(&m[(i, j)])).collect())
        .collect()
}

fn algebra(basis: &[String], entries: &[BracketEntry], name: &str) -> Result<LieAlgebra> {
    let n = basis.len();
    let distinct: BTreeSet<&String> = basis.iter().collect();
    if distinct.len() != n {
        return fail(format!("{name}: basis labels must be distinct"));
    }
    let mut seen = BTreeSet::new();
    let mut cols: Vec<(usize, usize, Vector)> = Vec::new();
    for (idx, b) in entries.iter().enumerate() {
        let at = format!("{name}[{}]", idx + 1);
        if b.i == 0 || b.j == 0 || b.k == 0 || b.i > n || b.j > n || b.k > n {
            return fail(format!("{at}: indices must lie in 1..={n}"));
        }
        if b.i >= b.j {
            return fail(format!("{at}: requires i < j, found i = {}, j = {}", b.i, b.j));
        }
        if !seen.insert((b.i, b.j, b.k)) {
            return fail(format!("{at}: duplicate entry ({}, {}, {})", b.i, b.j, b.k));
        }
        let c = b.c.parse(&format!("{at}.c"))?;
        match cols.iter_mut().find(|(i, j, _)| (*i, *j) == (b.i - 1, b.j - 1)) {
            Some((_, _, v)) => v[b.k - 1] = c,
            None => {
                let mut v = vec![Scalar::from_integer(0.into()); n];
                v[b.k - 1] = c;
                cols.push((b.i - 1, b.j - 1, v));
            }
        }
    }
    Ok(LieAlgebra::from_brackets(basis.to_vec(), &cols)?)
}

pub fn export_algebra(alg: &LieAlgebra) -> (Vec<String>, Vec<BracketEntry>) {
    let n = alg.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for (k, c) in alg.basis_bracket(i, j).iter().enumerate() {
                if !num_traits::Zero::is_zero(c) {
                    out.push(BracketEntry {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                        c: Rat::from_scalar(c),
                    });
                }
            }
        }
    }
    (alg.labels().to_vec(), out)
}

impl TripleDocument {
    pub fn from_triple(t: &ExtrinsicTriple) -> Self {
        let (basis, brackets) = export_algebra(t.algebra());
        TripleDocument {
            dim: Some(t.dim()),
            basis: Some(basis),
            brackets: Some(brackets),
            gram: Some(export_matrix(t.form().gram())),
            theta: Some(export_matrix(t.theta())),
            d: Some(export_matrix(t.d())),
            extension: None,
            quadext: None,
        }
    }

    pub fn triple(&self) -> Result<ExtrinsicTriple> {
        let missing = |k: &str| InputError(format!("document is missing \"{k}\""));
        let n = self.dim.ok_or_else(|| missing("dim"))?;
        let basis = self.basis.as_ref().ok_or_else(|| missing("basis"))?;
        if basis.len() != n {
            return fail(format!("basis has {} labels but dim is {n}", basis.len()));
        }
        let empty = Vec::new();
        let alg = algebra(basis, self.brackets.as_ref().unwrap_or(&empty), "brackets")?;
        let gram = matrix(self.gram.as_ref().ok_or_else(|| missing("gram"))?, n, n, "gram")?;
        let form = InnerProduct::new(gram)?;
        let theta = matrix(self.theta.as_ref().ok_or_else(|| missing("theta"))?, n, n, "theta")?;
        let d = matrix(self.d.as_ref().ok_or_else(|| missing("D"))?, n, n, "D")?;
        Ok(ExtrinsicTriple::new(alg, form, theta, d)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }
}

impl ExtensionBlock {
    pub fn cochain(&self, base_dim: usize) -> Result<Cochain2> {
        let r = self.fiber_dim;
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (idx, e) in self.cocycle.iter().enumerate() {
            let at = format!("cocycle[{}]", idx + 1);
            if e.i == 0 || e.j == 0 || e.i > base_dim || e.j > base_dim {
                return fail(format!("{at}: indices must lie in 1..={base_dim}"));
            }
            if e.i >= e.j {
                return fail(format!("{at}: requires i < j"));
            }
            if e.fiber == 0 || e.fiber > r {
                return fail(format!("{at}: fiber must lie in 1..={r}"));
            }
            if !seen.insert((e.i, e.j, e.fiber)) {
                return fail(format!("{at}: duplicate entry"));
            }
            entries.push((e.i - 1, e.j - 1, e.fiber - 1, e.value.parse(&format!("{at}.value"))?));
        }
        Ok(Cochain2::from_entries(base_dim, r, &entries)?)
    }

    pub fn labels(&self) -> Result<Vec<String>> {
        match &self.fiber_labels {
            Some(l) if l.len() != self.fiber_dim => fail(format!("fiber_labels must have {} entries", self.fiber_dim)),
            Some(l) => Ok(l.clone()),
            None => Ok((1..=self.fiber_dim).map(|i| format!("r{i}")).collect()),
        }
    }

    pub fn from_cochain(w: &Cochain2, labels: Option<Vec<String>>) -> Self {
        ExtensionBlock {
            fiber_dim: w.fiber_dim(),
            fiber_labels: labels,
            cocycle: w
                .entries()
                .into_iter()
                .map(|(i, j, f, v)| CochainEntry {
                    i: i + 1,
                    j: j + 1,
                    fiber: f + 1,
                    value: Rat::from_scalar(&v),
                })
                .collect(),
        }
    }
}

impl QuadExtBlock {
    pub fn data(&self) -> Result<QuadExtData> {
        let l = algebra(&self.l.basis, &self.l.brackets, "quadext.l.brackets")?;
        let k = l.dim();
        let p = self.a_form.len();
        let a_labels = match &self.a_basis {
            Some(b) if b.len() != p => return fail(format!("quadext.a_basis must have {p} labels")),
            Some(b) => b.clone(),
            None => (1..=p).map(|i| format!("a{i}")).collect(),
        };
        let theta_l = matrix(&self.theta_l, k, k, "quadext.theta_l")?;
        let form_a = InnerProduct::new(matrix(&self.a_form, p, p, "quadext.a_form")?)?;
        let theta_a = matrix(&self.theta_a, p, p, "quadext.theta_a")?;
        if self.rho.len() != k {
            return fail(format!("quadext.rho needs one matrix per l-basis vector ({k})"));
        }
        let rho = self
            .rho
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, p, p, &format!("quadext.rho[{}]", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadExtData {
            l,
            theta_l,
            a_labels,
            form_a,
            theta_a,
            rho,
        })
    }

    pub fn derivation(&self, k: usize, p: usize) -> Result<DerivationSpec> {
        let Some(d) = &self.d else {
            return fail("quadext block has no \"D\" entry");
        };
        match (&d.xi, &d.d_l, &d.d_a) {
            (Some(xi), None, None) => Ok(DerivationSpec::Inner(vector(xi, 2 * k + p, "quadext.D.xi")?)),
            (None, Some(dl), Some(da)) => Ok(DerivationSpec::Blocks {
                d_l: matrix(dl, k, k, "quadext.D.d_l")?,
                d_a: matrix(da, p, p, "quadext.D.d_a")?,
            }),
            _ => fail("quadext.D must give either \"xi\" or both \"d_l\" and \"d_a\""),
        }
    }
}

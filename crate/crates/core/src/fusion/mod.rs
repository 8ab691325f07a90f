//! Fusion rings: a finite label set with unit, duality and nonnegative
//! integer structure constants `N(i,j,k)` (multiplicity of `k` in `i⊗j`).

mod dims;
mod expr;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;

pub use dims::{pf_dimensions, QuantumDims, PF_MAX_ITERATIONS, PF_THRESHOLD};
pub use expr::{is_label_ident, ExprParseError, SectorExpr, Term};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("structural error: {0}")]
    Structure(String),
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error(transparent)]
    Expr(#[from] ExprParseError),
    #[error("ring file parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("ring '{name}' fails validation:\n{report}")]
    Invalid { name: String, report: ValidationReport },
    #[error("Perron-Frobenius iteration did not converge for '{label}' after {iterations} iterations")]
    NonConvergence { label: String, iterations: usize },
}

/// On-disk fusion-ring document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingFile {
    pub name: String,
    pub labels: Vec<String>,
    pub unit: String,
    #[serde(default)]
    pub dual: BTreeMap<String, String>,
    pub tensor: BTreeMap<String, BTreeMap<String, u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    name: String,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    unit: usize,
    dual: Vec<usize>,
    /// Dense cube, `table[(i*n + j)*n + k] = N(i,j,k)`.
    table: Vec<u32>,
}

impl FusionRing {
    /// Builds a ring from a dense rule. Structural checks only; axioms are
    /// checked by [`validate_ring`].
    pub fn from_fn<F>(
        name: &str,
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        rule: F,
    ) -> Result<Self, FusionError>
    where
        F: Fn(usize, usize, usize) -> u32,
    {
        let n = labels.len();
        if n == 0 {
            return Err(FusionError::Structure("label set is empty".into()));
        }
        if unit >= n || dual.len() != n || dual.iter().any(|&d| d >= n) {
            return Err(FusionError::Structure("unit or dual index out of range".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            let ok = is_label_ident(l) || (i == unit && l == "1");
            if !ok {
                return Err(FusionError::Structure(format!(
                    "label '{l}' is not an identifier (only the unit may be named \"1\")"
                )));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(FusionError::Structure(format!("duplicate label '{l}'")));
            }
        }
        let mut table = vec![0u32; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table[(i * n + j) * n + k] = rule(i, j, k);
                }
            }
        }
        Ok(FusionRing { name: name.to_string(), labels, index, unit, dual, table })
    }

    pub fn from_file_doc(doc: &RingFile) -> Result<Self, FusionError> {
        let lookup = |l: &str, what: &str| -> Result<usize, FusionError> {
            doc.labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| FusionError::Structure(format!("{what} '{l}' is not in labels")))
        };
        let n = doc.labels.len();
        let unit = lookup(&doc.unit, "unit")?;
        let mut dual: Vec<usize> = (0..n).collect();
        for (a, b) in &doc.dual {
            dual[lookup(a, "dual key")?] = lookup(b, "dual value")?;
        }
        let mut table = vec![0u32; n * n * n];
        for (key, prod) in &doc.tensor {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| FusionError::Structure(format!("tensor key '{key}' is not \"i,j\"")))?;
            let (i, j) = (lookup(a.trim(), "tensor label")?, lookup(b.trim(), "tensor label")?);
            for (c, &mult) in prod {
                let k = lookup(c, "tensor label")?;
                if mult == 0 {
                    return Err(FusionError::Structure(format!("zero multiplicity listed for {key} -> {c}")));
                }
                table[(i * n + j) * n + k] = mult;
            }
        }
        Self::from_fn(&doc.name, doc.labels.clone(), unit, dual, |i, j, k| table[(i * n + j) * n + k])
    }

    pub fn to_file_doc(&self) -> RingFile {
        let n = self.rank();
        let mut dual = BTreeMap::new();
        for i in 0..n {
            if self.dual[i] != i {
                dual.insert(self.labels[i].clone(), self.labels[self.dual[i]].clone());
            }
        }
        let mut tensor = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let prod: BTreeMap<String, u32> = (0..n)
                    .filter(|&k| self.n(i, j, k) > 0)
                    .map(|k| (self.labels[k].clone(), self.n(i, j, k)))
                    .collect();
                if !prod.is_empty() {
                    tensor.insert(format!("{},{}", self.labels[i], self.labels[j]), prod);
                }
            }
        }
        RingFile { name: self.name.clone(), labels: self.labels.clone(), unit: self.labels[self.unit].clone(), dual, tensor }
    }

    /// Parses a ring document without validating axioms.
    pub fn from_json_unchecked(text: &str) -> Result<Self, FusionError> {
        let doc: RingFile = serde_json::from_str(text).map_err(|e| FusionError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_file_doc(&doc)
    }

    /// Parses a ring document and rejects it unless every axiom holds.
    pub fn from_json(text: &str) -> Result<Self, FusionError> {
        let ring = Self::from_json_unchecked(text)?;
        let report = validate_ring(&ring);
        if !report.is_valid() {
            return Err(FusionError::Invalid { name: ring.name.clone(), report });
        }
        Ok(ring)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_doc()).expect("ring documents serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FusionError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FusionError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FusionError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| FusionError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, FusionError> {
        self.index.get(label).copied().ok_or_else(|| FusionError::UnknownLabel(label.to_string()))
    }

    #[inline]
    pub fn n(&self, i: usize, j: usize, k: usize) -> u32 {
        let r = self.labels.len();
        self.table[(i * r + j) * r + k]
    }

    /// Returns a copy with one structure constant replaced.
    pub fn with_entry(&self, i: usize, j: usize, k: usize, value: u32) -> Self {
        let mut out = self.clone();
        let r = self.rank();
        out.table[(i * r + j) * r + k] = value;
        out
    }

    pub fn with_dual(&self, i: usize, d: usize) -> Self {
        let mut out = self.clone();
        out.dual[i] = d;
        out
    }

    /// Left-multiplication matrix of `i` as rows: `m[k][j] = N(i,j,k)`.
    pub fn fusion_matrix(&self, i: usize) -> Vec<Vec<u32>> {
        let r = self.rank();
        (0..r).map(|k| (0..r).map(|j| self.n(i, j, k)).collect()).collect()
    }

    fn mult_right(&self, v: &MultVector, x: usize) -> MultVector {
        let r = self.rank();
        let mut out = vec![0u64; r];
        for (j, &c) in v.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += c * u64::from(self.n(j, x, k));
            }
        }
        MultVector { counts: out }
    }

    /// Formats a multiplicity vector as `1 + 2*r + tr`.
    pub fn format_mult(&self, v: &MultVector) -> String {
        let parts: Vec<String> = v
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| if c == 1 { self.labels[i].clone() } else { format!("{c}*{}", self.labels[i]) })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Multiplicity of each irreducible, indexed like the ring's labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultVector {
    counts: Vec<u64>,
}

impl MultVector {
    pub fn zero(rank: usize) -> Self {
        MultVector { counts: vec![0; rank] }
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.counts[i] = 1;
        v
    }

    pub fn from_pairs(ring: &FusionRing, pairs: &[(&str, u64)]) -> Result<Self, FusionError> {
        let mut v = Self::zero(ring.rank());
        for (l, c) in pairs {
            v.counts[ring.index_of(l)?] += c;
        }
        Ok(v)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn add_scaled(&mut self, other: &Self, c: u64) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += c * b;
        }
    }

    pub fn dot(&self, other: &Self) -> u64 {
        self.counts.iter().zip(&other.counts).map(|(a, b)| a * b).sum()
    }

    pub fn to_map(&self, ring: &FusionRing) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (ring.label(i).to_string(), c))
            .collect()
    }

    pub fn dimension(&self, dims: &QuantumDims) -> f64 {
        self.counts.iter().zip(dims.values()).map(|(&c, d)| c as f64 * d).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Unit,
    Duality,
    Reciprocity,
    Associativity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Unit => "unit",
            Axiom::Duality => "duality",
            Axiom::Reciprocity => "Frobenius reciprocity",
            Axiom::Associativity => "associativity",
        })
    }
}

/// First failing tuple of one axiom family, with the total failure count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<String>,
    pub detail: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violation(&self, axiom: Axiom) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for v in &self.violations {
            writeln!(f, "  {} violated at ({}): {} [{} failing tuple(s)]", v.axiom, v.witness.join(","), v.detail, v.count)?;
        }
        Ok(())
    }
}

pub fn validate_ring(ring: &FusionRing) -> ValidationReport {
    validate_ring_with(ring, Exec::default())
}

/// Checks unit, duality, reciprocity and associativity over the dense cube.
pub fn validate_ring_with(ring: &FusionRing, exec: Exec) -> ValidationReport {
    let n = ring.rank();
    let u = ring.unit;
    let names = |ix: &[usize]| ix.iter().map(|&i| ring.labels[i].clone()).collect::<Vec<_>>();
    let delta = |a: usize, b: usize| u32::from(a == b);
    let mut violations = Vec::new();

    let mut record = |axiom, fails: Vec<(Vec<usize>, String)>| {
        if let Some((w, detail)) = fails.first() {
            violations.push(Violation { axiom, witness: names(w), detail: detail.clone(), count: fails.len() });
        }
    };

    let mut unit_fails = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let (l, r) = (ring.n(u, j, k), ring.n(j, u, k));
            if l != delta(j, k) || r != delta(j, k) {
                unit_fails.push((vec![j, k], format!("N(unit,j,k)={l}, N(j,unit,k)={r}, expected {}", delta(j, k))));
            }
        }
    }
    record(Axiom::Unit, unit_fails);

    let mut dual_fails = Vec::new();
    if ring.dual[u] != u {
        dual_fails.push((vec![u], "dual(unit) != unit".to_string()));
    }
    for i in 0..n {
        if ring.dual[ring.dual[i]] != i {
            dual_fails.push((vec![i], "dual is not an involution".to_string()));
        }
        for j in 0..n {
            let got = ring.n(i, j, u);
            let want = delta(j, ring.dual[i]);
            if got != want {
                dual_fails.push((vec![i, j, u], format!("N(i,j,unit)={got}, expected {want}")));
            }
        }
    }
    record(Axiom::Duality, dual_fails);

    let recip: Vec<Vec<(Vec<usize>, String)>> = exec.map(n, |i| {
        let mut out = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let a = ring.n(i, j, k);
                let b = ring.n(ring.dual[i], k, j);
                let c = ring.n(k, ring.dual[j], i);
                if a != b || a != c {
                    out.push((vec![i, j, k], format!("N(i,j,k)={a}, N(i*,k,j)={b}, N(k,j*,i)={c}")));
                }
            }
        }
        out
    });
    record(Axiom::Reciprocity, recip.into_iter().flatten().collect());

    let assoc: Vec<(Option<(Vec<usize>, String)>, usize)> = exec.map(n, |i| {
        let mut first = None;
        let mut count = 0usize;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let lhs: u64 = (0..n).map(|m| u64::from(ring.n(i, j, m)) * u64::from(ring.n(m, k, l))).sum();
                    let rhs: u64 = (0..n).map(|m| u64::from(ring.n(j, k, m)) * u64::from(ring.n(i, m, l))).sum();
                    if lhs != rhs {
                        count += 1;
                        if first.is_none() {
                            first = Some((vec![i, j, k, l], format!("((ij)k)_l = {lhs} but (i(jk))_l = {rhs}")));
                        }
                    }
                }
            }
        }
        (first, count)
    });
    let total: usize = assoc.iter().map(|(_, c)| c).sum();
    if let Some((w, detail)) = assoc.into_iter().find_map(|(f, _)| f) {
        violations.push(Violation { axiom: Axiom::Associativity, witness: names(&w), detail, count: total });
    }

    ValidationReport { violations }
}

/// Reduces every word left to right through the tensor table and sums the terms.
pub fn decompose(ring: &FusionRing, e: &SectorExpr) -> Result<MultVector, FusionError> {
    let n = ring.rank();
    let mut total = MultVector::zero(n);
    for term in e.terms() {
        let mut v = MultVector::basis(n, ring.unit);
        for l in &term.word {
            v = ring.mult_right(&v, ring.index_of(l)?);
        }
        total.add_scaled(&v, term.coeff);
    }
    Ok(total)
}

/// `dim(x, y)`: the pairing of the two decompositions.
pub fn hom_dim(ring: &FusionRing, x: &SectorExpr, y: &SectorExpr) -> Result<u64, FusionError> {
    Ok(decompose(ring, x)?.dot(&decompose(ring, y)?))
}

/// True iff every multiplicity `n_i` satisfies `n_i ≤ d(ρ_i)` up to `tol`.
pub fn check_multiplicity_bound(dims: &QuantumDims, v: &MultVector, tol: f64) -> bool {
    v.counts().iter().zip(dims.values()).all(|(&c, &d)| c as f64 <= d + tol)
}

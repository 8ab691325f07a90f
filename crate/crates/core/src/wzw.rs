//! SU(2)_k modular data, monodromy angle spectra and quantum 6j-symbols.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::angles::AngleSpectrum;
use crate::exec::Exec;
use crate::fusion::{FusionError, FusionRing};
use crate::scalar::Cx;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WzwError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown graph '{0}' (expected A<n>, D<even n>, E6, E7 or E8)")]
    UnknownGraph(String),
    #[error("bad spin '{0}' (expected a nonnegative half-integer such as 1, 3/2 or 2.5)")]
    BadSpin(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularData {
    pub k: usize,
    pub s: Vec<Vec<f64>>,
    pub dims: Vec<f64>,
}

pub fn su2k_modular(k: usize) -> Result<ModularData, WzwError> {
    if k == 0 {
        return Err(WzwError::Domain("level k must be at least 1".into()));
    }
    let kk = (k + 2) as f64;
    let norm = (2.0 / kk).sqrt();
    let s: Vec<Vec<f64>> = (0..=k)
        .map(|i| (0..=k).map(|j| norm * (((i + 1) * (j + 1)) as f64 * PI / kk).sin()).collect())
        .collect();
    let dims = (0..=k).map(|i| s[0][i] / s[0][0]).collect();
    Ok(ModularData { k, s, dims })
}

impl ModularData {
    pub fn rank(&self) -> usize {
        self.k + 1
    }

    /// Max entry of `|S Sᵀ − 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.rank();
        let mut worst = 0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|m| self.s[i][m] * self.s[j][m]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.rank();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.s[i][j] - self.s[j][i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Verlinde fusion numbers with their distance from the nearest integer.
#[derive(Debug, Clone, PartialEq)]
pub struct VerlindeTable {
    pub k: usize,
    /// `n[(i*r + j)*r + l]`, rounded.
    pub n: Vec<u32>,
    pub max_integrality_defect: f64,
}

impl VerlindeTable {
    pub fn get(&self, i: usize, j: usize, l: usize) -> u32 {
        let r = self.k + 1;
        self.n[(i * r + j) * r + l]
    }

    pub fn to_ring(&self) -> Result<FusionRing, FusionError> {
        let r = self.k + 1;
        let labels = (0..r).map(|i| format!("l{i}")).collect();
        FusionRing::from_fn(&format!("su2_{}", self.k), labels, 0, (0..r).collect(), |i, j, l| self.get(i, j, l))
    }
}

/// `N_ij^l = Σ_m S_im S_jm S_lm / S_0m`, parallel over `i`.
pub fn verlinde(md: &ModularData, exec: Exec) -> VerlindeTable {
    let r = md.rank();
    let s = &md.s;
    let rows: Vec<(Vec<u32>, f64)> = exec.map(r, |i| {
        let mut out = Vec::with_capacity(r * r);
        let mut worst = 0f64;
        for j in 0..r {
            for l in 0..r {
                let x: f64 = (0..r).map(|m| s[i][m] * s[j][m] * s[l][m] / s[0][m]).sum();
                let rounded = x.round();
                worst = worst.max((x - rounded).abs());
                out.push(rounded.max(0.0) as u32);
            }
        }
        (out, worst)
    });
    let max_integrality_defect = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    VerlindeTable { k: md.k, n: rows.into_iter().flat_map(|r| r.0).collect(), max_integrality_defect }
}

/// `|S_00 S_{i0 j}| / (|S_{0 i0}| |S_0j|)`.
pub fn monodromy_ratio(md: &ModularData, i0: usize, j: usize) -> Result<f64, WzwError> {
    if i0 > md.k || j > md.k {
        return Err(WzwError::Domain(format!("labels must lie in 0..={} (got i0={i0}, j={j})", md.k)));
    }
    let s = &md.s;
    Ok((s[0][0] * s[i0][j]).abs() / (s[0][i0].abs() * s[0][j].abs()))
}

pub fn alpha_induction_spectrum(k: usize, i0: usize, js: &[usize], exec: Exec) -> Result<AngleSpectrum, WzwError> {
    let md = su2k_modular(k)?;
    if !js.contains(&0) {
        return Err(WzwError::Domain("J must contain 0".into()));
    }
    let ratios: Vec<Result<f64, WzwError>> = exec.map_slice(js, |&j| monodromy_ratio(&md, i0, j));
    let ratios = ratios.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(AngleSpectrum::from_cosines(ratios))
}

/// Level and dual-canonical label set of a GHJ pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchingRule {
    pub graph: String,
    pub k: usize,
    pub j: Vec<usize>,
}

pub fn branching_rule(graph: &str) -> Result<BranchingRule, WzwError> {
    let unknown = || WzwError::UnknownGraph(graph.to_string());
    let (kind, n) = graph.split_at(1.min(graph.len()));
    let n: usize = n.parse().map_err(|_| unknown())?;
    let (k, j) = match (kind, n) {
        ("A", n) if n >= 2 => (n - 1, vec![0]),
        ("D", n) if n >= 4 && n % 2 == 0 => (2 * n - 4, vec![0, 2 * n - 4]),
        ("E", 6) => (10, vec![0, 6]),
        ("E", 7) => (16, vec![0, 8, 16]),
        ("E", 8) => (28, vec![0, 10, 18, 28]),
        _ => return Err(unknown()),
    };
    Ok(BranchingRule { graph: graph.to_string(), k, j })
}

pub fn ghj_spectrum(graph: &str) -> Result<AngleSpectrum, WzwError> {
    let rule = branching_rule(graph)?;
    alpha_induction_spectrum(rule.k, 1, &rule.j, Exec::default())
}

/// `{arccos(cos((j+1)π/(n+1)) / cos(π/(n+1))) : 1 ≤ j ≤ ⌊(n−2)/2⌋}`.
pub fn asymptotic_spectrum(n: usize) -> Result<AngleSpectrum, WzwError> {
    if n < 3 {
        return Err(WzwError::Domain(format!("n must be at least 3 (got {n})")));
    }
    let x = PI / (n + 1) as f64;
    let angles = (1..=(n - 2) / 2).map(|j| ((((j + 1) as f64) * x).cos() / x.cos()).acos());
    Ok(AngleSpectrum::from_angles(angles))
}

/// A nonnegative half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub u32);

impl HalfInt {
    pub fn from_twice(t: u32) -> Self {
        HalfInt(t)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for HalfInt {
    type Err = WzwError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let t = src.trim();
        let bad = || WzwError::BadSpin(src.to_string());
        if let Some(num) = t.strip_suffix("/2") {
            let n: u32 = num.trim().parse().map_err(|_| bad())?;
            return Ok(HalfInt(n));
        }
        if let Ok(n) = t.parse::<u32>() {
            return Ok(HalfInt(2 * n));
        }
        let x: f64 = t.parse().map_err(|_| bad())?;
        let twice = 2.0 * x;
        if x < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(HalfInt(twice.round() as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QParam {
    /// `q = e^{πi/m}`.
    RootOfUnity { m: u32 },
    /// `q = 1`.
    Classical,
}

/// `{j1 j2 j3; j4 j5 j6}` with triads (j1 j2 j3), (j1 j5 j6), (j4 j2 j6), (j4 j5 j3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QSixJ {
    pub q: QParam,
    pub spins: [HalfInt; 6],
}

impl QParam {
    /// q-integer `[x]` for `x` in half-units (argument `2x`), real at these `q`.
    fn qint_twice_arg(self, x: i64) -> f64 {
        match self {
            QParam::Classical => x as f64,
            QParam::RootOfUnity { m } => {
                let h = PI / (2.0 * f64::from(m));
                (x as f64 * h).sin() / h.sin()
            }
        }
    }

    fn qint(self, x: i64) -> f64 {
        self.qint_twice_arg(x)
    }

    /// `[n]!`, or `None` when some factor is nonpositive.
    fn positive_factorial(self, n: i64) -> Option<f64> {
        let mut acc = 1.0;
        for i in 1..=n {
            let v = self.qint(i);
            if v <= 1e-12 {
                return None;
            }
            acc *= v;
        }
        Some(acc)
    }

    /// `[n]!`, allowed to vanish or change sign.
    fn factorial(self, n: i64) -> f64 {
        (1..=n).map(|i| self.qint(i)).product()
    }
}

fn triad_ok(a: u32, b: u32, c: u32) -> bool {
    (a + b + c) % 2 == 0 && c <= a + b && a <= b + c && b <= a + c
}

/// Quantum 6j-symbol in the unitary (Racah-Wigner) normalization,
/// `(−1)^{j1+j2+j4+j5} √([2j3+1][2j6+1]) · Racah sum`, with
/// `[x] = sin(πx/2m)/sin(π/2m)`. Inadmissible triads give 0.
pub fn q6j(sym: &QSixJ) -> Result<Cx, WzwError> {
    let q = sym.q;
    if let QParam::RootOfUnity { m } = q {
        if m < 2 {
            return Err(WzwError::Domain("root-of-unity order m must be at least 2".into()));
        }
    }
    let [j1, j2, j3, j4, j5, j6] = sym.spins.map(|s| s.0);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triad_ok(a, b, c)) {
        return Ok(Cx::new(0.0, 0.0));
    }
    let domain = |what: &str| {
        WzwError::Domain(format!("{what} involves a nonpositive q-integer (spins beyond the truncation)"))
    };
    // All quantities below are in whole units: triad sums are even in half-units.
    let half = |x: u32| i64::from(x) / 2;
    let fact = |n: i64| q.positive_factorial(n).ok_or_else(|| domain("a q-factorial"));
    let delta = |a: u32, b: u32, c: u32| -> Result<f64, WzwError> {
        let num = fact(half(a + b - c))? * fact(half(a + c - b))? * fact(half(b + c - a))?;
        let den = fact(half(a + b + c) + 1)?;
        Ok((num / den).sqrt())
    };
    let mut pref = 1.0;
    for &(a, b, c) in &triads {
        pref *= delta(a, b, c)?;
    }
    let sums = triads.map(|(a, b, c)| half(a + b + c));
    let quads = [half(j1 + j2 + j4 + j5), half(j2 + j3 + j5 + j6), half(j3 + j1 + j6 + j4)];
    let lo = *sums.iter().max().expect("four triads");
    let hi = *quads.iter().min().expect("three sums");
    let mut total = 0.0;
    for t in lo..=hi {
        let mut den = 1.0;
        for s in sums {
            den *= fact(t - s)?;
        }
        for p in quads {
            den *= fact(p - t)?;
        }
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * q.factorial(t + 1) / den;
    }
    let d3 = q.qint(i64::from(j3) + 1);
    let d6 = q.qint(i64::from(j6) + 1);
    if d3 <= 0.0 || d6 <= 0.0 {
        return Err(domain("a normalization dimension"));
    }
    let phase = if half(j1 + j2 + j4 + j5) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(Cx::new(phase * (d3 * d6).sqrt() * pref * total, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    #[test]
    fn modular_examples() {
        let md = su2k_modular(2).unwrap();
        assert!((md.s[0][0] - 0.5).abs() < 1e-15);
        for k in [1, 5, 10, 31] {
            let md = su2k_modular(k).unwrap();
            assert!((md.dims[k] - 1.0).abs() < 1e-12);
            assert!(md.unitarity_defect() < 1e-10);
        }
        let md = su2k_modular(10).unwrap();
        assert!(md.dims[6] > 1.0);
        assert!((md.dims[1] - 2.0 * (PI / 12.0).cos()).abs() < 1e-12);
        assert!(su2k_modular(0).is_err());
    }

    #[test]
    fn monodromy_examples() {
        let md = su2k_modular(10).unwrap();
        assert!((monodromy_ratio(&md, 1, 6).unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!((monodromy_ratio(&md, 1, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((monodromy_ratio(&md, 1, 10).unwrap() - 1.0).abs() < 1e-12);
        assert!(monodromy_ratio(&md, 1, 11).is_err());
    }

    #[test]
    fn spectra_examples() {
        let e6 = ghj_spectrum("E6").unwrap();
        assert_eq!(e6.len(), 1);
        assert!((e6.angles[0] - (2.0 - 3f64.sqrt()).acos()).abs() < 1e-12);
        assert!(alpha_induction_spectrum(7, 1, &[0], Exec::default()).unwrap().is_empty());
        assert!(alpha_induction_spectrum(4, 1, &[0, 2, 4], Exec::default()).unwrap().is_empty());
        assert!(ghj_spectrum("A5").unwrap().is_empty());
        assert!(ghj_spectrum("D6").unwrap().is_empty());
        assert_eq!(branching_rule("D6").unwrap().k, 8);
        assert!(ghj_spectrum("D5").is_err());
        assert!(ghj_spectrum("F4").is_err());
        assert!(alpha_induction_spectrum(10, 1, &[6], Exec::default()).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        assert!(asymptotic_spectrum(3).unwrap().is_empty());
        let s = asymptotic_spectrum(4).unwrap();
        assert!((s.single().unwrap().cos() - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(asymptotic_spectrum(6).unwrap().len(), 2);
        assert!(asymptotic_spectrum(2).is_err());
    }

    #[test]
    fn half_int_parsing() {
        assert_eq!(h("3/2"), HalfInt(3));
        assert_eq!(h("2"), HalfInt(4));
        assert_eq!(h("2.5"), HalfInt(5));
        assert!("0.3".parse::<HalfInt>().is_err());
        assert!("-1".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt(5).to_string(), "5/2");
    }

    #[test]
    fn six_j_scalar_is_minus_one() {
        for n in 2u32..=6 {
            let spins = [HalfInt(2 * n), HalfInt(n), HalfInt(n), HalfInt(2), HalfInt(n), HalfInt(n)];
            let v = q6j(&QSixJ { q: QParam::RootOfUnity { m: n + 1 }, spins }).unwrap();
            assert!((v - Cx::new(-1.0, 0.0)).norm() < 1e-9, "n={n}: {v}");
        }
    }

    #[test]
    fn six_j_trivial_and_inadmissible() {
        let zero = [HalfInt(0); 6];
        for q in [QParam::Classical, QParam::RootOfUnity { m: 5 }] {
            assert!((q6j(&QSixJ { q, spins: zero }).unwrap().re - 1.0).abs() < 1e-12);
        }
        let bad = [h("1"), h("1"), h("3"), h("1"), h("1"), h("1")];
        assert_eq!(q6j(&QSixJ { q: QParam::Classical, spins: bad }).unwrap(), Cx::new(0.0, 0.0));
        let parity = [h("1/2"), h("1/2"), h("1/2"), h("0"), h("0"), h("0")];
        assert_eq!(q6j(&QSixJ { q: QParam::Classical, spins: parity }).unwrap(), Cx::new(0.0, 0.0));
    }

    #[test]
    fn six_j_beyond_truncation_is_domain_error() {
        let spins = [h("3"), h("3"), h("0"), h("3"), h("3"), h("0")];
        let r = q6j(&QSixJ { q: QParam::RootOfUnity { m: 2 }, spins });
        assert!(matches!(r, Err(WzwError::Domain(_))));
    }

    #[test]
    fn classical_known_value() {
        // Wigner {j1 j2 j3; j2 j1 0} = (−1)^{j1+j2+j3} / √((2j1+1)(2j2+1)) = 1/2 here,
        // scaled by √([2j3+1][2j6+1]) = √3.
        let spins = [h("1/2"), h("1/2"), h("1"), h("1/2"), h("1/2"), h("0")];
        let w = q6j(&QSixJ { q: QParam::Classical, spins }).unwrap().re;
        assert!((w.abs() - 3f64.sqrt() / 2.0).abs() < 1e-12, "{w}");
    }
}

//! Closed-form angle invariants of quadrilaterals, plus a brute-force
//! coset computation for group-type quadrilaterals.
//!
//! None of these functions checks the operator-algebraic hypotheses behind a
//! formula (irreducibility, supertransitivity, cocommutativity); callers
//! assert them.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Tolerance;

/// Two angles closer than this are the same spectral point.
pub const ANGLE_DEDUP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("structural error: {0}")]
    Structure(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AngleSpectrum {
    /// Sorted ascending, each strictly inside `(0, π/2)`.
    pub angles: Vec<f64>,
    pub commuting: bool,
}

impl AngleSpectrum {
    pub fn commuting() -> Self {
        AngleSpectrum { angles: Vec::new(), commuting: true }
    }

    /// Builds a spectrum from cosines, dropping the angles 0 and π/2 and
    /// merging points within [`ANGLE_DEDUP`].
    pub fn from_cosines<I: IntoIterator<Item = f64>>(cosines: I) -> Self {
        Self::from_angles(cosines.into_iter().map(|c| c.abs().min(1.0).acos()))
    }

    pub fn from_angles<I: IntoIterator<Item = f64>>(angles: I) -> Self {
        let mut v: Vec<f64> = angles
            .into_iter()
            .filter(|&a| a > ANGLE_DEDUP && a < FRAC_PI_2 - ANGLE_DEDUP)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_DEDUP);
        AngleSpectrum { angles: v, commuting: false }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// The single angle of a one-point spectrum.
    pub fn single(&self) -> Option<f64> {
        match self.angles.as_slice() {
            [a] => Some(*a),
            _ => None,
        }
    }
}

/// `[P:N]` and `[M:P]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadIndexData {
    pub pn: f64,
    pub mp: f64,
}

impl QuadIndexData {
    pub fn new(pn: f64, mp: f64) -> Result<Self, AngleError> {
        if !(pn > 1.0 && mp > 1.0) {
            return Err(AngleError::Domain(format!("indices must exceed 1 (got pn={pn}, mp={mp})")));
        }
        Ok(QuadIndexData { pn, mp })
    }
}

/// `d(σ)` and `⟨s_P, s_Q⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerData {
    pub d_sigma: f64,
    pub s: f64,
}

impl InnerData {
    pub fn new(d_sigma: f64, s: f64) -> Result<Self, AngleError> {
        if !(d_sigma > 1.0) {
            return Err(AngleError::Domain(format!("d(sigma) must exceed 1 (got {d_sigma})")));
        }
        if !(s.abs() <= 1.0 + Tolerance::default().abs) {
            return Err(AngleError::Domain(format!("|s| must be at most 1 (got {s})")));
        }
        Ok(InnerData { d_sigma, s: s.clamp(-1.0, 1.0) })
    }
}

/// `cos²Θ = (pn − mp) / (mp (pn − 1))`, or commuting when `pn = mp`.
pub fn angle_cocommuting(q: QuadIndexData) -> Result<AngleSpectrum, AngleError> {
    let QuadIndexData { pn, mp } = q;
    if Tolerance::default().approx_eq(pn, mp) {
        return Ok(AngleSpectrum::commuting());
    }
    if pn < mp {
        return Err(AngleError::Domain(format!("[P:N]={pn} < [M:P]={mp} gives a negative cos^2")));
    }
    let c2 = (pn - mp) / (mp * (pn - 1.0));
    Ok(AngleSpectrum { angles: vec![c2.sqrt().acos()], commuting: false })
}

/// Group quadrilateral `G ⊃ H, K ⊃ H∩K` from subgroup orders.
pub fn angle_group(g: u64, h: u64, k: u64, hk: u64) -> Result<AngleSpectrum, AngleError> {
    if h != k {
        return Err(AngleError::Precondition(format!("[G:H] != [G:K] (|H|={h}, |K|={k})")));
    }
    if g == 0 || hk == 0 || g % h != 0 || h % hk != 0 {
        return Err(AngleError::Structure(format!("orders do not divide: |G|={g}, |H|={h}, |H∩K|={hk}")));
    }
    let (pn, mp) = (g / h, h / hk);
    if pn == 1 || mp == 1 {
        return Err(AngleError::Precondition(format!("degenerate inclusion ([G:H]={pn}, [H:H∩K]={mp})")));
    }
    angle_cocommuting(QuadIndexData::new(pn as f64, mp as f64)?)
}

/// The two cosine candidates and their angles; a cosine of 1 means `P = Q`
/// and carries no angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidates {
    pub cos_plus: f64,
    pub cos_minus: f64,
    pub angle_plus: Option<f64>,
    pub angle_minus: Option<f64>,
}

pub fn angle_candidates(d: InnerData) -> Candidates {
    let InnerData { d_sigma: ds, s } = d;
    let root = ((ds - 1.0).powi(2) * s * s + 4.0 * ds).sqrt();
    let shift = (ds - 1.0) * s.abs();
    let cos_plus = (root + shift) / (2.0 * ds);
    // Rationalized form of (root − shift)/(2 ds); avoids cancellation.
    let cos_minus = 2.0 / (root + shift);
    let tol = Tolerance::default();
    let angle = |c: f64| if tol.approx_eq(c, 1.0) { None } else { Some(c.min(1.0).acos()) };
    Candidates { cos_plus, cos_minus, angle_plus: angle(cos_plus), angle_minus: angle(cos_minus) }
}

/// Roots of `x² − ((dσ−1)/dσ) s x − 1/dσ`, larger first.
pub fn t_inner_roots(d: InnerData) -> (f64, f64) {
    let InnerData { d_sigma: ds, s } = d;
    let p = (ds - 1.0) / ds * s;
    let disc = (p * p + 4.0 / ds).sqrt();
    // Product of roots is −1/dσ; take the stable root first.
    if p >= 0.0 {
        let r1 = (p + disc) / 2.0;
        (r1, -1.0 / (ds * r1))
    } else {
        let r2 = (p - disc) / 2.0;
        (-1.0 / (ds * r2), r2)
    }
}

/// `arccos(1/([P:N] − 1))`.
pub fn angle_bound(pn: f64) -> Result<f64, AngleError> {
    if !(pn > 2.0) {
        return Err(AngleError::Domain(format!("[P:N] must exceed 2 (got {pn})")));
    }
    Ok((1.0 / (pn - 1.0)).acos())
}

/// A permutation of `0..n` in image form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    /// Closure of the generators under composition.
    pub fn generate(n: usize, gens: &[Perm]) -> Vec<Perm> {
        let mut seen = std::collections::BTreeSet::new();
        let mut frontier = vec![Perm::identity(n)];
        seen.insert(Perm::identity(n));
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Angles of the quadrilateral `ℂ ⊂ ℂ[G/H], ℂ[G/K]` computed directly: the
/// nonzero spectrum of `P_H P_K P_H − P_G` on `ℂ[G]`, where `P_S` averages
/// over right translation by `S`.
pub fn coset_angles(g: &[Perm], h: &[Perm], k: &[Perm]) -> Result<AngleSpectrum, AngleError> {
    let n = g.len();
    let pos = |p: &Perm| {
        g.binary_search(p)
            .map_err(|_| AngleError::Structure("subgroup element outside G".into()))
    };
    let mut sorted = g.to_vec();
    sorted.sort();
    if sorted != g {
        return Err(AngleError::Structure("group elements must be sorted".into()));
    }
    let averaging = |s: &[Perm]| -> Result<DMatrix<f64>, AngleError> {
        let mut m = DMatrix::zeros(n, n);
        let w = 1.0 / s.len() as f64;
        for (row, x) in g.iter().enumerate() {
            for y in s {
                m[(row, pos(&x.compose(y))?)] += w;
            }
        }
        Ok(m)
    };
    let ph = averaging(h)?;
    let pk = averaging(k)?;
    let pg = DMatrix::from_element(n, n, 1.0 / n as f64);
    let op = &ph * &pk * &ph - pg;
    let sym = (&op + op.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let tol = 1e-9;
    let cosines = eig.iter().filter(|&&l| l > tol && l < 1.0 - tol).map(|&l| l.sqrt());
    Ok(AngleSpectrum::from_cosines(cosines))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    const EPS: f64 = 1e-12;

    fn one(s: AngleSpectrum) -> f64 {
        s.single().expect("single angle")
    }

    #[test]
    fn cocommuting_examples() {
        let q = |a, b| angle_cocommuting(QuadIndexData::new(a, b).unwrap());
        assert!((one(q(3.0, 2.0).unwrap()) - FRAC_PI_3).abs() < EPS);
        assert!(q(5.0, 5.0).unwrap().commuting);
        let c = one(q(7.0, 4.0).unwrap()).cos();
        assert!((c - 2f64.powf(-1.5)).abs() < EPS);
        assert!(matches!(q(2.0, 3.0), Err(AngleError::Domain(_))));
    }

    #[test]
    fn group_examples() {
        assert!((one(angle_group(24, 6, 6, 2).unwrap()).cos() - 1.0 / 3.0).abs() < EPS);
        assert!((one(angle_group(60, 12, 12, 3).unwrap()).cos() - 0.25).abs() < EPS);
        assert!(matches!(angle_group(6, 6, 6, 1), Err(AngleError::Precondition(_))));
        assert!(matches!(angle_group(24, 6, 4, 2), Err(AngleError::Precondition(_))));
        assert!(matches!(angle_group(24, 5, 5, 1), Err(AngleError::Structure(_))));
    }

    #[test]
    fn candidates_examples() {
        let c = angle_candidates(InnerData::new(3.0, 1.0).unwrap());
        assert!((c.cos_plus - 1.0).abs() < EPS && c.angle_plus.is_none());
        assert!((c.cos_minus - 1.0 / 3.0).abs() < EPS);
        let c = angle_candidates(InnerData::new(4.0, 0.0).unwrap());
        assert!((c.cos_plus - 0.5).abs() < EPS && (c.cos_minus - 0.5).abs() < EPS);
        let d = 1.0 + 2f64.sqrt();
        let c = angle_candidates(InnerData::new(d, 1.0).unwrap());
        assert!((c.angle_minus.unwrap() - (2f64.sqrt() - 1.0).acos()).abs() < EPS);
        assert!(InnerData::new(1.0, 0.0).is_err());
        assert!(InnerData::new(2.0, 1.5).is_err());
    }

    #[test]
    fn roots_examples() {
        let (a, b) = t_inner_roots(InnerData::new(3.0, 1.0).unwrap());
        assert!((a - 1.0).abs() < EPS && (b + 1.0 / 3.0).abs() < EPS);
        let (a, b) = t_inner_roots(InnerData::new(3.0, -1.0).unwrap());
        assert!((a - 1.0 / 3.0).abs() < EPS && (b + 1.0).abs() < EPS);
        let (a, b) = t_inner_roots(InnerData::new(2.0, 0.0).unwrap());
        assert!((a - 0.5f64.sqrt()).abs() < EPS && (b + 0.5f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn bound_examples() {
        let r2 = 2f64.sqrt();
        assert!((angle_bound(2.0 + r2).unwrap() - (r2 - 1.0).acos()).abs() < EPS);
        assert!((angle_bound(3.0).unwrap() - FRAC_PI_3).abs() < EPS);
        let r5 = 5f64.sqrt();
        assert!((angle_bound((5.0 + r5) / 2.0).unwrap() - ((3.0 - r5) / 2.0).acos()).abs() < EPS);
        assert!(angle_bound(2.0).is_err());
    }

    #[test]
    fn spectrum_filters_and_dedups() {
        let s = AngleSpectrum::from_cosines([1.0, 0.0, 0.5, 0.5 + 1e-13, -0.5]);
        assert_eq!(s.len(), 1);
        assert!((s.angles[0] - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn dihedral_exception() {
        // D8 on the square's vertices; two non-conjugate reflections.
        let g = Perm::generate(4, &[Perm(vec![1, 2, 3, 0]), Perm(vec![0, 3, 2, 1])]);
        assert_eq!(g.len(), 8);
        let h = Perm::generate(4, &[Perm(vec![0, 3, 2, 1])]);
        let k = Perm::generate(4, &[Perm(vec![1, 0, 3, 2])]);
        let s = coset_angles(&g, &h, &k).unwrap();
        assert!((one(s) - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn symmetric_group_cosets_match_formula() {
        let s3 = Perm::generate(3, &[Perm(vec![1, 0, 2]), Perm(vec![0, 2, 1])]);
        let h = Perm::generate(3, &[Perm(vec![1, 0, 2])]);
        let k = Perm::generate(3, &[Perm(vec![0, 2, 1])]);
        let s = coset_angles(&s3, &h, &k).unwrap();
        assert!((one(s) - FRAC_PI_3).abs() < 1e-9);
    }
}

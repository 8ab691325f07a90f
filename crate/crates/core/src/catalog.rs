//! Built-in fusion rings.

use std::path::Path;

use serde::Serialize;

use crate::fusion::{FusionError, FusionRing};

const HAAGERUP_EVEN: &str = include_str!("../catalog/haagerup_even.json");
const D6_EVEN: &str = include_str!("../catalog/d6_even.json");
const E6_EVEN: &str = include_str!("../catalog/e6_even.json");
const S4_REP: &str = include_str!("../catalog/s4_rep.json");
const A4_REP: &str = include_str!("../catalog/a4_rep.json");
const D6AFF_EVEN: &str = include_str!("../catalog/d6aff_even.json");

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub parameterized: bool,
    pub description: &'static str,
    pub provenance: &'static str,
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        key: "su2",
        parameterized: true,
        description: "SU(2)_k Verlinde ring, labels l0..lk (truncated Clebsch-Gordan rule)",
        provenance: "generated from the level-k truncation rule",
    },
    CatalogEntry {
        key: "d6_even",
        parameterized: false,
        description: "even part of the D6 subfactor: Fib x Fib, labels 1, rho, rho1, rho2",
        provenance: "tensor square of the Fibonacci rule tau^2 = 1 + tau",
    },
    CatalogEntry {
        key: "e6_even",
        parameterized: false,
        description: "even part of the E6 subfactor: labels 1, alpha, eta with eta^2 = 1 + alpha + 2 eta",
        provenance: "principal-graph fusion rules of E6",
    },
    CatalogEntry {
        key: "s4_rep",
        parameterized: false,
        description: "Rep(S4): trivial, sign, 2-dim, standard, standard x sign",
        provenance: "character table of S4",
    },
    CatalogEntry {
        key: "a4_rep",
        parameterized: false,
        description: "Rep(A4): three characters and the 3-dim irreducible x",
        provenance: "character table of A4",
    },
    CatalogEntry {
        key: "d6aff_even",
        parameterized: false,
        description: "Tambara-Yamagami ring of Z2 x Z2 (affine D6 even part)",
        provenance: "Z2 x Z2 group elements plus one noninvertible object of dimension 2",
    },
    CatalogEntry {
        key: "haagerup_even",
        parameterized: false,
        description: "even part of the Haagerup subfactor: Z3 = {1,t,t2} and r, tr, t2r",
        provenance: "r g = g^-1 r and r^2 = 1 + r + tr + t2r",
    },
];

pub fn list() -> &'static [CatalogEntry] {
    ENTRIES
}

/// Looks up a built-in ring. `k` is required for `su2` and rejected otherwise.
pub fn builtin(key: &str, k: Option<usize>) -> Result<FusionRing, FusionError> {
    let text = match (key, k) {
        ("su2", Some(0)) => return Err(FusionError::Structure("su2 needs k >= 1".into())),
        ("su2", Some(k)) => return su2(k),
        ("su2", None) => return Err(FusionError::Structure("su2 needs a level k".into())),
        (_, Some(_)) => return Err(FusionError::Structure(format!("ring '{key}' takes no level"))),
        ("haagerup_even", None) => HAAGERUP_EVEN,
        ("d6_even", None) => D6_EVEN,
        ("e6_even", None) => E6_EVEN,
        ("s4_rep", None) => S4_REP,
        ("a4_rep", None) => A4_REP,
        ("d6aff_even", None) => D6AFF_EVEN,
        _ => return Err(FusionError::Structure(format!("unknown catalog ring '{key}'"))),
    };
    FusionRing::from_json(text)
}

/// Reads and validates a user ring file.
pub fn load(path: impl AsRef<Path>) -> Result<FusionRing, FusionError> {
    FusionRing::load(path)
}

pub fn save(ring: &FusionRing, path: impl AsRef<Path>) -> Result<(), FusionError> {
    ring.save(path)
}

/// `λ_i ⊗ λ_j = ⊕ λ_l`, `l = |i-j|, |i-j|+2, …, min(i+j, 2k-i-j)`.
pub fn su2(k: usize) -> Result<FusionRing, FusionError> {
    let labels = (0..=k).map(|i| format!("l{i}")).collect();
    let dual = (0..=k).collect();
    FusionRing::from_fn(&format!("su2_{k}"), labels, 0, dual, |i, j, l| {
        let lo = i.abs_diff(j);
        let hi = (i + j).min(2 * k - i - j);
        u32::from(l >= lo && l <= hi && (l - lo) % 2 == 0)
    })
}

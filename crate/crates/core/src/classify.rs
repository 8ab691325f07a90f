//! The seven noncommuting irreducible quadrilaterals as data, with checks
//! that replay their index arithmetic, angles and fusion-ring witnesses, plus
//! the exclusion arithmetic used to rule out the remaining cases.
//!
//! Operator-algebraic inputs (supertransitivity, cohomology vanishing,
//! Galois-group identification) are recorded per case as assumptions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angles::{angle_bound, angle_cocommuting, coset_angles, Perm, QuadIndexData};
use crate::catalog::builtin;
use crate::exec::Exec;
use crate::fusion::{decompose, hom_dim, pf_dimensions, SectorExpr};
use crate::scalar::{format_sig, QuadExt};

/// Angle agreement tolerance.
pub const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseClass {
    I,
    II,
    III,
    IV,
    #[serde(rename = "group-type")]
    GroupType,
    #[serde(rename = "D6affine")]
    D6Affine,
}

/// Exact relation between `[P:N]` and `[M:P]` the case must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRelation {
    /// `[M:P] = [P:N] − 1`.
    Cocommuting,
    /// `[M:P] = [P:N]`.
    Equal,
    None,
}

/// How the angle is recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMethod {
    /// `arccos(1/([P:N]−1))`, cross-checked against the cocommuting formula
    /// when the relation is cocommuting.
    Bound,
    /// Brute-force spectrum on `ℂ[G]` from the case's group data.
    Group,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupData {
    pub name: String,
    pub degree: usize,
    pub g: Vec<Vec<usize>>,
    pub h: Vec<Vec<usize>>,
    pub k: Vec<Vec<usize>>,
}

/// Which value a defining polynomial is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyVar {
    Pn,
    Mp,
    PnMinusOne,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiningPolynomial {
    pub var: PolyVar,
    /// Integer coefficients, constant term first.
    pub coeffs: Vec<i64>,
}

/// Catalog ring whose PF dimensions must reproduce the indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogWitness {
    pub ring: String,
    #[serde(default)]
    pub k: Option<usize>,
    pub pn: String,
    pub mp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadCase {
    pub id: String,
    /// Principal graphs of `N ⊂ P` and `P ⊂ M`.
    pub graphs: (String, String),
    pub pn: QuadExt,
    pub mp: QuadExt,
    pub class: CaseClass,
    pub relation: IndexRelation,
    pub expected_cos: QuadExt,
    pub angle_method: AngleMethod,
    #[serde(default)]
    pub group: Option<GroupData>,
    #[serde(default)]
    pub galois: Option<String>,
    #[serde(default)]
    pub polynomial: Option<DefiningPolynomial>,
    #[serde(default)]
    pub witness: Option<CatalogWitness>,
    #[serde(default)]
    pub assumptions: Vec<String>,
}

impl QuadCase {
    pub fn expected_angle(&self) -> f64 {
        self.expected_cos.eval().acos()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub checks: Vec<Check>,
}

impl CheckResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), pass, detail: detail.into() });
    }
}

fn q(s: &str) -> QuadExt {
    s.parse().expect("table literal")
}

fn perms(v: &[&[usize]]) -> Vec<Vec<usize>> {
    v.iter().map(|p| p.to_vec()).collect()
}

/// The seven cases, in their customary order.
pub fn classification_table() -> Vec<QuadCase> {
    let base = |id: &str, graphs: (&str, &str), pn: &str, mp: &str, class, relation, cos: &str| QuadCase {
        id: id.to_string(),
        graphs: (graphs.0.to_string(), graphs.1.to_string()),
        pn: q(pn),
        mp: q(mp),
        class,
        relation,
        expected_cos: q(cos),
        angle_method: AngleMethod::Bound,
        group: None,
        galois: None,
        polynomial: None,
        witness: None,
        assumptions: Vec::new(),
    };
    let witness = |ring: &str, k: Option<usize>, pn: &str, mp: &str| {
        Some(CatalogWitness { ring: ring.into(), k, pn: pn.into(), mp: mp.into() })
    };
    let s3 = GroupData {
        name: "S3".into(),
        degree: 3,
        g: perms(&[&[1, 0, 2], &[0, 2, 1]]),
        h: perms(&[&[1, 0, 2]]),
        k: perms(&[&[0, 2, 1]]),
    };
    let a4 = GroupData {
        name: "A4".into(),
        degree: 4,
        g: perms(&[&[1, 2, 0, 3], &[0, 2, 3, 1]]),
        h: perms(&[&[1, 2, 0, 3]]),
        k: perms(&[&[0, 2, 3, 1]]),
    };
    let s4 = GroupData {
        name: "S4".into(),
        degree: 4,
        g: perms(&[&[1, 0, 2, 3], &[1, 2, 3, 0]]),
        h: perms(&[&[1, 0, 2, 3], &[1, 2, 0, 3]]),
        k: perms(&[&[0, 2, 1, 3], &[0, 2, 3, 1]]),
    };
    let d8 = GroupData {
        name: "D8".into(),
        degree: 4,
        g: perms(&[&[1, 2, 3, 0], &[0, 3, 2, 1]]),
        h: perms(&[&[0, 3, 2, 1]]),
        k: perms(&[&[1, 0, 3, 2]]),
    };
    use CaseClass::*;
    use IndexRelation as R;
    vec![
        QuadCase {
            group: Some(s3),
            witness: witness("su2", Some(4), "1 + l2", "1 + l4"),
            assumptions: vec!["N ⊂ P and N ⊂ Q are A5, P ⊂ M and Q ⊂ M are A3 (group-type, S3 ⊃ Z2, Z2')".into()],
            ..base("a5a3", ("A5", "A3"), "3", "2", GroupType, R::Cocommuting, "1/2")
        },
        QuadCase {
            polynomial: Some(DefiningPolynomial { var: PolyVar::Mp, coeffs: vec![1, -3, 1] }),
            witness: witness("d6_even", None, "1 + rho", "1 + rho1"),
            assumptions: vec!["cocommuting, trivial class; dual even part is Fib x Fib".into()],
            ..base("d6a4", ("D6", "A4"), "5/2+1/2*sqrt(5)", "3/2+1/2*sqrt(5)", II, R::Cocommuting, "3/2-1/2*sqrt(5)")
        },
        QuadCase {
            polynomial: Some(DefiningPolynomial { var: PolyVar::PnMinusOne, coeffs: vec![-1, -2, 1] }),
            witness: witness("su2", Some(6), "1 + l2", "1 + l2"),
            assumptions: vec!["N ⊂ P is 3-supertransitive; [M:P] = [P:N]".into()],
            ..base("a7a7", ("A7", "A7"), "2+sqrt(2)", "2+sqrt(2)", I, R::Equal, "-1+sqrt(2)")
        },
        QuadCase {
            angle_method: AngleMethod::Group,
            group: Some(d8),
            witness: witness("d6aff_even", None, "xi*xi", "xi"),
            assumptions: vec![
                "no index relation; [M:N] = 8 realized by D8 with non-conjugate reflection subgroups".into(),
            ],
            ..base("d6aff_a3", ("D6(1)", "A3"), "4", "2", D6Affine, R::None, "1/2*sqrt(2)")
        },
        QuadCase {
            group: Some(a4),
            galois: Some("A4".into()),
            witness: witness("a4_rep", None, "1 + x", "1 + w + w2"),
            assumptions: vec!["group-type, A4 ⊃ Z3, Z3'".into()],
            ..base("e6aff_d4", ("E6(1)", "D4"), "4", "3", GroupType, R::Cocommuting, "1/3")
        },
        QuadCase {
            group: Some(s4),
            galois: Some("S4".into()),
            witness: witness("s4_rep", None, "1 + eta", "1 + eta'"),
            assumptions: vec!["S4 ⊃ S3, S3' with S3 ∩ S3' = Z2".into()],
            ..base("e7aff_a5", ("E7(1)", "A5"), "4", "3", III, R::Cocommuting, "1/3")
        },
        QuadCase {
            assumptions: vec!["N ⊂ P is 3-supertransitive; [M:P] = [P:N]".into()],
            ..base("e7aff_e7aff", ("E7(1)", "E7(1)"), "4", "4", I, R::Equal, "1/3")
        },
    ]
}

pub fn load_table(path: impl AsRef<Path>) -> Result<Vec<QuadCase>, String> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
}

fn eval_poly(coeffs: &[i64], x: &QuadExt) -> Result<QuadExt, String> {
    let mut acc = QuadExt::zero();
    for &c in coeffs.iter().rev() {
        acc = acc.checked_mul(x).and_then(|a| a.checked_add(&QuadExt::integer(c))).map_err(|e| e.to_string())?;
    }
    Ok(acc)
}

fn group_angle(g: &GroupData) -> Result<f64, String> {
    let mk = |v: &[Vec<usize>]| v.iter().map(|p| Perm(p.clone())).collect::<Vec<_>>();
    let gg = Perm::generate(g.degree, &mk(&g.g));
    let h = Perm::generate(g.degree, &mk(&g.h));
    let k = Perm::generate(g.degree, &mk(&g.k));
    let spectrum = coset_angles(&gg, &h, &k).map_err(|e| e.to_string())?;
    spectrum.single().ok_or_else(|| format!("expected one angle, got {:?}", spectrum.angles))
}

pub fn verify_case(case: &QuadCase) -> CheckResult {
    let mut out = CheckResult { id: case.id.clone(), checks: Vec::new() };
    let pn_f = case.pn.eval();
    let mp_f = case.mp.eval();
    let expected = case.expected_angle();

    match case.pn.checked_mul(&case.mp) {
        Ok(mn) => {
            let ok = (mn.eval() - pn_f * mp_f).abs() <= 1e-12 * mn.eval().abs().max(1.0);
            out.push("index_product", ok, format!("[M:N] = {mn} = {}", format_sig(mn.eval())));
        }
        Err(e) => out.push("index_product", false, e.to_string()),
    }

    let rel = match case.relation {
        IndexRelation::Cocommuting => case.pn.checked_sub(&QuadExt::one()).map(|d| d == case.mp),
        IndexRelation::Equal => Ok(case.pn == case.mp),
        IndexRelation::None => Ok(true),
    };
    match (case.relation, rel) {
        (IndexRelation::None, _) => out.push("index_relation", true, "no relation required"),
        (r, Ok(ok)) => {
            let want = if r == IndexRelation::Equal { "[M:P] = [P:N]" } else { "[M:P] = [P:N] - 1" };
            out.push("index_relation", ok, format!("{want}: [P:N] = {}, [M:P] = {} (exact)", case.pn, case.mp));
        }
        (_, Err(e)) => out.push("index_relation", false, e.to_string()),
    }

    let angle = match case.angle_method {
        AngleMethod::Bound => angle_bound(pn_f).map_err(|e| e.to_string()),
        AngleMethod::Group => match &case.group {
            Some(g) => group_angle(g),
            None => Err("group method without group data".to_string()),
        },
    };
    match angle {
        Ok(a) => {
            let ok = (a - expected).abs() <= ANGLE_TOL;
            out.push(
                "angle",
                ok,
                format!("computed {} rad, expected arccos({}) = {} rad", format_sig(a), case.expected_cos, format_sig(expected)),
            );
        }
        Err(e) => out.push("angle", false, e),
    }
    if case.relation == IndexRelation::Cocommuting {
        let co = QuadIndexData::new(pn_f, mp_f).and_then(angle_cocommuting);
        match co {
            Ok(s) => match s.single() {
                Some(a) => {
                    let ok = (a - expected).abs() <= ANGLE_TOL;
                    out.push("cocommuting_formula", ok, format!("cos^2 formula gives {} rad", format_sig(a)));
                }
                None => out.push("cocommuting_formula", false, "formula reports a commuting square"),
            },
            Err(e) => out.push("cocommuting_formula", false, e.to_string()),
        }
    }
    if case.angle_method == AngleMethod::Bound {
        if let Some(g) = &case.group {
            match group_angle(g) {
                Ok(a) => {
                    let ok = (a - expected).abs() <= 1e-9;
                    out.push("group_brute_force", ok, format!("{} on C[G] gives {} rad", g.name, format_sig(a)));
                }
                Err(e) => out.push("group_brute_force", false, e),
            }
        }
    }
    if let Some(g) = &case.group {
        let mk = |v: &[Vec<usize>]| v.iter().map(|p| Perm(p.clone())).collect::<Vec<_>>();
        let order = |gens: &[Vec<usize>]| Perm::generate(g.degree, &mk(gens)).len();
        let (go, ho, ko) = (order(&g.g), order(&g.h), order(&g.k));
        let hk = Perm::generate(g.degree, &mk(&g.h))
            .into_iter()
            .filter(|p| Perm::generate(g.degree, &mk(&g.k)).contains(p))
            .count();
        let pn_ok = case.pn == QuadExt::integer((go / ho) as i64) && ho == ko;
        let mp_ok = case.mp == QuadExt::integer((ho / hk) as i64);
        out.push(
            "group_indices",
            pn_ok && mp_ok,
            format!("|G|={go}, |H|={ho}, |K|={ko}, |H∩K|={hk}"),
        );
    }

    if let Some(p) = &case.polynomial {
        let x = match p.var {
            PolyVar::Pn => Ok(case.pn.clone()),
            PolyVar::Mp => Ok(case.mp.clone()),
            PolyVar::PnMinusOne => case.pn.checked_sub(&QuadExt::one()).map_err(|e| e.to_string()),
        };
        match x.and_then(|x| eval_poly(&p.coeffs, &x).map(|v| (x, v))) {
            Ok((x, v)) => out.push("polynomial", v.is_zero(), format!("p({x}) = {v} with coefficients {:?}", p.coeffs)),
            Err(e) => out.push("polynomial", false, e),
        }
    }

    if let Some(w) = &case.witness {
        out.push_witness(w, pn_f, mp_f);
    }
    out
}

impl CheckResult {
    fn push_witness(&mut self, w: &CatalogWitness, pn: f64, mp: f64) {
        let res = (|| -> Result<(f64, f64), String> {
            let ring = builtin(&w.ring, w.k).map_err(|e| e.to_string())?;
            let dims = pf_dimensions(&ring).map_err(|e| e.to_string())?;
            let dim = |s: &str| -> Result<f64, String> {
                let e = SectorExpr::parse(s).map_err(|e| e.to_string())?;
                Ok(decompose(&ring, &e).map_err(|e| e.to_string())?.dimension(&dims))
            };
            Ok((dim(&w.pn)?, dim(&w.mp)?))
        })();
        let ring = match w.k {
            Some(k) => format!("{}({k})", w.ring),
            None => w.ring.clone(),
        };
        match res {
            Ok((a, b)) => {
                let ok = (a - pn).abs() <= 1e-9 && (b - mp).abs() <= 1e-9;
                self.push(
                    "catalog_dimensions",
                    ok,
                    format!("{ring}: d({}) = {}, d({}) = {}", w.pn, format_sig(a), w.mp, format_sig(b)),
                );
            }
            Err(e) => self.push("catalog_dimensions", false, format!("{ring}: {e}")),
        }
    }
}

fn exclusion_class_iv_bound() -> CheckResult {
    let mut out = CheckResult { id: "class_iv_bound".into(), checks: Vec::new() };
    let res = (|| -> Result<(), String> {
        let h = builtin("haagerup_even", None).map_err(|e| e.to_string())?;
        let v = decompose(&h, &SectorExpr::parse("r*r").map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let needed = ["1", "r", "tr", "t2r"];
        let contains = needed.iter().all(|l| h.index_of(l).map(|i| v.get(i) >= 1).unwrap_or(false));
        out.push("r^2 contains 1, r, tr, t2r", contains, format!("r*r = {}", h.format_mult(&v)));
        // d(tr) = d(t2r) = d(r) = d, so d² ≥ 1 + 3d, with equality at the larger root.
        let d = q("3/2+1/2*sqrt(13)");
        let quad = eval_poly(&[-1, -3, 1], &d).map_err(|e| e.to_string())?;
        out.push("d^2 = 1 + 3d at d = (3+sqrt(13))/2", quad.is_zero(), format!("d^2 - 3d - 1 = {quad}"));
        let pf = pf_dimensions(&h).map_err(|e| e.to_string())?.get("r").unwrap_or(f64::NAN);
        out.push("PF dimension of r", (pf - d.eval()).abs() <= 1e-9, format!("d(r) = {}", format_sig(pf)));
        let mp = &QuadExt::one() + &d;
        let bound = q("5/2+1/2*sqrt(13)");
        out.push("[M:P] = 1 + d >= (5+sqrt(13))/2", mp >= bound, format!("1 + d = {mp}"));
        Ok(())
    })();
    if let Err(e) = res {
        out.push("class_iv_bound", false, e);
    }
    out
}

fn exclusion_not_3_supertransitive() -> CheckResult {
    let mut out = CheckResult { id: "haagerup_hom_dimension".into(), checks: Vec::new() };
    let res = (|| -> Result<(), String> {
        let h = builtin("haagerup_even", None).map_err(|e| e.to_string())?;
        let p = |s: &str| SectorExpr::parse(s).map_err(|e| e.to_string());
        let n = hom_dim(&h, &p("t2*r*r")?, &p("t2 + r")?).map_err(|e| e.to_string())?;
        out.push("dim(t2 r^2, t2 + r) = 2", n == 2, format!("value {n}"));
        let n = hom_dim(&h, &p("(1+r)*t*(1+r)")?, &p("t*(1+r)*t")?).map_err(|e| e.to_string())?;
        out.push("dim((1+r)t(1+r), t(1+r)t) = 2", n == 2, format!("value {n}"));
        Ok(())
    })();
    if let Err(e) = res {
        out.push("haagerup_hom_dimension", false, e);
    }
    out
}

fn exclusion_e6_group_case() -> CheckResult {
    let mut out = CheckResult { id: "e6_group_exclusion".into(), checks: Vec::new() };
    let x = q("1+sqrt(3)");
    out.push("[P:N] - 1 = 1 + sqrt(3) is not an integer", !x.is_integer(), format!("{x} is irrational"));
    let hits: Vec<i64> = (2..=4).filter(|&n| x == QuadExt::integer(n)).collect();
    out.push("1 + sqrt(3) not in {2, 3, 4}", hits.is_empty(), "exact comparison");
    match builtin("e6_even", None).map_err(|e| e.to_string()).and_then(|r| pf_dimensions(&r).map_err(|e| e.to_string())) {
        Ok(d) => {
            let eta = d.get("eta").unwrap_or(f64::NAN);
            out.push("d(eta) = 1 + sqrt(3) in e6_even", (eta - x.eval()).abs() <= 1e-9, format!("d(eta) = {}", format_sig(eta)));
        }
        Err(e) => out.push("d(eta) = 1 + sqrt(3) in e6_even", false, e),
    }
    out
}

fn exclusion_a7_dimension() -> CheckResult {
    let mut out = CheckResult { id: "a7_dimension_equation".into(), checks: Vec::new() };
    let d = q("1+sqrt(2)");
    match eval_poly(&[-1, -2, 1], &d) {
        Ok(v) => out.push("d^2 = 1 + 2d at d = 1 + sqrt(2)", v.is_zero(), format!("d^2 - 2d - 1 = {v}")),
        Err(e) => out.push("d^2 = 1 + 2d at d = 1 + sqrt(2)", false, e),
    }
    let other = &QuadExt::integer(2) - &d;
    out.push("other root 1 - sqrt(2) is below 1", other < QuadExt::one(), format!("{other}"));
    out
}

/// The four exclusion facts.
pub fn run_exclusion_checks() -> Vec<CheckResult> {
    vec![
        exclusion_class_iv_bound(),
        exclusion_not_3_supertransitive(),
        exclusion_e6_group_case(),
        exclusion_a7_dimension(),
    ]
}

/// Regression checks kept apart from the table and the exclusions.
pub fn run_regression_checks() -> Vec<CheckResult> {
    let mut e8 = CheckResult { id: "e8aff_class_ii".into(), checks: Vec::new() };
    let d = QuadExt::integer(2);
    match eval_poly(&[4, 0, -5, 0, 1], &d) {
        Ok(v) => e8.push("d^4 - 5d^2 + 4 = 0 at d = 2", v.is_zero(), format!("value {v}")),
        Err(e) => e8.push("d^4 - 5d^2 + 4 = 0 at d = 2", false, e),
    }
    e8.push("[M:P] = d^2 = 4", d.pow(2) == QuadExt::integer(4), "the root d = 1 is excluded since d > 1");

    let mut iv = CheckResult { id: "class_iv_index_ambiguity".into(), checks: Vec::new() };
    let d = q("3/2+1/2*sqrt(13)");
    let stated = q("3/2+1/2*sqrt(13)");
    let bound = q("5/2+1/2*sqrt(13)");
    iv.push("candidate (3+sqrt(13))/2 equals d(r)", stated == d, format!("{stated}"));
    iv.push("candidate (5+sqrt(13))/2 equals 1 + d(r)", bound == &QuadExt::one() + &d, format!("{bound}"));
    iv.push(
        "candidates differ by exactly 1",
        &bound - &stated == QuadExt::one(),
        "[M:P] is ambiguous between the two statements; no value is adopted",
    );
    vec![e8, iv]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifyReport {
    pub cases: Vec<CheckResult>,
    pub exclusions: Vec<CheckResult>,
    pub regressions: Vec<CheckResult>,
}

impl ClassifyReport {
    pub fn all_pass(&self) -> bool {
        self.cases.iter().chain(&self.exclusions).chain(&self.regressions).all(CheckResult::pass)
    }

    pub fn cases_passing(&self) -> usize {
        self.cases.iter().filter(|c| c.pass()).count()
    }

    pub fn exclusions_passing(&self) -> usize {
        self.exclusions.iter().filter(|c| c.pass()).count()
    }
}

/// Verifies every case independently; results keep table order.
pub fn verify_table(table: &[QuadCase], exec: Exec) -> Vec<CheckResult> {
    exec.map_slice(table, verify_case)
}

pub fn classify_all(table: &[QuadCase], exec: Exec) -> ClassifyReport {
    ClassifyReport {
        cases: verify_table(table, exec),
        exclusions: run_exclusion_checks(),
        regressions: run_regression_checks(),
    }
}

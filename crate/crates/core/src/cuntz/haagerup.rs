//! The Haagerup endomorphism `ρ` and automorphism `α` of `O_4`, the relations
//! they satisfy, and the two-solution scalar system for the intermediate
//! Q-system.

use serde::Serialize;

use super::{CuntzExpr, CuntzWord, Gen};
use crate::exec::Exec;
use crate::scalar::{Cx, QuadExt};

/// Residual threshold for every relation and scalar equation.
pub const RELATION_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaagerupConstants {
    /// `(3+√13)/2`, exact.
    pub d_exact: QuadExt,
    pub d: f64,
    pub sqrt_d: f64,
    /// `(d−1)^{3/2}`.
    pub dm1_32: f64,
    pub sqrt_4d_minus_1: f64,
    /// `A(i,j)`, indices mod 3.
    pub a: [[Cx; 3]; 3],
    /// `(d−1) A(1,2)`.
    pub b: Cx,
}

impl HaagerupConstants {
    pub fn new() -> Self {
        let d_exact = QuadExt::from_ratios(3, 2, 1, 2, 13).expect("13 is square-free");
        let d = d_exact.eval();
        let dm1 = (&d_exact - &QuadExt::one()).eval();
        let four_d_minus_1 = (&(&d_exact * &QuadExt::integer(4)) - &QuadExt::one()).eval();
        let sqrt_4d_minus_1 = four_d_minus_1.sqrt();
        let off = Cx::new(-1.0 / dm1, 0.0);
        let a12 = Cx::new(1.0, sqrt_4d_minus_1) / (2.0 * dm1);
        let a = [
            [Cx::new(1.0 - 1.0 / dm1, 0.0), off, off],
            [off, off, a12],
            [off, a12.conj(), off],
        ];
        HaagerupConstants {
            d_exact,
            d,
            sqrt_d: d.sqrt(),
            dm1_32: dm1 * dm1.sqrt(),
            sqrt_4d_minus_1,
            a,
            b: a12 * dm1,
        }
    }

    pub fn a(&self, i: i64, j: i64) -> Cx {
        self.a[i.rem_euclid(3) as usize][j.rem_euclid(3) as usize]
    }

    /// Copy with `A(1,2)` (and its conjugate `A(2,1)`) shifted by `eps`.
    pub fn with_a12_perturbed(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.a[1][2] += Cx::new(eps, 0.0);
        out.a[2][1] = out.a[1][2].conj();
        out.b = out.a[1][2] * (self.d - 1.0);
        out
    }

    /// `d² − 3d − 1`, exactly.
    pub fn d_quadratic_exact(&self) -> QuadExt {
        let d = &self.d_exact;
        &(&(d * d) - &(d * &QuadExt::integer(3))) - &QuadExt::one()
    }

    /// `|B² − B + d|`.
    pub fn b_quadratic_residual(&self) -> f64 {
        (self.b * self.b - self.b + self.d).norm()
    }

    /// `||B+1|² − (d−1)²|`.
    pub fn b_modulus_residual(&self) -> f64 {
        ((self.b + 1.0).norm_sqr() - (self.d - 1.0).powi(2)).abs()
    }
}

impl Default for HaagerupConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `ρ` and `α` with cached generator images.
#[derive(Debug, Clone)]
pub struct HaagerupSystem {
    pub constants: HaagerupConstants,
    /// `α(T_i) = T_{alpha_perm[i]}`; the genuine automorphism is `i ↦ i+2`.
    pub alpha_perm: [u8; 3],
    rho_gen: [CuntzExpr; 4],
    rho_adj: [CuntzExpr; 4],
}

impl HaagerupSystem {
    pub const ALPHA: [u8; 3] = [2, 0, 1];

    pub fn new(constants: HaagerupConstants) -> Self {
        Self::with_alpha_perm(constants, Self::ALPHA)
    }

    /// `perm` must be a permutation of `{0,1,2}`.
    pub fn with_alpha_perm(constants: HaagerupConstants, perm: [u8; 3]) -> Self {
        let mut sorted = perm;
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 1, 2], "alpha must permute the T indices");
        let rho_gen = Gen::ALL.map(|g| rho_image(&constants, g));
        let rho_adj = rho_gen.clone().map(|e| e.adjoint());
        HaagerupSystem { constants, alpha_perm: perm, rho_gen, rho_adj }
    }

    pub fn rho_gen(&self, g: Gen) -> &CuntzExpr {
        &self.rho_gen[g.index()]
    }

    /// Substitutes generator images homomorphically: `u v* ↦ ρ(u) ρ(v)*`.
    pub fn rho_apply(&self, e: &CuntzExpr) -> CuntzExpr {
        let mut out = CuntzExpr::zero();
        for (w, c) in e.terms() {
            let mut acc = CuntzExpr::scalar(*c);
            for g in &w.left {
                acc = &acc * &self.rho_gen[g.index()];
            }
            for g in w.right.iter().rev() {
                acc = &acc * &self.rho_adj[g.index()];
            }
            out = &out + &acc;
        }
        out
    }

    pub fn alpha_apply(&self, e: &CuntzExpr) -> CuntzExpr {
        let perm = self.alpha_perm;
        e.map_words(|w| {
            w.map_gens(|g| match g {
                Gen::S0 => Gen::S0,
                Gen::T(i) => Gen::T(perm[i as usize]),
            })
        })
    }
}

impl Default for HaagerupSystem {
    fn default() -> Self {
        Self::new(HaagerupConstants::new())
    }
}

fn rho_image(k: &HaagerupConstants, g: Gen) -> CuntzExpr {
    let one = |l: Vec<Gen>, r: Vec<Gen>, c: Cx| CuntzExpr::word(CuntzWord::new(l, r), c);
    let re = |x: f64| Cx::new(x, 0.0);
    match g {
        Gen::S0 => {
            let mut e = one(vec![Gen::S0], vec![], re(1.0 / k.d));
            for i in 0..3 {
                e.add_term(CuntzWord::new(vec![Gen::t(i), Gen::t(i)], vec![]), re(1.0 / k.sqrt_d));
            }
            e
        }
        Gen::T(i) => {
            let i = i64::from(i);
            let mut e = one(vec![Gen::S0], vec![Gen::t(-i)], re(1.0 / k.sqrt_d));
            e.add_term(CuntzWord::new(vec![Gen::t(-i), Gen::S0], vec![Gen::S0]), re(1.0));
            for j in 0..3 {
                for l in 0..3 {
                    e.add_term(CuntzWord::new(vec![Gen::t(j), Gen::t(i + j + l)], vec![Gen::t(l)]), k.a(i + j, i + l));
                }
            }
            e
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationFamily {
    /// `ρ(X)* ρ(Y) = δ_XY`.
    StarEndomorphism,
    /// `ρ(T0) S0 = T0 S0`.
    FixedVector,
    /// `√d S0 + (d−1) T0² = √d ρ(S0) + (d−1) ρ(T0) T0`.
    QSystemIdentity,
    /// `αρ = ρα²`.
    Twist,
    /// `ρ²(X) S0 = S0 X`.
    Rho2Intertwiner,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub family: RelationFamily,
    pub instance: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Worst residual per family, in family order.
    pub fn family_residuals(&self) -> Vec<(RelationFamily, f64)> {
        let mut out: Vec<(RelationFamily, f64)> = Vec::new();
        for c in &self.checks {
            match out.iter_mut().find(|(f, _)| *f == c.family) {
                Some((_, r)) => *r = r.max(c.residual),
                None => out.push((c.family, c.residual)),
            }
        }
        out.sort_by_key(|(f, _)| *f);
        out
    }

    pub fn family_residual(&self, family: RelationFamily) -> Option<f64> {
        self.family_residuals().into_iter().find(|(f, _)| *f == family).map(|(_, r)| r)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

enum Job {
    Star(Gen, Gen),
    Fixed,
    QSys,
    Twist(Gen),
    Rho2(Gen, bool),
}

/// Checks the five relation families; independent checks run under `exec`.
pub fn verify_haagerup_relations(sys: &HaagerupSystem, exec: Exec) -> RelationReport {
    let mut jobs = Vec::new();
    for x in Gen::ALL {
        for y in Gen::ALL {
            jobs.push(Job::Star(x, y));
        }
    }
    jobs.push(Job::Fixed);
    jobs.push(Job::QSys);
    for x in Gen::ALL {
        jobs.push(Job::Twist(x));
    }
    for x in Gen::ALL {
        jobs.push(Job::Rho2(x, false));
        jobs.push(Job::Rho2(x, true));
    }
    let k = &sys.constants;
    let s0 = CuntzExpr::gen(Gen::S0);
    let t0 = CuntzExpr::gen(Gen::T(0));
    let checks = exec.map_slice(&jobs, |job| {
        let (family, instance, diff) = match *job {
            Job::Star(x, y) => {
                let lhs = sys.rho_gen(x).adjoint() * sys.rho_gen(y).clone();
                let rhs = if x == y { CuntzExpr::one() } else { CuntzExpr::zero() };
                (RelationFamily::StarEndomorphism, format!("rho({x})^ rho({y})"), lhs - rhs)
            }
            Job::Fixed => {
                let diff = sys.rho_gen(Gen::T(0)) * &s0 - &t0 * &s0;
                (RelationFamily::FixedVector, "rho(T0) S0 - T0 S0".to_string(), diff)
            }
            Job::QSys => {
                let sd = Cx::new(k.sqrt_d, 0.0);
                let dm1 = Cx::new(k.d - 1.0, 0.0);
                let lhs = &s0.scale(sd) + &(&t0 * &t0).scale(dm1);
                let rhs = &sys.rho_gen(Gen::S0).scale(sd) + &(sys.rho_gen(Gen::T(0)) * &t0).scale(dm1);
                (RelationFamily::QSystemIdentity, "sqrt(d)S0 + (d-1)T0^2 - [sqrt(d)rho(S0) + (d-1)rho(T0)T0]".to_string(), lhs - rhs)
            }
            Job::Twist(x) => {
                let gx = CuntzExpr::gen(x);
                let lhs = sys.alpha_apply(sys.rho_gen(x));
                let rhs = sys.rho_apply(&sys.alpha_apply(&sys.alpha_apply(&gx)));
                (RelationFamily::Twist, format!("alpha(rho({x})) - rho(alpha^2({x}))"), lhs - rhs)
            }
            Job::Rho2(x, adj) => {
                let gx = if adj { CuntzExpr::gen_adjoint(x) } else { CuntzExpr::gen(x) };
                let r2 = sys.rho_apply(&sys.rho_apply(&gx));
                let name = if adj { format!("{x}^") } else { x.to_string() };
                (RelationFamily::Rho2Intertwiner, format!("rho^2({name}) S0 - S0 {name}"), &r2 * &s0 - &s0 * &gx)
            }
        };
        let residual = diff.residual();
        RelationCheck { family, instance, residual, pass: residual < RELATION_THRESHOLD }
    });
    RelationReport { checks }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QSystemSolution {
    pub a: Cx,
    pub b: Cx,
    /// `(equation, residual)` for the four scalar equations.
    pub residuals: Vec<(String, f64)>,
}

impl QSystemSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("internal consistency failure: {equation} has residual {residual:e}")]
pub struct QSystemError {
    pub equation: String,
    pub residual: f64,
}

/// Residuals of the four scalar equations at `(a, b)`.
pub fn qsystem_residuals(k: &HaagerupConstants, a: Cx, b: Cx) -> Vec<(String, f64)> {
    let d = k.d;
    let sdm1 = (d - 1.0).sqrt();
    let a12 = k.a[1][2];
    vec![
        ("a^2 + sqrt(d-1)ab = 1/sqrt(d)".to_string(), (a * a + sdm1 * a * b - 1.0 / k.sqrt_d).norm()),
        ("ab - b^2/sqrt(d-1) = sqrt((d-1)/d)".to_string(), (a * b - b * b / sdm1 - ((d - 1.0) / d).sqrt()).norm()),
        ("a^2 - ab/sqrt(d-1) - A(1,2)b^2 = 0".to_string(), (a * a - a * b / sdm1 - a12 * b * b).norm()),
        (
            "ab + (1 + (d-1)A(1,2))b^2/(d-1)^(3/2) = 0".to_string(),
            (a * b + (1.0 + (d - 1.0) * a12) * b * b / k.dm1_32).norm(),
        ),
    ]
}

/// Both solutions `(a, b)`: `b² = −(d−1)²/((B+d)√d)`, `a = −(B+1) b/(d−1)^{3/2}`.
pub fn solve_qsystem(k: &HaagerupConstants) -> Result<[QSystemSolution; 2], QSystemError> {
    let d = k.d;
    let b2 = -Cx::new((d - 1.0).powi(2), 0.0) / ((k.b + d) * k.sqrt_d);
    let b = b2.sqrt();
    let sols = [b, -b].map(|b| {
        let a = -(k.b + 1.0) * b / k.dm1_32;
        let mut residuals = qsystem_residuals(k, a, b);
        residuals.push(("|a|^2 + |b|^2 = 1".to_string(), (a.norm_sqr() + b.norm_sqr() - 1.0).abs()));
        QSystemSolution { a, b, residuals }
    });
    for s in &sols {
        if let Some((eq, r)) = s.residuals.iter().find(|(_, r)| *r >= RELATION_THRESHOLD) {
            return Err(QSystemError { equation: eq.clone(), residual: *r });
        }
    }
    Ok(sols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let k = HaagerupConstants::new();
        assert!(k.d_quadratic_exact().is_zero());
        assert!(k.b_quadratic_residual() < 1e-10);
        assert!(k.b_modulus_residual() < 1e-10);
        assert_eq!(k.a(1, 2), k.a(2, 1).conj());
        assert_eq!(k.a(4, -1), k.a(1, 2));
    }

    #[test]
    fn rho_s0_shape() {
        let sys = HaagerupSystem::default();
        assert_eq!(sys.rho_gen(Gen::S0).len(), 4);
        let r = sys.rho_gen(Gen::S0);
        assert!((r.adjoint() * r.clone() - CuntzExpr::one()).residual() < 1e-12);
        assert_eq!(sys.rho_apply(&CuntzExpr::one()), CuntzExpr::one());
    }

    #[test]
    fn alpha_has_order_three() {
        let sys = HaagerupSystem::default();
        let e = CuntzExpr::parse("T0*T1^*S0 + 2*T2").unwrap().normalize();
        let a3 = sys.alpha_apply(&sys.alpha_apply(&sys.alpha_apply(&e)));
        assert_eq!(a3, e);
        assert_eq!(sys.alpha_apply(&CuntzExpr::gen(Gen::T(0))), CuntzExpr::gen(Gen::T(2)));
    }

    #[test]
    fn qsystem_two_solutions() {
        let k = HaagerupConstants::new();
        let [s1, s2] = solve_qsystem(&k).unwrap();
        assert!((s1.b.norm_sqr() - (k.d - 1.0) / k.d).abs() < 1e-9);
        assert!((s1.a.norm_sqr() - 1.0 / k.d).abs() < 1e-9);
        assert_eq!(s1.a, -s2.a);
        assert_eq!(s1.b, -s2.b);
        assert!(s1.max_residual() < 1e-9 && s2.max_residual() < 1e-9);
    }

    #[test]
    fn full_report_passes() {
        let report = verify_haagerup_relations(&HaagerupSystem::default(), Exec::default());
        for c in &report.checks {
            assert!(c.pass, "{:?} {} residual {:e}", c.family, c.instance, c.residual);
        }
        assert_eq!(report.family_residuals().len(), 5);
    }

    #[test]
    fn perturbed_a12_is_detected() {
        let k = HaagerupConstants::new().with_a12_perturbed(1e-3);
        let report = verify_haagerup_relations(&HaagerupSystem::new(k), Exec::default());
        for (f, r) in report.family_residuals() {
            eprintln!("{f:?} {r:e}");
        }
        // ρ(T0)T0 only involves A(j,0), so the Q-system identity is blind to A(1,2).
        assert!(report.family_residual(RelationFamily::QSystemIdentity).unwrap() < 1e-12);
        assert!(report.family_residual(RelationFamily::StarEndomorphism).unwrap() > 1e-4);
    }

    #[test]
    fn alpha_mutations() {
        // With α = id both sides of αρ = ρα² are ρ, so the relation cannot detect it.
        let id = HaagerupSystem::with_alpha_perm(HaagerupConstants::new(), [0, 1, 2]);
        assert!(verify_haagerup_relations(&id, Exec::default()).family_residual(RelationFamily::Twist).unwrap() < 1e-12);
        let swap = HaagerupSystem::with_alpha_perm(HaagerupConstants::new(), [0, 2, 1]);
        let report = verify_haagerup_relations(&swap, Exec::default());
        assert!(report.family_residual(RelationFamily::Twist).unwrap() > 1e-3);
    }
}

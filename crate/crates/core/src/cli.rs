//! Command-line front end. [`dispatch`] parses arguments, runs one command
//! and returns the rendered output with an exit code: 0 on success, 1 when a
//! check fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::angles::{
    angle_bound, angle_candidates, angle_cocommuting, angle_group, t_inner_roots, AngleSpectrum, InnerData,
    QuadIndexData,
};
use crate::catalog;
use crate::classify::{self, CheckResult, QuadCase};
use crate::cuntz::{self, CuntzExpr, HaagerupConstants, HaagerupSystem};
use crate::exec::Exec;
use crate::fusion::{
    check_multiplicity_bound, decompose, hom_dim, pf_dimensions, validate_ring, FusionRing, SectorExpr,
};
use crate::scalar::{format_sig, round_sig, QuadExt, Tolerance};
use crate::wzw::{self, HalfInt, QParam, QSixJ};

const HYPOTHESES: &str = "hypotheses assumed: irreducible quadrilateral, 2-supertransitive where the formula needs it; \
not checked from the numeric inputs";

#[derive(Debug, Parser)]
#[command(name = "swb", version, about = "Sector workbench: fusion rings, quadrilateral angles, Cuntz relations, SU(2)_k data")]
struct Cli {
    /// Emit one JSON document instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Report angles in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    /// Absolute tolerance (overrides SWB_TOLERANCE).
    #[arg(long, global = true, value_name = "EPS")]
    tol: Option<f64>,
    /// Write the rendered output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RingArg {
    /// Catalog key or path to a fusion-ring JSON file.
    ring: String,
    /// Level, for the su2 family.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Built-in fusion rings.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Check the fusion-ring axioms.
    Validate(RingArg),
    /// Perron-Frobenius dimensions.
    Dims(RingArg),
    /// Decompose a sector expression into irreducibles.
    Decompose {
        #[command(flatten)]
        ring: RingArg,
        expr: String,
    },
    /// dim Hom(x, y).
    Hom {
        #[command(flatten)]
        ring: RingArg,
        x: String,
        y: String,
    },
    /// Check the multiplicity bound N <= d(sigma) for every constituent.
    Bound {
        #[command(flatten)]
        ring: RingArg,
        expr: String,
    },
    /// Angle invariants of quadrilaterals.
    Angle {
        #[command(subcommand)]
        cmd: AngleCmd,
    },
    /// SU(2)_k modular data and angle spectra.
    Wzw {
        #[command(subcommand)]
        cmd: WzwCmd,
    },
    /// The Haagerup endomorphism of O_4.
    Haagerup {
        #[command(subcommand)]
        cmd: HaagerupCmd,
    },
    /// Cuntz algebra expressions.
    Cuntz {
        #[command(subcommand)]
        cmd: CuntzCmd,
    },
    /// The quadrilateral classification table.
    Classify(ClassifyArgs),
}

#[derive(Debug, Subcommand)]
enum CatalogCmd {
    /// Keys, descriptions and provenance notes.
    List,
    /// Print a ring as a JSON ring document.
    Show {
        key: String,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum AngleCmd {
    /// Cocommuting quadrilateral from [P:N] and [M:P].
    Cocommuting {
        #[arg(long)]
        pn: String,
        #[arg(long)]
        mp: String,
    },
    /// Group-subgroup quadrilateral from orders |G|, |H|, |K|, |H∩K|.
    Group {
        #[arg(long)]
        g: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        hk: u64,
    },
    /// Candidate cosines from d(sigma) and <s_P, s_Q>.
    Candidates {
        #[arg(long)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// arccos(1/([P:N] - 1)).
    Bound {
        #[arg(long)]
        pn: String,
    },
    /// Roots of the quadratic satisfied by the inner-product scalar.
    Roots {
        #[arg(long)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
}

#[derive(Debug, Subcommand)]
enum WzwCmd {
    /// Alpha-induction angle spectrum at level k.
    Spectrum {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i0: usize,
        #[arg(long = "J", value_delimiter = ',', required = true)]
        j: Vec<usize>,
    },
    /// GHJ pair spectrum for an ADE graph.
    Ghj {
        #[arg(long)]
        graph: String,
    },
    /// Asymptotic inclusion of A_n.
    Asymptotic {
        #[arg(long)]
        n: usize,
    },
    /// Quantum 6j-symbol at q = exp(i pi/m); classical when --m is absent.
    #[command(name = "6j")]
    SixJ {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        spins: Vec<String>,
    },
    /// S-matrix and quantum dimensions of SU(2)_k.
    Modular {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
enum HaagerupCmd {
    /// Check the five relation families.
    Verify {
        /// Add EPS to A(1,2) before building the endomorphism.
        #[arg(long, value_name = "EPS", allow_hyphen_values = true)]
        perturb_a12: Option<f64>,
    },
    /// Solve for (a, b) and print both solutions with residuals.
    Qsystem,
}

#[derive(Debug, Subcommand)]
enum CuntzCmd {
    /// Reduce an expression to normal form.
    Normalize { expr: String },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["all", "case", "exclusions"])))]
struct ClassifyArgs {
    /// Verify every case plus exclusion and regression checks.
    #[arg(long)]
    all: bool,
    /// Verify one case by id.
    #[arg(long, value_name = "ID")]
    case: Option<String>,
    /// Run the exclusion checks.
    #[arg(long)]
    exclusions: bool,
    /// Use a classification table from a JSON file.
    #[arg(long, value_name = "PATH")]
    table: Option<PathBuf>,
}

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    json: bool,
    degrees: bool,
    tol: Tolerance,
}

struct Reply {
    inputs: Value,
    results: Value,
    residuals: Value,
    text: String,
    ok: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

type Res = Result<Reply, Failure>;

pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let wants_json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            if code == 2 && wants_json {
                let doc = document("usage", Value::Null, Value::Null, json!({}), Some(text.trim_end()));
                return Outcome { code, stdout: doc, stderr: text };
            }
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let tol = cli.tol.map(Tolerance::with_abs).unwrap_or_else(Tolerance::from_env);
    let ctx = Ctx { json: cli.json, degrees: cli.degrees, tol };
    let name = command_name(&cli.command);
    let (code, rendered, err) = match run(&cli.command, &ctx) {
        Ok(r) => {
            let code = if r.ok { 0 } else { 1 };
            let rendered = if ctx.json {
                document(&name, r.inputs, r.results, r.residuals, None)
            } else {
                r.text
            };
            (code, rendered, String::new())
        }
        Err(f) => {
            let rendered =
                if ctx.json { document(&name, Value::Null, Value::Null, json!({}), Some(&f.message)) } else { String::new() };
            (f.code, rendered, format!("error: {}\n", f.message))
        }
    };
    match &cli.out {
        Some(path) if !rendered.is_empty() => match std::fs::write(path, &rendered) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: err + &format!("wrote {}\n", path.display()) },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) },
        },
        _ => Outcome { code, stdout: rendered, stderr: err },
    }
}

fn command_name(c: &Command) -> String {
    let s = match c {
        Command::Catalog { cmd: CatalogCmd::List } => "catalog list",
        Command::Catalog { cmd: CatalogCmd::Show { .. } } => "catalog show",
        Command::Validate(_) => "validate",
        Command::Dims(_) => "dims",
        Command::Decompose { .. } => "decompose",
        Command::Hom { .. } => "hom",
        Command::Bound { .. } => "bound",
        Command::Angle { cmd } => match cmd {
            AngleCmd::Cocommuting { .. } => "angle cocommuting",
            AngleCmd::Group { .. } => "angle group",
            AngleCmd::Candidates { .. } => "angle candidates",
            AngleCmd::Bound { .. } => "angle bound",
            AngleCmd::Roots { .. } => "angle roots",
        },
        Command::Wzw { cmd } => match cmd {
            WzwCmd::Spectrum { .. } => "wzw spectrum",
            WzwCmd::Ghj { .. } => "wzw ghj",
            WzwCmd::Asymptotic { .. } => "wzw asymptotic",
            WzwCmd::SixJ { .. } => "wzw 6j",
            WzwCmd::Modular { .. } => "wzw modular",
        },
        Command::Haagerup { cmd: HaagerupCmd::Verify { .. } } => "haagerup verify",
        Command::Haagerup { cmd: HaagerupCmd::Qsystem } => "haagerup qsystem",
        Command::Cuntz { .. } => "cuntz normalize",
        Command::Classify(_) => "classify",
    };
    s.to_string()
}

/// Rounds every float to the printed precision so that parsing and
/// re-rendering the document is the identity.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            *v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn document(command: &str, inputs: Value, results: Value, residuals: Value, error: Option<&str>) -> String {
    let mut doc = json!({
        "command": command,
        "inputs": inputs,
        "results": results,
        "residuals": residuals,
        "error": error,
    });
    round_floats(&mut doc);
    serde_json::to_string_pretty(&doc).expect("values serialize") + "\n"
}

fn run(c: &Command, ctx: &Ctx) -> Res {
    match c {
        Command::Catalog { cmd } => run_catalog(cmd),
        Command::Validate(r) => run_validate(r),
        Command::Dims(r) => run_dims(r),
        Command::Decompose { ring, expr } => run_decompose(ring, expr),
        Command::Hom { ring, x, y } => run_hom(ring, x, y),
        Command::Bound { ring, expr } => run_bound(ring, expr, ctx),
        Command::Angle { cmd } => run_angle(cmd, ctx),
        Command::Wzw { cmd } => run_wzw(cmd, ctx),
        Command::Haagerup { cmd } => run_haagerup(cmd, ctx),
        Command::Cuntz { cmd: CuntzCmd::Normalize { expr } } => run_cuntz(expr),
        Command::Classify(a) => run_classify(a),
    }
}

fn reply(inputs: Value, results: Value, text: String) -> Reply {
    Reply { inputs, results, residuals: json!({}), text, ok: true }
}

fn is_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains(std::path::MAIN_SEPARATOR) || Path::new(s).is_file()
}

fn ring_inputs(r: &RingArg) -> Value {
    json!({ "ring": r.ring, "k": r.k })
}

/// Loads a ring; `checked` rejects rings that fail validation.
fn load_ring(r: &RingArg, checked: bool) -> Result<FusionRing, Failure> {
    if is_path(&r.ring) {
        if r.k.is_some() {
            return Err(usage("--k applies only to catalog rings"));
        }
        let text = std::fs::read_to_string(&r.ring).map_err(|e| usage(format!("{}: {e}", r.ring)))?;
        let res = if checked { FusionRing::from_json(&text) } else { FusionRing::from_json_unchecked(&text) };
        res.map_err(|e| usage(format!("{}: {e}", r.ring)))
    } else {
        catalog::builtin(&r.ring, r.k).map_err(usage)
    }
}

fn parse_expr(s: &str) -> Result<SectorExpr, Failure> {
    SectorExpr::parse(s).map_err(usage)
}

fn run_catalog(cmd: &CatalogCmd) -> Res {
    match cmd {
        CatalogCmd::List => {
            let entries = catalog::list();
            let mut text = String::new();
            for e in entries {
                let key = if e.parameterized { format!("{} --k K", e.key) } else { e.key.to_string() };
                text += &format!("{key:<20} {}\n{:<20} provenance: {}\n", e.description, "", e.provenance);
            }
            Ok(reply(json!({}), json!({ "entries": entries }), text))
        }
        CatalogCmd::Show { key, k } => {
            let ring = catalog::builtin(key, *k).map_err(usage)?;
            let doc: Value = serde_json::to_value(ring.to_file_doc()).expect("ring documents serialize");
            Ok(reply(json!({ "key": key, "k": k }), json!({ "ring": doc }), ring.to_json() + "\n"))
        }
    }
}

fn run_validate(r: &RingArg) -> Res {
    let ring = load_ring(r, false)?;
    let report = validate_ring(&ring);
    let text = format!("{} (rank {}): {}\n", ring.name(), ring.rank(), report.to_string().trim_end());
    let ok = report.is_valid();
    let results = json!({ "valid": ok, "rank": ring.rank(), "violations": report.violations });
    Ok(Reply { ok, ..reply(ring_inputs(r), results, text) })
}

fn run_dims(r: &RingArg) -> Res {
    let ring = load_ring(r, true)?;
    let dims = pf_dimensions(&ring).map_err(usage)?;
    let mut map = Map::new();
    let mut text = String::new();
    for (l, d) in dims.labels().iter().zip(dims.values()) {
        map.insert(l.clone(), json!(d));
        text += &format!("d({l}) = {}\n", format_sig(*d));
    }
    text += &format!("global dimension = {}\n", format_sig(dims.global_dim()));
    let results = json!({ "dims": map, "global_dimension": dims.global_dim(), "iterations": dims.iterations });
    Ok(reply(ring_inputs(r), results, text))
}

fn run_decompose(r: &RingArg, expr: &str) -> Res {
    let ring = load_ring(r, true)?;
    let e = parse_expr(expr)?;
    let v = decompose(&ring, &e).map_err(usage)?;
    let dims = pf_dimensions(&ring).map_err(usage)?;
    let d = v.dimension(&dims);
    let text = format!("{e} = {}\ndimension = {}\n", ring.format_mult(&v), format_sig(d));
    let mut inputs = ring_inputs(r);
    inputs["expr"] = json!(expr);
    Ok(reply(inputs, json!({ "multiplicities": v.to_map(&ring), "dimension": d }), text))
}

fn run_hom(r: &RingArg, x: &str, y: &str) -> Res {
    let ring = load_ring(r, true)?;
    let n = hom_dim(&ring, &parse_expr(x)?, &parse_expr(y)?).map_err(usage)?;
    let mut inputs = ring_inputs(r);
    inputs["x"] = json!(x);
    inputs["y"] = json!(y);
    Ok(reply(inputs, json!({ "hom_dim": n }), format!("{n}\n")))
}

fn run_bound(r: &RingArg, expr: &str, ctx: &Ctx) -> Res {
    let ring = load_ring(r, true)?;
    let e = parse_expr(expr)?;
    let v = decompose(&ring, &e).map_err(usage)?;
    let dims = pf_dimensions(&ring).map_err(usage)?;
    let ok = check_multiplicity_bound(&dims, &v, ctx.tol.abs);
    let text = format!("{e} = {}\nmultiplicity bound {}\n", ring.format_mult(&v), if ok { "holds" } else { "VIOLATED" });
    let mut inputs = ring_inputs(r);
    inputs["expr"] = json!(expr);
    let results = json!({ "multiplicities": v.to_map(&ring), "bound_holds": ok });
    Ok(Reply { ok, ..reply(inputs, results, text) })
}

/// Accepts decimals and exact forms such as `(5+sqrt(5))/2`.
fn parse_real(name: &str, s: &str) -> Result<f64, Failure> {
    s.parse::<QuadExt>()
        .map(|q| q.eval())
        .or_else(|_| s.trim().parse::<f64>())
        .map_err(|_| usage(format!("--{name}: cannot read '{s}' as a number")))
}

fn fmt_angle(ctx: &Ctx, a: f64) -> String {
    if ctx.degrees {
        format!("{} deg", format_sig(a.to_degrees()))
    } else {
        format!("{} rad", format_sig(a))
    }
}

fn angle_fields(ctx: &Ctx, a: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("angle_radians".into(), json!(a));
    if ctx.degrees {
        m.insert("angle_degrees".into(), json!(a.to_degrees()));
    }
    m.insert("cosine".into(), json!(a.cos()));
    m
}

fn spectrum_results(ctx: &Ctx, s: &AngleSpectrum) -> (Value, String) {
    let mut m = Map::new();
    m.insert("commuting".into(), json!(s.commuting));
    m.insert("angles_radians".into(), json!(s.angles));
    if ctx.degrees {
        m.insert("angles_degrees".into(), json!(s.angles.iter().map(|a| a.to_degrees()).collect::<Vec<_>>()));
    }
    m.insert("cosines".into(), json!(s.angles.iter().map(|a| a.cos()).collect::<Vec<_>>()));
    let text = if s.commuting {
        "commuting square (no angles)\n".to_string()
    } else if s.is_empty() {
        "empty spectrum\n".to_string()
    } else {
        s.angles.iter().map(|&a| format!("{}  (cos {})\n", fmt_angle(ctx, a), format_sig(a.cos()))).collect()
    };
    (Value::Object(m), text)
}

fn with_hypotheses(mut results: Value, text: String) -> (Value, String) {
    results["hypotheses_assumed"] = json!(HYPOTHESES);
    (results, format!("{text}note: {HYPOTHESES}\n"))
}

fn run_angle(cmd: &AngleCmd, ctx: &Ctx) -> Res {
    let (inputs, results, text) = match cmd {
        AngleCmd::Cocommuting { pn, mp } => {
            let q = QuadIndexData::new(parse_real("pn", pn)?, parse_real("mp", mp)?).map_err(usage)?;
            let s = angle_cocommuting(q).map_err(usage)?;
            let (mut results, text) = spectrum_results(ctx, &s);
            if let Some(a) = s.single() {
                for (k, v) in angle_fields(ctx, a) {
                    results[k] = v;
                }
            }
            (json!({ "pn": pn, "mp": mp }), results, text)
        }
        AngleCmd::Group { g, h, k, hk } => {
            let s = angle_group(*g, *h, *k, *hk).map_err(usage)?;
            let (mut results, text) = spectrum_results(ctx, &s);
            if let Some(a) = s.single() {
                for (k, v) in angle_fields(ctx, a) {
                    results[k] = v;
                }
            }
            (json!({ "g": g, "h": h, "k": k, "hk": hk }), results, text)
        }
        AngleCmd::Candidates { d, s } => {
            let data = InnerData::new(parse_real("d", d)?, parse_real("s", s)?).map_err(usage)?;
            let c = angle_candidates(data);
            let show = |a: Option<f64>| a.map(|a| fmt_angle(ctx, a)).unwrap_or_else(|| "none (P = Q)".into());
            let text = format!(
                "cos+ = {}  angle {}\ncos- = {}  angle {}\n",
                format_sig(c.cos_plus),
                show(c.angle_plus),
                format_sig(c.cos_minus),
                show(c.angle_minus)
            );
            let conv = |a: Option<f64>| a.map(|a| if ctx.degrees { a.to_degrees() } else { a });
            let results = json!({
                "cos_plus": c.cos_plus,
                "cos_minus": c.cos_minus,
                "angle_plus_radians": c.angle_plus,
                "angle_minus_radians": c.angle_minus,
                "angle_plus_degrees": if ctx.degrees { json!(conv(c.angle_plus)) } else { Value::Null },
                "angle_minus_degrees": if ctx.degrees { json!(conv(c.angle_minus)) } else { Value::Null },
            });
            (json!({ "d": d, "s": s }), results, text)
        }
        AngleCmd::Bound { pn } => {
            let a = angle_bound(parse_real("pn", pn)?).map_err(usage)?;
            (json!({ "pn": pn }), Value::Object(angle_fields(ctx, a)), format!("{}  (cos {})\n", fmt_angle(ctx, a), format_sig(a.cos())))
        }
        AngleCmd::Roots { d, s } => {
            let data = InnerData::new(parse_real("d", d)?, parse_real("s", s)?).map_err(usage)?;
            let (r1, r2) = t_inner_roots(data);
            (json!({ "d": d, "s": s }), json!({ "roots": [r1, r2] }), format!("{}\n{}\n", format_sig(r1), format_sig(r2)))
        }
    };
    let (results, text) = with_hypotheses(results, text);
    Ok(reply(inputs, results, text))
}

fn run_wzw(cmd: &WzwCmd, ctx: &Ctx) -> Res {
    match cmd {
        WzwCmd::Spectrum { k, i0, j } => {
            let s = wzw::alpha_induction_spectrum(*k, *i0, j, Exec::default()).map_err(usage)?;
            let (r, t) = with_hypotheses_spectrum(ctx, &s);
            Ok(reply(json!({ "k": k, "i0": i0, "J": j }), r, t))
        }
        WzwCmd::Ghj { graph } => {
            let rule = wzw::branching_rule(graph).map_err(usage)?;
            let s = wzw::ghj_spectrum(graph).map_err(usage)?;
            let (mut r, t) = with_hypotheses_spectrum(ctx, &s);
            r["level"] = json!(rule.k);
            r["J"] = json!(rule.j);
            Ok(reply(json!({ "graph": graph }), r, format!("level {}, J = {:?}\n{t}", rule.k, rule.j)))
        }
        WzwCmd::Asymptotic { n } => {
            let s = wzw::asymptotic_spectrum(*n).map_err(usage)?;
            let (r, t) = with_hypotheses_spectrum(ctx, &s);
            Ok(reply(json!({ "n": n }), r, t))
        }
        WzwCmd::SixJ { m, spins } => {
            if spins.len() != 6 {
                return Err(usage(format!("--spins needs 6 values, got {}", spins.len())));
            }
            let parsed = spins.iter().map(|s| s.parse::<HalfInt>()).collect::<Result<Vec<_>, _>>().map_err(usage)?;
            let q = match m {
                Some(m) => QParam::RootOfUnity { m: *m },
                None => QParam::Classical,
            };
            let sym = QSixJ { q, spins: parsed.try_into().expect("six spins") };
            let v = wzw::q6j(&sym).map_err(usage)?;
            let sp: Vec<String> = sym.spins.iter().map(ToString::to_string).collect();
            let text = format!(
                "{{{} {} {}; {} {} {}}} = {}\n",
                sp[0],
                sp[1],
                sp[2],
                sp[3],
                sp[4],
                sp[5],
                cuntz::format_coeff(v)
            );
            Ok(reply(json!({ "m": m, "spins": sp }), json!({ "re": v.re, "im": v.im }), text))
        }
        WzwCmd::Modular { k } => {
            let md = wzw::su2k_modular(*k).map_err(usage)?;
            let mut text = format!("SU(2)_{k}: rank {}\n", md.rank());
            for (i, d) in md.dims.iter().enumerate() {
                text += &format!("d(l{i}) = {}\n", format_sig(*d));
            }
            let (u, s) = (md.unitarity_defect(), md.symmetry_defect());
            text += &format!("unitarity defect {u:.3e}, symmetry defect {s:.3e}\n");
            let ok = u <= ctx.tol.abs && s <= ctx.tol.abs;
            Ok(Reply {
                inputs: json!({ "k": k }),
                results: json!({ "s": md.s, "dims": md.dims }),
                residuals: json!({ "unitarity": u, "symmetry": s }),
                text,
                ok,
            })
        }
    }
}

fn with_hypotheses_spectrum(ctx: &Ctx, s: &AngleSpectrum) -> (Value, String) {
    let (r, t) = spectrum_results(ctx, s);
    with_hypotheses(r, t)
}

fn cx_json(c: crate::scalar::Cx) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn run_haagerup(cmd: &HaagerupCmd, ctx: &Ctx) -> Res {
    let base = HaagerupConstants::new();
    match cmd {
        HaagerupCmd::Verify { perturb_a12 } => {
            let k = match perturb_a12 {
                Some(eps) => base.with_a12_perturbed(*eps),
                None => base,
            };
            let report = cuntz::verify_haagerup_relations(&HaagerupSystem::new(k), Exec::default());
            let mut text = String::new();
            let mut residuals = Map::new();
            let mut families = Vec::new();
            let mut ok = true;
            for (f, r) in report.family_residuals() {
                let pass = r < ctx.tol.abs;
                ok &= pass;
                let name = serde_json::to_value(f).expect("serialize");
                let name = name.as_str().unwrap_or_default().to_string();
                text += &format!("{:<20} max residual {:<10.3e} {}\n", name, r, if pass { "pass" } else { "FAIL" });
                residuals.insert(name.clone(), json!(r));
                families.push(json!({ "family": name, "pass": pass, "max_residual": r }));
            }
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({ "family": c.family, "instance": c.instance, "residual": c.residual, "pass": c.residual < ctx.tol.abs }))
                .collect();
            for c in report.checks.iter().filter(|c| c.residual >= ctx.tol.abs) {
                text += &format!("  failing: {} (residual {:.3e})\n", c.instance, c.residual);
            }
            Ok(Reply {
                inputs: json!({ "perturb_a12": perturb_a12 }),
                results: json!({ "all_pass": ok, "families": families, "checks": checks }),
                residuals: Value::Object(residuals),
                text,
                ok,
            })
        }
        HaagerupCmd::Qsystem => {
            let sols = cuntz::solve_qsystem(&base).map_err(|e| Failure { code: 1, message: e.to_string() })?;
            let mut text = format!("d = {} = {}\n", base.d_exact, format_sig(base.d));
            let mut residuals = Map::new();
            let mut ok = true;
            let mut out = Vec::new();
            for (n, s) in sols.iter().enumerate() {
                text += &format!("solution {}: a = {}, b = {}\n", n + 1, cuntz::format_coeff(s.a), cuntz::format_coeff(s.b));
                let mut res = Map::new();
                for (eq, r) in &s.residuals {
                    ok &= *r < ctx.tol.abs;
                    text += &format!("  {eq:<45} residual {r:.3e}\n");
                    res.insert(eq.clone(), json!(r));
                }
                residuals.insert(format!("solution_{}", n + 1), Value::Object(res));
                out.push(json!({
                    "a": cx_json(s.a),
                    "b": cx_json(s.b),
                    "abs_a_squared": s.a.norm_sqr(),
                    "abs_b_squared": s.b.norm_sqr(),
                }));
            }
            Ok(Reply { inputs: json!({}), results: json!({ "d": base.d, "solutions": out }), residuals: Value::Object(residuals), text, ok })
        }
    }
}

fn run_cuntz(expr: &str) -> Res {
    let raw = CuntzExpr::parse(expr).map_err(usage)?;
    let e = CuntzExpr::normalize(&raw);
    let terms: Vec<Value> = e.terms().map(|(w, c)| json!({ "word": w.to_string(), "coeff": cx_json(*c) })).collect();
    Ok(reply(json!({ "expr": expr }), json!({ "normal_form": e.to_string(), "terms": terms }), format!("{e}\n")))
}

fn render_checks(results: &[CheckResult]) -> String {
    let mut text = String::new();
    for r in results {
        text += &format!("{:<26} {}\n", r.id, if r.pass() { "PASS" } else { "FAIL" });
        for c in &r.checks {
            text += &format!("    [{}] {}: {}\n", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail);
        }
    }
    text
}

fn run_classify(a: &ClassifyArgs) -> Res {
    let table: Vec<QuadCase> = match &a.table {
        Some(p) => classify::load_table(p).map_err(usage)?,
        None => classify::classification_table(),
    };
    let inputs = json!({
        "all": a.all,
        "case": a.case,
        "exclusions": a.exclusions,
        "table": a.table.as_ref().map(|p| p.display().to_string()),
    });
    if a.exclusions {
        let ex = classify::run_exclusion_checks();
        let passing = ex.iter().filter(|c| c.pass()).count();
        let text = format!("{}exclusions: {passing}/{} passing\n", render_checks(&ex), ex.len());
        let ok = passing == ex.len();
        return Ok(Reply { ok, ..reply(inputs, json!({ "exclusions": ex, "passing": passing }), text) });
    }
    if let Some(id) = &a.case {
        let case = table.iter().find(|c| &c.id == id).ok_or_else(|| {
            let ids: Vec<&str> = table.iter().map(|c| c.id.as_str()).collect();
            usage(format!("unknown case '{id}' (known: {})", ids.join(", ")))
        })?;
        let r = classify::verify_case(case);
        let ok = r.pass();
        return Ok(Reply { ok, ..reply(inputs, json!({ "case": case, "result": r }), render_checks(std::slice::from_ref(&r))) });
    }
    let report = classify::classify_all(&table, Exec::default());
    let mut text = render_checks(&report.cases);
    text += &format!("cases: {}/{} passing\n\n", report.cases_passing(), report.cases.len());
    text += &render_checks(&report.exclusions);
    text += &format!("exclusions: {}/{} passing\n\n", report.exclusions_passing(), report.exclusions.len());
    text += &render_checks(&report.regressions);
    let ok = report.all_pass();
    let results = json!({
        "cases": report.cases,
        "exclusions": report.exclusions,
        "regressions": report.regressions,
        "cases_passing": report.cases_passing(),
        "exclusions_passing": report.exclusions_passing(),
        "all_pass": ok,
    });
    Ok(Reply { ok, ..reply(inputs, results, text) })
}

//! `hbm`: constructions, classifications and theorem checks for
//! Hilbert–Burch matrices, driven by JSON descriptions.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hilbert_burch::dubreil2::{check_splitting, prescribe, prescribe_alternatives, split, DubreilDatum, RawDatum, SiCount};
use hilbert_burch::essentiality::{classify_all, Certificate, Classification, Kind, SiOptions, Strategy, Witness};
use hilbert_burch::form::{parse_form, RawForm};
use hilbert_burch::ideal::IdealProfile;
use hilbert_burch::lift3::{
    base_matrix, check_quotient, check_s_membership, family_alpha3, family_base, lift_degrees, lift_general,
    quotient_mod_linear, set_z_zero, FamilyKind, MembershipReport,
};
use hilbert_burch::matrix::{FormMatrix, RawMatrix};
use hilbert_burch::{Error, Field, Form, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "hbm", version, about = "Hilbert–Burch matrices and strongly inessential generators")]
struct Cli {
    #[command(flatten)]
    session: Session,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Session {
    /// Base field: `q` or `fp:<prime>`.
    #[arg(long, global = true, env = "HBM_FIELD", default_value = "q", value_parser = parse_field)]
    field: Field,
    /// Seed for randomized searches; recorded in every report.
    #[arg(long, global = true, env = "HBM_SEED", default_value_t = 0)]
    seed: u64,
    /// Last degree inspected when computing Hilbert functions.
    #[arg(long, global = true, env = "HBM_HORIZON")]
    horizon: Option<u32>,
    /// auto, structural, algebraic, exhaustive or montecarlo.
    #[arg(long, global = true, env = "HBM_SI_STRATEGY", default_value = "auto", value_parser = parse_strategy)]
    si_strategy: Strategy,
    #[arg(long, global = true, env = "HBM_MC_TRIALS", default_value_t = 10_000)]
    mc_trials: u64,
    #[arg(long, global = true, env = "HBM_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the ideal of a binary datum: profile, canonical matrix, s.i. count.
    Build { input: PathBuf },
    /// Classify every generator of a matrix (or of a datum's canonical matrix).
    Classify { input: PathBuf },
    /// Count strongly inessential generators, predicted and observed.
    CountSi { input: PathBuf },
    /// Split a binary matrix in block form after degree `p`.
    Split {
        input: PathBuf,
        #[arg(long)]
        p: u32,
    },
    /// A datum with prescribed s.i. generator counts per degree.
    Prescribe {
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        /// Also list up to this many data realising the same counts.
        #[arg(long, default_value_t = 1)]
        alternatives: usize,
    },
    /// Lift a binary matrix to K[X,Y,Z], from a spec file or from flags.
    Lift {
        spec: Option<PathBuf>,
        #[arg(long)]
        kind: Option<LiftMode>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        ts: Vec<u32>,
    },
    /// Reduce a matrix over K[X,Y,Z] modulo a regular linear form.
    Quotient {
        input: PathBuf,
        #[arg(long, default_value = "Z")]
        linear: String,
    },
    /// Check every fixture in a directory against its recorded expectations.
    VerifyAll {
        #[arg(default_value = "fixtures")]
        dir: PathBuf,
    },
}

fn parse_field(s: &str) -> std::result::Result<Field, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Session {
    fn opts(&self) -> SiOptions {
        SiOptions { strategy: self.si_strategy, trials: self.mc_trials, seed: self.seed, ..SiOptions::default() }
    }

    fn config(&self) -> Value {
        json!({
            "field": self.field.to_string(),
            "seed": self.seed,
            "horizon": self.horizon,
            "si_strategy": self.si_strategy.to_string(),
            "mc_trials": self.mc_trials,
        })
    }
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    status: &'static str,
    detail: String,
}

struct Report {
    json: Map<String, Value>,
    text: Vec<String>,
    checks: Vec<Check>,
    inconclusive: bool,
}

impl Report {
    fn new(command: &str, s: &Session) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), json!(command));
        json.insert("config".into(), s.config());
        let head = format!(
            "hbm {command}  field={} seed={} strategy={} mc-trials={}{}",
            s.field,
            s.seed,
            s.si_strategy,
            s.mc_trials,
            s.horizon.map(|h| format!(" horizon={h}")).unwrap_or_default()
        );
        Report { json, text: vec![head], checks: vec![], inconclusive: false }
    }

    fn put(&mut self, key: &str, v: impl Serialize) {
        self.json.insert(key.into(), serde_json::to_value(v).expect("serializable report field"));
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn note(&mut self, s: &str) {
        self.line(format!("note: {s}"));
        let notes = self.json.entry("notes").or_insert_with(|| json!([]));
        notes.as_array_mut().expect("notes array").push(json!(s));
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        let status = if ok { "pass" } else { "fail" };
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }

    fn skip(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status: "skipped", detail: detail.into() });
    }

    fn status(&self) -> &'static str {
        if self.checks.iter().any(|c| c.status == "fail") {
            "check_failed"
        } else if self.inconclusive {
            "inconclusive"
        } else {
            "ok"
        }
    }

    fn exit_code(&self) -> u8 {
        match self.status() {
            "check_failed" => 1,
            "inconclusive" => 3,
            _ => 0,
        }
    }

    fn render(mut self, format: Format) -> String {
        let status = self.status();
        match format {
            Format::Json => {
                self.put("checks", self.checks.clone());
                self.put("status", status);
                serde_json::to_string_pretty(&Value::Object(self.json)).expect("json report") + "\n"
            }
            Format::Text => {
                if !self.checks.is_empty() {
                    self.text.push("checks:".into());
                    let w = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
                    for c in &self.checks {
                        self.text.push(format!("  [{:<7}] {:<w$}  {}", c.status, c.name, c.detail));
                    }
                }
                self.text.push(format!("status: {status}"));
                self.text.join("\n") + "\n"
            }
        }
    }

    fn matrix(&mut self, key: &str, title: &str, m: &FormMatrix) {
        self.put(key, matrix_json(m));
        self.line(format!("{title} ({}x{}, row degrees {:?}, column degrees {:?}):", m.rows(), m.cols(), m.row_degrees(), m.col_degrees()));
        for l in m.to_string().lines() {
            self.line(format!("  {l}"));
        }
    }

    fn classification(&mut self, key: &str, m: &FormMatrix, c: &Classification) {
        self.put(key, c);
        if c.unknown > 0 {
            self.inconclusive = true;
        }
        let rows: Vec<[String; 4]> = c
            .verdicts
            .iter()
            .map(|v| [(v.col + 1).to_string(), m.col_degrees()[v.col].to_string(), kind_name(v.kind).into(), witness_text(&v.witness)])
            .collect();
        let head = ["col", "deg", "verdict", "witness"].map(String::from);
        let mut w = [0; 4];
        for r in rows.iter().chain([&head]) {
            for (k, cell) in r.iter().enumerate() {
                w[k] = w[k].max(cell.chars().count());
            }
        }
        let fmt = |r: &[String; 4]| format!("  {:>w0$}  {:>w1$}  {:<w2$}  {}", r[0], r[1], r[2], r[3], w0 = w[0], w1 = w[1], w2 = w[2]);
        self.line(fmt(&head));
        for r in &rows {
            self.line(fmt(r));
        }
        let e_max = match c.e_maximal {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "undecided",
        };
        self.line(format!(
            "  essential {}, strongly inessential {}, inessential not s.i. {}, unknown {}; e-maximal: {e_max}",
            c.essential, c.strongly_inessential, c.inessential_not_si, c.unknown
        ));
    }

    fn profile(&mut self, p: &IdealProfile) {
        self.put("profile", p);
        let nu: Vec<String> = p.nu_by_degree.values().map(|v| v.to_string()).collect();
        let at: Vec<String> = p.nu_by_degree.keys().map(|v| v.to_string()).collect();
        self.line(format!("alpha {}, beta {}, generators {}", p.alpha, p.beta.map_or("-".into(), |b| b.to_string()), p.nu_total));
        self.line(format!("nu by degree: ({}) in degrees ({})", nu.join(","), at.join(",")));
        self.line(format!("multiplicity e = {}", p.multiplicity));
    }
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Essential => "essential",
        Kind::Inessential => "inessential (not s.i.)",
        Kind::StronglyInessential => "strongly inessential",
        Kind::Unknown => "unknown",
    }
}

fn certificate_text(c: &Certificate) -> String {
    match c {
        Certificate::Structural { .. } => "structural".into(),
        Certificate::Algebraic { method } => format!("algebraic ({method})"),
        Certificate::Exhaustive { prime, replacements, .. } => format!("exhaustive over F_{prime}, {replacements} replacements"),
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::CommonFactor { factor } => format!("entries share {factor}"),
        Witness::NotPrimary { checked_degree, .. } => format!("column ideal not primary (degree {checked_degree})"),
        Witness::Power { t } => format!("M^{t} in column ideal"),
        Witness::StronglyInessential { t, certificate } => format!("M^{t}; {}", certificate_text(certificate)),
        Witness::Replacement { lambdas, found_by, .. } => {
            let l: Vec<String> = lambdas.iter().map(|(j, f)| format!("{f}*C{}", j + 1)).collect();
            format!("essential replacement + {} ({found_by})", l.join(" + "))
        }
        Witness::NoRationalReplacement { obstruction, .. } => format!("not s.i.: {obstruction}"),
        Witness::Unknown { trials, reason, .. } => format!("undecided after {trials} trials: {reason}"),
    }
}

fn matrix_json(m: &FormMatrix) -> Value {
    let entries: Vec<Vec<String>> = m.entries().iter().map(|r| r.iter().map(Form::to_string).collect()).collect();
    json!({
        "vars": m.nvars(),
        "row_degrees": m.row_degrees(),
        "col_degrees": m.col_degrees(),
        "entries": entries,
    })
}

fn kinds(c: &Classification) -> Vec<Kind> {
    c.verdicts.iter().map(|v| v.kind).collect()
}

// ---------------------------------------------------------------------------
// inputs

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
enum LiftMode {
    #[serde(rename = "general")]
    #[value(name = "general")]
    General,
    #[serde(rename = "alpha3_I11", alias = "I11")]
    #[value(name = "I11", alias = "alpha3_I11")]
    I11,
    #[serde(rename = "alpha3_I12", alias = "I12")]
    #[value(name = "I12", alias = "alpha3_I12")]
    I12,
    #[serde(rename = "alpha3_I2", alias = "I2")]
    #[value(name = "I2", alias = "alpha3_I2")]
    I2,
}

/// Either a general lifting of the bidiagonal matrix with diagonal
/// `Y^{t_i}`, or one of the three families with `α = 3`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftSpec {
    mode: LiftMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ts: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<u32>,
    #[serde(default, rename = "P", skip_serializing_if = "Option::is_none")]
    p: Option<Vec<RawForm>>,
    #[serde(default, rename = "Q", skip_serializing_if = "Option::is_none")]
    q: Option<Vec<RawForm>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrescribeSpec {
    degrees: Vec<u32>,
    counts: Vec<usize>,
}

enum Input {
    Datum(RawDatum),
    Matrix(RawMatrix),
    Lift(LiftSpec),
    Prescribe(PrescribeSpec),
}

/// A parsed input file; fixture files wrap the input in a `datum`, `matrix`,
/// `lift` or `prescribe` key next to `description` and `expect`.
struct Loaded {
    input: Input,
    echo: Value,
    description: Option<String>,
    expect: Option<Value>,
}

fn decode<T: serde::de::DeserializeOwned>(what: &str, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("invalid {what}: {e}")))
}

fn read_input(path: &Path) -> Result<Loaded> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Input(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: malformed JSON: {e}", path.display())))?;
    parse_loaded(v)
}

fn parse_loaded(v: Value) -> Result<Loaded> {
    let Value::Object(mut map) = v else {
        return Err(Error::Input("expected a JSON object".into()));
    };
    let expect = map.remove("expect");
    let description = match map.remove("description") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(Error::Input("description must be a string".into())),
    };
    let keyed = ["datum", "matrix", "lift", "prescribe"].into_iter().find(|k| map.contains_key(*k));
    let (key, body) = match keyed {
        Some(k) => (k, map.remove(k).unwrap()),
        None => {
            let k = if map.contains_key("phis") {
                "datum"
            } else if map.contains_key("entries") {
                "matrix"
            } else if map.contains_key("mode") {
                "lift"
            } else if map.contains_key("degrees") {
                "prescribe"
            } else {
                return Err(Error::Input("cannot tell a datum, matrix, lift or prescription apart".into()));
            };
            (k, Value::Object(map))
        }
    };
    let input = match key {
        "datum" => Input::Datum(decode("datum", &body)?),
        "matrix" => Input::Matrix(decode("matrix", &body)?),
        "lift" => Input::Lift(decode("lift spec", &body)?),
        _ => Input::Prescribe(decode("prescription", &body)?),
    };
    Ok(Loaded { input, echo: body, description, expect })
}

struct Lifted {
    m: FormMatrix,
    base: FormMatrix,
    /// s.i. count the construction guarantees, if any.
    si: Option<usize>,
    /// `3t + 3` for the families.
    e: Option<u64>,
}

fn build_lift(spec: &LiftSpec, field: Field) -> Result<Lifted> {
    let kind = match spec.mode {
        LiftMode::General => {
            if spec.ts.is_empty() || spec.t.is_some() || spec.q.is_some() {
                return Err(Error::Input("a general lift takes `ts` and optionally `P`".into()));
            }
            let degs = lift_degrees(&spec.ts);
            let ps = match &spec.p {
                None => None,
                Some(ps) if ps.len() != degs.len() => {
                    return Err(Error::Input(format!("expected {} forms P_i, got {}", degs.len(), ps.len())))
                }
                Some(ps) => Some(ps.iter().zip(&degs).map(|(f, &d)| f.to_form(field, 3, Some(d))).collect::<Result<Vec<_>>>()?),
            };
            let m = lift_general(field, &spec.ts, ps.as_deref())?;
            let base = base_matrix(field, &spec.ts)?;
            // α - 2 s.i. columns once the base has a single generator in degree α
            let si = (spec.ts[0] >= 2).then(|| spec.ts.len() - 2);
            return Ok(Lifted { m, base, si, e: None });
        }
        LiftMode::I11 => FamilyKind::I11,
        LiftMode::I12 => FamilyKind::I12,
        LiftMode::I2 => FamilyKind::I2,
    };
    let t = match (spec.t, spec.ts.is_empty(), &spec.p) {
        (Some(t), true, None) => t,
        _ => return Err(Error::Input("a family lift takes `t` and optionally `Q`".into())),
    };
    let d = t.saturating_sub(1);
    let qs = match &spec.q {
        None => vec![Form::zero(field, 3, d); 3],
        Some(qs) => qs.iter().map(|f| f.to_form(field, 3, Some(d))).collect::<Result<Vec<_>>>()?,
    };
    let m = family_alpha3(field, kind, t, &qs)?;
    let base = family_base(field, kind, t)?;
    Ok(Lifted { m, base, si: Some(1), e: Some(3 * t as u64 + 3) })
}

/// The matrix an input stands for: datum and prescriptions give their
/// canonical matrices.
fn input_matrix(input: &Input, field: Field) -> Result<FormMatrix> {
    match input {
        Input::Datum(raw) => raw.to_datum(field)?.canonical_matrix(),
        Input::Matrix(raw) => FormMatrix::from_raw(field, raw),
        Input::Lift(spec) => Ok(build_lift(spec, field)?.m),
        Input::Prescribe(p) => prescribe(field, &p.degrees, &p.counts)?.canonical_matrix(),
    }
}

fn input_datum(input: &Input, field: Field) -> Result<Option<DubreilDatum>> {
    match input {
        Input::Datum(raw) => raw.to_datum(field).map(Some),
        Input::Prescribe(p) => prescribe(field, &p.degrees, &p.counts).map(Some),
        _ => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// commands

fn cmd_build(s: &Session, path: &Path) -> Result<Report> {
    let loaded = read_input(path)?;
    let Input::Datum(raw) = &loaded.input else {
        return Err(Error::Input("build expects a datum".into()));
    };
    let d = raw.to_datum(s.field)?;
    let mut rep = Report::new("build", s);
    rep.put("input", &loaded.echo);
    rep.put("datum", d.to_raw());
    rep.line(format!("Phi = {}   (delta {}, distinct factors {}, r {})", d.phi(), d.delta(), d.v(), d.r()));
    let ideal = d.build_ideal()?;
    let profile = ideal.profile(s.horizon)?;
    rep.profile(&profile);
    let dub = ideal.dubreil_check(&profile);
    rep.put("dubreil", &dub);
    let m = d.canonical_matrix()?;
    rep.matrix("canonical_matrix", "canonical matrix", &m);
    let cls = classify_all(&m, &s.opts())?;
    rep.classification("classification", &m, &cls);
    if d.r() == 0 {
        rep.note("no s.i. elements: the datum has no factors, so every minimal generator is essential");
    }
    let predicted = d.si_count();
    let observed = SiCount::observed(&m, &cls);
    rep.put("si_predicted", &predicted);
    rep.put("si_observed", &observed);
    rep.check("dubreil equality", dub.equality, format!("nu = {}, alpha + 1 = {}", dub.nu, dub.dubreil_bound));
    rep.check("refined bound per degree", dub.refined_holds, format!("maximal in degrees {:?}", dub.max_at));
    match d.verify_matrix(&m) {
        Ok(()) => rep.check("canonical matrix presents I", true, "minors match the basis"),
        Err(e) => rep.check("canonical matrix presents I", false, e.to_string()),
    }
    let e_deg = m.multiplicity_from_degrees()?;
    rep.check("multiplicity from degrees", e_deg == profile.multiplicity, format!("{e_deg} vs colength {}", profile.multiplicity));
    if cls.unknown == 0 {
        rep.check("s.i. total = delta - v", observed.total == predicted.total, format!("observed {}, predicted {}", observed.total, predicted.total));
        rep.check("s.i. per degree", observed.per_degree == predicted.per_degree, format!("observed {:?}, predicted {:?}", observed.per_degree, predicted.per_degree));
    } else {
        rep.skip("s.i. total = delta - v", "some verdicts are unknown");
    }
    Ok(rep)
}

fn cmd_classify(s: &Session, path: &Path) -> Result<Report> {
    let loaded = read_input(path)?;
    let m = input_matrix(&loaded.input, s.field)?;
    let mut rep = Report::new("classify", s);
    rep.put("input", &loaded.echo);
    rep.matrix("matrix", "matrix", &m);
    let cls = classify_all(&m, &s.opts())?;
    rep.classification("classification", &m, &cls);
    let crit = m.essentiality_by_degree_bound()?;
    rep.put("degree_criteria", &crit);
    rep.line(format!("multiplicity from degrees: {}; degree criteria fired: {:?}", crit.multiplicity, crit.fired));
    let minors = m.maximal_minors()?;
    rep.check("rows are syzygies of the minors", m.verify_syzygies(&minors)?, format!("{} minors", minors.len()));
    if crit.fires && cls.unknown == 0 {
        rep.check("degree criteria imply no s.i.", cls.strongly_inessential == 0, format!("{} s.i. columns", cls.strongly_inessential));
    }
    Ok(rep)
}

fn cmd_count_si(s: &Session, path: &Path) -> Result<Report> {
    let loaded = read_input(path)?;
    let m = input_matrix(&loaded.input, s.field)?;
    let mut rep = Report::new("count-si", s);
    rep.put("input", &loaded.echo);
    let cls = classify_all(&m, &s.opts())?;
    if cls.unknown > 0 {
        rep.inconclusive = true;
    }
    let observed = SiCount::observed(&m, &cls);
    rep.put("observed", &observed);
    rep.line(format!("observed: {} s.i. generators, per degree {:?}", observed.total, observed.per_degree));
    if let Some(d) = input_datum(&loaded.input, s.field)? {
        let predicted = d.si_count();
        rep.put("predicted", &predicted);
        rep.line(format!("predicted: {} = delta - v = {} - {}, per degree {:?}", predicted.total, d.delta(), d.v(), predicted.per_degree));
        if cls.unknown == 0 {
            rep.check("observed = predicted", observed == predicted, "");
        }
    } else if m.nvars() == 3 && cls.unknown == 0 && cls.essential == 3 {
        let alpha = *m.col_degrees().iter().min().unwrap();
        if alpha > 2 {
            rep.check("at most alpha - 2 s.i.", observed.total as i64 <= alpha - 2, format!("alpha = {alpha}"));
        }
    }
    Ok(rep)
}

fn cmd_split(s: &Session, path: &Path, p: u32) -> Result<Report> {
    let loaded = read_input(path)?;
    let m = input_matrix(&loaded.input, s.field)?;
    let opts = s.opts();
    let pair = split(&m, p)?;
    let mut rep = Report::new("split", s);
    rep.put("input", &loaded.echo);
    rep.put("p", p);
    rep.put("d", pair.d.to_string());
    rep.line(format!("split after degree {p}: D = {}, first block keeps {} generators", pair.d, pair.m));
    rep.matrix("matrix", "matrix", &m);
    let whole = classify_all(&m, &opts)?;
    rep.classification("classification", &m, &whole);
    rep.matrix("m_prime", "M(I')", &pair.m_prime);
    let first = classify_all(&pair.m_prime, &opts)?;
    rep.classification("classification_prime", &pair.m_prime, &first);
    rep.matrix("m_second", "M(I'')", &pair.m_second);
    let second = classify_all(&pair.m_second, &opts)?;
    rep.classification("classification_second", &pair.m_second, &second);
    let r = check_splitting(&m, &pair, &opts)?;
    rep.put("splitting", &r);
    if !r.undecided.is_empty() {
        rep.inconclusive = true;
    }
    let one = |v: &[usize]| v.iter().map(|j| j.wrapping_add(1)).collect::<Vec<_>>();
    rep.check("s.i. in I' stays s.i. in I", r.forward_violations.is_empty(), format!("violations {:?}", one(&r.forward_violations)));
    rep.check("I'' agrees with I past the split", r.second_violations.is_empty(), format!("violations {:?}", one(&r.second_violations)));
    if !r.reverse_examples.is_empty() {
        rep.note(&format!("columns {:?} are s.i. in I but not in I'", one(&r.reverse_examples)));
    }
    Ok(rep)
}

fn cmd_prescribe(s: &Session, degrees: &[u32], counts: &[usize], alternatives: usize) -> Result<Report> {
    if degrees.len() != counts.len() {
        return Err(Error::Input(format!("{} degrees but {} counts", degrees.len(), counts.len())));
    }
    let data = if alternatives > 1 {
        prescribe_alternatives(s.field, degrees, counts, alternatives)?
    } else {
        vec![prescribe(s.field, degrees, counts)?]
    };
    let want: BTreeMap<u32, usize> = degrees.iter().copied().zip(counts.iter().copied()).collect();
    let mut rep = Report::new("prescribe", s);
    rep.put("input", json!({ "degrees": degrees, "counts": counts }));
    let mut out = Vec::new();
    for (i, d) in data.iter().enumerate() {
        let m = d.canonical_matrix()?;
        let cls = classify_all(&m, &s.opts())?;
        let observed = SiCount::observed(&m, &cls);
        rep.line(format!("datum {}: Phi = {}, beta0 {}, gaps {:?}, degree vector {:?}", i + 1, d.phi(), d.beta0(), d.gaps(), d.degree_vector()));
        rep.matrix(&format!("matrix_{}", i + 1), "  canonical matrix", &m);
        if cls.unknown > 0 {
            rep.inconclusive = true;
        } else {
            rep.check(&format!("datum {} realises the counts", i + 1), observed.per_degree == want, format!("observed {:?}", observed.per_degree));
        }
        out.push(json!({
            "datum": d.to_raw(),
            "degree_vector": d.degree_vector(),
            "canonical_matrix": matrix_json(&m),
            "observed": observed,
        }));
    }
    rep.put("data", out);
    Ok(rep)
}

fn cmd_lift(s: &Session, spec: &LiftSpec) -> Result<Report> {
    let lifted = build_lift(spec, s.field)?;
    let m = &lifted.m;
    let opts = s.opts();
    let mut rep = Report::new("lift", s);
    rep.put("input", spec);
    rep.matrix("matrix", "lifted matrix", m);
    rep.matrix("base", "base matrix", &lifted.base);
    let image = set_z_zero(m)?;
    rep.check("Z = 0 recovers the base", image == lifted.base, "entry-wise");
    let membership = match check_s_membership(m, &opts) {
        Ok(r) => Some(r),
        Err(Error::Inconclusive(_)) => None,
        Err(e) => return Err(e),
    };
    let cls = match &membership {
        Some(r) => r.classification.clone(),
        None => classify_all(m, &opts)?,
    };
    rep.classification("classification", m, &cls);
    let profile = m.minors_ideal()?.profile(s.horizon)?;
    rep.profile(&profile);
    let e_deg = m.multiplicity_from_degrees()?;
    rep.check("multiplicity from degrees", e_deg == profile.multiplicity, format!("{e_deg} vs colength {}", profile.multiplicity));
    if let Some(e) = lifted.e {
        rep.check("e = 3t + 3", profile.multiplicity == e, format!("e = {}", profile.multiplicity));
    }
    if let Some(r) = &membership {
        put_membership(&mut rep, r);
        if let Some(k) = lifted.si {
            rep.check("three essential generators, alpha > 2", r.member, format!("essential columns {:?}", one_based(&r.essential)));
            rep.check("s.i. count", r.strongly_inessential.len() == k, format!("{} s.i., expected {k}", r.strongly_inessential.len()));
        } else {
            rep.skip("s.i. count", "t_0 = 1: the base has no s.i. generator to lift");
        }
        if r.member {
            rep.check("at most alpha - 2 s.i.", r.si_bound, format!("alpha = {}", r.alpha));
        }
    }
    let q = check_quotient(m, &image, &opts)?;
    if !q.undecided.is_empty() {
        rep.inconclusive = true;
    }
    rep.check("s.i. columns survive Z = 0", q.monotone, format!("lift {:?}, image {:?}", one_based(&q.si_lift), one_based(&q.si_image)));
    rep.put("quotient", &q);
    Ok(rep)
}

fn put_membership(rep: &mut Report, r: &MembershipReport) {
    let mut j = serde_json::to_value(r).expect("membership json");
    j.as_object_mut().expect("object").remove("classification");
    rep.put("membership", j);
    rep.line(format!(
        "class membership: {} (alpha {}, essential degrees {:?})",
        if r.member { "yes" } else { "no" },
        r.alpha,
        r.essential_degrees
    ));
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|j| j + 1).collect()
}

fn cmd_quotient(s: &Session, path: &Path, linear: &str) -> Result<Report> {
    let loaded = read_input(path)?;
    let m = input_matrix(&loaded.input, s.field)?;
    let l = parse_form(s.field, 3, linear, Some(1))?;
    let image = quotient_mod_linear(&m, &l)?;
    let mut rep = Report::new("quotient", s);
    rep.put("input", &loaded.echo);
    rep.put("linear", l.to_string());
    rep.matrix("matrix", "matrix", &m);
    rep.matrix("image", &format!("image modulo {l}"), &image);
    let q = check_quotient(&m, &image, &s.opts())?;
    if !q.undecided.is_empty() {
        rep.inconclusive = true;
    }
    rep.line(format!("s.i. columns: lift {:?}, image {:?}", one_based(&q.si_lift), one_based(&q.si_image)));
    rep.check("s.i. columns survive reduction", q.monotone, format!("violations {:?}", one_based(&q.violations)));
    rep.put("quotient", &q);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// fixtures

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Expect {
    kinds: Option<Vec<Kind>>,
    si_total: Option<usize>,
    e_maximal: Option<bool>,
    nu_by_degree: Option<BTreeMap<u32, usize>>,
    multiplicity: Option<u64>,
    split: Option<SplitExpect>,
    /// Expected error kind, e.g. `infeasible`.
    error: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitExpect {
    p: u32,
    first: Option<Vec<Kind>>,
    second: Option<Vec<Kind>>,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) => "input",
        Error::Degree(_) => "degree",
        Error::Precondition(_) => "precondition",
        Error::NotHeightTwo(_) => "not_height_two",
        Error::Infeasible(_) => "infeasible",
        Error::Budget { .. } => "budget",
        Error::Check(_) => "check",
        Error::Inconclusive(_) => "inconclusive",
        Error::Internal(_) => "internal",
    }
}

/// Mismatches between a fixture and its expectations.
fn verify_fixture(s: &Session, loaded: &Loaded) -> Result<Vec<String>> {
    let expect: Expect = match &loaded.expect {
        Some(v) => decode("expectations", v)?,
        None => return Err(Error::Input("fixture has no `expect` block".into())),
    };
    let mut bad = Vec::new();
    let mut diff = |what: &str, got: String, want: String| {
        if got != want {
            bad.push(format!("{what}: got {got}, expected {want}"));
        }
    };
    let m = match input_matrix(&loaded.input, s.field) {
        Err(e) => {
            match &expect.error {
                Some(k) => diff("error", error_kind(&e).into(), k.clone()),
                None => return Err(e),
            }
            return Ok(bad);
        }
        Ok(m) => m,
    };
    if let Some(k) = &expect.error {
        diff("error", "none".into(), k.clone());
    }
    let opts = s.opts();
    let cls = classify_all(&m, &opts)?;
    if let Some(k) = &expect.kinds {
        diff("kinds", format!("{:?}", kinds(&cls)), format!("{k:?}"));
    }
    if let Some(n) = expect.si_total {
        diff("s.i. total", cls.strongly_inessential.to_string(), n.to_string());
    }
    if let Some(b) = expect.e_maximal {
        diff("e-maximal", format!("{:?}", cls.e_maximal), format!("{:?}", Some(b)));
    }
    if expect.nu_by_degree.is_some() || expect.multiplicity.is_some() {
        let ideal = match input_datum(&loaded.input, s.field)? {
            Some(d) => d.build_ideal()?,
            None => m.minors_ideal()?,
        };
        let p = ideal.profile(s.horizon)?;
        if let Some(nu) = &expect.nu_by_degree {
            diff("nu by degree", format!("{:?}", p.nu_by_degree), format!("{nu:?}"));
        }
        if let Some(e) = expect.multiplicity {
            diff("multiplicity", p.multiplicity.to_string(), e.to_string());
        }
    }
    if let Some(sp) = &expect.split {
        let pair = split(&m, sp.p)?;
        if let Some(k) = &sp.first {
            diff("kinds of M(I')", format!("{:?}", kinds(&classify_all(&pair.m_prime, &opts)?)), format!("{k:?}"));
        }
        if let Some(k) = &sp.second {
            diff("kinds of M(I'')", format!("{:?}", kinds(&classify_all(&pair.m_second, &opts)?)), format!("{k:?}"));
        }
    }
    Ok(bad)
}

fn cmd_verify_all(s: &Session, dir: &Path) -> Result<Report> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Input(format!("no fixtures in {}", dir.display())));
    }
    let mut rep = Report::new("verify-all", s);
    let mut results = Vec::new();
    for f in &files {
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        let (description, outcome) = match read_input(f) {
            Ok(l) => (l.description.clone(), verify_fixture(s, &l)),
            Err(e) => (None, Err(e)),
        };
        let (ok, detail) = match outcome {
            Ok(bad) if bad.is_empty() => (true, description.clone().unwrap_or_default()),
            Ok(bad) => (false, bad.join("; ")),
            Err(e) => (false, format!("error: {e}")),
        };
        rep.check(&name, ok, detail);
        results.push(json!({ "file": name, "description": description, "pass": ok }));
    }
    rep.put("fixtures", results);
    Ok(rep)
}

fn run(cli: &Cli) -> Result<Report> {
    let s = &cli.session;
    match &cli.command {
        Command::Build { input } => cmd_build(s, input),
        Command::Classify { input } => cmd_classify(s, input),
        Command::CountSi { input } => cmd_count_si(s, input),
        Command::Split { input, p } => cmd_split(s, input, *p),
        Command::Prescribe { degrees, counts, alternatives } => cmd_prescribe(s, degrees, counts, *alternatives),
        Command::Lift { spec, kind, t, ts } => {
            let spec = match (spec, kind) {
                (Some(path), None) => match read_input(path)?.input {
                    Input::Lift(spec) => spec,
                    _ => return Err(Error::Input("lift expects a lift spec".into())),
                },
                (None, Some(mode)) => LiftSpec { mode: *mode, ts: ts.clone(), t: *t, p: None, q: None },
                _ => return Err(Error::Input("give either a spec file or --kind".into())),
            };
            cmd_lift(s, &spec)
        }
        Command::Quotient { input, linear } => cmd_quotient(s, input, linear),
        Command::VerifyAll { dir } => cmd_verify_all(s, dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            let code = rep.exit_code();
            print!("{}", rep.render(cli.session.format));
            ExitCode::from(code)
        }
        Err(e) => {
            match cli.session.format {
                Format::Json => {
                    let out = json!({
                        "config": cli.session.config(),
                        "status": "error",
                        "error": { "kind": error_kind(&e), "message": e.to_string() },
                    });
                    println!("{}", serde_json::to_string_pretty(&out).expect("json error"));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

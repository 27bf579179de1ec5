//! Command implementations behind the `catalyx` binary.
//!
//! Every command returns an [`Outcome`] holding the exit code and the text
//! for stdout, so the binary only does I/O.

use std::fmt;

use catalyx::catalysis::verify_catalyst_with_cap;
use catalyx::conversion::{catalytic_probability, ratio_curve, vidal_with_index};
use catalyx::number::{format_rational, parse_rational};
use catalyx::{
    synthesize_catalyst, Catalyst, ConversionSettings, Error, SchmidtVector, SynthesisCertificate, SynthesisSettings,
};
use num_rational::BigRational;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_REFUSED: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;
pub const EXIT_SIZE_CAP: i32 = 6;

/// A failed command: exit code plus message for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Shape { .. } => EXIT_PARSE,
            Error::InvalidSequence(_)
            | Error::Domain(_)
            | Error::Precondition(_)
            | Error::Degenerate(_)
            | Error::Range { .. } => EXIT_DOMAIN,
            Error::ConditionsViolated(_) | Error::Refused(_) => EXIT_REFUSED,
            Error::SynthesisFailed { .. }
            | Error::FactorInfeasible(_)
            | Error::Numeric(_)
            | Error::Divisibility(_) => EXIT_BUDGET,
            Error::SizeCap { .. } => EXIT_SIZE_CAP,
        };
        Failure { code, message: e.to_string() }
    }
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_PARSE, message: message.into() }
}

/// Result of a successful run; `code` may still be nonzero (e.g. `verify` → false).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    /// Extra files to write, as `(path, contents)`.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn json(code: i32, value: &Value) -> Self {
        Outcome { code, stdout: render(value), files: Vec::new() }
    }
}

/// Pretty JSON with a trailing newline; keys come out sorted.
pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

/// Settings overrides collected from flags and the environment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// From the environment; replaces only the built-in default.
    pub default_precision_bits: Option<usize>,
    pub precision_bits: Option<usize>,
    pub grid: Option<usize>,
    pub tolerance: Option<f64>,
    pub lambda: Option<String>,
    pub margin: Option<f64>,
    pub max_product_size: Option<u128>,
    pub normalize: bool,
}

/// Parsed input file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub x: SchmidtVector,
    pub y: SchmidtVector,
    pub lambda: Option<BigRational>,
    pub catalyst: Option<Catalyst>,
    pub settings: SynthesisSettings,
}

fn number_text(v: &Value, field: &str) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        // With arbitrary precision the number keeps its literal text.
        Value::Number(n) => Ok(n.to_string()),
        other => Err(parse_failure(format!("{field}: expected a number or string, found {other}"))),
    }
}

fn number_list(v: &Value, field: &str) -> Result<Vec<String>, Failure> {
    v.as_array()
        .ok_or_else(|| parse_failure(format!("{field}: expected a list")))?
        .iter()
        .map(|e| number_text(e, field))
        .collect()
}

fn vector(v: &Value, field: &str) -> Result<SchmidtVector, Failure> {
    Ok(SchmidtVector::parse(&number_list(v, field)?)?)
}

/// Catalyst given as a list of values or as `{value, multiplicity}` entries.
fn catalyst(v: &Value) -> Result<Catalyst, Failure> {
    let items = v.as_array().ok_or_else(|| parse_failure("catalyst: expected a list"))?;
    let mut entries = Vec::with_capacity(items.len());
    for item in items {
        match item {
            Value::Object(m) => {
                let value = number_text(m.get("value").ok_or_else(|| parse_failure("catalyst entry without value"))?, "catalyst")?;
                let mult = m.get("multiplicity").map_or(Ok("1".to_string()), |v| number_text(v, "catalyst"))?;
                let mult = mult.parse().map_err(|_| parse_failure(format!("catalyst: bad multiplicity {mult:?}")))?;
                entries.push((parse_rational(&value)?, mult));
            }
            other => entries.push((parse_rational(&number_text(other, "catalyst")?)?, 1u32.into())),
        }
    }
    Ok(Catalyst::new(entries)?)
}

fn apply_settings(s: &mut SynthesisSettings, v: &Value) -> Result<(), Failure> {
    let obj = v.as_object().ok_or_else(|| parse_failure("settings: expected an object"))?;
    let bad = |k: &str| parse_failure(format!("settings.{k}: bad value"));
    for (k, val) in obj {
        match k.as_str() {
            "precision_bits" => s.conversion.precision_bits = val.as_u64().ok_or_else(|| bad(k))? as usize,
            "grid" => s.conversion.grid = val.as_u64().ok_or_else(|| bad(k))? as usize,
            "tolerance" => s.conversion.tolerance = val.as_f64().ok_or_else(|| bad(k))?,
            "margin" => s.margin = val.as_f64().ok_or_else(|| bad(k))?,
            "max_product_size" => s.max_product_size = val.as_u64().ok_or_else(|| bad(k))? as u128,
            "max_degree" => s.max_degree = val.as_u64().ok_or_else(|| bad(k))? as usize,
            "max_retries" => s.max_retries = val.as_u64().ok_or_else(|| bad(k))? as usize,
            "lemma_bits" => s.lemma_bits = val.as_u64().ok_or_else(|| bad(k))? as usize,
            _ => return Err(parse_failure(format!("settings: unknown key {k:?}"))),
        }
    }
    Ok(())
}

impl Problem {
    /// Parses a problem file. Precedence is flags, then the file, then the
    /// environment, then defaults.
    ///
    /// Recognized keys: `x`, `y`, `lambda`, `catalyst`, `pad` (zero-pad the
    /// shorter vector), `settings`.
    pub fn parse(text: &str, overrides: &Overrides) -> Result<Problem, Failure> {
        let doc: Value = serde_json::from_str(text).map_err(|e| parse_failure(format!("invalid JSON: {e}")))?;
        let field = |k: &str| doc.get(k).ok_or_else(|| parse_failure(format!("missing field {k:?}")));
        let mut x = vector(field("x")?, "x")?;
        let mut y = vector(field("y")?, "y")?;
        if doc.get("pad").and_then(Value::as_bool).unwrap_or(false) {
            let n = x.len().max(y.len());
            x = x.padded(n);
            y = y.padded(n);
        }
        if x.len() != y.len() {
            return Err(Error::Shape { left: x.len(), right: y.len() }.into());
        }
        let mut settings = SynthesisSettings::default();
        if let Some(b) = overrides.default_precision_bits {
            settings.conversion.precision_bits = b;
        }
        if let Some(s) = doc.get("settings") {
            apply_settings(&mut settings, s)?;
        }
        overrides.apply(&mut settings);
        let lambda = match (&overrides.lambda, doc.get("lambda")) {
            (Some(l), _) => Some(parse_rational(l)?),
            (None, Some(v)) => Some(parse_rational(&number_text(v, "lambda")?)?),
            (None, None) => None,
        };
        let catalyst = doc.get("catalyst").map(catalyst).transpose()?;
        if overrides.normalize {
            x = normalize(&x)?;
            y = normalize(&y)?;
        }
        Ok(Problem { x, y, lambda, catalyst, settings })
    }
}

fn normalize(v: &SchmidtVector) -> Result<SchmidtVector, Failure> {
    if v.sum() == BigRational::from_integer(0.into()) {
        return Err(Error::Degenerate("cannot normalize a sequence that sums to zero".into()).into());
    }
    Ok(v.normalized())
}

impl Overrides {
    pub fn apply(&self, s: &mut SynthesisSettings) {
        if let Some(b) = self.precision_bits {
            s.conversion.precision_bits = b;
        }
        if let Some(g) = self.grid {
            s.conversion.grid = g;
        }
        if let Some(t) = self.tolerance {
            s.conversion.tolerance = t;
        }
        if let Some(m) = self.margin {
            s.margin = m;
        }
        if let Some(c) = self.max_product_size {
            s.max_product_size = c;
        }
    }
}

fn conversion(p: &Problem) -> &ConversionSettings {
    &p.settings.conversion
}

/// `prob`: single-copy probability and the minimizing index.
pub fn cmd_prob(p: &Problem) -> Result<Outcome, Failure> {
    let (value, m) = vidal_with_index(&p.x, &p.y)?;
    Ok(Outcome::json(EXIT_OK, &json!({ "p_vidal": format_rational(&value), "m": m })))
}

/// `catprob`: catalytic probability, attainability and optionally the ratio curve as CSV.
pub fn cmd_catprob(p: &Problem, curve: Option<&str>) -> Result<Outcome, Failure> {
    let r = catalytic_probability(&p.x, &p.y, conversion(p))?;
    let argmin = if r.argmin_nu == f64::NEG_INFINITY { json!("-inf") } else { json!(r.argmin_nu) };
    let value = json!({
        "p_vidal": format_rational(&r.p_vidal),
        "p_cat": r.p_cat.to_sci_string(30),
        "p_cat_error": r.tolerance,
        "p_cat_unclamped": r.p_cat_raw.to_sci_string(30),
        "argmin_nu": argmin,
        "attainability": r.attainability.to_string(),
        "endpoint_neg_inf": r.endpoint_neg_inf.as_ref().map_or_else(|| "inf".to_string(), format_rational),
        "endpoint_one": format_rational(&r.endpoint_one),
        "interior_min": r.interior_min.as_ref().map(|(nu, v)| json!({ "nu": nu, "ratio": v.to_sci_string(30) })),
        "precision_bits": r.precision_bits,
        "diagnostics": r.diagnostics,
    });
    let mut out = Outcome::json(EXIT_OK, &value);
    if let Some(path) = curve {
        out.files.push((path.to_string(), ratio_curve(&p.x, &p.y, conversion(p))?.to_csv()));
    }
    Ok(out)
}

/// `synth`: builds and verifies a catalyst for `x → λy`.
///
/// With `out` the certificate goes to that file and stdout gets the summary;
/// otherwise the certificate itself is printed.
pub fn cmd_synth(p: &Problem, out: Option<&str>) -> Result<Outcome, Failure> {
    let lambda = p.lambda.clone().ok_or_else(|| parse_failure("synth needs lambda (field or --lambda)"))?;
    let cert = synthesize_catalyst(&p.x, &p.y, &lambda, &p.settings)?;
    let code = if cert.verified { EXIT_OK } else { EXIT_FALSE };
    let summary = json!({
        "route": cert.route,
        "catalyst_dimension": cert.catalyst_dimension,
        "catalyst_entries": cert.catalyst.len(),
        "verified": cert.verified,
    });
    Ok(match out {
        Some(path) => {
            let mut o = Outcome::json(code, &summary);
            o.files.push((path.to_string(), format!("{}\n", cert.to_json())));
            o
        }
        None => Outcome { code, stdout: format!("{}\n", cert.to_json()), files: Vec::new() },
    })
}

/// `verify` on a problem file with a `catalyst` field, checking `x⊗c ≺^w (λy)⊗c`.
pub fn cmd_verify(p: &Problem) -> Result<Outcome, Failure> {
    let c = p.catalyst.as_ref().ok_or_else(|| parse_failure("verify needs a catalyst (field or --certificate)"))?;
    let target = match &p.lambda {
        Some(l) => p.y.scaled(l)?,
        None => p.y.clone(),
    };
    verdict(verify_catalyst_with_cap(&p.x, &target, c, p.settings.max_product_size)?)
}

/// `verify` on a certificate produced by `synth`.
pub fn cmd_verify_certificate(text: &str, cap: u128) -> Result<Outcome, Failure> {
    let cert = SynthesisCertificate::from_json(text)?;
    verdict(cert.reverify(cap)?)
}

fn verdict(ok: bool) -> Result<Outcome, Failure> {
    Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_FALSE }, stdout: format!("{ok}\n"), files: Vec::new() })
}

/// True when the text looks like a certificate rather than a problem file.
pub fn is_certificate(text: &str) -> bool {
    serde_json::from_str::<Value>(text).ok().is_some_and(|v| v.get("route").is_some() && v.get("catalyst").is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(text: &str) -> Problem {
        Problem::parse(text, &Overrides::default()).unwrap()
    }

    #[test]
    fn numbers_parse_exactly() {
        let p = problem(r#"{"x": [0.4, "2/5", 1e-1, "0.1"], "y": ["0.5", 0.25, 0.25, 0]}"#);
        assert_eq!(p.x.to_strings(), ["2/5", "2/5", "1/10", "1/10"]);
        assert_eq!(p.y.to_strings(), ["1/2", "1/4", "1/4", "0"]);
    }

    #[test]
    fn padding_and_shape() {
        let err = Problem::parse(r#"{"x": [1, 1], "y": [2]}"#, &Overrides::default()).unwrap_err();
        assert_eq!(err.code, EXIT_PARSE);
        let p = problem(r#"{"x": [1, 1], "y": [2], "pad": true}"#);
        assert_eq!(p.y.to_strings(), ["2", "0"]);
    }

    #[test]
    fn flags_override_file() {
        let o = Overrides { grid: Some(64), lambda: Some("1/2".into()), ..Default::default() };
        let p = Problem::parse(r#"{"x": [1], "y": [1], "lambda": 1, "settings": {"grid": 32, "margin": 0.5}}"#, &o).unwrap();
        assert_eq!(p.settings.conversion.grid, 64);
        assert_eq!(p.settings.margin, 0.5);
        assert_eq!(format_rational(p.lambda.as_ref().unwrap()), "1/2");
    }

    #[test]
    fn normalize_flag() {
        let o = Overrides { normalize: true, ..Default::default() };
        let p = Problem::parse(r#"{"x": [1, 3], "y": [2, 2]}"#, &o).unwrap();
        assert_eq!(p.x.to_strings(), ["1/4", "3/4"]);
        assert_eq!(p.y.to_strings(), ["1/2", "1/2"]);
    }

    #[test]
    fn prob_examples() {
        let out = cmd_prob(&problem(r#"{"x": [0.8, 0.2], "y": [0.5, 0.5]}"#)).unwrap();
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["p_vidal"], "2/5");
        let out = cmd_prob(&problem(r#"{"x": [0.3, 0.7], "y": [0.3, 0.7]}"#)).unwrap();
        assert!(out.stdout.contains("\"p_vidal\": \"1\""));
        let err = Problem::parse(r#"{"x": [0.3, 0.7], "y": [0, 0]}"#, &Overrides::default()).unwrap_err();
        assert_eq!(err.code, EXIT_DOMAIN);
        let err = Problem::parse(r#"{"x": [0.3, 0.7], "y": ["a", 0]}"#, &Overrides::default()).unwrap_err();
        assert_eq!(err.code, EXIT_PARSE);
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::Parse("q".into())).code, EXIT_PARSE);
        assert_eq!(Failure::from(Error::Refused("r".into())).code, EXIT_REFUSED);
        assert_eq!(Failure::from(Error::SynthesisFailed { attempts: 1, reason: "b".into() }).code, EXIT_BUDGET);
        assert_eq!(Failure::from(Error::SizeCap { size: 2, cap: 1 }).code, EXIT_SIZE_CAP);
    }

    #[test]
    fn verify_examples() {
        let jp = r#""x": [0.4, 0.4, 0.1, 0.1], "y": [0.5, 0.25, 0.25, 0]"#;
        let yes = cmd_verify(&problem(&format!("{{{jp}, \"catalyst\": [0.6, 0.4]}}"))).unwrap();
        assert_eq!((yes.code, yes.stdout.as_str()), (EXIT_OK, "true\n"));
        let no = cmd_verify(&problem(&format!("{{{jp}, \"catalyst\": [1]}}"))).unwrap();
        assert_eq!((no.code, no.stdout.as_str()), (EXIT_FALSE, "false\n"));
        let same = cmd_verify(&problem(r#"{"x": [1, 2], "y": [1, 2], "catalyst": [{"value": "3/7", "multiplicity": 4}]}"#)).unwrap();
        assert_eq!(same.code, EXIT_OK);
        let capped = Overrides { max_product_size: Some(2), ..Default::default() };
        let p = Problem::parse(&format!("{{{jp}, \"catalyst\": [0.6, 0.4]}}"), &capped).unwrap();
        assert_eq!(cmd_verify(&p).unwrap_err().code, EXIT_SIZE_CAP);
    }
}

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::case_a::{run_case_a, CaseAInstance, CaseAOutcome};
use super::reduce::{direct_case_a, reduce_case_b, reduce_case_c};
use super::verify::{verify_catalyst_with_cap, DEFAULT_PRODUCT_CAP};
use crate::conversion::{catalytic_probability, check_supertrumping_conditions, ConditionsVerdict, ConversionSettings};
use crate::error::{Error, Result};
use crate::number::{format_rational, parse_rational, rational_to_f64};
use crate::polyseries::{FactorSeries, FactorSummary};
use crate::sequences::{strip_common, supermajorizes, Catalyst, CatalystEntry, SchmidtVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthesisSettings {
    pub conversion: ConversionSettings,
    /// Requested `λ` may be at most `margin · p_cat`.
    pub margin: f64,
    pub lemma_bits: usize,
    pub lemma_tolerance: f64,
    pub max_retries: usize,
    /// Largest exponent of `ω` accepted in the power form.
    pub max_degree: usize,
    /// Cap on distinct `(x_i, c_ℓ)` runs during verification.
    pub max_product_size: u128,
}

impl Default for SynthesisSettings {
    fn default() -> Self {
        SynthesisSettings {
            conversion: ConversionSettings::default(),
            margin: 0.99,
            lemma_bits: 128,
            lemma_tolerance: 1e-30,
            max_retries: 5,
            max_degree: 64,
            max_product_size: DEFAULT_PRODUCT_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisRoute {
    /// `x ≺^w λy` already holds.
    Trivial,
    /// The stripped pair is already `K·ω^e`.
    Direct,
    /// Elements rounded to powers of `ω` first.
    Sandwich,
}

/// Replacement of zeros in the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroLifting {
    pub zeros: usize,
    pub j_min: f64,
    pub bernoulli_bound: f64,
    pub epsilon_zero: String,
}

/// `x̄ = K·ω^β`, `ȳ = K·ω^α` after removal of shared exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerForm {
    pub omega: String,
    pub k: String,
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub theta: Option<f64>,
    pub theta_low: Option<String>,
}

impl PowerForm {
    fn of(inst: &CaseAInstance) -> Self {
        PowerForm {
            omega: format_rational(&inst.omega),
            k: format_rational(&inst.k),
            alpha: inst.alpha.clone(),
            beta: inst.beta.clone(),
            theta: None,
            theta_low: None,
        }
    }

    pub fn instance(&self) -> Result<CaseAInstance> {
        CaseAInstance::new(parse_rational(&self.omega)?, parse_rational(&self.k)?, self.alpha.clone(), self.beta.clone())
    }
}

/// Trace of the polynomial construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseARecord {
    pub big_gamma: Vec<String>,
    pub small_gamma: Vec<String>,
    pub factorization: FactorSummary,
    pub factor_series: Vec<String>,
    /// `N` for each quadratic factor handled by the binomial construction.
    pub quadratic_n: Vec<usize>,
    pub epsilon: String,
    pub truncation: usize,
    pub head: Vec<String>,
    pub tail: String,
    pub weights: Vec<String>,
    pub rounding_denominator: Option<String>,
    pub multiplicity_scale: String,
    pub b_nonnegative: bool,
    pub delta_nonnegative: bool,
    pub attempts: usize,
    pub lemma_bits: usize,
    pub log: Vec<String>,
}

impl CaseARecord {
    fn of(out: &CaseAOutcome) -> Self {
        let strings = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
        CaseARecord {
            big_gamma: out.big_gamma.to_strings(),
            small_gamma: out.small_gamma.to_strings(),
            factorization: out.lemma.factorization.summary(),
            factor_series: out.lemma.factors.iter().map(FactorSeries::describe).collect(),
            quadratic_n: out
                .lemma
                .factors
                .iter()
                .filter_map(|f| match f {
                    FactorSeries::Quadratic { n, .. } => Some(*n),
                    _ => None,
                })
                .collect(),
            epsilon: format_rational(&out.epsilon),
            truncation: out.series.truncation,
            head: strings(&out.series.head),
            tail: out.series.tail_sum.as_ref().map_or_else(|| "inf".into(), format_rational),
            weights: strings(&out.weights),
            rounding_denominator: out.rounding_denominator.as_ref().map(|d| d.to_string()),
            multiplicity_scale: out.multiplicity_scale.to_string(),
            b_nonnegative: out.b_nonnegative,
            delta_nonnegative: out.delta_nonnegative,
            attempts: out.attempts,
            lemma_bits: out.lemma_bits,
            log: out.log.clone(),
        }
    }
}

/// A catalyst together with how it was built; exact values are `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisCertificate {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub lambda: String,
    pub route: SynthesisRoute,
    pub steps: Vec<String>,
    pub zero_lifting: Option<ZeroLifting>,
    pub power_form: Option<PowerForm>,
    pub case_a: Option<CaseARecord>,
    pub catalyst: Vec<CatalystEntry>,
    pub catalyst_dimension: String,
    /// Exact verdict of `x⊗c ≺^w λy⊗c`.
    pub verified: bool,
}

impl SynthesisCertificate {
    pub fn catalyst(&self) -> Result<Catalyst> {
        Catalyst::from_entries(&self.catalyst)
    }

    pub fn x(&self) -> Result<SchmidtVector> {
        SchmidtVector::parse(&self.x)
    }

    /// The target `λy`.
    pub fn scaled_y(&self) -> Result<SchmidtVector> {
        SchmidtVector::parse(&self.y)?.scaled(&parse_rational(&self.lambda)?)
    }

    /// Re-runs the exact check.
    pub fn reverify(&self, cap: u128) -> Result<bool> {
        verify_catalyst_with_cap(&self.x()?, &self.scaled_y()?, &self.catalyst()?, cap)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn certificate(
    x: &SchmidtVector,
    y: &SchmidtVector,
    lambda: &BigRational,
    route: SynthesisRoute,
    steps: Vec<String>,
    catalyst: &Catalyst,
    verified: bool,
) -> SynthesisCertificate {
    SynthesisCertificate {
        x: x.to_strings(),
        y: y.to_strings(),
        lambda: format_rational(lambda),
        route,
        steps,
        zero_lifting: None,
        power_form: None,
        case_a: None,
        catalyst: catalyst.to_entries(),
        catalyst_dimension: catalyst.dimension().to_string(),
        verified,
    }
}

/// Catalyst for `x = K·ω^β → y = K·ω^α`.
pub fn synthesize_case_a(inst: &CaseAInstance, settings: &SynthesisSettings) -> Result<SynthesisCertificate> {
    let out = run_case_a(inst, settings)?;
    let mut cert = certificate(
        &inst.x(),
        &inst.y(),
        &BigRational::one(),
        SynthesisRoute::Direct,
        vec![format!("power form with base {}", format_rational(&inst.omega))],
        &out.catalyst,
        out.verified,
    );
    cert.power_form = Some(PowerForm::of(inst));
    cert.case_a = Some(CaseARecord::of(&out));
    Ok(cert)
}

/// Finds `c` with `x⊗c ≺^w (λy)⊗c`, verified exactly against the original pair.
pub fn synthesize_catalyst(
    x: &SchmidtVector,
    y: &SchmidtVector,
    lambda: &BigRational,
    settings: &SynthesisSettings,
) -> Result<SynthesisCertificate> {
    if x.len() != y.len() {
        return Err(Error::Shape { left: x.len(), right: y.len() });
    }
    if !x.is_strictly_positive() {
        return Err(Error::Precondition("x must have only positive elements".into()));
    }
    if !lambda.is_positive() {
        return Err(Error::Domain(format!("lambda = {} must be positive", format_rational(lambda))));
    }
    let ly = y.scaled(lambda)?;
    let (sx, sy) = (x.sum(), ly.sum());
    if sx == sy {
        return Err(Error::Refused(
            "sum x = lambda * sum y is the equal-sum boundary case, which this construction does not cover; choose a smaller lambda"
                .into(),
        ));
    }
    if sx < sy {
        return Err(Error::Refused(format!(
            "sum x < lambda * sum y, so no catalyst exists; lambda must be below {}",
            format_rational(&(&sx / y.sum()))
        )));
    }
    let mut steps = vec![format!("scaled y by {}", format_rational(lambda))];
    let cap = settings.max_product_size;
    if supermajorizes(x, &ly)? {
        steps.push("x is already super-majorized by lambda y".into());
        let c = Catalyst::trivial();
        let verified = verify_catalyst_with_cap(x, &ly, &c, cap)?;
        return Ok(certificate(x, y, lambda, SynthesisRoute::Trivial, steps, &c, verified));
    }

    let report = catalytic_probability(x, y, &settings.conversion)?;
    let limit = report.p_cat_raw.to_f64() * settings.margin;
    if rational_to_f64(lambda) > limit {
        return Err(Error::Refused(format!(
            "lambda = {} exceeds {} * p_cat = {limit:.12}; choose a smaller lambda",
            format_rational(lambda),
            settings.margin
        )));
    }
    let conditions = check_supertrumping_conditions(x, &ly, &settings.conversion)?;
    match conditions.verdict {
        ConditionsVerdict::Holds => {}
        ConditionsVerdict::Fails { witness_nu, ratio } => {
            return Err(Error::Refused(format!(
                "power-mean conditions fail at nu = {witness_nu} (ratio {ratio}); choose a smaller lambda"
            )))
        }
        ConditionsVerdict::Boundary => {
            return Err(Error::Refused("power-mean conditions are at the boundary; choose a smaller lambda".into()))
        }
    }

    let (xs, mut ys) = strip_common(x, &ly)?;
    if xs.len() < x.len() {
        steps.push(format!("removed {} shared elements", x.len() - xs.len()));
    }
    let mut zero_lifting = None;
    if ys.zero_count() > 0 {
        let c = reduce_case_c(&xs, &ys)?;
        steps.push(format!("replaced {} zeros by {}", c.m, format_rational(&c.eps_zero)));
        zero_lifting = Some(ZeroLifting {
            zeros: c.m,
            j_min: c.j_min,
            bernoulli_bound: c.bernoulli_bound,
            epsilon_zero: format_rational(&c.eps_zero),
        });
        ys = c.y_bar;
    }
    let (xs, ys) = strip_common(&xs, &ys)?;

    let (route, instance, power_form) = match direct_case_a(&xs, &ys, settings.max_degree) {
        Some(inst) => {
            steps.push(format!("elements are exact powers of {}", format_rational(&inst.omega)));
            let pf = PowerForm::of(&inst);
            (SynthesisRoute::Direct, Some(inst), Some(pf))
        }
        None => {
            let b = reduce_case_b(&xs, &ys, settings)?;
            steps.push(format!(
                "rounded to powers of {} (theta = {:.12}, theta_low = {})",
                format_rational(&b.omega),
                b.theta,
                format_rational(&b.theta_low)
            ));
            let pf = b.instance.as_ref().map(|inst| PowerForm {
                theta: Some(b.theta),
                theta_low: Some(format_rational(&b.theta_low)),
                ..PowerForm::of(inst)
            });
            (SynthesisRoute::Sandwich, b.instance, pf)
        }
    };

    let (catalyst, record) = match &instance {
        Some(inst) => {
            let out = run_case_a(inst, settings)?;
            steps.push(format!("case A catalyst with {} distinct values", out.catalyst.distinct_len()));
            (out.catalyst.clone(), Some(CaseARecord::of(&out)))
        }
        None => {
            steps.push("rounded sequences coincide".into());
            (Catalyst::trivial(), None)
        }
    };
    let verified = verify_catalyst_with_cap(x, &ly, &catalyst, cap)?;
    if !verified {
        return Err(Error::SynthesisFailed {
            attempts: record.as_ref().map_or(1, |r| r.attempts),
            reason: format!("catalyst fails on the original pair; {}", steps.join("; ")),
        });
    }
    let mut cert = certificate(x, y, lambda, route, steps, &catalyst, verified);
    cert.zero_lifting = zero_lifting;
    cert.power_form = power_form;
    cert.case_a = record;
    Ok(cert)
}

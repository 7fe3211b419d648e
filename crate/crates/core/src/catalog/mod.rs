//! Catalog of thirty well-known second-order equations.
//!
//! Each entry carries its general coefficient templates, default parameters
//! and domain, its expected commutativity class, the parameter choices that
//! make it commutative together with the resulting final forms, and the
//! closed-form conjugate of each final form. [`verify_tables`] recomputes all
//! of that from the constancy test and the pair synthesis and lists every
//! disagreement, separating documented errata from unexpected mismatches.

mod data;

use std::collections::BTreeMap;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::commutativity::{
    check_commutativity, synthesize_pair, CommutativityError, PairConstants, Verdict, DEFAULT_GRID,
};
use crate::expr::{parse_expr, Expr, ExprError, Params};
use crate::system::{Domain, LtvSystem, SystemError, COEFF_NAMES};

/// Number of probe points for coefficient comparisons.
pub const TABLE_PROBE_POINTS: usize = 101;
/// Random constant triples tried per conjugate row.
pub const CONJUGATE_TRIALS: usize = 3;
/// Seed of the constant-triple generator, fixed for reproducible reports.
pub const CONJUGATE_SEED: u64 = 0x5EED_C0DE;
/// Default number of retained harmonics of Hill's equation.
pub const HILL_TERMS: usize = 3;

/// Expected commutativity class of an equation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    /// Not commutative for any parameter values.
    Never,
    /// Commutative for particular parameter values.
    Conditional,
    /// Commutative for all parameter values.
    Always,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Never => "Never",
            Class::Conditional => "Conditional",
            Class::Always => "Always",
        })
    }
}

/// Coefficient texts `(a2, a1, a0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Template {
    pub a2: &'static str,
    pub a1: &'static str,
    pub a0: &'static str,
}

impl Template {
    pub fn texts(&self) -> [&'static str; 3] {
        [self.a2, self.a1, self.a0]
    }
}

/// Right-hand side recorded with an entry. Not used by the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    None,
    /// Parseable expression, attached to instantiated systems.
    Expr(&'static str),
    /// Display-only form (unspecified function or unsupported builtin).
    Symbolic(&'static str),
}

impl Forcing {
    pub fn text(&self) -> Option<&'static str> {
        match self {
            Forcing::None => None,
            Forcing::Expr(s) | Forcing::Symbolic(s) => Some(s),
        }
    }
}

/// A parameter choice that makes an entry commutative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionChoice {
    /// Human-readable condition, e.g. `"v = -0.5"`.
    pub label: &'static str,
    /// Row numeral within the entry (`"i"`, `"ii"`, ...).
    pub roman: &'static str,
    /// Parameter substitutions, each right-hand side an expression.
    pub substitutions: &'static [(&'static str, &'static str)],
    /// Coefficients after substitution, as printed in the reference tables.
    pub final_form: Template,
    /// Closed-form conjugate in terms of `c2`, `c1`, `c0`, as printed.
    pub conjugate: Option<Template>,
}

impl ConditionChoice {
    /// Whether the condition leaves the equation unchanged.
    pub fn is_trivial(&self) -> bool {
        self.substitutions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
    pub general: Template,
    pub forcing: Forcing,
    pub defaults: &'static [(&'static str, f64)],
    pub domain: (f64, f64),
    pub expected: Class,
    pub conditions: &'static [ConditionChoice],
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("entry `{entry}` has no condition `{label}` (available: {available})")]
    UnknownCondition {
        entry: &'static str,
        label: String,
        available: String,
    },
    #[error("entry `{entry}` has several conditions; one must be chosen (available: {available})")]
    ConditionRequired { entry: &'static str, available: String },
    #[error("entry `{entry}` has no parameter `{name}`")]
    UnknownParameter { entry: &'static str, name: String },
    #[error("invalid parameter `{name}` = {value} for entry `{entry}`: {reason}")]
    InvalidParameter {
        entry: &'static str,
        name: String,
        value: f64,
        reason: &'static str,
    },
    #[error("general form of `{entry}` requires the builtin `{builtin}`, which is not available")]
    NotEvaluable { entry: &'static str, builtin: String },
    #[error("entry `{0}` has no closed-form conjugate")]
    NoConjugate(&'static str),
    #[error("template of `{entry}` ({what}): {source}")]
    Template {
        entry: &'static str,
        what: String,
        #[source]
        source: ExprError,
    },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Commutativity(#[from] CommutativityError),
}

/// All thirty entries, in catalog order.
pub fn list_entries() -> &'static [CatalogEntry] {
    &data::ENTRIES
}

/// Looks an entry up by key (`"bessel-wave"`), number (`"8"`) or title.
pub fn find(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    let wanted = name.trim();
    let lower = wanted.to_lowercase();
    list_entries()
        .iter()
        .find(|e| {
            e.key == lower || e.title.to_lowercase() == lower || (wanted.parse::<u8>() == Ok(e.id))
        })
        .ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))
}

/// Canonical spelling of a condition label used for matching user input.
fn normalize_label(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        match ch {
            c if c.is_whitespace() => {}
            '\u{2212}' => out.push('-'),
            'α' => out.push_str("alpha"),
            'β' => out.push_str("beta"),
            'γ' => out.push_str("gamma"),
            'δ' => out.push_str("delta"),
            'λ' => out.push_str("lambda"),
            'μ' => out.push_str("mu"),
            'ν' => out.push('v'),
            'θ' => out.push_str("theta"),
            c => out.extend(c.to_lowercase()),
        }
    }
    out
}

fn parse_template(entry: &'static str, what: impl Into<String>, text: &str) -> Result<Expr, CatalogError> {
    parse_expr(text).map_err(|source| CatalogError::Template {
        entry,
        what: what.into(),
        source,
    })
}

impl CatalogEntry {
    pub fn domain(&self) -> Domain {
        Domain {
            lo: self.domain.0,
            hi: self.domain.1,
        }
    }

    pub fn default_params(&self) -> Params {
        self.defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn available_conditions(&self) -> String {
        self.conditions
            .iter()
            .map(|c| format!("{} ({})", c.label, c.roman))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Finds a condition by label or row numeral; spacing and Greek letters
    /// are normalized, so `"μ = −0.5"` matches `"mu = -0.5"`.
    pub fn condition(&self, label: &str) -> Result<&'static ConditionChoice, CatalogError> {
        let wanted = normalize_label(label);
        self.conditions
            .iter()
            .find(|c| normalize_label(c.label) == wanted || c.roman == wanted)
            .ok_or_else(|| CatalogError::UnknownCondition {
                entry: self.key,
                label: label.to_string(),
                available: self.available_conditions(),
            })
    }

    fn sole_condition(&self) -> Result<&'static ConditionChoice, CatalogError> {
        match self.conditions {
            [only] => Ok(only),
            [] => Err(CatalogError::NoConjugate(self.key)),
            _ => Err(CatalogError::ConditionRequired {
                entry: self.key,
                available: self.available_conditions(),
            }),
        }
    }

    /// Whether the general form can be evaluated with the builtin functions.
    pub fn evaluable(&self) -> bool {
        self.general.texts().iter().all(|t| parse_expr(t).is_ok())
    }

    fn is_hill(&self) -> bool {
        self.key == "hill"
    }

    /// Default parameters merged with `overrides`; unknown names are rejected.
    /// Hill's equation additionally accepts `N` (number of harmonics) and
    /// `theta1` .. `thetaN`, unset harmonics defaulting to zero.
    fn resolve_params(&self, overrides: &Params) -> Result<(Params, usize), CatalogError> {
        let mut params = self.default_params();
        let mut terms = HILL_TERMS;
        if self.is_hill() {
            if let Some(&n) = overrides.get("N") {
                if !(n >= 1.0 && n.fract() == 0.0 && n <= 64.0) {
                    return Err(CatalogError::InvalidParameter {
                        entry: self.key,
                        name: "N".into(),
                        value: n,
                        reason: "expected an integer between 1 and 64",
                    });
                }
                terms = n as usize;
            }
            params.retain(|k, _| k == "theta0" || hill_index(k).is_some_and(|i| i <= terms));
            for i in 1..=terms {
                params.entry(format!("theta{i}")).or_insert(0.0);
            }
        }
        for (name, value) in overrides {
            if self.is_hill() && name == "N" {
                continue;
            }
            if !params.contains_key(name) {
                return Err(CatalogError::UnknownParameter {
                    entry: self.key,
                    name: name.clone(),
                });
            }
            params.insert(name.clone(), *value);
        }
        Ok((params, terms))
    }

    fn general_texts(&self, hill_terms: usize) -> [String; 3] {
        let mut texts = self.general.texts().map(str::to_string);
        if self.is_hill() {
            texts[2] = hill_a0(hill_terms);
        }
        texts
    }

    fn substitutions(&self, cond: &ConditionChoice, hill_terms: usize) -> Vec<(String, String)> {
        if self.is_hill() && !cond.is_trivial() {
            return (1..=hill_terms)
                .map(|i| (format!("theta{i}"), "0".to_string()))
                .collect();
        }
        cond.substitutions
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    /// Parameter values after applying the condition's substitutions
    /// numerically; used to evaluate the final form and its conjugate.
    pub fn condition_params(&self, cond: &ConditionChoice, overrides: &Params) -> Result<Params, CatalogError> {
        let (mut params, terms) = self.resolve_params(overrides)?;
        for (name, rhs) in self.substitutions(cond, terms) {
            let value = parse_template(self.key, format!("substitution {name}"), &rhs)?
                .eval_const(&params)
                .map_err(|source| CatalogError::Template {
                    entry: self.key,
                    what: format!("substitution {name}"),
                    source,
                })?;
            params.insert(name, value);
        }
        Ok(params)
    }

    fn build(
        &self,
        name: String,
        texts: &[String; 3],
        subs: &BTreeMap<String, Expr>,
        params: Params,
        domain: Domain,
        with_forcing: bool,
    ) -> Result<LtvSystem, CatalogError> {
        let mut coeffs = Vec::with_capacity(3);
        for (i, text) in texts.iter().enumerate() {
            coeffs.push(parse_template(self.key, COEFF_NAMES[i], text)?.substitute(subs));
        }
        let forcing = match self.forcing {
            Forcing::Expr(text) if with_forcing => Some(parse_template(self.key, "forcing", text)?.substitute(subs)),
            _ => None,
        };
        let [a2, a1, a0]: [Expr; 3] = coeffs.try_into().expect("three coefficients");
        Ok(LtvSystem::new(name, a2, a1, a0, forcing, params, domain)?)
    }

    /// Instantiates the general form, or the form obtained by substituting
    /// the given condition. Entries whose general form needs an unavailable
    /// builtin fall back to the printed final form when a condition is given.
    pub fn instantiate(
        &self,
        overrides: &Params,
        domain: Option<Domain>,
        condition: Option<&str>,
    ) -> Result<LtvSystem, CatalogError> {
        let domain = domain.unwrap_or_else(|| self.domain());
        let (params, terms) = self.resolve_params(overrides)?;
        let texts = self.general_texts(terms);
        let cond = condition.map(|label| self.condition(label)).transpose()?;

        if let Some(missing) = texts.iter().find_map(|t| match parse_expr(t) {
            Err(ExprError::UnknownFunction { name, .. }) => Some(name),
            _ => None,
        }) {
            return match cond {
                Some(cond) => self.final_form(cond, overrides, Some(domain)),
                None => Err(CatalogError::NotEvaluable {
                    entry: self.key,
                    builtin: missing,
                }),
            };
        }

        match cond {
            None => self.build(self.key.to_string(), &texts, &BTreeMap::new(), params, domain, true),
            Some(cond) => {
                let mut subs = BTreeMap::new();
                let mut params = params;
                for (name, rhs) in self.substitutions(cond, terms) {
                    subs.insert(
                        name.clone(),
                        parse_template(self.key, format!("substitution {name}"), &rhs)?,
                    );
                    params.remove(&name);
                }
                let name = format!("{} [{}]", self.key, cond.label);
                self.build(name, &texts, &subs, params, domain, true)
            }
        }
    }

    /// The printed final form of a condition, with parameters bound to their
    /// post-substitution values.
    pub fn final_form(
        &self,
        cond: &ConditionChoice,
        overrides: &Params,
        domain: Option<Domain>,
    ) -> Result<LtvSystem, CatalogError> {
        let params = self.condition_params(cond, overrides)?;
        let texts = cond.final_form.texts().map(str::to_string);
        let name = format!("{} [{}] final form", self.key, cond.label);
        self.build(
            name,
            &texts,
            &BTreeMap::new(),
            params,
            domain.unwrap_or_else(|| self.domain()),
            false,
        )
    }

    /// The printed conjugate of a condition's final form for constants `c`.
    pub fn conjugate(
        &self,
        cond: &ConditionChoice,
        overrides: &Params,
        c: PairConstants,
        domain: Option<Domain>,
    ) -> Result<LtvSystem, CatalogError> {
        let tpl = cond.conjugate.ok_or(CatalogError::NoConjugate(self.key))?;
        let mut params = self.condition_params(cond, overrides)?;
        params.extend([
            ("c2".to_string(), c.c2),
            ("c1".to_string(), c.c1),
            ("c0".to_string(), c.c0),
        ]);
        let texts = tpl.texts().map(str::to_string);
        let name = format!("{} [{}] conjugate", self.key, cond.label);
        self.build(
            name,
            &texts,
            &BTreeMap::new(),
            params,
            domain.unwrap_or_else(|| self.domain()),
            false,
        )
    }
}

fn hill_index(name: &str) -> Option<usize> {
    name.strip_prefix("theta")?.parse().ok()
}

/// `theta0 + 2 * sum_{n=1..N} thetan * cos(2 n t)`.
pub fn hill_a0(terms: usize) -> String {
    let harmonics: Vec<String> = (1..=terms).map(|i| format!("theta{i}*cos({}*t)", 2 * i)).collect();
    format!("theta0 + 2*({})", harmonics.join(" + "))
}

/// Instantiates entry `name` (see [`CatalogEntry::instantiate`]).
pub fn instantiate(
    name: &str,
    overrides: &Params,
    domain: Option<Domain>,
    condition: Option<&str>,
) -> Result<LtvSystem, CatalogError> {
    find(name)?.instantiate(overrides, domain, condition)
}

/// The printed conjugate of entry `name` under the given condition. The
/// condition may be omitted for entries with a single one.
pub fn table4_conjugate_of(name: &str, condition: Option<&str>, c: PairConstants) -> Result<LtvSystem, CatalogError> {
    let entry = find(name)?;
    let cond = match condition {
        Some(label) => entry.condition(label)?,
        None => entry.sole_condition()?,
    };
    entry.conjugate(cond, &Params::new(), c, None)
}

fn verdict_of(sys: Result<LtvSystem, CatalogError>, grid_n: usize, tol: f64) -> Verdict {
    let report = sys
        .map_err(|e| e.to_string())
        .and_then(|s| check_commutativity(&s, grid_n, tol).map_err(|e| e.to_string()));
    match report {
        Ok(r) => r.verdict,
        Err(message) => Verdict::DomainError { t: f64::NAN, message },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub id: u8,
    pub key: &'static str,
    pub expected: Class,
    /// `None` when the general form cannot be evaluated.
    pub computed: Option<Class>,
    pub general: Option<Verdict>,
    /// Verdict of each printed final form, by condition label.
    pub conditions: Vec<(&'static str, Verdict)>,
    pub metadata_only: bool,
}

impl Classification {
    pub fn agrees(&self) -> bool {
        self.computed.is_none_or(|c| c == self.expected)
    }
}

/// Decides the class of an entry: `Always` if the general form at default
/// parameters is constant, otherwise `Conditional` if some final form is,
/// otherwise `Never`.
pub fn classify_entry(entry: &CatalogEntry, grid_n: usize, tol: f64) -> Classification {
    let conditions: Vec<_> = entry
        .conditions
        .iter()
        .map(|c| {
            (
                c.label,
                verdict_of(entry.final_form(c, &Params::new(), None), grid_n, tol),
            )
        })
        .collect();
    let any_condition = conditions.iter().any(|(_, v)| v.is_constant());
    let (general, computed) = if entry.evaluable() {
        let v = verdict_of(entry.instantiate(&Params::new(), None, None), grid_n, tol);
        let class = match &v {
            Verdict::Always { .. } => Some(Class::Always),
            Verdict::NotConstant { .. } if any_condition => Some(Class::Conditional),
            Verdict::NotConstant { .. } => Some(Class::Never),
            Verdict::DomainError { .. } => None,
        };
        (Some(v), class)
    } else {
        (None, None)
    };
    Classification {
        id: entry.id,
        key: entry.key,
        expected: entry.expected,
        computed,
        general,
        conditions,
        metadata_only: !entry.evaluable(),
    }
}

pub fn classify(name: &str, grid_n: usize, tol: f64) -> Result<Classification, CatalogError> {
    Ok(classify_entry(find(name)?, grid_n, tol))
}

/// Which cross-check a discrepancy comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    /// Expected class vs computed class.
    Classification,
    /// Substituted general form vs printed final form.
    FinalForm,
    /// Synthesized partner vs printed conjugate.
    Conjugate,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Classification => "classification",
            Check::FinalForm => "final-form",
            Check::Conjugate => "conjugate",
        })
    }
}

/// A known misprint in the reference tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Erratum {
    pub key: &'static str,
    pub check: Check,
    /// Row numeral of the condition, if the erratum concerns one row.
    pub condition: Option<&'static str>,
    /// Affected coefficients; `"A0"` stands for the constancy verdict.
    pub coefficients: &'static [&'static str],
    pub summary: &'static str,
}

impl Erratum {
    fn covers(&self, d: &Discrepancy) -> bool {
        self.key == d.key
            && self.check == d.check
            && self.condition == d.condition
            && d.coefficient.is_none_or(|c| self.coefficients.contains(&c))
    }
}

pub static KNOWN_ERRATA: &[Erratum] = &[
    Erratum {
        key: "baer",
        check: Check::Classification,
        condition: None,
        coefficients: &[],
        summary: "A0 = -(p^2 t + q^2) is constant for p = 0, so the family is conditionally commutative, not never",
    },
    Erratum {
        key: "jacobi-second",
        check: Check::FinalForm,
        condition: Some("iv"),
        coefficients: &["a1"],
        summary: "alpha = 2, beta = 1.5 gives a1 = 1.5 - 3t; the printed final form has 1.5 - 2t",
    },
    Erratum {
        key: "morse-rosen",
        check: Check::FinalForm,
        condition: Some("i"),
        coefficients: &["a0", "A0"],
        summary: "alpha = 0 leaves the beta*tanh(a t) term; the form is constant only if beta = 0 as well",
    },
    Erratum {
        key: "titchmarsh",
        check: Check::FinalForm,
        condition: Some("i"),
        coefficients: &["a0"],
        summary: "n = 0 gives a0 = lambda - 1; the printed final form has lambda",
    },
    Erratum {
        key: "gegenbauer",
        check: Check::Conjugate,
        condition: Some("i"),
        coefficients: &["b1", "b0"],
        summary: "b1 should be -c2 t + c1 sqrt(1 - t^2) and b0 has no c1 term (f = 0 for a1 = -t)",
    },
    Erratum {
        key: "gegenbauer",
        check: Check::Conjugate,
        condition: Some("ii"),
        coefficients: &["b0"],
        summary: "the c1 term of b0 should be -c1 t / sqrt(1 - t^2)",
    },
    Erratum {
        key: "hypergeometric",
        check: Check::Conjugate,
        condition: Some("iii"),
        coefficients: &["b0"],
        summary: "the c1 term of b0 should be c1 (1 - 2t) / (2 sqrt(t - t^2))",
    },
    Erratum {
        key: "jacobi-first",
        check: Check::Conjugate,
        condition: Some("ii"),
        coefficients: &["b0"],
        summary: "b0 should contain c2 n (n + 2), matching the final form, not c2 (n^2 + n)",
    },
    Erratum {
        key: "jacobi-first",
        check: Check::Conjugate,
        condition: Some("iii"),
        coefficients: &["b1"],
        summary: "b1 should be -c2 (1 + 2t) + c1 sqrt(1 - t^2)",
    },
    Erratum {
        key: "jacobi-second",
        check: Check::Conjugate,
        condition: Some("iv"),
        coefficients: &["b0"],
        summary: "b0 should be c2 n (n + 2) + c1 (1 - t) / (2 sqrt(t - t^2)) + c0",
    },
    Erratum {
        key: "symmetric-top",
        check: Check::Conjugate,
        condition: Some("i"),
        coefficients: &["b0"],
        summary:
            "b0 carries a stray factor mu, which is not a parameter of the equation; should be -c2 (delta + 0.5) + c0",
    },
];

/// Location and size of a coefficient mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub t: f64,
    /// Value from the printed table.
    pub printed: f64,
    /// Value recomputed from the general form or the pair synthesis.
    pub computed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub id: u8,
    pub key: &'static str,
    pub check: Check,
    pub condition: Option<&'static str>,
    pub coefficient: Option<&'static str>,
    pub detail: String,
    pub witness: Option<Witness>,
    pub constants: Option<PairConstants>,
    /// The matching erratum, if this mismatch is a known misprint.
    pub erratum: Option<&'static Erratum>,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {} {}", self.id, self.key, self.check)?;
        if let Some(c) = self.condition {
            write!(f, " ({c})")?;
        }
        if let Some(c) = self.coefficient {
            write!(f, " {c}")?;
        }
        write!(f, ": {}", self.detail)?;
        if let Some(w) = self.witness {
            write!(f, " [t = {}, printed {}, computed {}]", w.t, w.printed, w.computed)?;
        }
        if let Some(c) = self.constants {
            write!(f, " [c2 = {}, c1 = {}, c0 = {}]", c.c2, c.c1, c.c0)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TablesReport {
    pub tol: f64,
    pub classifications: Vec<Classification>,
    pub discrepancies: Vec<Discrepancy>,
    /// Documented errata that the run did not reproduce.
    pub unobserved_errata: Vec<&'static Erratum>,
    /// Number of final-form rows and conjugate rows compared.
    pub final_forms_checked: usize,
    pub conjugates_checked: usize,
}

impl TablesReport {
    pub fn documented(&self) -> impl Iterator<Item = &Discrepancy> {
        self.discrepancies.iter().filter(|d| d.erratum.is_some())
    }

    pub fn unexpected(&self) -> impl Iterator<Item = &Discrepancy> {
        self.discrepancies.iter().filter(|d| d.erratum.is_none())
    }

    /// True when every discrepancy is a documented erratum and every
    /// documented erratum was reproduced.
    pub fn is_clean(&self) -> bool {
        self.unexpected().next().is_none() && self.unobserved_errata.is_empty()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Compares coefficient expressions pointwise; returns the first mismatch or
/// evaluation error for each coefficient.
fn compare_coeffs(
    printed: &LtvSystem,
    computed: &LtvSystem,
    names: [&'static str; 3],
    tol: f64,
) -> Vec<(&'static str, String, Option<Witness>)> {
    let mut out = Vec::new();
    let empty = Params::new();
    for i in 0..3 {
        let p = printed.coeffs()[i].bind(printed.params());
        let c = computed.coeffs()[i].bind(computed.params());
        for t in printed.domain().grid(TABLE_PROBE_POINTS) {
            match (p.eval(t, &empty), c.eval(t, &empty)) {
                (Ok(pv), Ok(cv)) if close(pv, cv, tol) => continue,
                (Ok(pv), Ok(cv)) => {
                    out.push((
                        names[i],
                        "values differ".to_string(),
                        Some(Witness {
                            t,
                            printed: pv,
                            computed: cv,
                        }),
                    ));
                }
                (Err(e), _) => out.push((names[i], format!("printed form fails at t = {t}: {e}"), None)),
                (_, Err(e)) => out.push((names[i], format!("computed form fails at t = {t}: {e}"), None)),
            }
            break;
        }
    }
    out
}

struct RowContext<'a> {
    entry: &'a CatalogEntry,
    out: Vec<Discrepancy>,
}

impl RowContext<'_> {
    fn push(
        &mut self,
        check: Check,
        cond: Option<&ConditionChoice>,
        coefficient: Option<&'static str>,
        detail: impl Into<String>,
        witness: Option<Witness>,
        constants: Option<PairConstants>,
    ) {
        self.out.push(Discrepancy {
            id: self.entry.id,
            key: self.entry.key,
            check,
            condition: cond.map(|c| c.roman),
            coefficient,
            detail: detail.into(),
            witness,
            constants,
            erratum: None,
        });
    }
}

/// Draws constant triples with `c2` in (0, 2], `c1` in [-2, 2] \ {0} and
/// `c0` in [-2, 2].
pub fn conjugate_trials(seed: u64, n: usize) -> Vec<PairConstants> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c2 = 2.0 - rng.gen_range(0.0..2.0);
            let mut c1: f64 = 0.0;
            while c1 == 0.0 {
                c1 = rng.gen_range(-2.0..=2.0);
            }
            PairConstants::new(c2, c1, rng.gen_range(-2.0..=2.0))
        })
        .collect()
}

fn verify_entry(
    entry: &CatalogEntry,
    tol: f64,
    trials: &[PairConstants],
) -> (Classification, Vec<Discrepancy>, usize, usize) {
    let mut ctx = RowContext { entry, out: Vec::new() };
    let classification = classify_entry(entry, DEFAULT_GRID, tol);
    if !classification.agrees() {
        let computed = classification.computed.map_or("-".to_string(), |c| c.to_string());
        ctx.push(
            Check::Classification,
            None,
            None,
            format!("expected {}, computed {}", entry.expected, computed),
            None,
            None,
        );
    }

    let no_params = Params::new();
    let (mut final_rows, mut conj_rows) = (0, 0);
    for cond in entry.conditions {
        let printed = match entry.final_form(cond, &no_params, None) {
            Ok(s) => s,
            Err(e) => {
                ctx.push(
                    Check::FinalForm,
                    Some(cond),
                    None,
                    format!("printed final form invalid: {e}"),
                    None,
                    None,
                );
                continue;
            }
        };

        if entry.evaluable() && !cond.is_trivial() {
            final_rows += 1;
            match entry.instantiate(&no_params, None, Some(cond.label)) {
                Ok(substituted) => {
                    for (coeff, detail, w) in compare_coeffs(&printed, &substituted, COEFF_NAMES, tol) {
                        ctx.push(Check::FinalForm, Some(cond), Some(coeff), detail, w, None);
                    }
                    let v = verdict_of(Ok(substituted), DEFAULT_GRID, tol);
                    if !v.is_constant() {
                        ctx.push(
                            Check::FinalForm,
                            Some(cond),
                            Some("A0"),
                            format!("substituted form is not commutative ({})", v.label()),
                            None,
                            None,
                        );
                    }
                }
                Err(e) => ctx.push(
                    Check::FinalForm,
                    Some(cond),
                    None,
                    format!("substitution failed: {e}"),
                    None,
                    None,
                ),
            }
        }

        if cond.conjugate.is_none() {
            continue;
        }
        conj_rows += 1;
        let mut reported: Vec<&'static str> = Vec::new();
        for &c in trials {
            let synthesized = match synthesize_pair(&printed, c) {
                Ok(s) => s,
                Err(e) => {
                    ctx.push(
                        Check::Conjugate,
                        Some(cond),
                        None,
                        format!("synthesis failed: {e}"),
                        None,
                        Some(c),
                    );
                    break;
                }
            };
            let conjugate = match entry.conjugate(cond, &no_params, c, None) {
                Ok(s) => s,
                Err(CatalogError::System(SystemError::UnboundParameter(p))) => {
                    let coeff = cond.conjugate.and_then(|tpl| {
                        tpl.texts()
                            .iter()
                            .position(|t| parse_expr(t).is_ok_and(|e| e.free_params().contains(&p)))
                            .map(|i| ["b2", "b1", "b0"][i])
                    });
                    ctx.push(
                        Check::Conjugate,
                        Some(cond),
                        coeff,
                        format!("printed conjugate uses `{p}`, which is not a parameter of the equation"),
                        None,
                        None,
                    );
                    break;
                }
                Err(e) => {
                    ctx.push(
                        Check::Conjugate,
                        Some(cond),
                        None,
                        format!("printed conjugate invalid: {e}"),
                        None,
                        None,
                    );
                    break;
                }
            };
            for (coeff, detail, w) in compare_coeffs(&conjugate, &synthesized, ["b2", "b1", "b0"], tol) {
                if !reported.contains(&coeff) {
                    reported.push(coeff);
                    ctx.push(Check::Conjugate, Some(cond), Some(coeff), detail, w, Some(c));
                }
            }
        }
    }
    (classification, ctx.out, final_rows, conj_rows)
}

/// Cross-checks the whole catalog; see [`verify_entries`].
pub fn verify_tables(tol: f64) -> TablesReport {
    verify_entries(list_entries(), tol)
}

/// Cross-checks the given entries: classification, final forms against the
/// substituted general forms, and printed conjugates against synthesized
/// partners for [`CONJUGATE_TRIALS`] seeded constant triples. Entries are
/// processed concurrently; results are reported in entry order.
pub fn verify_entries(entries: &[CatalogEntry], tol: f64) -> TablesReport {
    let trials = conjugate_trials(CONJUGATE_SEED, CONJUGATE_TRIALS);
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .iter()
            .map(|e| s.spawn(|| verify_entry(e, tol, &trials)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });

    let mut report = TablesReport {
        tol,
        classifications: Vec::with_capacity(entries.len()),
        discrepancies: Vec::new(),
        unobserved_errata: Vec::new(),
        final_forms_checked: 0,
        conjugates_checked: 0,
    };
    for (classification, discrepancies, f, c) in results {
        report.classifications.push(classification);
        report.discrepancies.extend(discrepancies);
        report.final_forms_checked += f;
        report.conjugates_checked += c;
    }
    for d in &mut report.discrepancies {
        d.erratum = KNOWN_ERRATA.iter().find(|e| e.covers(d));
    }
    let keys: Vec<&str> = entries.iter().map(|e| e.key).collect();
    report.unobserved_errata = KNOWN_ERRATA
        .iter()
        .filter(|e| keys.contains(&e.key))
        .filter(|e| {
            !report
                .discrepancies
                .iter()
                .any(|d| d.erratum.is_some_and(|x| std::ptr::eq(x, *e)))
        })
        .collect();
    report
}

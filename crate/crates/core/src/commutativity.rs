//! Commutativity test and commutative-pair synthesis for second-order systems.
//!
//! A system `A` with `a2 > 0` admits a commutative partner
//!
//! ```text
//! b2 = c2 a2
//! b1 = c2 a1 + c1 sqrt(a2)
//! b0 = c2 a0 + c1 f_A + c0,      f_A = (2 a1 - a2') / (4 sqrt(a2))
//! ```
//!
//! for arbitrary constants when `c1 = 0`, and for `c1 != 0` only when the
//! invariant
//!
//! ```text
//! A0(t) = a0 - (4 a1^2 + 3 a2'^2 - 8 a1 a2' + 8 a1' a2 - 4 a2 a2'') / (16 a2)
//! ```
//!
//! is constant over the domain.

use thiserror::Error;

use crate::expr::{BinOp, Expr, Func, Jet2};
use crate::system::{LtvSystem, SystemError, PROBE_POINTS};

pub const DEFAULT_GRID: usize = 1001;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommutativityError {
    #[error("grid must have at least 3 points, got {0}")]
    InvalidGrid(usize),
    #[error("c2 = 0: order of system B reduces to one")]
    OrderReduces,
    #[error("c2 = c1 = 0: B is the scalar gain 1/c0 = {gain}, not a second-order system")]
    ScalarGain { gain: f64 },
    #[error("c2 = c1 = c0 = 0 does not define a system")]
    ZeroConstants,
    #[error("c1 != 0 requires c2 > 0, got c2 = {0}")]
    NonPositiveC2(f64),
    #[error("a2 must be positive, found {value} at t = {t}")]
    LeadingNotPositive { t: f64, value: f64 },
    #[error("A0 is not constant: A0({t1}) = {v1}, A0({t2}) = {v2}")]
    NotConstant { t1: f64, v1: f64, t2: f64, v2: f64 },
    #[error("A0 could not be evaluated at t = {t}: {message}")]
    DomainError { t: f64, message: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

/// The constants `(c2, c1, c0)` of a commutative pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConstants {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl PairConstants {
    pub const IDENTITY: PairConstants = PairConstants {
        c2: 1.0,
        c1: 0.0,
        c0: 0.0,
    };

    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        PairConstants { c2, c1, c0 }
    }

    fn validate(&self) -> Result<(), CommutativityError> {
        match (self.c2, self.c1, self.c0) {
            (c2, c1, c0) if c2 == 0.0 && c1 == 0.0 && c0 == 0.0 => Err(CommutativityError::ZeroConstants),
            (c2, c1, c0) if c2 == 0.0 && c1 == 0.0 => Err(CommutativityError::ScalarGain { gain: 1.0 / c0 }),
            (c2, ..) if c2 == 0.0 => Err(CommutativityError::OrderReduces),
            (c2, c1, _) if c1 != 0.0 && c2 <= 0.0 => Err(CommutativityError::NonPositiveC2(c2)),
            _ => Ok(()),
        }
    }
}

fn positive_a2(t: f64, a2: Jet2) -> Result<f64, CommutativityError> {
    if a2.v > 0.0 {
        Ok(a2.v.sqrt())
    } else {
        Err(CommutativityError::LeadingNotPositive { t, value: a2.v })
    }
}

/// `f_A = (2 a1 - a2') / (4 sqrt(a2))`.
pub fn f_of(sys: &LtvSystem, t: f64) -> Result<f64, CommutativityError> {
    let [a2, a1, _] = sys.coeff_jets(t)?;
    let s = positive_a2(t, a2)?;
    Ok((2.0 * a1.v - a2.d1) / (4.0 * s))
}

/// The constancy bracket evaluated literally.
pub fn a0_bracket(sys: &LtvSystem, t: f64) -> Result<f64, CommutativityError> {
    let [a2, a1, a0] = sys.coeff_jets(t)?;
    if a2.v == 0.0 {
        return Err(CommutativityError::LeadingNotPositive { t, value: 0.0 });
    }
    let inner = 4.0 * a1.v * a1.v + 3.0 * a2.d1 * a2.d1 - 8.0 * a1.v * a2.d1 + 8.0 * a1.d1 * a2.v - 4.0 * a2.v * a2.d2;
    Ok(a0.v - inner / (16.0 * a2.v))
}

/// Alternate form `a0 - f^2 - sqrt(a2) f'`, with `f'` differentiated by hand.
pub fn a0_alt(sys: &LtvSystem, t: f64) -> Result<f64, CommutativityError> {
    let [a2, a1, a0] = sys.coeff_jets(t)?;
    let s = positive_a2(t, a2)?;
    let num = 2.0 * a1.v - a2.d1;
    let f = num / (4.0 * s);
    let df = (2.0 * a1.d1 - a2.d2) / (4.0 * s) - num * a2.d1 / (8.0 * a2.v * s);
    Ok(a0.v - f * f - s * df)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// A0 is constant; `value` is the sample mean.
    Always {
        value: f64,
    },
    /// A0 varies; the witness holds the locations of the extreme samples.
    NotConstant {
        t_min: f64,
        t_max: f64,
    },
    DomainError {
        t: f64,
        message: String,
    },
}

impl Verdict {
    pub fn is_constant(&self) -> bool {
        matches!(self, Verdict::Always { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Always { .. } => "Always",
            Verdict::NotConstant { .. } => "NotConstant",
            Verdict::DomainError { .. } => "DomainError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutativityReport {
    pub samples: Vec<(f64, f64)>,
    pub a0_min: f64,
    pub a0_max: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

impl CommutativityReport {
    pub fn constant(&self) -> Option<f64> {
        match self.verdict {
            Verdict::Always { value } => Some(value),
            _ => None,
        }
    }

    fn a0_at(&self, t: f64) -> f64 {
        self.samples.iter().find(|s| s.0 == t).map(|s| s.1).unwrap_or(f64::NAN)
    }
}

/// Samples the bracket on `grid_n` uniform points and decides constancy by
/// `max - min <= tol * (1 + max(|min|, |max|))`.
pub fn check_commutativity(
    sys: &LtvSystem,
    grid_n: usize,
    tol: f64,
) -> Result<CommutativityReport, CommutativityError> {
    if grid_n < 3 {
        return Err(CommutativityError::InvalidGrid(grid_n));
    }
    let mut samples = Vec::with_capacity(grid_n);
    let mut failure = None;
    for t in sys.domain().grid(grid_n) {
        match a0_bracket(sys, t) {
            Ok(v) => samples.push((t, v)),
            Err(e) => {
                failure = Some((t, e.to_string()));
                break;
            }
        }
    }
    let (mut lo, mut hi) = ((f64::NAN, f64::INFINITY), (f64::NAN, f64::NEG_INFINITY));
    for &(t, v) in &samples {
        if v < lo.1 {
            lo = (t, v);
        }
        if v > hi.1 {
            hi = (t, v);
        }
    }
    let verdict = if let Some((t, message)) = failure {
        Verdict::DomainError { t, message }
    } else if hi.1 - lo.1 <= tol * (1.0 + lo.1.abs().max(hi.1.abs())) {
        let mean = samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64;
        Verdict::Always { value: mean }
    } else {
        Verdict::NotConstant {
            t_min: lo.0,
            t_max: hi.0,
        }
    };
    Ok(CommutativityReport {
        samples,
        a0_min: lo.1,
        a0_max: hi.1,
        verdict,
        tolerance: tol,
    })
}

fn scaled(c: f64, e: Expr) -> Expr {
    if c == 1.0 {
        e
    } else {
        Expr::binary(BinOp::Mul, Expr::num(c), e)
    }
}

fn sum(terms: Vec<Expr>) -> Expr {
    terms
        .into_iter()
        .reduce(|acc, e| Expr::binary(BinOp::Add, acc, e))
        .unwrap_or(Expr::num(0.0))
}

/// `f_A` as a closed-form expression in the coefficients of `sys`.
pub fn f_expr(sys: &LtvSystem) -> Expr {
    let num = Expr::binary(
        BinOp::Sub,
        Expr::binary(BinOp::Mul, Expr::num(2.0), sys.a1().clone()),
        sys.a2().time_derivative(),
    );
    let den = Expr::binary(BinOp::Mul, Expr::num(4.0), Expr::call(Func::Sqrt, sys.a2().clone()));
    Expr::binary(BinOp::Div, num, den)
}

/// Builds the commutative partner of `sys` for the given constants.
pub fn synthesize_pair(sys: &LtvSystem, c: PairConstants) -> Result<LtvSystem, CommutativityError> {
    c.validate()?;
    if c.c1 != 0.0 {
        for t in sys.domain().grid(PROBE_POINTS) {
            let a2 = sys.coeff_values(t)?[0];
            if a2 <= 0.0 {
                return Err(CommutativityError::LeadingNotPositive { t, value: a2 });
            }
        }
        let report = check_commutativity(sys, DEFAULT_GRID, DEFAULT_TOL)?;
        match &report.verdict {
            Verdict::Always { .. } => {}
            Verdict::NotConstant { t_min, t_max } => {
                return Err(CommutativityError::NotConstant {
                    t1: *t_min,
                    v1: report.a0_at(*t_min),
                    t2: *t_max,
                    v2: report.a0_at(*t_max),
                })
            }
            Verdict::DomainError { t, message } => {
                return Err(CommutativityError::DomainError {
                    t: *t,
                    message: message.clone(),
                })
            }
        }
    }

    let b2 = scaled(c.c2, sys.a2().clone());
    let mut b1 = vec![scaled(c.c2, sys.a1().clone())];
    let mut b0 = vec![scaled(c.c2, sys.a0().clone())];
    if c.c1 != 0.0 {
        b1.push(scaled(c.c1, Expr::call(Func::Sqrt, sys.a2().clone())));
        b0.push(scaled(c.c1, f_expr(sys)));
    }
    if c.c0 != 0.0 {
        b0.push(Expr::num(c.c0));
    }
    Ok(LtvSystem::new(
        format!("{}-pair", sys.name()),
        b2,
        sum(b1),
        sum(b0),
        None,
        sys.params().clone(),
        sys.domain(),
    )?)
}

/// The `c1 = 0` partner: forward gain `1/c2` with negative feedback `c0`.
/// Commutes with every system, so no constancy check is made.
pub fn feedback_pair(sys: &LtvSystem, c2: f64, c0: f64) -> Result<LtvSystem, CommutativityError> {
    if c2 == 0.0 {
        return Err(CommutativityError::OrderReduces);
    }
    synthesize_pair(sys, PairConstants::new(c2, 0.0, c0))
}

/// Returns `(A0 of the synthesized partner, c2 A0(A) + c0 - c1^2 / (4 c2))`.
pub fn a0_of_pair_identity(sys: &LtvSystem, c: PairConstants) -> Result<(f64, f64), CommutativityError> {
    if c.c2 <= 0.0 {
        return Err(CommutativityError::NonPositiveC2(c.c2));
    }
    let a = check_commutativity(sys, DEFAULT_GRID, DEFAULT_TOL)?;
    let a0 = match a.verdict {
        Verdict::Always { value } => value,
        Verdict::NotConstant { t_min, t_max } => {
            return Err(CommutativityError::NotConstant {
                t1: t_min,
                v1: a.a0_min,
                t2: t_max,
                v2: a.a0_max,
            })
        }
        Verdict::DomainError { t, message } => return Err(CommutativityError::DomainError { t, message }),
    };
    let b = synthesize_pair(sys, c)?;
    let rb = check_commutativity(&b, DEFAULT_GRID, DEFAULT_TOL)?;
    let b0 = match rb.verdict {
        Verdict::Always { value } => value,
        Verdict::NotConstant { t_min, t_max } => {
            return Err(CommutativityError::NotConstant {
                t1: t_min,
                v1: rb.a0_min,
                t2: t_max,
                v2: rb.a0_max,
            })
        }
        Verdict::DomainError { t, message } => return Err(CommutativityError::DomainError { t, message }),
    };
    Ok((b0, c.c2 * a0 + c.c0 - c.c1 * c.c1 / (4.0 * c.c2)))
}

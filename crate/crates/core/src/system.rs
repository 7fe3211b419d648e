//! Second-order linear time-varying systems `a2 y'' + a1 y' + a0 y = x`.

use std::fmt;

use thiserror::Error;

use crate::expr::{parse_expr, Expr, ExprError, Jet2, Params};

/// Number of points of the canonical validation grid.
pub const PROBE_POINTS: usize = 1001;

/// `|a2|` at or below this on the probe grid counts as vanishing.
pub const A2_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("leading coefficient a2 vanishes at t = {t}")]
    LeadingCoefficientVanishes { t: f64 },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("parameter `{name}` has non-finite value {value}")]
    NonFiniteParameter { name: String, value: f64 },
    #[error("coefficient {coeff}: {source}")]
    Coefficient {
        coeff: &'static str,
        #[source]
        source: ExprError,
    },
    #[error("t = {t} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },
}

/// Closed interval of the independent variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SystemError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SystemError::InvalidDomain { lo, hi });
        }
        Ok(Domain { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * (self.hi - self.lo).max(1.0);
        t >= self.lo - slack && t <= self.hi + slack
    }

    /// `n` uniformly spaced points including both endpoints.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let n = n.max(2);
        let last = n - 1;
        (0..n).map(move |k| {
            if k == last {
                self.hi
            } else {
                self.lo + (self.hi - self.lo) * (k as f64 / last as f64)
            }
        })
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitialConditions {
    pub y0: f64,
    pub dy0: f64,
}

impl InitialConditions {
    pub const ZERO: InitialConditions = InitialConditions { y0: 0.0, dy0: 0.0 };
}

/// The three coefficients, in the order (a2, a1, a0).
pub const COEFF_NAMES: [&str; 3] = ["a2", "a1", "a0"];

#[derive(Debug, Clone, PartialEq)]
pub struct LtvSystem {
    name: String,
    coeffs: [Expr; 3],
    forcing: Option<Expr>,
    params: Params,
    domain: Domain,
    // coefficients with every parameter replaced by its value
    bound: [Expr; 3],
}

impl LtvSystem {
    /// Builds a system and checks that `a2` does not vanish on the probe grid.
    pub fn new(
        name: impl Into<String>,
        a2: Expr,
        a1: Expr,
        a0: Expr,
        forcing: Option<Expr>,
        params: Params,
        domain: Domain,
    ) -> Result<Self, SystemError> {
        for (name, value) in &params {
            if !value.is_finite() {
                return Err(SystemError::NonFiniteParameter {
                    name: name.clone(),
                    value: *value,
                });
            }
        }
        let coeffs = [a2, a1, a0];
        let referenced = coeffs.iter().chain(forcing.iter()).flat_map(Expr::free_params);
        for p in referenced {
            if !params.contains_key(&p) {
                return Err(SystemError::UnboundParameter(p));
            }
        }
        let bound = [
            coeffs[0].bind(&params),
            coeffs[1].bind(&params),
            coeffs[2].bind(&params),
        ];
        let sys = LtvSystem {
            name: name.into(),
            coeffs,
            forcing,
            params,
            domain,
            bound,
        };
        sys.probe_leading_coefficient()?;
        Ok(sys)
    }

    /// Convenience constructor from expression text.
    pub fn parse(
        name: impl Into<String>,
        a2: &str,
        a1: &str,
        a0: &str,
        params: Params,
        domain: Domain,
    ) -> Result<Self, SystemError> {
        let p = |coeff: &'static str, src: &str| {
            parse_expr(src).map_err(|source| SystemError::Coefficient { coeff, source })
        };
        LtvSystem::new(name, p("a2", a2)?, p("a1", a1)?, p("a0", a0)?, None, params, domain)
    }

    fn probe_leading_coefficient(&self) -> Result<(), SystemError> {
        for t in self.domain.grid(PROBE_POINTS) {
            let a2 = self.bound[0]
                .eval(t, &Params::new())
                .map_err(|source| SystemError::Coefficient { coeff: "a2", source })?;
            if a2.abs() <= A2_ZERO_TOL {
                return Err(SystemError::LeadingCoefficientVanishes { t });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn a2(&self) -> &Expr {
        &self.coeffs[0]
    }

    pub fn a1(&self) -> &Expr {
        &self.coeffs[1]
    }

    pub fn a0(&self) -> &Expr {
        &self.coeffs[2]
    }

    pub fn coeffs(&self) -> &[Expr; 3] {
        &self.coeffs
    }

    pub fn forcing(&self) -> Option<&Expr> {
        self.forcing.as_ref()
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Same coefficients restricted or extended to another domain.
    pub fn with_domain(&self, domain: Domain) -> Result<Self, SystemError> {
        let mut out = self.clone();
        out.domain = domain;
        out.probe_leading_coefficient()?;
        Ok(out)
    }

    fn check_in_domain(&self, t: f64) -> Result<(), SystemError> {
        if self.domain.contains(t) {
            Ok(())
        } else {
            Err(SystemError::OutsideDomain {
                t,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    /// Jets of (a2, a1, a0) at `t`.
    pub fn coeff_jets(&self, t: f64) -> Result<[Jet2; 3], SystemError> {
        self.check_in_domain(t)?;
        let empty = Params::new();
        let mut out = [Jet2::constant(0.0); 3];
        for (i, e) in self.bound.iter().enumerate() {
            out[i] = e.eval_jet(t, &empty).map_err(|source| SystemError::Coefficient {
                coeff: COEFF_NAMES[i],
                source,
            })?;
        }
        Ok(out)
    }

    /// Values of (a2, a1, a0) at `t`. No domain check; used by the integrator.
    pub fn coeff_values(&self, t: f64) -> Result<[f64; 3], SystemError> {
        let empty = Params::new();
        let mut out = [0.0; 3];
        for (i, e) in self.bound.iter().enumerate() {
            out[i] = e.eval(t, &empty).map_err(|source| SystemError::Coefficient {
                coeff: COEFF_NAMES[i],
                source,
            })?;
        }
        Ok(out)
    }
}

impl fmt::Display for LtvSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: ({})·y'' + ({})·y' + ({})·y on {}",
            self.name, self.coeffs[0], self.coeffs[1], self.coeffs[2], self.domain
        )
    }
}

/// Builds a parameter map from literal pairs.
pub fn params<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bessel() -> LtvSystem {
        LtvSystem::parse(
            "bessel",
            "t^2",
            "t",
            "t^2 - n^2",
            params([("n", 2.0)]),
            Domain::new(0.5, 10.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn bessel_is_valid_and_has_expected_jets() {
        let sys = bessel();
        let [a2, a1, a0] = sys.coeff_jets(3.0).unwrap();
        assert_eq!(a2, Jet2::new(9.0, 6.0, 2.0));
        assert_eq!(a1, Jet2::new(3.0, 1.0, 0.0));
        assert_eq!(a0, Jet2::new(5.0, 6.0, 2.0));
    }

    #[test]
    fn chebyshev_on_open_interval() {
        let sys = LtvSystem::parse(
            "chebyshev",
            "1 - t^2",
            "-t",
            "n^2",
            params([("n", 3.0)]),
            Domain::new(-0.9, 0.9).unwrap(),
        )
        .unwrap();
        assert_eq!(sys.coeff_jets(0.0).unwrap()[0], Jet2::new(1.0, 0.0, -2.0));
    }

    #[test]
    fn constant_leading_coefficient() {
        let sys = LtvSystem::parse(
            "A",
            "1",
            "2 + 2*sin(w0*t)",
            "5",
            params([("w0", 1.0)]),
            Domain::new(0.0, 20.0).unwrap(),
        )
        .unwrap();
        for t in [0.0, 1.3, 17.0] {
            assert_eq!(sys.coeff_jets(t).unwrap()[0], Jet2::new(1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn vanishing_leading_coefficient_is_rejected() {
        let err = LtvSystem::parse("bad", "t", "0", "1", Params::new(), Domain::new(-1.0, 1.0).unwrap()).unwrap_err();
        assert_eq!(err, SystemError::LeadingCoefficientVanishes { t: 0.0 });
    }

    #[test]
    fn probe_threshold() {
        // |a2| = 2e-12 > 1e-12 everywhere: accepted; 1e-12 exactly: rejected
        let d = Domain::new(0.0, 1.0).unwrap();
        assert!(LtvSystem::parse("s", "2e-12", "0", "0", Params::new(), d).is_ok());
        assert!(LtvSystem::parse("s", "1e-12", "0", "0", Params::new(), d).is_err());
    }

    #[test]
    fn unbound_parameter_and_bad_domain() {
        let d = Domain::new(0.5, 1.0).unwrap();
        assert_eq!(
            LtvSystem::parse("s", "1", "k", "0", Params::new(), d).unwrap_err(),
            SystemError::UnboundParameter("k".into())
        );
        assert!(Domain::new(1.0, 1.0).is_err());
        assert!(Domain::new(2.0, 1.0).is_err());
        assert!(Domain::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn jets_are_deterministic_and_domain_checked() {
        let sys = bessel();
        let a = sys.coeff_jets(4.321).unwrap();
        let b = sys.coeff_jets(4.321).unwrap();
        for i in 0..3 {
            assert_eq!(a[i].v.to_bits(), b[i].v.to_bits());
            assert_eq!(a[i].d2.to_bits(), b[i].d2.to_bits());
        }
        assert!(matches!(sys.coeff_jets(0.1), Err(SystemError::OutsideDomain { .. })));
    }

    #[test]
    fn grid_hits_endpoints() {
        let d = Domain::new(0.3, std::f64::consts::PI - 0.3).unwrap();
        let g: Vec<f64> = d.grid(PROBE_POINTS).collect();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], d.lo);
        assert_eq!(g[1000], d.hi);
    }
}

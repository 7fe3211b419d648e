//! The thirty named equations, written in the standard form
//! `a2 y'' + a1 y' + a0 y = forcing`.
//!
//! Final forms and conjugates are transcribed as printed, including rows that
//! the verifier later flags; see [`super::KNOWN_ERRATA`].

use super::{CatalogEntry, Class, ConditionChoice, Forcing, Template};

const fn tpl(a2: &'static str, a1: &'static str, a0: &'static str) -> Template {
    Template { a2, a1, a0 }
}

const UNIT_CONJUGATE: Template = tpl("c2", "c1", "c0");
const NO_SUBS: &[(&str, &str)] = &[];
const SIN2_DOMAIN: (f64, f64) = (0.3, std::f64::consts::PI - 0.3);

const ANGER_FINAL: Template = tpl("1", "1/t", "1 - 1/(4*t^2)");
const ANGER_CONJUGATE: Template = tpl("c2", "c2/t + c1", "c2*(1 - 1/(4*t^2)) + c1/(2*t) + c0");

pub(super) static ENTRIES: [CatalogEntry; 30] = [
    CatalogEntry {
        id: 1,
        key: "airy",
        title: "Airy DE",
        general: tpl("1", "0", "s*k^2*t"),
        forcing: Forcing::None,
        defaults: &[("s", 1.0), ("k", 1.3)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "k = 0",
            roman: "i",
            substitutions: &[("k", "0")],
            final_form: tpl("1", "0", "0"),
            conjugate: Some(UNIT_CONJUGATE),
        }],
    },
    CatalogEntry {
        id: 2,
        key: "anger",
        title: "Anger DE",
        general: tpl("1", "1/t", "1 - v^2/t^2"),
        forcing: Forcing::Expr("(t - v)/(n*t^2)*sin(pi*v)"),
        defaults: &[("v", 0.3), ("n", 1.0)],
        domain: (0.5, 10.0),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "v = -0.5",
                roman: "i",
                substitutions: &[("v", "-0.5")],
                final_form: ANGER_FINAL,
                conjugate: Some(ANGER_CONJUGATE),
            },
            ConditionChoice {
                label: "v = 0.5",
                roman: "ii",
                substitutions: &[("v", "0.5")],
                final_form: ANGER_FINAL,
                conjugate: Some(ANGER_CONJUGATE),
            },
        ],
    },
    CatalogEntry {
        id: 3,
        key: "baer",
        title: "Baer DE",
        general: tpl("(t - d1)*(t - d2)", "0.5*(2*t - (d1 + d2))", "-(p^2*t + q^2)"),
        forcing: Forcing::None,
        defaults: &[("d1", 6.0), ("d2", 7.0), ("p", 0.7), ("q", 1.2)],
        domain: (-5.0, 5.0),
        expected: Class::Never,
        conditions: &[ConditionChoice {
            label: "p = 0",
            roman: "i",
            substitutions: &[("p", "0")],
            final_form: tpl("(t - d1)*(t - d2)", "0.5*(2*t - (d1 + d2))", "-q^2"),
            conjugate: Some(tpl(
                "c2*(t - d1)*(t - d2)",
                "c2*(t - 0.5*(d1 + d2)) + c1*sqrt((t - d1)*(t - d2))",
                "-c2*q^2 + c0",
            )),
        }],
    },
    CatalogEntry {
        id: 4,
        key: "bessel",
        title: "Bessel DE",
        general: tpl("t^2", "t", "t^2 - n^2"),
        forcing: Forcing::None,
        defaults: &[("n", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 5,
        key: "bessel-modified",
        title: "Bessel DE-modified",
        general: tpl("t^2", "t", "-(t^2 + n^2)"),
        forcing: Forcing::None,
        defaults: &[("n", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 6,
        key: "bessel-spherical",
        title: "Bessel DE-spherical",
        general: tpl("t^2", "2*t", "t^2 - n*(n + 1)"),
        forcing: Forcing::None,
        defaults: &[("n", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 7,
        key: "bessel-modified-spherical",
        title: "Bessel DE-modified spherical",
        general: tpl("t^2", "2*t", "-(t^2 + n*(n + 1))"),
        forcing: Forcing::None,
        defaults: &[("n", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 8,
        key: "bessel-wave",
        title: "Bessel DE-wave",
        general: tpl("t^2", "t", "a^2*t^4 + b^2*t^2 - c^2"),
        forcing: Forcing::None,
        defaults: &[("a", 0.4), ("b", 0.6), ("c", 1.5)],
        domain: (0.5, 10.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "a = b = 0",
            roman: "i",
            substitutions: &[("a", "0"), ("b", "0")],
            final_form: tpl("t^2", "t", "-c^2"),
            conjugate: Some(tpl("c2*t^2", "(c2 + c1)*t", "-c2*c^2 + c0")),
        }],
    },
    CatalogEntry {
        id: 9,
        key: "chebyshev",
        title: "Chebyshev DE",
        general: tpl("1 - t^2", "-t", "n^2"),
        forcing: Forcing::None,
        defaults: &[("n", 3.0)],
        domain: (-0.9, 0.9),
        expected: Class::Always,
        // the printed conjugate row repeats the equation itself; the worked
        // three-constant form is used instead
        conditions: &[ConditionChoice {
            label: "no condition",
            roman: "i",
            substitutions: NO_SUBS,
            final_form: tpl("1 - t^2", "-t", "n^2"),
            conjugate: Some(tpl("c2*(1 - t^2)", "c1*sqrt(1 - t^2) - c2*t", "c0 + c2*n^2")),
        }],
    },
    CatalogEntry {
        id: 10,
        key: "eckart",
        title: "Eckart DE",
        general: tpl(
            "1",
            "0",
            "alpha*exp(delta*t)/(1 + exp(delta*t)) + beta*exp(delta*t)/(1 + exp(delta*t))^2 + gamma",
        ),
        forcing: Forcing::None,
        defaults: &[("alpha", 1.2), ("beta", 0.8), ("gamma", 0.5), ("delta", 0.7)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "alpha = beta = gamma = 0",
                roman: "i",
                substitutions: &[("alpha", "0"), ("beta", "0"), ("gamma", "0")],
                final_form: tpl("1", "0", "0"),
                conjugate: Some(UNIT_CONJUGATE),
            },
            ConditionChoice {
                label: "delta = 0",
                roman: "ii",
                substitutions: &[("delta", "0")],
                final_form: tpl("1", "0", "alpha*exp(delta*t)/2 + beta*exp(delta*t)/4 + gamma"),
                conjugate: Some(tpl(
                    "c2",
                    "c1",
                    "c2*(alpha*exp(delta*t)/2 + beta*exp(delta*t)/4 + gamma) + c0",
                )),
            },
        ],
    },
    CatalogEntry {
        id: 11,
        key: "ellipsoidal",
        title: "Ellipsoidal wave DE",
        general: tpl("1", "0", "-(a + b*k^2*sn(t, k)^2 + q*k^4*sn(t, k)^4)"),
        forcing: Forcing::None,
        defaults: &[("a", 1.5), ("b", 0.5), ("q", 0.3), ("k", 0.6)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "k = 0",
                roman: "i",
                substitutions: &[("k", "0")],
                final_form: tpl("1", "0", "-a"),
                conjugate: Some(tpl("c2", "c1", "-c2*a + c0")),
            },
            ConditionChoice {
                label: "b = q = 0",
                roman: "ii",
                substitutions: &[("b", "0"), ("q", "0")],
                final_form: tpl("1", "0", "-a"),
                conjugate: Some(tpl("c2", "c1", "-c2*a + c0")),
            },
        ],
    },
    CatalogEntry {
        id: 12,
        key: "erfc",
        title: "Erfc DE",
        general: tpl("1", "2*t", "-2*n"),
        forcing: Forcing::None,
        defaults: &[("n", 1.0)],
        domain: (-5.0, 5.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 13,
        key: "euler",
        title: "Euler DE",
        general: tpl("t^2", "alpha*t", "beta"),
        forcing: Forcing::Symbolic("s(t)"),
        defaults: &[("alpha", 3.0), ("beta", 7.0)],
        domain: (0.5, 10.0),
        expected: Class::Always,
        conditions: &[ConditionChoice {
            label: "no condition",
            roman: "i",
            substitutions: NO_SUBS,
            final_form: tpl("t^2", "alpha*t", "beta"),
            conjugate: Some(tpl("c2*t^2", "(c2*alpha + c1)*t", "c2*beta + c1*(alpha - 1)*0.5 + c0")),
        }],
    },
    CatalogEntry {
        id: 14,
        key: "gegenbauer",
        title: "Gegenbauer DE",
        general: tpl("1 - t^2", "-2*(mu + 1)*t", "(v - mu)*(v + mu + 1)"),
        forcing: Forcing::None,
        defaults: &[("mu", 0.3), ("v", 1.2)],
        domain: (-0.9, 0.9),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "mu = -0.5",
                roman: "i",
                substitutions: &[("mu", "-0.5")],
                final_form: tpl("1 - t^2", "-t", "(v + 0.5)^2"),
                conjugate: Some(tpl(
                    "c2*(1 - t^2)",
                    "c2*t + c1*sqrt(1 - t^2)",
                    "c2*(v + 0.5)^2 + c1*t/sqrt(1 - t^2) + c0",
                )),
            },
            ConditionChoice {
                label: "mu = 0.5",
                roman: "ii",
                substitutions: &[("mu", "0.5")],
                final_form: tpl("1 - t^2", "-3*t", "(v - 0.5)*(v + 1.5)"),
                conjugate: Some(tpl(
                    "c2*(1 - t^2)",
                    "-3*c2*t + c1*sqrt(1 - t^2)",
                    "c2*(v - 0.5)*(v + 1.5) + c1*t/sqrt(1 - t^2) + c0",
                )),
            },
        ],
    },
    CatalogEntry {
        id: 15,
        key: "hill",
        title: "Hill's DE",
        general: tpl(
            "1",
            "0",
            "theta0 + 2*(theta1*cos(2*t) + theta2*cos(4*t) + theta3*cos(6*t))",
        ),
        forcing: Forcing::None,
        defaults: &[("theta0", 1.0), ("theta1", 0.3), ("theta2", 0.2), ("theta3", 0.1)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "theta_n = 0 for n > 0",
            roman: "i",
            substitutions: &[("theta1", "0"), ("theta2", "0"), ("theta3", "0")],
            final_form: tpl("1", "0", "theta0"),
            conjugate: Some(tpl("c2", "c1", "c2*theta0 + c0")),
        }],
    },
    CatalogEntry {
        id: 16,
        key: "hypergeometric",
        title: "Hypergeometric DE",
        general: tpl("t*(1 - t)", "c - (a + b + 1)*t", "-a*b"),
        forcing: Forcing::None,
        defaults: &[("a", 0.3), ("b", 0.4), ("c", 0.7)],
        domain: (0.05, 0.95),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "c = 0.5, a + b = 0",
                roman: "i",
                substitutions: &[("c", "0.5"), ("b", "-a")],
                final_form: tpl("t*(1 - t)", "0.5 - t", "a^2"),
                conjugate: Some(tpl("c2*(t - t^2)", "c2*(0.5 - t) + c1*sqrt(t - t^2)", "c2*a^2 + c0")),
            },
            ConditionChoice {
                label: "c = 0.5, a + b = 1",
                roman: "ii",
                substitutions: &[("c", "0.5"), ("b", "1 - a")],
                final_form: tpl("t*(1 - t)", "0.5 - 2*t", "-a*(1 - a)"),
                conjugate: Some(tpl(
                    "c2*(t - t^2)",
                    "c2*(0.5 - 2*t) + c1*sqrt(t - t^2)",
                    "c2*(a^2 - a) - c1*t/(2*sqrt(t - t^2)) + c0",
                )),
            },
            ConditionChoice {
                label: "c = 1.5, a + b = 2",
                roman: "iii",
                substitutions: &[("c", "1.5"), ("b", "2 - a")],
                final_form: tpl("t*(1 - t)", "1.5 - 3*t", "-a*(2 - a)"),
                conjugate: Some(tpl(
                    "c2*(t - t^2)",
                    "c2*(1.5 - 3*t) + c1*sqrt(t - t^2)",
                    "c2*(a^2 - 2*a) + c1*(2*t - 1)/(2*sqrt(t - t^2)) + c0",
                )),
            },
            ConditionChoice {
                label: "c = 1.5, a + b = 1",
                roman: "iv",
                substitutions: &[("c", "1.5"), ("b", "1 - a")],
                final_form: tpl("t*(1 - t)", "1.5 - 2*t", "-a*(1 - a)"),
                conjugate: Some(tpl(
                    "c2*(t - t^2)",
                    "c2*(1.5 - 2*t) + c1*sqrt(t - t^2)",
                    "c2*(a^2 - a) + c1*(1 - t)/(2*sqrt(t - t^2)) + c0",
                )),
            },
        ],
    },
    CatalogEntry {
        id: 17,
        key: "jacobi-first",
        title: "Jacobi DE-first",
        general: tpl(
            "1 - t^2",
            "beta - alpha - (alpha + beta + 2)*t",
            "n*(n + alpha + beta + 1)",
        ),
        forcing: Forcing::None,
        defaults: &[("alpha", 0.3), ("beta", 0.7), ("n", 2.0)],
        domain: (-0.9, 0.9),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "alpha = beta = -0.5",
                roman: "i",
                substitutions: &[("alpha", "-0.5"), ("beta", "-0.5")],
                final_form: tpl("1 - t^2", "-t", "n^2"),
                conjugate: Some(tpl("c2*(1 - t^2)", "-c2*t + c1*sqrt(1 - t^2)", "c2*n^2 + c0")),
            },
            ConditionChoice {
                label: "alpha = beta = 0.5",
                roman: "ii",
                substitutions: &[("alpha", "0.5"), ("beta", "0.5")],
                final_form: tpl("1 - t^2", "-3*t", "n*(n + 2)"),
                conjugate: Some(tpl(
                    "c2*(1 - t^2)",
                    "-3*c2*t + c1*sqrt(1 - t^2)",
                    "c2*(n^2 + n) - c1*t/sqrt(1 - t^2) + c0",
                )),
            },
            ConditionChoice {
                label: "alpha = 0.5, beta = -0.5",
                roman: "iii",
                substitutions: &[("alpha", "0.5"), ("beta", "-0.5")],
                final_form: tpl("1 - t^2", "-(1 + 2*t)", "n*(n + 1)"),
                conjugate: Some(tpl(
                    "c2*(1 - t^2)",
                    "c2*(1 + 2*t) + c1*sqrt(1 - t^2)",
                    "c2*(n^2 + n) - c1*(1 + t)/(2*sqrt(1 - t^2)) + c0",
                )),
            },
            ConditionChoice {
                label: "alpha = -0.5, beta = 0.5",
                roman: "iv",
                substitutions: &[("alpha", "-0.5"), ("beta", "0.5")],
                final_form: tpl("1 - t^2", "1 - 2*t", "n*(n + 1)"),
                conjugate: Some(tpl(
                    "c2*(1 - t^2)",
                    "c2*(1 - 2*t) + c1*sqrt(1 - t^2)",
                    "c2*(n^2 + n) + c1*(1 - t)/(2*sqrt(1 - t^2)) + c0",
                )),
            },
        ],
    },
    CatalogEntry {
        id: 18,
        key: "jacobi-second",
        title: "Jacobi DE-second",
        general: tpl("t*(1 - t)", "beta - (alpha + 1)*t", "n*(n + alpha)"),
        forcing: Forcing::None,
        defaults: &[("alpha", 0.3), ("beta", 0.7), ("n", 2.0)],
        domain: (0.05, 0.95),
        expected: Class::Conditional,
        // the last two rows are both printed as "iii"; they are numbered in row order
        conditions: &[
            ConditionChoice {
                label: "alpha = 0, beta = 0.5",
                roman: "i",
                substitutions: &[("alpha", "0"), ("beta", "0.5")],
                final_form: tpl("t*(1 - t)", "0.5 - t", "n^2"),
                conjugate: Some(tpl("c2*(t - t^2)", "c2*(0.5 - t) + c1*sqrt(t - t^2)", "c2*n^2 + c0")),
            },
            ConditionChoice {
                label: "alpha = 1, beta = 0.5",
                roman: "ii",
                substitutions: &[("alpha", "1"), ("beta", "0.5")],
                final_form: tpl("t*(1 - t)", "0.5 - 2*t", "n*(n + 1)"),
                conjugate: Some(tpl(
                    "c2*(t - t^2)",
                    "c2*(0.5 - 2*t) + c1*sqrt(t - t^2)",
                    "c2*(n^2 + n) - c1*t/(2*sqrt(t - t^2)) + c0",
                )),
            },
            ConditionChoice {
                label: "alpha = 1, beta = 1.5",
                roman: "iii",
                substitutions: &[("alpha", "1"), ("beta", "1.5")],
                final_form: tpl("t*(1 - t)", "1.5 - 2*t", "n*(n + 1)"),
                conjugate: Some(tpl(
                    "c2*(t - t^2)",
                    "c2*(1.5 - 2*t) + c1*sqrt(t - t^2)",
                    "c2*(n^2 + n) + c1*(1 - t)/(2*sqrt(t - t^2)) + c0",
                )),
            },
            ConditionChoice {
                label: "alpha = 2, beta = 1.5",
                roman: "iv",
                substitutions: &[("alpha", "2"), ("beta", "1.5")],
                final_form: tpl("t*(1 - t)", "1.5 - 2*t", "n*(n + 2)"),
                conjugate: Some(tpl(
                    "c2*(t - t^2)",
                    "c2*(1.5 - 2*t) + c1*sqrt(t - t^2)",
                    "c2*(n^2 + n) + c1*(1 - t)/(2*sqrt(1 - t^2)) + c0",
                )),
            },
        ],
    },
    CatalogEntry {
        id: 19,
        key: "laguerre",
        title: "Laguerre DE",
        general: tpl("t", "alpha + 1 - t", "lambda"),
        forcing: Forcing::None,
        defaults: &[("alpha", 0.5), ("lambda", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 20,
        key: "magnetic-pole",
        title: "Magnetic Pole DE",
        general: tpl(
            "1",
            "0",
            "-((m*(m + 1) + 0.25 - (m + 0.5)*cos(t))/sin(t)^2 + lambda + 0.5)",
        ),
        forcing: Forcing::None,
        defaults: &[("m", 1.0), ("lambda", 0.5)],
        domain: SIN2_DOMAIN,
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 21,
        key: "morse-rosen",
        title: "Morse-Rosen DE",
        general: tpl("1", "0", "alpha/cosh(a*t)^2 + beta*tanh(a*t) + gamma"),
        forcing: Forcing::None,
        defaults: &[("alpha", 0.8), ("beta", 0.6), ("gamma", 1.0), ("a", 0.9)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "alpha = 0",
            roman: "i",
            substitutions: &[("alpha", "0")],
            final_form: tpl("1", "0", "gamma"),
            conjugate: Some(tpl("c2", "c1", "c2*gamma + c0")),
        }],
    },
    CatalogEntry {
        id: 22,
        key: "neumann",
        title: "Neumann DE",
        general: tpl("t^2", "3*t", "t^2 + 1 - n^2"),
        forcing: Forcing::Expr("t*cos(n*pi/2)^2 + n*sin(n*pi/2)^2"),
        defaults: &[("n", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 23,
        key: "parabolic-cylinder",
        title: "Parabolic Cylinder DE",
        general: tpl("1", "0", "a*t^2 + b*t + c"),
        forcing: Forcing::None,
        defaults: &[("a", 0.5), ("b", 0.3), ("c", 1.0)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "a = b = 0",
            roman: "i",
            substitutions: &[("a", "0"), ("b", "0")],
            final_form: tpl("1", "0", "c"),
            conjugate: Some(tpl("c2", "c1", "c2*c + c0")),
        }],
    },
    CatalogEntry {
        id: 24,
        key: "riccati",
        title: "Riccati DE",
        general: tpl("t^2", "0", "t^2 - n*(n + 1)"),
        forcing: Forcing::None,
        defaults: &[("n", 2.0)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 25,
        key: "richardson",
        title: "Richardson's DE",
        general: tpl("1", "0", "lambda*sgn(t) + mu"),
        forcing: Forcing::None,
        defaults: &[("lambda", 0.6), ("mu", 1.0)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "lambda = 0",
            roman: "i",
            substitutions: &[("lambda", "0")],
            final_form: tpl("1", "0", "mu"),
            conjugate: Some(tpl("c2", "c1", "c2*mu + c0")),
        }],
    },
    CatalogEntry {
        id: 26,
        key: "struve",
        title: "Struve DE",
        general: tpl("t^2", "t", "t^2 - v^2"),
        forcing: Forcing::Symbolic("4*(t/2)^(v + 1)/(sqrt(n)*Gamma(v + 1/2))"),
        defaults: &[("v", 0.3)],
        domain: (0.5, 10.0),
        expected: Class::Never,
        conditions: &[],
    },
    CatalogEntry {
        id: 27,
        key: "symmetric-top",
        title: "Symmetric top DE",
        general: tpl(
            "1",
            "0",
            "-((M^2 - 0.25 + K^2 - 2*M*K*cos(t))/sin(t)^2 + delta + K^2 + 0.25)",
        ),
        forcing: Forcing::None,
        defaults: &[("M", 0.8), ("K", 1.1), ("delta", 0.3)],
        domain: SIN2_DOMAIN,
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "M = 0, K = 0.5",
            roman: "i",
            substitutions: &[("M", "0"), ("K", "0.5")],
            final_form: tpl("1", "0", "-(delta + 0.5)"),
            conjugate: Some(tpl("c2", "c1", "-c2*(delta + 0.5)*mu + c0")),
        }],
    },
    CatalogEntry {
        id: 28,
        key: "titchmarsh",
        title: "Titchmarsh's DE",
        general: tpl("1", "0", "lambda - t^(2*n)"),
        forcing: Forcing::None,
        defaults: &[("lambda", 2.0), ("n", 1.0)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "n = 0",
            roman: "i",
            substitutions: &[("n", "0")],
            final_form: tpl("1", "0", "lambda"),
            conjugate: Some(tpl("c2", "c1", "c2*lambda + c0")),
        }],
    },
    CatalogEntry {
        id: 29,
        key: "weber-first",
        title: "Weber DE-first",
        general: tpl("1", "0", "-b^2*t^2/4 + a^2"),
        forcing: Forcing::None,
        defaults: &[("a", 1.2), ("b", 0.8)],
        domain: (-5.0, 5.0),
        expected: Class::Conditional,
        conditions: &[ConditionChoice {
            label: "b = 0",
            roman: "i",
            substitutions: &[("b", "0")],
            final_form: tpl("1", "0", "a^2"),
            conjugate: Some(tpl("c2", "c1", "c2*a^2 + c0")),
        }],
    },
    CatalogEntry {
        id: 30,
        key: "weber-second",
        title: "Weber DE-second",
        general: tpl("1", "1/t", "1 - v^2/t^2"),
        forcing: Forcing::Expr("-(t + v + (t - v)*cos(v*pi))/(pi*t^2)"),
        defaults: &[("v", 0.3)],
        domain: (0.5, 10.0),
        expected: Class::Conditional,
        conditions: &[
            ConditionChoice {
                label: "v = -0.5",
                roman: "i",
                substitutions: &[("v", "-0.5")],
                final_form: ANGER_FINAL,
                conjugate: Some(ANGER_CONJUGATE),
            },
            ConditionChoice {
                label: "v = 0.5",
                roman: "ii",
                substitutions: &[("v", "0.5")],
                final_form: ANGER_FINAL,
                conjugate: Some(ANGER_CONJUGATE),
            },
        ],
    },
];

//! Fixed-step RK4 simulation of single systems and cascades.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Params};
use crate::system::{InitialConditions, LtvSystem, SystemError};

/// Trapezoid points used when averaging coefficients.
pub const AVERAGING_POINTS: usize = 10001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("interval [{t0}, {t1}] is not a whole number of steps of {dt}")]
    NonIntegralSteps { t0: f64, t1: f64, dt: f64 },
    #[error("interval end {t1} precedes start {t0}")]
    InvertedInterval { t0: f64, t1: f64 },
    #[error("cascade has no stages")]
    EmptyChain,
    #[error("expected {expected} initial conditions, got {got}")]
    InitialConditionCount { expected: usize, got: usize },
    #[error("stage {stage} ({name}): interval [{t0}, {t1}] leaves the domain [{lo}, {hi}]")]
    DomainExit {
        stage: usize,
        name: String,
        t0: f64,
        t1: f64,
        lo: f64,
        hi: f64,
    },
    #[error("non-finite state at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("stage {stage}: {source}")]
    Coefficient {
        stage: usize,
        #[source]
        source: SystemError,
    },
    #[error("input signal: {0}")]
    Input(#[from] ExprError),
    #[error("averaged leading coefficient is zero")]
    DegenerateAverage,
}

/// Excitation applied to the first stage of a cascade.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    /// `30 sin(1.2 pi t)` plus a sawtooth of period 3.3 s rising from -30 to 30.
    SineSaw,
    /// Amplitude 30, period 5 s, 10 % duty cycle.
    PulseTrain,
    Expr(Expr, Params),
    Zero,
}

pub const SAW_PERIOD: f64 = 3.3;
pub const PULSE_PERIOD: f64 = 5.0;
pub const PULSE_WIDTH: f64 = 0.5;
pub const AMPLITUDE: f64 = 30.0;

pub fn sawtooth(t: f64) -> f64 {
    let phase = (t / SAW_PERIOD).rem_euclid(1.0);
    -AMPLITUDE + 2.0 * AMPLITUDE * phase
}

impl InputSignal {
    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        Ok(match self {
            InputSignal::SineSaw => AMPLITUDE * (1.2 * PI * t).sin() + sawtooth(t),
            InputSignal::PulseTrain => {
                if t.rem_euclid(PULSE_PERIOD) < PULSE_WIDTH {
                    AMPLITUDE
                } else {
                    0.0
                }
            }
            InputSignal::Expr(e, params) => e.eval(t, params)?,
            InputSignal::Zero => 0.0,
        })
    }

    /// Parses the command-line spelling: `sine-saw`, `pulse`, `zero` or `expr:<E>`.
    pub fn from_spec(spec: &str) -> Result<Self, ExprError> {
        Ok(match spec {
            "sine-saw" => InputSignal::SineSaw,
            "pulse" => InputSignal::PulseTrain,
            "zero" => InputSignal::Zero,
            other => match other.strip_prefix("expr:") {
                Some(src) => InputSignal::Expr(crate::expr::parse_expr(src)?, Params::new()),
                None => {
                    return Err(ExprError::Syntax {
                        offset: 0,
                        message: format!("unknown input `{other}` (sine-saw, pulse, zero, expr:<E>)"),
                    })
                }
            },
        })
    }
}

/// Uniformly sampled named series sharing one time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(t0: f64, dt: f64, names: Vec<String>) -> Self {
        let columns = vec![Vec::new(); names.len()];
        Trajectory { t0, dt, names, columns }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    fn push_row(&mut self, row: &[f64]) {
        for (col, v) in self.columns.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    /// Output of the last stage.
    pub fn output(&self) -> &[f64] {
        let last = self
            .names
            .iter()
            .rposition(|n| n.starts_with('y'))
            .expect("trajectory has stages");
        &self.columns[last]
    }
}

fn step_count(t0: f64, t1: f64, dt: f64) -> Result<usize, SimError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidStep(dt));
    }
    if t1 < t0 {
        return Err(SimError::InvertedInterval { t0, t1 });
    }
    let ratio = (t1 - t0) / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(SimError::NonIntegralSteps { t0, t1, dt });
    }
    Ok(n as usize)
}

/// Integrates one system; equivalent to a one-stage chain.
pub fn integrate(
    sys: &LtvSystem,
    input: &InputSignal,
    ic: InitialConditions,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory, SimError> {
    simulate_chain(std::slice::from_ref(sys), input, &[ic], t0, t1, dt)
}

/// Co-integrates a cascade: stage `i + 1` is driven by the output `y` of
/// stage `i`, evaluated from the shared state at every RK4 stage time.
/// An empty `ics` slice means zero initial conditions everywhere.
pub fn simulate_chain(
    chain: &[LtvSystem],
    input: &InputSignal,
    ics: &[InitialConditions],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory, SimError> {
    if chain.is_empty() {
        return Err(SimError::EmptyChain);
    }
    if !ics.is_empty() && ics.len() != chain.len() {
        return Err(SimError::InitialConditionCount {
            expected: chain.len(),
            got: ics.len(),
        });
    }
    let steps = step_count(t0, t1, dt)?;
    for (stage, sys) in chain.iter().enumerate() {
        let d = sys.domain();
        if !(d.contains(t0) && d.contains(t1)) {
            return Err(SimError::DomainExit {
                stage: stage + 1,
                name: sys.name().to_string(),
                t0,
                t1,
                lo: d.lo,
                hi: d.hi,
            });
        }
    }

    let n = chain.len();
    let mut names = vec!["input".to_string()];
    for i in 1..=n {
        names.push(format!("y{i}"));
        names.push(format!("dy{i}"));
    }
    let mut traj = Trajectory::new(t0, dt, names);

    let mut state = vec![0.0; 2 * n];
    for (i, ic) in ics.iter().enumerate() {
        state[2 * i] = ic.y0;
        state[2 * i + 1] = ic.dy0;
    }

    let rhs = |t: f64, s: &[f64], out: &mut [f64]| -> Result<(), SimError> {
        let mut x = input.eval(t)?;
        for (i, sys) in chain.iter().enumerate() {
            let [a2, a1, a0] = sys
                .coeff_values(t)
                .map_err(|source| SimError::Coefficient { stage: i + 1, source })?;
            let (y, dy) = (s[2 * i], s[2 * i + 1]);
            out[2 * i] = dy;
            out[2 * i + 1] = (x - a1 * dy - a0 * y) / a2;
            x = y;
        }
        Ok(())
    };

    let mut row = vec![0.0; 2 * n + 1];
    let record = |traj: &mut Trajectory, row: &mut Vec<f64>, t: f64, s: &[f64]| -> Result<(), SimError> {
        row[0] = input.eval(t)?;
        row[1..].copy_from_slice(s);
        traj.push_row(row);
        Ok(())
    };

    let dim = 2 * n;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    record(&mut traj, &mut row, t0, &state)?;
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        let half = 0.5 * dt;
        rhs(t, &state, &mut k1)?;
        for j in 0..dim {
            tmp[j] = state[j] + half * k1[j];
        }
        rhs(t + half, &tmp, &mut k2)?;
        for j in 0..dim {
            tmp[j] = state[j] + half * k2[j];
        }
        rhs(t + half, &tmp, &mut k3)?;
        for j in 0..dim {
            tmp[j] = state[j] + dt * k3[j];
        }
        rhs(t + dt, &tmp, &mut k4)?;
        for j in 0..dim {
            state[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t_next = t0 + (step + 1) as f64 * dt;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                step: step + 1,
                t: t_next,
            });
        }
        record(&mut traj, &mut row, t_next, &state)?;
    }
    Ok(traj)
}

/// Roots of `ā2 s² + ā1 s + ā0` with coefficients averaged over `[lo, hi]`
/// by the trapezoid rule. The root with the larger imaginary (then real)
/// part comes first.
pub fn averaged_eigenvalues(sys: &LtvSystem, lo: f64, hi: f64) -> Result<[Complex64; 2], SimError> {
    let n = AVERAGING_POINTS;
    let h = (hi - lo) / (n - 1) as f64;
    let mut acc = [0.0; 3];
    for k in 0..n {
        let t = if k == n - 1 { hi } else { lo + k as f64 * h };
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        let c = sys
            .coeff_values(t)
            .map_err(|source| SimError::Coefficient { stage: 1, source })?;
        for i in 0..3 {
            acc[i] += w * c[i];
        }
    }
    let [a2, a1, a0] = acc.map(|s| s * h / (hi - lo));
    if a2 == 0.0 {
        return Err(SimError::DegenerateAverage);
    }
    let disc = Complex64::new(a1 * a1 - 4.0 * a2 * a0, 0.0).sqrt();
    let r1 = (-a1 + disc) / (2.0 * a2);
    let r2 = (-a1 - disc) / (2.0 * a2);
    let first = (r1.im, r1.re) >= (r2.im, r2.re);
    Ok(if first { [r1, r2] } else { [r2, r1] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutativity::{synthesize_pair, PairConstants};
    use crate::system::{params, Domain};

    fn oscillator() -> LtvSystem {
        LtvSystem::parse("osc", "1", "0", "1", Params::new(), Domain::new(0.0, 100.0).unwrap()).unwrap()
    }

    fn system_a() -> LtvSystem {
        LtvSystem::parse(
            "A",
            "1",
            "2 + 2*sin(w0*t)",
            "5 - 0.5*cos(2*w0*t) + 2*sin(w0*t) + w0*cos(w0*t)",
            params([("w0", 1.0)]),
            Domain::new(0.0, 100.0).unwrap(),
        )
        .unwrap()
    }

    // nearest point to pi that is a whole number of 4e-3, 2e-3 and 1e-3 steps
    const COS_END: f64 = 3.144;

    #[test]
    fn measured_order() {
        let dts = [4e-3, 2e-3, 1e-3];
        let errs: Vec<f64> = dts.iter().map(|&dt| cos_error(dt, COS_END)).collect();
        // least-squares slope of log(err) against log(dt)
        let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let order = num / den;
        assert!((3.7..=4.3).contains(&order), "order {order}, errors {errs:?}");
    }

    // max |y - cos t| over the whole trajectory
    fn cos_error(dt: f64, t1: f64) -> f64 {
        let ic = InitialConditions { y0: 1.0, dy0: 0.0 };
        let traj = integrate(&oscillator(), &InputSignal::Zero, ic, 0.0, t1, dt).unwrap();
        let y = traj.column("y1").unwrap();
        y.iter()
            .enumerate()
            .map(|(k, v)| (v - traj.time(k).cos()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn signal_values() {
        assert_eq!(InputSignal::SineSaw.eval(0.0).unwrap(), -30.0);
        assert_eq!(InputSignal::PulseTrain.eval(0.25).unwrap(), 30.0);
        assert_eq!(InputSignal::PulseTrain.eval(0.75).unwrap(), 0.0);
        assert_eq!(InputSignal::PulseTrain.eval(5.1).unwrap(), 30.0);
        assert_eq!(InputSignal::Zero.eval(12.0).unwrap(), 0.0);
        assert!((sawtooth(1.65) - 0.0).abs() < 1e-12);
        assert!((sawtooth(3.3 - 1e-9) - 30.0).abs() < 1e-6);
        assert_eq!(sawtooth(3.3), -30.0);
    }

    #[test]
    fn input_specs() {
        assert_eq!(InputSignal::from_spec("pulse").unwrap(), InputSignal::PulseTrain);
        let e = InputSignal::from_spec("expr:3*t").unwrap();
        assert_eq!(e.eval(2.0).unwrap(), 6.0);
        assert!(InputSignal::from_spec("square").is_err());
    }

    #[test]
    fn cosine_oracle() {
        assert!(cos_error(1e-3, COS_END) <= 1e-9);
    }

    #[test]
    fn halving_the_step_shrinks_error() {
        let ratio = cos_error(4e-2, 3.2) / cos_error(2e-2, 3.2);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn step_validation() {
        let sys = oscillator();
        let ic = InitialConditions::ZERO;
        assert_eq!(
            integrate(&sys, &InputSignal::Zero, ic, 0.0, 1.0, 0.0).unwrap_err(),
            SimError::InvalidStep(0.0)
        );
        assert!(matches!(
            integrate(&sys, &InputSignal::Zero, ic, 0.0, 1.0, 0.3),
            Err(SimError::NonIntegralSteps { .. })
        ));
        assert!(matches!(
            integrate(&sys, &InputSignal::Zero, ic, 0.0, 200.0, 0.5),
            Err(SimError::DomainExit { stage: 1, .. })
        ));
        let traj = integrate(&sys, &InputSignal::Zero, ic, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(traj.len(), 1);
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = LtvSystem::parse(
            "unstable",
            "1",
            "0",
            "-1e6",
            Params::new(),
            Domain::new(0.0, 100.0).unwrap(),
        )
        .unwrap();
        let ic = InitialConditions { y0: 1.0, dy0: 0.0 };
        assert!(matches!(
            integrate(&sys, &InputSignal::Zero, ic, 0.0, 100.0, 0.01),
            Err(SimError::NonFinite { .. })
        ));
    }

    #[test]
    fn system_a_is_bounded() {
        let traj = integrate(
            &system_a(),
            &InputSignal::SineSaw,
            InitialConditions::ZERO,
            0.0,
            20.0,
            1e-3,
        )
        .unwrap();
        let peak = traj.output().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak.is_finite() && peak < 100.0, "peak {peak}");
        assert_eq!(traj.len(), 20001);
    }

    #[test]
    fn single_stage_chain_matches_integrate() {
        let a = system_a();
        let one = simulate_chain(std::slice::from_ref(&a), &InputSignal::PulseTrain, &[], 0.0, 5.0, 1e-3).unwrap();
        let direct = integrate(&a, &InputSignal::PulseTrain, InitialConditions::ZERO, 0.0, 5.0, 1e-3).unwrap();
        assert_eq!(one, direct);
    }

    #[test]
    fn upstream_stage_is_not_perturbed() {
        let a = system_a();
        let b = synthesize_pair(&a, PairConstants::new(0.5, -0.25, 337.0 / 32.0)).unwrap();
        let chain = simulate_chain(&[a.clone(), b], &InputSignal::SineSaw, &[], 0.0, 10.0, 1e-3).unwrap();
        let single = integrate(&a, &InputSignal::SineSaw, InitialConditions::ZERO, 0.0, 10.0, 1e-3).unwrap();
        let (c, s) = (chain.column("y1").unwrap(), single.column("y1").unwrap());
        for (x, y) in c.iter().zip(s) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn linearity_in_the_input() {
        let a = system_a();
        let base = InputSignal::Expr(crate::expr::parse_expr("sin(3*t) + t").unwrap(), Params::new());
        let y = simulate_chain(std::slice::from_ref(&a), &base, &[], 0.0, 8.0, 1e-3).unwrap();
        let peak = y.output().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for alpha in [-1.0, 2.0, 10.0] {
            let scaled = InputSignal::Expr(
                crate::expr::parse_expr(&format!("{alpha:?}*(sin(3*t) + t)")).unwrap(),
                Params::new(),
            );
            let ys = simulate_chain(std::slice::from_ref(&a), &scaled, &[], 0.0, 8.0, 1e-3).unwrap();
            for (u, v) in y.output().iter().zip(ys.output()) {
                assert!((alpha * u - v).abs() <= 1e-9 * alpha.abs() * peak);
            }
        }
    }

    #[test]
    fn determinism() {
        let a = system_a();
        let r1 = integrate(&a, &InputSignal::SineSaw, InitialConditions::ZERO, 0.0, 3.0, 1e-3).unwrap();
        let r2 = integrate(&a, &InputSignal::SineSaw, InitialConditions::ZERO, 0.0, 3.0, 1e-3).unwrap();
        assert!(r1
            .output()
            .iter()
            .zip(r2.output())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn averaged_roots() {
        let [r1, r2] = averaged_eigenvalues(&system_a(), 0.0, 2.0 * PI).unwrap();
        assert!((r1 - Complex64::new(-1.0, 2.0)).norm() <= 1e-9);
        assert!((r2 - Complex64::new(-1.0, -2.0)).norm() <= 1e-9);

        let crit = LtvSystem::parse("c", "1", "2", "1", Params::new(), Domain::new(0.0, 1.0).unwrap()).unwrap();
        let [r1, r2] = averaged_eigenvalues(&crit, 0.0, 1.0).unwrap();
        assert!((r1 + 1.0).norm() < 1e-12 && (r2 + 1.0).norm() < 1e-12);
    }
}

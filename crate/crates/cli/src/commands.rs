//! Subcommand implementations. Each returns the process exit code or a
//! [`CliError`] carrying one.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use commutant::catalog::{self, CatalogError, Class};
use commutant::channel::{
    self, enumerate_structures, perturb_a0, reference_check, run_demo, ChannelError, CommutativePair, DemoSettings,
    K0Choice,
};
use commutant::commutativity::{check_commutativity, synthesize_pair, CommutativityError, PairConstants, Verdict};
use commutant::expr::{parse_expr, Params};
use commutant::io::{self, IoError};
use commutant::sim::{simulate_chain, InputSignal, SimError};
use commutant::system::{Domain, LtvSystem, SystemError};

use crate::style;
use crate::{DemoArgs, DemoInput, K0Arg, SystemSource};

/// Like `println!`, but a closed stdout (e.g. piped into `head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// `print!` counterpart of [`say!`].
macro_rules! say_raw {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

pub const SUCCESS: i32 = 0;
pub const NEGATIVE: i32 = 1;
pub const INPUT: i32 = 2;
pub const NUMERIC: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: INPUT,
            message: message.into(),
        }
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<CommutativityError> for CliError {
    fn from(e: CommutativityError) -> Self {
        let code = match e {
            CommutativityError::NotConstant { .. } => NEGATIVE,
            CommutativityError::LeadingNotPositive { .. } | CommutativityError::DomainError { .. } => NUMERIC,
            _ => INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Commutativity(inner) => inner.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::NonFinite { .. } | SimError::DomainExit { .. } | SimError::Coefficient { .. } => NUMERIC,
            _ => INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::Sim(inner) => inner.into(),
            ChannelError::Commutativity(inner) => inner.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

fn constant(text: &str, what: &str) -> Result<f64, CliError> {
    parse_expr(text)
        .and_then(|e| e.eval_const(&Params::new()))
        .map_err(|e| CliError::input(format!("{what}: {e}")))
}

fn parse_domain(text: &str) -> Result<Domain, CliError> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| CliError::input("--domain expects `lo,hi`"))?;
    Ok(Domain::new(
        constant(lo.trim(), "domain")?,
        constant(hi.trim(), "domain")?,
    )?)
}

fn load_source(src: &SystemSource) -> Result<LtvSystem, CliError> {
    let domain = src.domain.as_deref().map(parse_domain).transpose()?;
    if let Some(path) = &src.system {
        let sys = io::load_system(path)?;
        return Ok(match domain {
            Some(d) => sys.with_domain(d)?,
            None => sys,
        });
    }
    let name = src.catalog.as_deref().expect("clap requires --system or --catalog");
    let mut overrides = Params::new();
    for kv in &src.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("--param expects K=V, got `{kv}`")))?;
        overrides.insert(
            k.trim().to_string(),
            constant(v.trim(), &format!("parameter {}", k.trim()))?,
        );
    }
    Ok(catalog::instantiate(
        name,
        &overrides,
        domain,
        src.condition.as_deref(),
    )?)
}

fn describe(sys: &LtvSystem) -> String {
    let mut s = format!("{} on {}\n", style::heading(sys.name()), sys.domain());
    let _ = writeln!(s, "  a2 = {}", sys.a2());
    let _ = writeln!(s, "  a1 = {}", sys.a1());
    let _ = writeln!(s, "  a0 = {}", sys.a0());
    if let Some(f) = sys.forcing() {
        let _ = writeln!(s, "  rhs = {f}");
    }
    if !sys.params().is_empty() {
        let _ = writeln!(s, "  params: {}", param_list(sys.params()));
    }
    s
}

fn param_list(p: &Params) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

fn class_word(c: Class) -> &'static str {
    match c {
        Class::Never => "Never",
        Class::Conditional => "Conditional",
        Class::Always => "Always",
    }
}

pub fn catalog(list: bool, show: Option<&str>) -> Result<i32, CliError> {
    if list {
        say!(
            "{:>2}  {:<26} {:<30} {:<12} {:<18} defaults",
            "id",
            "name",
            "title",
            "class",
            "domain"
        );
        for e in catalog::list_entries() {
            let d = e.domain();
            let defaults = e
                .defaults
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            say!(
                "{:>2}  {:<26} {:<30} {:<12} {:<18} {}",
                e.id,
                e.key,
                e.title,
                class_word(e.expected),
                format!("[{:.4}, {:.4}]", d.lo, d.hi),
                defaults
            );
        }
        say!("RESULT: catalog entries={}", catalog::list_entries().len());
        return Ok(SUCCESS);
    }
    let e = catalog::find(show.expect("clap requires --list or --show"))?;
    say!("{} {} ({})", style::heading(&format!("#{}", e.id)), e.title, e.key);
    say!("  a2 = {}", e.general.a2);
    say!("  a1 = {}", e.general.a1);
    say!("  a0 = {}", e.general.a0);
    if let Some(f) = e.forcing.text() {
        say!("  rhs = {f}");
    }
    say!(
        "  defaults: {}",
        e.defaults
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    say!("  domain: {}", e.domain());
    say!("  class: {}", class_word(e.expected));
    if !e.evaluable() {
        say!("  general form is metadata-only (needs a builtin that is not available)");
    }
    for c in e.conditions {
        say!("  condition {} [{}]", c.roman, c.label);
        let f = c.final_form;
        say!("    final form: ({})y'' + ({})y' + ({})y", f.a2, f.a1, f.a0);
        if let Some(j) = c.conjugate {
            say!("    conjugate:  ({})y'' + ({})y' + ({})y", j.a2, j.a1, j.a0);
        }
    }
    say!("RESULT: catalog entry={} class={}", e.key, class_word(e.expected));
    Ok(SUCCESS)
}

pub fn check(src: &SystemSource, grid: usize, tol: f64) -> Result<i32, CliError> {
    let sys = load_source(src)?;
    say_raw!("{}", describe(&sys));
    let report = check_commutativity(&sys, grid, tol)?;
    let params = if sys.params().is_empty() {
        String::new()
    } else {
        format!(" ({})", param_list(sys.params()))
    };
    let value_at = |t: f64| report.samples.iter().find(|s| s.0 == t).map_or(f64::NAN, |s| s.1);
    match &report.verdict {
        Verdict::Always { value } => {
            say!("A0 = {value:.9}{params}");
            say!("verdict: {}", style::good("Always"));
            say!("RESULT: check verdict=Always a0={value:.9}");
            Ok(SUCCESS)
        }
        Verdict::NotConstant { t_min, t_max } => {
            say!(
                "A0 is not constant{params}: range [{:.9}, {:.9}] over {grid} points",
                report.a0_min,
                report.a0_max
            );
            say!(
                "witness: A0({t_min}) = {:.9}, A0({t_max}) = {:.9}",
                value_at(*t_min),
                value_at(*t_max)
            );
            say!("verdict: {}", style::bad("NotConstant"));
            say!(
                "RESULT: check verdict=NotConstant t1={t_min} a0_t1={:.9} t2={t_max} a0_t2={:.9}",
                value_at(*t_min),
                value_at(*t_max)
            );
            Ok(NEGATIVE)
        }
        Verdict::DomainError { t, message } => {
            say!("verdict: {}", style::bad("DomainError"));
            say!("RESULT: check verdict=DomainError t={t}");
            Err(CliError {
                code: NUMERIC,
                message: format!("A0 undefined at t = {t}: {message}"),
            })
        }
    }
}

pub fn pair(src: &SystemSource, constants: [&String; 3], out: Option<&Path>) -> Result<i32, CliError> {
    let sys = load_source(src)?;
    let [c2, c1, c0] = [
        constant(constants[0], "c2")?,
        constant(constants[1], "c1")?,
        constant(constants[2], "c0")?,
    ];
    let c = PairConstants::new(c2, c1, c0);
    let b = synthesize_pair(&sys, c)?;
    say_raw!("{}", describe(&b));
    if c1 != 0.0 {
        let a0 = check_commutativity(
            &sys,
            commutant::commutativity::DEFAULT_GRID,
            commutant::commutativity::DEFAULT_TOL,
        )?
        .constant()
        .unwrap_or(f64::NAN);
        say!(
            "A0 of input = {a0:.9}; A0 of partner = {:.9}",
            c2 * a0 + c0 - c1 * c1 / (4.0 * c2)
        );
    }
    if let Ok(reference) = channel::system_a(channel::W0_DEFAULT) {
        if sys.coeffs() == reference.coeffs() && c2 == channel::K2 && c1 == channel::K1 {
            for note in reference_check(sys.params().get("w0").copied().unwrap_or(1.0))?.notes() {
                say!("note: {note}");
            }
        }
    }
    if let Some(path) = out {
        io::save_system(&b, path)?;
        say!("wrote {}", path.display());
    }
    say!("RESULT: pair c2={c2} c1={c1} c0={c0} name={}", b.name());
    Ok(SUCCESS)
}

pub fn simulate(chain: &[PathBuf], input: &str, t0: f64, t1: f64, dt: f64, out: &Path) -> Result<i32, CliError> {
    let systems = chain.iter().map(io::load_system).collect::<Result<Vec<_>, _>>()?;
    let signal = InputSignal::from_spec(input).map_err(|e| CliError::input(format!("--input: {e}")))?;
    let traj = simulate_chain(&systems, &signal, &[], t0, t1, dt)?;
    io::write_trajectory(&traj, out)?;
    let y = traj.output();
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let last = y.last().copied().unwrap_or(0.0);
    say!(
        "simulated {} stage(s), {} samples on [{t0}, {t1}]; wrote {}",
        systems.len(),
        traj.len(),
        out.display()
    );
    say!(
        "RESULT: simulate samples={} max_abs_output={peak:.6e} final_output={last:.6e}",
        traj.len()
    );
    Ok(SUCCESS)
}

pub fn demo(args: &DemoArgs) -> Result<i32, CliError> {
    let k0 = match args.k0 {
        K0Arg::Derived => K0Choice::Derived,
        K0Arg::Stated => K0Choice::Stated,
    };
    let a = channel::system_a(args.w0)?;
    let mut b = channel::system_b(args.w0, k0)?;
    if let Some(delta) = &args.perturb_b0 {
        b = perturb_a0(&b, delta)?;
    }
    let pair = CommutativePair::new(a, b, args.force)?;
    let input = match args.input {
        DemoInput::SineSaw => InputSignal::SineSaw,
        DemoInput::Pulse => InputSignal::PulseTrain,
    };
    let half = args.stages / 2;
    let structures = enumerate_structures(half, half)?;
    let settings = DemoSettings {
        t0: 0.0,
        t1: args.t1,
        dt: args.dt,
        eps_out: args.eps_out,
        delta_min: args.delta_min,
    };
    let mut report = run_demo(&pair, &input, &structures, settings)?;
    report.notes.extend(reference_check(args.w0)?.notes());
    if k0 == K0Choice::Stated {
        report.notes.push(
            "B was synthesized with k0 = 4213/400; it still commutes with A but differs from the printed partner"
                .to_string(),
        );
    }
    let written = io::write_demo(&report, &args.out_dir)?;
    say_raw!("{}", report.render());
    say!("wrote {} files to {}", written.len(), args.out_dir.display());
    let passed = report.passed();
    say!("verdict: {}", style::verdict(passed, "PASS", "FAIL"));
    say!(
        "RESULT: demo verdict={} output_agreement={:.3e} transmitted_divergence={:.3e} structures={}",
        if passed { "PASS" } else { "FAIL" },
        report.output_agreement,
        report.transmitted_divergence,
        report.runs.len()
    );
    Ok(if passed { SUCCESS } else { NEGATIVE })
}

pub fn verify_tables(tol: f64, out: Option<&Path>) -> Result<i32, CliError> {
    let report = catalog::verify_tables(tol);
    let mut text = String::new();
    let _ = writeln!(text, "classification (tolerance {tol:e}):");
    for c in &report.classifications {
        let computed = c
            .computed
            .map_or("metadata-only".to_string(), |k| class_word(k).to_string());
        let mark = if c.agrees() { "ok" } else { "differs" };
        let _ = writeln!(
            text,
            "  {:>2} {:<26} expected {:<12} computed {:<14} {mark}",
            c.id,
            c.key,
            class_word(c.expected),
            computed
        );
    }
    let _ = writeln!(
        text,
        "compared {} final forms and {} conjugate rows",
        report.final_forms_checked, report.conjugates_checked
    );
    let _ = writeln!(text, "documented errata:");
    for d in report.documented() {
        let _ = writeln!(text, "  {d}");
        if let Some(e) = d.erratum {
            let _ = writeln!(text, "      {}", e.summary);
        }
    }
    let unexpected: Vec<_> = report.unexpected().collect();
    if !unexpected.is_empty() {
        let _ = writeln!(text, "unexpected mismatches:");
        for d in &unexpected {
            let _ = writeln!(text, "  {d}");
        }
    }
    if !report.unobserved_errata.is_empty() {
        let _ = writeln!(text, "documented errata not reproduced:");
        for e in &report.unobserved_errata {
            let row = e.condition.map_or(String::new(), |c| format!(" ({c})"));
            let _ = writeln!(text, "  {} {}{row}: {}", e.key, e.check, e.summary);
        }
    }
    let anger = catalog::find("anger")?;
    let _ = writeln!(text, "notes:");
    let _ = writeln!(text, "  {}", anger_note(anger)?);
    let clean = report.is_clean();
    let _ = writeln!(
        text,
        "RESULT: verify-tables verdict={} documented={} unexpected={} unobserved={}",
        if clean { "PASS" } else { "FAIL" },
        report.documented().count(),
        unexpected.len(),
        report.unobserved_errata.len()
    );
    say_raw!("{text}");
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(if clean { SUCCESS } else { NEGATIVE })
}

/// The closed form `1 - v^2/t^2 + 1/(4 t^2)` of A0 for the Anger family,
/// compared with the computed bracket at a generic `v` and at `v = 0.5`.
fn anger_note(entry: &catalog::CatalogEntry) -> Result<String, CliError> {
    let mut worst = 0.0f64;
    for v in [0.3, 0.5, -0.5] {
        let overrides: Params = [("v".to_string(), v)].into_iter().collect();
        let sys = entry.instantiate(&overrides, None, None)?;
        for t in sys.domain().grid(101) {
            let closed = 1.0 - v * v / (t * t) + 1.0 / (4.0 * t * t);
            let bracket = commutant::commutativity::a0_bracket(&sys, t)?;
            worst = worst.max((closed - bracket).abs() / (1.0 + bracket.abs()));
        }
    }
    Ok(format!(
        "anger: closed form A0 = 1 - v^2/t^2 + 1/(4t^2) agrees with the computed bracket (max relative difference {worst:.1e}); it is constant exactly at v = +-0.5"
    ))
}

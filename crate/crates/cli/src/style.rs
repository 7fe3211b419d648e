//! Optional ANSI styling, disabled by `COMMUTANT_NO_COLOR` or when stdout
//! is not a terminal.

use std::io::IsTerminal;
use std::sync::OnceLock;

fn enabled() -> bool {
    static ENABLED: OnceLock<bool> = OnceLock::new();
    *ENABLED.get_or_init(|| std::env::var_os("COMMUTANT_NO_COLOR").is_none() && std::io::stdout().is_terminal())
}

fn paint(code: &str, text: &str) -> String {
    if enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn good(text: &str) -> String {
    paint("32", text)
}

pub fn bad(text: &str) -> String {
    paint("31", text)
}

pub fn error(text: &str) -> String {
    paint("1;31", text)
}

pub fn heading(text: &str) -> String {
    paint("1", text)
}

/// `PASS`/`FAIL` (or any pair of words) coloured by outcome.
pub fn verdict(ok: bool, yes: &str, no: &str) -> String {
    if ok {
        good(yes)
    } else {
        bad(no)
    }
}

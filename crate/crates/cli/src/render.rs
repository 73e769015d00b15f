//! Locale-independent number and table rendering.

use std::fmt::Write as _;

use fbgain::Users;

/// Fixed-point rendering with `precision` digits after the decimal point.
/// Negative zero is printed without a sign.
pub fn num(x: f64, precision: usize) -> String {
    let s = format!("{x:.precision$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// The value a reader recovers by parsing [`num`]'s output.
pub fn quantize(x: f64, precision: usize) -> f64 {
    num(x, precision).parse().expect("rendered number parses")
}

pub fn users_csv(users: Users) -> String {
    users.to_string()
}

pub fn users_json(users: Users) -> serde_json::Value {
    match users {
        Users::Finite(k) => serde_json::Value::from(k),
        Users::Massive => serde_json::Value::from("massive"),
    }
}

/// Writes rows of already-rendered cells as CSV with `\n` line endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `key = value` lines with the keys padded to a common width.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in pairs {
        writeln!(out, "{k:<width$} = {v}").expect("writing to a String");
    }
    out
}

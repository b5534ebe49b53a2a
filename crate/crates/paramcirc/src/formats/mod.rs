//! Line-oriented text formats: `.circ` circuits, `.bool` Boolean circuits
//! and chain manifests. Blank lines and `#` comments are ignored; errors
//! carry the 1-based line number.

mod boolc;
mod circ;
mod manifest;

pub use boolc::{parse_bool, render_bool};
pub use circ::{parse_circ, render_circ};
pub use manifest::{parse_manifest, render_manifest};

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, reason: impl Into<String>) -> Self {
        ParseError { line, reason: reason.into() }
    }
}

/// Non-empty lines with comments stripped, paired with their line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

pub(crate) fn number<T: FromStr>(line: usize, word: &str, what: &str) -> Result<T, ParseError> {
    word.parse().map_err(|_| ParseError::new(line, format!("expected {what}, found `{word}`")))
}

/// Expects `keyword <value>` and returns the value.
pub(crate) fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    keyword: &str,
    last_line: usize,
) -> Result<(usize, Vec<&'a str>), ParseError> {
    match lines.next() {
        Some((l, w)) if w[0] == keyword && w.len() >= 2 => Ok((l, w[1..].to_vec())),
        Some((l, w)) => Err(ParseError::new(l, format!("expected `{keyword} …`, found `{}`", w.join(" ")))),
        None => Err(ParseError::new(last_line, format!("missing `{keyword}` line"))),
    }
}

//! Line/column aware tokenizing shared by every file parser.

use crate::error::{parse_err, Result};

/// A whitespace-separated token with its 1-based position.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tok<'a> {
    pub line: usize,
    pub col: usize,
    pub text: &'a str,
}

impl<'a> Tok<'a> {
    pub fn err(&self, msg: impl std::fmt::Display) -> crate::Error {
        parse_err(self.line, self.col, msg)
    }

    pub fn u32(&self) -> Result<u32> {
        self.text
            .parse::<u32>()
            .map_err(|_| self.err(format!("expected a non-negative integer, found `{}`", self.text)))
    }

    /// Token text starting at byte `skip`, keeping the column in step.
    pub fn tail(&self, skip: usize) -> Tok<'a> {
        Tok { line: self.line, col: self.col + skip, text: &self.text[skip..] }
    }
}

/// Splits one line (number `line`) into tokens.
pub(crate) fn tokens(line: usize, text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { line, col: s + 1, text: &text[s..i] });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { line, col: s + 1, text: &text[s..] });
    }
    out
}

/// Numbered lines with `#` comments stripped; blank lines are kept as empty token lists.
pub(crate) fn numbered(src: &str) -> Vec<(usize, Vec<Tok<'_>>)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| {
            let body = match l.find('#') {
                Some(p) => &l[..p],
                None => l,
            };
            (i + 1, tokens(i + 1, body))
        })
        .collect()
}

/// Position just past the end of the input, for "unexpected end" diagnostics.
pub(crate) fn eof(src: &str) -> (usize, usize) {
    let n = src.lines().count();
    (n.max(1), src.lines().last().map_or(1, |l| l.len() + 1))
}

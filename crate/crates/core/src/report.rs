//! Flat `key = value` documents with `#` comments.
//!
//! Values are single lines; `\` and newlines are escaped as `\\` and `\n`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Line {
    Comment(String),
    Entry(String, String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<Line>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('\n', "\\n")
}

fn unescape(v: &str) -> String {
    let mut out = String::with_capacity(v.len());
    let mut chars = v.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn comment(&mut self, text: impl Into<String>) -> &mut Self {
        let text: String = text.into();
        for l in text.lines() {
            self.lines.push(Line::Comment(l.to_string()));
        }
        self
    }

    /// Appends an entry. Panics on a key outside `[A-Za-z0-9_.-]+`.
    pub fn set(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        let key = key.into();
        assert!(valid_key(&key), "invalid report key `{key}`");
        self.lines.push(Line::Entry(key, value.to_string()));
        self
    }

    /// The last value recorded for `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().rev().find_map(|l| match l {
            Line::Entry(k, v) if k == key => Some(v.as_str()),
            _ => None,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.lines.iter().filter_map(|l| match l {
            Line::Entry(k, v) => Some((k.as_str(), v.as_str())),
            Line::Comment(_) => None,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if let Some(c) = l.strip_prefix('#') {
                lines.push(Line::Comment(c.strip_prefix(' ').unwrap_or(c).to_string()));
                continue;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            let k = k.trim();
            if !valid_key(k) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("invalid key `{k}`"),
                });
            }
            lines.push(Line::Entry(k.to_string(), unescape(v.trim())));
        }
        Ok(Report { lines })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            match l {
                Line::Comment(c) => writeln!(f, "# {c}")?,
                Line::Entry(k, v) => writeln!(f, "{k} = {}", escape(v))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new();
        r.comment("divmon check")
            .set("command", "check")
            .set("passed", true)
            .set("condition.I.violations", 3)
            .set("detail", "two\nlines with \\ and = signs");
        let text = r.to_string();
        assert_eq!(Report::parse(&text).unwrap(), r);
        assert_eq!(r.get("passed"), Some("true"));
        assert_eq!(r.entries().count(), 4);
    }

    #[test]
    fn parse_errors_have_lines() {
        let e = Report::parse("a = 1\nno equals here\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 2,
                message: "expected `key = value`".into()
            }
        );
        assert!(Report::parse("bad key = 1").is_err());
    }
}

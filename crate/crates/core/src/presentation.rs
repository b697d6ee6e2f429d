//! Presentations `⟨Σ : u₁ = v₁, …⟩` with length-2 relations, and words over `Σ`.
//!
//! File format:
//!
//! ```text
//! # comment
//! generators: x y z
//! rel: x y = y z
//! ```

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Index of a generator in declaration order.
pub type Letter = usize;

/// A word over the generator alphabet, as a sequence of generator indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl std::borrow::Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// A finite presentation whose relations all have sides of length two.
///
/// Relations are normalized: each pair is stored with `u <= v`
/// lexicographically, trivial pairs are dropped and the list is sorted
/// and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relations: Vec<([Letter; 2], [Letter; 2])>,
}

impl Presentation {
    pub fn new<S: Into<String>>(
        generators: impl IntoIterator<Item = S>,
        relations: impl IntoIterator<Item = ([Letter; 2], [Letter; 2])>,
    ) -> Result<Self> {
        let generators: Vec<String> = generators.into_iter().map(Into::into).collect();
        for (i, g) in generators.iter().enumerate() {
            if !valid_symbol(g) {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("invalid generator name `{g}`"),
                });
            }
            if generators[..i].contains(g) {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("duplicate generator `{g}`"),
                });
            }
        }
        let n = generators.len();
        let mut rels = Vec::new();
        for (u, v) in relations {
            if let Some(&bad) = u.iter().chain(v.iter()).find(|&&l| l >= n) {
                return Err(Error::UnknownLetter(bad));
            }
            if u == v {
                continue;
            }
            rels.push(if u <= v { (u, v) } else { (v, u) });
        }
        rels.sort();
        rels.dedup();
        Ok(Presentation {
            generators,
            relations: rels,
        })
    }

    /// The free monoid on the given generators.
    pub fn free<S: Into<String>>(generators: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(generators, std::iter::empty())
    }

    /// The trace monoid in which the listed generator pairs commute.
    pub fn trace<S: Into<String>>(
        generators: impl IntoIterator<Item = S>,
        commuting: &[(Letter, Letter)],
    ) -> Result<Self> {
        Self::new(
            generators,
            commuting.iter().map(|&(a, b)| ([a, b], [b, a])),
        )
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn relations(&self) -> &[([Letter; 2], [Letter; 2])] {
        &self.relations
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.generators[letter]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.generators.iter().position(|g| g == name)
    }

    /// Renders a word as space-separated generator names, `ε` when empty.
    pub fn render(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter()
            .map(|&l| self.generators[l].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Renders a word by plain concatenation of names (used for compact labels).
    pub fn render_compact(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&l| self.generators[l].as_str()).collect()
    }

    /// Parses a word.
    ///
    /// Tokens are separated by whitespace or `.`; a single token that is not a
    /// generator name is split into characters when every generator name is a
    /// single character. `""`, `1` and `ε` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "1" && self.letter("1").is_none() || text == "ε" {
            return Ok(Word::empty());
        }
        let single_char = self.generators.iter().all(|g| g.chars().count() == 1);
        let mut out = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == '.') {
            if token.is_empty() {
                continue;
            }
            if let Some(l) = self.letter(token) {
                out.push(l);
            } else if single_char {
                for c in token.chars() {
                    let s = c.to_string();
                    out.push(self.letter(&s).ok_or(Error::UnknownSymbol(s))?);
                }
            } else {
                return Err(Error::UnknownSymbol(token.to_string()));
            }
        }
        Ok(Word(out))
    }

    /// Serializes back to the file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("generators: {}\n", self.generators.join(" "));
        for (u, v) in &self.relations {
            s.push_str(&format!(
                "rel: {} = {}\n",
                self.render(u),
                self.render(v)
            ));
        }
        s
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}", self.generators.join(", "))?;
        if !self.relations.is_empty() {
            let rels: Vec<String> = self
                .relations
                .iter()
                .map(|(u, v)| format!("{} = {}", self.render_compact(u), self.render_compact(v)))
                .collect();
            write!(f, " : {}", rels.join(", "))?;
        }
        write!(f, "⟩")
    }
}

fn valid_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the presentation file format.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut generators: Option<Vec<String>> = None;
    let mut raw_relations: Vec<(usize, Vec<String>, Vec<String>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(line_no, format!("expected `generators:` or `rel:`, got `{line}`")))?;
        match key.trim() {
            "generators" => {
                if generators.is_some() {
                    return Err(err(line_no, "generators declared twice".into()));
                }
                let mut gens: Vec<String> = Vec::new();
                for name in rest.split_whitespace() {
                    if !valid_symbol(name) {
                        return Err(err(line_no, format!("invalid generator name `{name}`")));
                    }
                    if gens.iter().any(|g| g == name) {
                        return Err(err(line_no, format!("duplicate generator `{name}`")));
                    }
                    gens.push(name.to_string());
                }
                generators = Some(gens);
            }
            "rel" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line_no, "relation without `=`".into()))?;
                let side = |s: &str| -> Result<Vec<String>> {
                    let toks: Vec<String> = s.split_whitespace().map(str::to_string).collect();
                    if toks.len() != 2 {
                        return Err(err(
                            line_no,
                            format!("relation side `{}` has length {}, expected 2", s.trim(), toks.len()),
                        ));
                    }
                    Ok(toks)
                };
                raw_relations.push((line_no, side(lhs)?, side(rhs)?));
            }
            other => return Err(err(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let generators = generators.ok_or_else(|| err(0, "missing `generators:` line".into()))?;
    let lookup = |line: usize, name: &str| -> Result<Letter> {
        generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| err(line, format!("undeclared symbol `{name}`")))
    };
    let mut relations = Vec::with_capacity(raw_relations.len());
    for (line, lhs, rhs) in &raw_relations {
        let u = [lookup(*line, &lhs[0])?, lookup(*line, &lhs[1])?];
        let v = [lookup(*line, &rhs[0])?, lookup(*line, &rhs[1])?];
        relations.push((u, v));
    }
    Presentation::new(generators, relations)
}

impl FromStr for Presentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_presentation(s)
    }
}

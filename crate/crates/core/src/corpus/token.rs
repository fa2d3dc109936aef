use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A morphological tag: an ordered sequence of grammatical slot values,
/// written with `.` between slots (e.g. `VB.F.S.3.PAST`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphTag {
    slots: Vec<String>,
}

impl MorphTag {
    pub fn new<I, S>(slots: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let slots: Vec<String> = slots.into_iter().map(Into::into).collect();
        if slots.is_empty() {
            return Err(Error::Config("tag must have at least one slot".into()));
        }
        for slot in &slots {
            if slot.is_empty() || slot.contains('.') || slot.contains(char::is_whitespace) {
                return Err(Error::Config(format!("invalid tag slot {slot:?}")));
            }
        }
        Ok(MorphTag { slots })
    }

    pub fn slots(&self) -> &[String] {
        &self.slots
    }

    /// Number of specified grammatical components.
    pub fn arity(&self) -> usize {
        self.slots.len()
    }
}

impl FromStr for MorphTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MorphTag::new(s.split('.'))
    }
}

impl fmt::Display for MorphTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.slots.join("."))
    }
}

/// One corpus word with its surface form, lemma and tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub tag: MorphTag,
}

fn check_form(kind: &str, form: &str) -> std::result::Result<(), String> {
    if form.is_empty() {
        Err(format!("empty {kind}"))
    } else if form.contains('.') || form.contains('|') {
        Err(format!("{kind} {form:?} contains a reserved character ('.' or '|')"))
    } else {
        Ok(())
    }
}

impl Token {
    pub fn new(surface: impl Into<String>, lemma: impl Into<String>, tag: MorphTag) -> Result<Self> {
        let (surface, lemma) = (surface.into(), lemma.into());
        check_form("surface", &surface).map_err(Error::Config)?;
        check_form("lemma", &lemma).map_err(Error::Config)?;
        Ok(Token { surface, lemma, tag })
    }

    /// Parses a `surface|lemma|tag` token. The error is a bare message;
    /// callers attach a position.
    pub fn parse(text: &str) -> std::result::Result<Token, String> {
        let fields: Vec<&str> = text.split('|').collect();
        if fields.len() != 3 {
            return Err(format!("expected 3 fields, got {}", fields.len()));
        }
        check_form("surface", fields[0])?;
        check_form("lemma", fields[1])?;
        let tag = fields[2]
            .parse::<MorphTag>()
            .map_err(|_| format!("invalid tag {:?}", fields[2]))?;
        Ok(Token {
            surface: fields[0].to_owned(),
            lemma: fields[1].to_owned(),
            tag,
        })
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.surface, self.lemma, self.tag)
    }
}

/// A non-empty sequence of tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{token}")?;
        }
        Ok(())
    }
}

/// Parses one corpus line. Returns `Ok(None)` for blank lines.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Sentence>> {
    let mut tokens = Vec::new();
    let mut rest = line;
    let mut offset = 0;
    loop {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            break;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let text = &trimmed[..end];
        let token = Token::parse(text).map_err(|message| Error::Parse {
            line: line_no,
            column: line[..offset].chars().count() + 1,
            message,
        })?;
        tokens.push(token);
        offset += end;
        rest = &trimmed[end..];
    }

    if tokens.is_empty() {
        Ok(None)
    } else {
        Ok(Some(Sentence { tokens }))
    }
}

/// Streaming reader over a tagged corpus: one sentence per line,
/// whitespace-separated `surface|lemma|tag` tokens. Blank lines are skipped.
pub struct SentenceReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Iterator for SentenceReader<R> {
    type Item = Result<Sentence>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            match parse_line(&line, self.line_no) {
                Ok(Some(sentence)) => return Some(Ok(sentence)),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

pub fn parse_corpus<R: BufRead>(reader: R) -> SentenceReader<R> {
    SentenceReader {
        lines: reader.lines(),
        line_no: 0,
    }
}

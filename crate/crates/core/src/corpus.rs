//! Sense-annotated corpora.
//!
//! The canonical on-disk format is one sentence per line:
//!
//! ```text
//! sentence_id<TAB>token<SP>token<SP>...
//! ```
//!
//! where every token is `surface|lemma|pos|sense_key`. Fields after the
//! surface may be empty (`the|||`). Inside a field, a literal `|`, TAB, space
//! and backslash are written as `\p`, `\t`, `\s` and `\\`. Blank lines are
//! ignored.
//!
//! SemCor's native markup maps onto this format field by field: the `wf`
//! element text is the surface, `lemma` the lemma, `pos` is coarsened with
//! [`Pos::from_tag`] and `lemma%lexsn` forms the sense key. Tokens carrying
//! several `wnsn` values are rejected, see [`ParseError::MultipleSenses`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: token {token} carries several sense annotations ({sense})")]
    MultipleSenses { line: usize, token: usize, sense: String },
    #[error("line {line}: duplicate sentence id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Coarse part-of-speech classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Other,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Other => "X",
        }
    }

    /// Maps universal tags, Penn Treebank tags and WordNet letters to a class.
    /// Anything unrecognised becomes [`Pos::Other`].
    pub fn from_tag(tag: &str) -> Pos {
        let upper = tag.to_ascii_uppercase();
        match upper.as_str() {
            "NOUN" | "N" | "PROPN" => Pos::Noun,
            "VERB" | "V" => Pos::Verb,
            "ADJ" | "A" | "S" => Pos::Adj,
            "ADV" | "R" => Pos::Adv,
            t if t.starts_with("NN") => Pos::Noun,
            t if t.starts_with("VB") => Pos::Verb,
            t if t.starts_with("JJ") => Pos::Adj,
            t if t.starts_with("RB") => Pos::Adv,
            _ => Pos::Other,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Opaque sense identifier, e.g. a WordNet sense key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseKey(pub String);

impl SenseKey {
    pub fn new(key: impl Into<String>) -> Self {
        SenseKey(key.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Identity of a word whose senses are tracked: lowercased lemma plus POS.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LemmaKey {
    pub lemma: String,
    pub pos: Pos,
}

impl LemmaKey {
    pub fn new(lemma: &str, pos: Pos) -> Self {
        LemmaKey {
            lemma: lemma.to_lowercase(),
            pos,
        }
    }
}

impl fmt::Display for LemmaKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.lemma, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: Option<String>,
    pub pos: Option<Pos>,
    pub sense: Option<SenseKey>,
}

impl Token {
    /// Unannotated token with only a surface form.
    pub fn plain(surface: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            lemma: None,
            pos: None,
            sense: None,
        }
    }

    pub fn lemmatized(surface: impl Into<String>, lemma: impl Into<String>, pos: Pos) -> Self {
        Token {
            surface: surface.into(),
            lemma: Some(lemma.into()),
            pos: Some(pos),
            sense: None,
        }
    }

    pub fn annotated(
        surface: impl Into<String>,
        lemma: impl Into<String>,
        pos: Pos,
        sense: impl Into<String>,
    ) -> Self {
        Token {
            surface: surface.into(),
            lemma: Some(lemma.into()),
            pos: Some(pos),
            sense: Some(SenseKey::new(sense)),
        }
    }

    /// The key this token counts towards: its lemma, or its lowercased
    /// surface when unlemmatized, paired with its POS.
    pub fn key(&self) -> LemmaKey {
        let form = self.lemma.as_deref().unwrap_or(&self.surface);
        LemmaKey::new(form, self.pos.unwrap_or(Pos::Other))
    }

    pub fn is_punctuation(&self) -> bool {
        !self.surface.chars().any(char::is_alphanumeric)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
}

/// One annotated use of a lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    /// Index into [`AnnotatedCorpus::sentences`].
    pub sentence: usize,
    pub position: usize,
    pub sense: SenseKey,
}

/// Sense inventory entry for one lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaStats {
    /// Attested senses, sorted by sense key.
    pub senses: Vec<SenseKey>,
    pub annotated: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotatedCorpus {
    sentences: Vec<Sentence>,
    lemma_index: BTreeMap<LemmaKey, Vec<Occurrence>>,
}

impl AnnotatedCorpus {
    /// Builds a corpus, checking token invariants and id uniqueness.
    pub fn new(sentences: Vec<Sentence>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(sentences.len());
        for s in &sentences {
            if !seen.insert(s.id.as_str()) {
                return Err(CorpusError::DuplicateId(s.id.clone()));
            }
            if s.id.is_empty() {
                return Err(CorpusError::EmptyId);
            }
            if s.tokens.is_empty() {
                return Err(CorpusError::EmptySentence(s.id.clone()));
            }
            for (i, t) in s.tokens.iter().enumerate() {
                if t.surface.is_empty() {
                    return Err(CorpusError::EmptySurface { sentence: s.id.clone(), position: i });
                }
                if t.sense.is_some() && t.lemma.is_none() {
                    return Err(CorpusError::SenseWithoutLemma { sentence: s.id.clone(), position: i });
                }
            }
        }
        let lemma_index = build_index(&sentences);
        Ok(AnnotatedCorpus { sentences, lemma_index })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn lemma_index(&self) -> &BTreeMap<LemmaKey, Vec<Occurrence>> {
        &self.lemma_index
    }

    /// Per-lemma sense sequence, annotated count and total count.
    pub fn lemma_inventory(&self) -> BTreeMap<LemmaKey, LemmaStats> {
        let mut inventory: BTreeMap<LemmaKey, LemmaStats> = self
            .lemma_index
            .iter()
            .map(|(key, occurrences)| {
                let mut senses: Vec<SenseKey> = occurrences.iter().map(|o| o.sense.clone()).collect();
                senses.sort();
                senses.dedup();
                let stats = LemmaStats {
                    senses,
                    annotated: occurrences.len(),
                    total: 0,
                };
                (key.clone(), stats)
            })
            .collect();
        for token in self.sentences.iter().flat_map(|s| &s.tokens) {
            if let Some(stats) = inventory.get_mut(&token.key()) {
                stats.total += 1;
            }
        }
        inventory
    }

    pub fn write_canonical<W: Write>(&self, mut out: W) -> io::Result<()> {
        for sentence in &self.sentences {
            out.write_all(escape(&sentence.id).as_bytes())?;
            out.write_all(b"\t")?;
            for (i, token) in sentence.tokens.iter().enumerate() {
                if i > 0 {
                    out.write_all(b" ")?;
                }
                write!(
                    out,
                    "{}|{}|{}|{}",
                    escape(&token.surface),
                    token.lemma.as_deref().map(escape).unwrap_or_default(),
                    token.pos.map(Pos::as_str).unwrap_or(""),
                    token.sense.as_ref().map(|s| escape(s.as_str())).unwrap_or_default(),
                )?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("duplicate sentence id {0:?}")]
    DuplicateId(String),
    #[error("empty sentence id")]
    EmptyId,
    #[error("sentence {0:?} has no tokens")]
    EmptySentence(String),
    #[error("sentence {sentence:?}, token {position}: empty surface")]
    EmptySurface { sentence: String, position: usize },
    #[error("sentence {sentence:?}, token {position}: sense annotation without lemma")]
    SenseWithoutLemma { sentence: String, position: usize },
}

fn build_index(sentences: &[Sentence]) -> BTreeMap<LemmaKey, Vec<Occurrence>> {
    let mut index: BTreeMap<LemmaKey, Vec<Occurrence>> = BTreeMap::new();
    for (si, sentence) in sentences.iter().enumerate() {
        for (position, token) in sentence.tokens.iter().enumerate() {
            if let Some(sense) = &token.sense {
                index.entry(token.key()).or_default().push(Occurrence {
                    sentence: si,
                    position,
                    sense: sense.clone(),
                });
            }
        }
    }
    index
}

/// Reads a corpus in the canonical format.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<AnnotatedCorpus, ParseError> {
    let mut sentences = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let sentence = parse_line(line, line_no)?;
        if !ids.insert(sentence.id.clone()) {
            return Err(ParseError::DuplicateId { line: line_no, id: sentence.id });
        }
        sentences.push(sentence);
    }
    AnnotatedCorpus::new(sentences).map_err(|e| ParseError::Malformed { line: 0, message: e.to_string() })
}

pub fn parse_str(text: &str) -> Result<AnnotatedCorpus, ParseError> {
    parse_corpus(text.as_bytes())
}

fn malformed(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, message: message.into() }
}

fn parse_line(line: &str, line_no: usize) -> Result<Sentence, ParseError> {
    let (id, body) = line
        .split_once('\t')
        .ok_or_else(|| malformed(line_no, "missing TAB between sentence id and tokens"))?;
    let id = unescape(id).map_err(|m| malformed(line_no, m))?;
    if id.is_empty() {
        return Err(malformed(line_no, "empty sentence id"));
    }
    if body.is_empty() {
        return Err(malformed(line_no, "sentence has no tokens"));
    }
    let mut tokens = Vec::new();
    for (ti, raw) in body.split(' ').enumerate() {
        let token_no = ti + 1;
        let fields: Vec<&str> = raw.split('|').collect();
        if fields.len() != 4 {
            return Err(malformed(
                line_no,
                format!("token {token_no} ({raw:?}) has {} fields, expected 4", fields.len()),
            ));
        }
        let field = |s: &str| -> Result<Option<String>, ParseError> {
            if s.is_empty() {
                Ok(None)
            } else {
                unescape(s).map(Some).map_err(|m| malformed(line_no, format!("token {token_no}: {m}")))
            }
        };
        let surface = field(fields[0])?
            .ok_or_else(|| malformed(line_no, format!("token {token_no} has an empty surface")))?;
        let lemma = field(fields[1])?;
        let pos = field(fields[2])?.map(|t| Pos::from_tag(&t));
        let sense = field(fields[3])?;
        if let Some(s) = &sense {
            if s.contains(';') {
                return Err(ParseError::MultipleSenses {
                    line: line_no,
                    token: token_no,
                    sense: s.clone(),
                });
            }
            if lemma.is_none() {
                return Err(malformed(line_no, format!("token {token_no} has a sense key but no lemma")));
            }
        }
        tokens.push(Token {
            surface,
            lemma,
            pos,
            sense: sense.map(SenseKey),
        });
    }
    Ok(Sentence { id, tokens })
}

pub(crate) fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '|' => out.push_str("\\p"),
            '\t' => out.push_str("\\t"),
            ' ' => out.push_str("\\s"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(field: &str) -> Result<String, String> {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('p') => out.push('|'),
            Some('t') => out.push('\t'),
            Some('s') => out.push(' '),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(out)
}

/// Plain-text rendering of a sentence: punctuation dropped, lemma (else
/// lowercased surface) per token, multiword units split on underscores.
///
/// Output words never contain whitespace or the `@` character, which is
/// reserved for word-injection markers.
pub fn extract_plain_tokens(sentence: &Sentence) -> Vec<String> {
    let mut out = Vec::with_capacity(sentence.tokens.len());
    for token in &sentence.tokens {
        if token.is_punctuation() {
            continue;
        }
        let form = token.lemma.as_deref().unwrap_or(&token.surface).to_lowercase();
        for part in form.split(|c: char| c == '_' || c.is_whitespace()) {
            let part: String = part.chars().filter(|&c| c != '@').collect();
            if !part.is_empty() {
                out.push(part);
            }
        }
    }
    out
}

//! Plain token corpora and their vocabularies.

use std::collections::HashMap;
use std::io::{self, BufRead};
use std::path::Path;

/// One sentence per entry, tokens already lemmatized and lowercased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainCorpus {
    pub id: String,
    pub sentences: Vec<Vec<String>>,
}

impl PlainCorpus {
    pub fn new(id: impl Into<String>, sentences: Vec<Vec<String>>) -> Self {
        PlainCorpus {
            id: id.into(),
            sentences,
        }
    }

    pub fn from_lines<R: BufRead>(id: impl Into<String>, reader: R) -> io::Result<Self> {
        let mut sentences = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            if !tokens.is_empty() {
                sentences.push(tokens);
            }
        }
        Ok(PlainCorpus::new(id, sentences))
    }

    pub fn read(id: impl Into<String>, path: &Path) -> io::Result<Self> {
        let file = std::fs::File::open(path)?;
        PlainCorpus::from_lines(id, io::BufReader::new(file))
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// Word list ordered by descending frequency, ties broken alphabetically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn build<'a>(sentences: impl IntoIterator<Item = &'a Vec<String>>) -> Self {
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for s in sentences {
            for t in s {
                *freq.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut entries: Vec<(&str, u64)> = freq.into_iter().collect();
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let words: Vec<String> = entries.iter().map(|e| e.0.to_string()).collect();
        let counts = entries.iter().map(|e| e.1).collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        Vocabulary {
            words,
            counts,
            index,
        }
    }

    pub fn from_corpus(corpus: &PlainCorpus) -> Self {
        Vocabulary::build(&corpus.sentences)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    /// Sentences as id sequences.
    pub fn encode(&self, corpus: &PlainCorpus) -> Vec<Vec<u32>> {
        corpus
            .sentences
            .iter()
            .map(|s| s.iter().filter_map(|t| self.id(t)).collect())
            .collect()
    }
}

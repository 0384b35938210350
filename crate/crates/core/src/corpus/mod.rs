//! Documents, dependency parses and entity annotations, plus the
//! interchange formats every other module reads and writes.
//!
//! All character offsets index into [`Document::content`], which is the title,
//! one space, then the body. This is the PubTator offset convention; jsonl
//! documents use the same rule so a single offset scheme serves both.

mod conllu;
mod documents;
mod mentions;
mod statements;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::CharIndex;

pub use conllu::{load_parses, parse_conllu, write_parses, InvalidSentences, LoadedParses};
pub use documents::{load_documents, parse_documents, write_documents, write_pubtator};
pub use mentions::{load_external_mentions, parse_external_mentions, read_mentions, write_mentions, MENTION_HEADER};
pub use statements::{
    read_canonical_statements, read_statements, write_canonical_statements, write_statements, CANONICAL_HEADER,
    STATEMENT_HEADER,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub body: String,
    pub collection: String,
}

impl Document {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        Document { id: id.into(), title: title.into(), body: body.into(), collection: String::new() }
    }

    /// Title, a single space, then the body.
    pub fn content(&self) -> String {
        let mut s = String::with_capacity(self.title.len() + 1 + self.body.len());
        s.push_str(&self.title);
        s.push(' ');
        s.push_str(&self.body);
        s
    }

    pub(crate) fn validate_id(id: &str) -> std::result::Result<(), String> {
        if id.is_empty() {
            return Err("document id is empty".to_string());
        }
        if id.contains(['\t', '\n', '\r', '|']) {
            return Err(format!("document id {id:?} contains a tab, newline or `|`"));
        }
        Ok(())
    }
}

/// Content of one document with a character index for span slicing.
#[derive(Clone, Debug)]
pub struct DocumentText {
    pub text: String,
    index: CharIndex,
}

impl DocumentText {
    pub fn new(doc: &Document) -> Self {
        let text = doc.content();
        let index = CharIndex::new(&text);
        DocumentText { text, index }
    }

    pub fn char_len(&self) -> usize {
        self.index.char_len()
    }

    pub fn slice(&self, span: TextSpan) -> Option<&str> {
        self.index.slice(&self.text, span.start, span.end)
    }

    pub fn index(&self) -> &CharIndex {
        &self.index
    }
}

/// Documents keyed by id, each with its content precomputed.
#[derive(Clone, Debug, Default)]
pub struct DocumentStore {
    docs: BTreeMap<String, (Document, DocumentText)>,
}

impl DocumentStore {
    pub fn new(docs: impl IntoIterator<Item = Document>) -> Result<Self> {
        let mut store = DocumentStore::default();
        for doc in docs {
            let text = DocumentText::new(&doc);
            if store.docs.contains_key(&doc.id) {
                return Err(Error::Invalid(format!("duplicate document id `{}`", doc.id)));
            }
            store.docs.insert(doc.id.clone(), (doc, text));
        }
        Ok(store)
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.docs.get(id).map(|(d, _)| d)
    }

    pub fn text(&self, id: &str) -> Option<&DocumentText> {
        self.docs.get(id).map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.docs.values().map(|(d, _)| d)
    }
}

/// Half-open character range `[start, end)` into document content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TextSpan {
    pub start: usize,
    pub end: usize,
}

impl TextSpan {
    pub fn new(start: usize, end: usize) -> Self {
        TextSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &TextSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &TextSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for TextSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    /// Index of the governing token; 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub span: TextSpan,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SentenceParse {
    pub doc_id: String,
    pub sentence_index: usize,
    pub tokens: Vec<Token>,
    pub text: String,
}

impl SentenceParse {
    /// Character span from the first token start to the last token end.
    pub fn span(&self) -> TextSpan {
        match (self.tokens.first(), self.tokens.last()) {
            (Some(first), Some(last)) => TextSpan::new(first.span.start, last.span.end),
            _ => TextSpan::new(0, 0),
        }
    }

    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn root(&self) -> usize {
        self.tokens.iter().find(|t| t.head == 0).map(|t| t.index).unwrap_or(0)
    }

    /// Hops from each token to the root, indexed by `index - 1`.
    ///
    /// Only meaningful for parses that passed [`SentenceParse::validate`].
    pub fn depths(&self) -> Vec<usize> {
        let n = self.tokens.len();
        let mut depth: Vec<Option<usize>> = vec![None; n];
        for start in 1..=n {
            let mut chain = Vec::new();
            let mut cur = start;
            let known = loop {
                if cur == 0 || chain.len() > n {
                    break None;
                }
                if let Some(d) = depth[cur - 1] {
                    break Some(d);
                }
                chain.push(cur);
                cur = self.tokens[cur - 1].head;
            };
            let mut d = known.map_or(0, |d| d + 1);
            while let Some(t) = chain.pop() {
                depth[t - 1] = Some(d);
                d += 1;
            }
        }
        depth.into_iter().map(|d| d.unwrap_or(0)).collect()
    }

    /// Check the tree invariants: indices 1..n, one root, heads in range,
    /// no cycles, and ordered non-overlapping spans.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.tokens.len();
        if n == 0 {
            return Err("sentence has no tokens".to_string());
        }
        for (i, t) in self.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(format!("token {} found at position {}", t.index, i + 1));
            }
            if t.head > n {
                return Err(format!("token {} has head {} outside 0..={n}", t.index, t.head));
            }
            if t.head == t.index {
                return Err(format!("token {} is its own head", t.index));
            }
            if t.span.start >= t.span.end {
                return Err(format!("token {} has empty span {}", t.index, t.span));
            }
        }
        for pair in self.tokens.windows(2) {
            if pair[1].span.start < pair[0].span.end {
                return Err(format!("token spans {} and {} overlap or are out of order", pair[0].span, pair[1].span));
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(format!("expected exactly one root, found {roots}"));
        }
        for start in 1..=n {
            let mut cur = start;
            let mut steps = 0;
            while cur != 0 {
                cur = self.tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(format!("cyclic heads reachable from token {start}"));
                }
            }
        }
        Ok(())
    }

    /// Check that the sentence text and every token surface equal the
    /// document content at their offsets.
    pub fn validate_against(&self, doc: &DocumentText) -> std::result::Result<(), String> {
        for t in &self.tokens {
            match doc.slice(t.span) {
                Some(s) if s == t.surface => {}
                Some(s) => {
                    return Err(format!(
                        "token {} surface {:?} differs from content {:?} at {}",
                        t.index, t.surface, s, t.span
                    ))
                }
                None => return Err(format!("token {} span {} is out of bounds", t.index, t.span)),
            }
        }
        match doc.slice(self.span()) {
            Some(s) if s == self.text => Ok(()),
            _ => Err("sentence text differs from document content".to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Dictionary,
    External,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::Dictionary => "dictionary",
            Origin::External => "external",
        }
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dictionary" => Ok(Origin::Dictionary),
            "external" => Ok(Origin::External),
            other => Err(format!("unknown mention origin `{other}`")),
        }
    }
}

/// A linked text span. Field order gives the output sort order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityMention {
    pub doc_id: String,
    pub span: TextSpan,
    pub entity_type: String,
    pub entity_id: String,
    pub surface: String,
    pub origin: Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentFormat {
    Jsonl,
    Pubtator,
}

impl FromStr for DocumentFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "jsonl" => Ok(DocumentFormat::Jsonl),
            "pubtator" => Ok(DocumentFormat::Pubtator),
            other => Err(format!("unknown document format `{other}` (expected jsonl or pubtator)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationFormat {
    Pubtator,
    Tsv,
}

impl FromStr for AnnotationFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pubtator" => Ok(AnnotationFormat::Pubtator),
            "tsv" => Ok(AnnotationFormat::Tsv),
            other => Err(format!("unknown annotation format `{other}` (expected pubtator or tsv)")),
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Unescaped cells of a TSV file with a fixed header and column count,
/// paired with 1-based line numbers.
pub(crate) fn tsv_records(content: &str, source: &Path, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = crate::text::numbered_lines(content);
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => return Err(Error::format(source, 1, format!("expected header `{}`", header.replace('\t', " | ")))),
    }
    let width = header.split('\t').count();
    let mut out = Vec::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != width {
            return Err(Error::format(source, line_no, format!("expected {width} columns, found {}", cells.len())));
        }
        let cells = cells
            .into_iter()
            .map(|c| crate::text::unescape_field(c).map(|c| c.into_owned()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| Error::format(source, line_no, m))?;
        out.push((line_no, cells));
    }
    Ok(out)
}

pub(crate) fn parse_count(cell: &str, source: &Path, line: usize) -> Result<usize> {
    cell.parse().map_err(|_| Error::format(source, line, format!("invalid count `{cell}`")))
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

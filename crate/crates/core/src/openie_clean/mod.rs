//! Cleaning of externally produced OpenIE triples: predicate normalization
//! and entity filters over the noun phrases.

mod predicate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{read_file, write_file, EntityMention, SentenceParse, TextSpan};
use crate::error::{Error, Result};
use crate::statement::{Argument, Extractor, RawStatement};
use crate::text::{escape_field, is_word_char, normalize_phrase, numbered_lines, unescape_field};

pub use predicate::{lemmatize, normalize_predicate};

pub const OPENIE_HEADER: &str = "doc_id\tsentence\tsubject\tpredicate\tobject\tconfidence";

#[derive(Clone, Debug, PartialEq)]
pub struct OpenIETriple {
    pub doc_id: String,
    pub sentence: String,
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub confidence: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    None,
    Partial,
    #[default]
    Exact,
    Subject,
}

impl FilterMode {
    pub const ALL: [FilterMode; 4] = [FilterMode::None, FilterMode::Partial, FilterMode::Exact, FilterMode::Subject];

    pub fn as_str(&self) -> &'static str {
        match self {
            FilterMode::None => "none",
            FilterMode::Partial => "partial",
            FilterMode::Exact => "exact",
            FilterMode::Subject => "subject",
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FilterMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown filter mode `{s}` (expected none, partial, exact or subject)"))
    }
}

pub fn load_openie_tsv(path: &Path) -> Result<Vec<OpenIETriple>> {
    parse_openie_tsv(&read_file(path)?, path)
}

/// Rows of `doc_id, sentence, subject, predicate, object[, confidence]`. A
/// first line starting with `doc_id<TAB>` is a header.
pub fn parse_openie_tsv(content: &str, source: &Path) -> Result<Vec<OpenIETriple>> {
    let mut out = Vec::new();
    for (line_no, line) in numbered_lines(content) {
        if line.trim().is_empty() || (line_no == 1 && line.starts_with("doc_id\t")) {
            continue;
        }
        let err = |msg: String| Error::format(source, line_no, msg);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 && cols.len() != 6 {
            return Err(err(format!("expected 5 or 6 tab-separated columns, found {}", cols.len())));
        }
        let field = |i: usize, name: &str| -> Result<String> {
            let v = unescape_field(cols[i]).map_err(err)?;
            if v.trim().is_empty() {
                return Err(err(format!("empty {name}")));
            }
            Ok(v.into_owned())
        };
        let confidence = match cols.get(5).map(|c| c.trim()) {
            None | Some("") => None,
            Some(c) => {
                let v: f64 = c.parse().map_err(|_| err(format!("invalid confidence `{c}`")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(err(format!("confidence {v} outside [0, 1]")));
                }
                Some(v)
            }
        };
        let triple = OpenIETriple {
            doc_id: field(0, "doc_id")?,
            sentence: field(1, "sentence")?,
            subject: field(2, "subject")?,
            predicate: field(3, "predicate")?,
            object: field(4, "object")?,
            confidence,
        };
        let sentence = normalize_phrase(&triple.sentence);
        for (name, phrase) in [("subject", &triple.subject), ("object", &triple.object)] {
            if !sentence.contains(&normalize_phrase(phrase)) {
                log::warn!("{}:{line_no}: {name} `{phrase}` does not occur in its sentence", source.display());
            }
        }
        out.push(triple);
    }
    Ok(out)
}

pub fn write_openie_tsv(triples: &[OpenIETriple], path: &Path) -> Result<()> {
    let mut out = String::from(OPENIE_HEADER);
    out.push('\n');
    for t in triples {
        let confidence = t.confidence.map(|c| c.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            escape_field(&t.doc_id),
            escape_field(&t.sentence),
            escape_field(&t.subject),
            escape_field(&t.predicate),
            escape_field(&t.object),
            confidence
        ));
    }
    write_file(path, &out)
}

const ARTICLES: [&str; 3] = ["the", "a", "an"];

/// Case-folded, whitespace-collapsed phrase without one leading article.
pub fn exact_key(phrase: &str) -> String {
    let norm = normalize_phrase(phrase);
    match norm.split_once(' ') {
        Some((first, rest)) if ARTICLES.contains(&first) => rest.to_string(),
        _ => norm,
    }
}

/// `needle` occurs in `haystack` without cutting an alphanumeric run.
fn contains_at_boundary(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    haystack.match_indices(needle).any(|(i, m)| {
        let before = haystack[..i].chars().next_back();
        let after = haystack[i + m.len()..].chars().next();
        let first = needle.chars().next().unwrap();
        let last = needle.chars().next_back().unwrap();
        !(before.is_some_and(is_word_char) && is_word_char(first))
            && !(after.is_some_and(is_word_char) && is_word_char(last))
    })
}

/// Mentions of one document, grouped for phrase lookup.
struct DocMentions<'a> {
    /// One representative mention per `(entity_id, entity_type)`, keyed by
    /// the exact key of its surface.
    by_key: BTreeMap<String, Vec<&'a EntityMention>>,
}

impl<'a> DocMentions<'a> {
    fn new(mentions: &[&'a EntityMention], sentence: Option<TextSpan>) -> Self {
        // Prefer mentions inside the located sentence, then the earliest.
        let mut ordered: Vec<&EntityMention> = mentions.to_vec();
        ordered.sort_by_key(|m| (!sentence.is_some_and(|s| s.contains(&m.span)), m.span, m.entity_id.clone()));
        let mut by_key: BTreeMap<String, Vec<&EntityMention>> = BTreeMap::new();
        for m in ordered {
            let slot = by_key.entry(exact_key(&m.surface)).or_default();
            if !slot.iter().any(|o| o.entity_id == m.entity_id && o.entity_type == m.entity_type) {
                slot.push(m);
            }
        }
        DocMentions { by_key }
    }

    fn exact(&self, phrase: &str) -> Vec<&'a EntityMention> {
        self.by_key.get(&exact_key(phrase)).cloned().unwrap_or_default()
    }

    fn partial(&self, phrase: &str) -> Vec<&'a EntityMention> {
        let norm = normalize_phrase(phrase);
        // the longest contained surface represents its entity
        let mut keys: Vec<(&String, &Vec<&EntityMention>)> =
            self.by_key.iter().filter(|(key, _)| contains_at_boundary(&norm, key)).collect();
        keys.sort_by_key(|(key, _)| std::cmp::Reverse(key.chars().count()));
        let mut found: Vec<&EntityMention> = Vec::new();
        for (_, ms) in keys {
            for m in ms {
                if !found.iter().any(|o| o.entity_id == m.entity_id && o.entity_type == m.entity_type) {
                    found.push(m);
                }
            }
        }
        found.sort_by(|a, b| (&a.entity_type, &a.entity_id).cmp(&(&b.entity_type, &b.entity_id)));
        found
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CleanOptions {
    pub mode: FilterMode,
    pub keep_negations: bool,
}

/// Locate each triple's sentence among the parses by normalized text.
fn sentence_lookup(parses: &[SentenceParse]) -> BTreeMap<(&str, String), (usize, TextSpan)> {
    let mut map = BTreeMap::new();
    for p in parses {
        map.entry((p.doc_id.as_str(), normalize_phrase(&p.text))).or_insert((p.sentence_index, p.span()));
    }
    map
}

/// Turn triples into statements under the given entity filter. Phrases are
/// matched against mention surfaces of the same document; `parses` is only
/// used to recover sentence indices and may be empty.
pub fn apply_entity_filter(
    triples: &[OpenIETriple],
    mentions: &[EntityMention],
    parses: &[SentenceParse],
    options: &CleanOptions,
) -> Vec<RawStatement> {
    let mut by_doc: BTreeMap<&str, Vec<&EntityMention>> = BTreeMap::new();
    for m in mentions {
        by_doc.entry(&m.doc_id).or_default().push(m);
    }
    let lookup = sentence_lookup(parses);
    let mut out = Vec::new();
    for (source, t) in triples.iter().enumerate() {
        let located = lookup.get(&(t.doc_id.as_str(), normalize_phrase(&t.sentence))).copied();
        let doc_mentions =
            DocMentions::new(by_doc.get(t.doc_id.as_str()).map_or(&[][..], Vec::as_slice), located.map(|l| l.1));
        let entities =
            |ms: Vec<&EntityMention>| ms.into_iter().map(|m| Argument::Entity(m.clone())).collect::<Vec<_>>();
        let verbatim = |p: &str| vec![Argument::Phrase(p.to_string())];
        let (subjects, objects) = match options.mode {
            FilterMode::None => (verbatim(&t.subject), verbatim(&t.object)),
            FilterMode::Exact => (entities(doc_mentions.exact(&t.subject)), entities(doc_mentions.exact(&t.object))),
            FilterMode::Partial => {
                (entities(doc_mentions.partial(&t.subject)), entities(doc_mentions.partial(&t.object)))
            }
            FilterMode::Subject => (entities(doc_mentions.exact(&t.subject)), verbatim(&t.object)),
        };
        let lemma = normalize_predicate(&t.predicate, options.keep_negations);
        for subject in &subjects {
            for object in &objects {
                out.push(RawStatement {
                    doc_id: t.doc_id.clone(),
                    sentence_index: located.map(|l| l.0),
                    source: Some(source),
                    subject: subject.clone(),
                    object: object.clone(),
                    predicate_surface: t.predicate.clone(),
                    predicate_lemma: lemma.clone(),
                    trigger: None,
                    extractor: Extractor::Openie,
                    sentence: t.sentence.clone(),
                });
            }
        }
    }
    out.sort();
    out
}

/// `(doc_id, sentence_index)` of sentences overlapping at least two
/// mentions with distinct spans.
pub fn restrict_to_entity_sentences(parses: &[SentenceParse], mentions: &[EntityMention]) -> BTreeSet<(String, usize)> {
    let mut by_doc: BTreeMap<&str, Vec<TextSpan>> = BTreeMap::new();
    for m in mentions {
        by_doc.entry(&m.doc_id).or_default().push(m.span);
    }
    for spans in by_doc.values_mut() {
        spans.sort();
        spans.dedup();
    }
    parses
        .iter()
        .filter(|p| {
            let span = p.span();
            by_doc.get(p.doc_id.as_str()).is_some_and(|spans| spans.iter().filter(|s| s.overlaps(&span)).count() >= 2)
        })
        .map(|p| (p.doc_id.clone(), p.sentence_index))
        .collect()
}

/// Keep triples whose sentence is one of `sentences`. Triples whose sentence
/// cannot be located among the parses are dropped.
pub fn filter_triples_to_sentences(
    triples: &[OpenIETriple],
    parses: &[SentenceParse],
    sentences: &BTreeSet<(String, usize)>,
) -> Vec<OpenIETriple> {
    let lookup = sentence_lookup(parses);
    triples
        .iter()
        .filter(|t| {
            lookup
                .get(&(t.doc_id.as_str(), normalize_phrase(&t.sentence)))
                .is_some_and(|(i, _)| sentences.contains(&(t.doc_id.clone(), *i)))
        })
        .cloned()
        .collect()
}

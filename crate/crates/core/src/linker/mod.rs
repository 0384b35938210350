//! Dictionary-based entity linking.
//!
//! Every synonym of the vocabulary becomes a pattern of one multi-pattern
//! automaton. Matches must be token-aligned: a match may not start or end in
//! the middle of an alphanumeric run. Overlapping matches of the same entity
//! type are resolved longest-first. Two synonym classes are linked only with
//! supporting evidence in the same document:
//!
//! * *short homonyms*: a single-token synonym that is one of the tokens of a
//!   strictly longer synonym of the same entity ("Einstein" for "Albert
//!   Einstein"). Kept only if the entity is also linked via a longer surface.
//! * *abbreviations*: a single token of 2 to 10 characters with at least two
//!   uppercase letters. Kept only if [`detect_abbreviations`] paired the
//!   surface with a long form that contains a mention of the same entity.
//!
//! Mentions that license others are never themselves short homonyms or
//! abbreviations, so licensing does not chain.

mod abbreviation;

use std::collections::{BTreeMap, HashMap, HashSet};

use aho_corasick::{AhoCorasick, MatchKind};
use serde::{Deserialize, Serialize};

use crate::corpus::{DocumentText, EntityMention, Origin, SentenceParse, TextSpan};
use crate::text::{char_len, fold, fold_char, is_word_char, normalize_phrase, CharIndex};
use crate::vocabulary::{EntityEntry, EntityVocabulary, IgnoreList};

pub use abbreviation::{detect_abbreviations, AbbreviationPair};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkerOptions {
    /// Minimum character count of a matched surface.
    pub min_length: usize,
    pub case_sensitive: bool,
    pub homonym_rule: bool,
    pub abbreviation_rule: bool,
}

impl Default for LinkerOptions {
    fn default() -> Self {
        LinkerOptions { min_length: 5, case_sensitive: false, homonym_rule: true, abbreviation_rule: true }
    }
}

impl LinkerOptions {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_length == 0 {
            return Err("linker min_length must be at least 1".to_string());
        }
        Ok(())
    }
}

/// One vocabulary entity reachable through a synonym.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynonymTarget {
    pub entity_id: String,
    pub entity_type: String,
    pub short_homonym: bool,
    pub abbreviation: bool,
}

#[derive(Clone, Debug)]
struct Pattern {
    char_len: usize,
    targets: Vec<SynonymTarget>,
}

/// Immutable multi-pattern matcher over the vocabulary synonyms that survive
/// the ignore list and the length filter.
#[derive(Clone, Debug)]
pub struct Matcher {
    automaton: Option<AhoCorasick>,
    patterns: Vec<Pattern>,
    case_sensitive: bool,
}

/// Single token with 2–10 characters and at least two uppercase letters.
pub fn is_abbreviation_like(synonym: &str) -> bool {
    let n = char_len(synonym);
    (2..=10).contains(&n)
        && !synonym.chars().any(char::is_whitespace)
        && synonym.chars().filter(|c| c.is_uppercase()).count() >= 2
}

fn word_tokens(s: &str) -> HashSet<String> {
    let mut out: HashSet<String> = s.split_whitespace().map(normalize_phrase).collect();
    out.extend(s.split(|c: char| !is_word_char(c)).filter(|w| !w.is_empty()).map(fold));
    out
}

/// Single-token synonym that is a token of a strictly longer synonym of the
/// same entity.
pub fn is_short_homonym(entry: &EntityEntry, synonym: &str) -> bool {
    if synonym.split_whitespace().count() != 1 {
        return false;
    }
    let key = normalize_phrase(synonym);
    let len = char_len(synonym);
    entry.synonyms().iter().filter(|other| char_len(other) > len).any(|other| word_tokens(other).contains(&key))
}

pub fn build_matcher(vocab: &EntityVocabulary, ignore: &IgnoreList, options: &LinkerOptions) -> Matcher {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut keys: Vec<String> = Vec::new();
    let mut patterns: Vec<Pattern> = Vec::new();
    for entry in vocab.entries() {
        for synonym in entry.synonyms() {
            let n = char_len(synonym);
            if n < options.min_length || ignore.contains(synonym) {
                continue;
            }
            let key = if options.case_sensitive { synonym.clone() } else { fold(synonym) };
            let id = *index.entry(key.clone()).or_insert_with(|| {
                keys.push(key);
                patterns.push(Pattern { char_len: n, targets: Vec::new() });
                patterns.len() - 1
            });
            let target = SynonymTarget {
                entity_id: entry.entity_id.clone(),
                entity_type: entry.entity_type.clone(),
                short_homonym: is_short_homonym(entry, synonym),
                abbreviation: is_abbreviation_like(synonym),
            };
            let targets = &mut patterns[id].targets;
            match targets.iter_mut().find(|t| t.entity_id == target.entity_id && t.entity_type == target.entity_type) {
                // two synonyms of one entity can fold to the same key
                Some(existing) => {
                    existing.short_homonym &= target.short_homonym;
                    existing.abbreviation &= target.abbreviation;
                }
                None => targets.push(target),
            }
        }
    }
    if keys.is_empty() {
        log::warn!("entity vocabulary is empty after filtering; the linker will match nothing");
        return Matcher { automaton: None, patterns, case_sensitive: options.case_sensitive };
    }
    let automaton =
        AhoCorasick::builder().match_kind(MatchKind::Standard).build(&keys).expect("synonym automaton fits in memory");
    Matcher { automaton: Some(automaton), patterns, case_sensitive: options.case_sensitive }
}

impl Matcher {
    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// Every token-aligned occurrence of every pattern, with the entities it
    /// may refer to.
    pub fn find_all<'a>(&'a self, text: &str) -> Vec<(TextSpan, &'a [SynonymTarget])> {
        let Some(ac) = &self.automaton else { return Vec::new() };
        let folded;
        let haystack = if self.case_sensitive {
            text
        } else {
            folded = fold(text);
            folded.as_str()
        };
        let index = CharIndex::new(haystack);
        let chars: Vec<char> = haystack.chars().collect();
        let mut out = Vec::new();
        for m in ac.find_overlapping_iter(haystack) {
            let (Some(start), Some(end)) = (index.char_at_byte(m.start()), index.char_at_byte(m.end())) else {
                continue;
            };
            if !token_aligned(&chars, start, end) {
                continue;
            }
            let pattern = &self.patterns[m.pattern().as_usize()];
            debug_assert_eq!(pattern.char_len, end - start);
            out.push((TextSpan::new(start, end), pattern.targets.as_slice()));
        }
        out
    }
}

/// A match may not start or end inside an alphanumeric run.
pub fn token_aligned(chars: &[char], start: usize, end: usize) -> bool {
    let starts_inside = start > 0 && is_word_char(chars[start - 1]) && is_word_char(chars[start]);
    let ends_inside = end < chars.len() && is_word_char(chars[end - 1]) && is_word_char(chars[end]);
    !starts_inside && !ends_inside
}

#[derive(Clone, Debug)]
struct Candidate<'a> {
    span: TextSpan,
    target: &'a SynonymTarget,
}

/// Link one document. `parses` may be empty; when given, matches must lie
/// within a single sentence.
pub fn link_document(
    doc_id: &str,
    text: &DocumentText,
    parses: &[SentenceParse],
    matcher: &Matcher,
    options: &LinkerOptions,
) -> Vec<EntityMention> {
    let sentence_spans: Vec<TextSpan> = parses.iter().filter(|p| p.doc_id == doc_id).map(|p| p.span()).collect();
    let mut by_type: BTreeMap<&str, Vec<Candidate>> = BTreeMap::new();
    for (span, targets) in matcher.find_all(&text.text) {
        if span.len() < options.min_length {
            continue;
        }
        if !sentence_spans.is_empty() && !sentence_spans.iter().any(|s| s.contains(&span)) {
            continue;
        }
        for target in targets {
            by_type.entry(&target.entity_type).or_default().push(Candidate { span, target });
        }
    }

    let mut resolved: Vec<Candidate> = Vec::new();
    for (_, mut cands) in by_type {
        cands.sort_by(|a, b| {
            b.span
                .len()
                .cmp(&a.span.len())
                .then(a.span.start.cmp(&b.span.start))
                .then(a.target.entity_id.cmp(&b.target.entity_id))
        });
        let mut taken: Vec<TextSpan> = Vec::new();
        for c in cands {
            if taken.iter().all(|t| !t.overlaps(&c.span)) {
                taken.push(c.span);
                resolved.push(c);
            }
        }
    }

    let licensers: Vec<&Candidate> =
        resolved.iter().filter(|c| !c.target.short_homonym && !c.target.abbreviation).collect();
    let needs_pairs = options.abbreviation_rule && resolved.iter().any(|c| c.target.abbreviation);
    let pairs = if needs_pairs { detect_abbreviations(&text.text) } else { Vec::new() };

    let same_entity =
        |a: &SynonymTarget, b: &SynonymTarget| a.entity_id == b.entity_id && a.entity_type == b.entity_type;
    let surface_eq = |a: &str, b: &str| {
        if options.case_sensitive {
            a == b
        } else {
            a.chars().map(fold_char).eq(b.chars().map(fold_char))
        }
    };

    let mut out: Vec<EntityMention> = resolved
        .iter()
        .filter(|c| {
            if options.homonym_rule && c.target.short_homonym {
                let licensed = licensers.iter().any(|l| same_entity(l.target, c.target) && l.span.len() > c.span.len());
                if !licensed {
                    return false;
                }
            }
            if options.abbreviation_rule && c.target.abbreviation {
                let surface = text.slice(c.span).unwrap_or_default();
                let licensed = pairs.iter().any(|p| {
                    surface_eq(&p.abbreviation, surface)
                        && licensers.iter().any(|l| same_entity(l.target, c.target) && p.long_span.contains(&l.span))
                });
                if !licensed {
                    return false;
                }
            }
            true
        })
        .map(|c| EntityMention {
            doc_id: doc_id.to_string(),
            span: c.span,
            entity_type: c.target.entity_type.clone(),
            entity_id: c.target.entity_id.clone(),
            surface: text.slice(c.span).unwrap_or_default().to_string(),
            origin: Origin::Dictionary,
        })
        .collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyRow {
    pub surface: String,
    pub entity_id: String,
    pub count: usize,
}

/// Most frequent `(surface, entity_id)` pairs, descending by count, ties by
/// surface then id. Used to curate ignore lists between runs.
pub fn mention_frequency_report(mentions: &[EntityMention], top_k: usize) -> Vec<FrequencyRow> {
    let mut counts: HashMap<(&str, &str), usize> = HashMap::new();
    for m in mentions {
        *counts.entry((&m.surface, &m.entity_id)).or_default() += 1;
    }
    let mut rows: Vec<FrequencyRow> = counts
        .into_iter()
        .map(|((surface, entity_id), count)| FrequencyRow {
            surface: surface.to_string(),
            entity_id: entity_id.to_string(),
            count,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.count.cmp(&a.count).then_with(|| a.surface.cmp(&b.surface)).then_with(|| a.entity_id.cmp(&b.entity_id))
    });
    rows.truncate(top_k);
    rows
}

pub const FREQUENCY_HEADER: &str = "surface\tentity_id\tcount";

pub fn format_frequency_report(rows: &[FrequencyRow]) -> String {
    let mut out = String::from(FREQUENCY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            crate::text::escape_field(&r.surface),
            crate::text::escape_field(&r.entity_id),
            r.count
        ));
    }
    out
}

/// Inverse of [`format_frequency_report`].
pub fn parse_frequency_report(content: &str, source: &std::path::Path) -> crate::Result<Vec<FrequencyRow>> {
    crate::corpus::tsv_records(content, source, FREQUENCY_HEADER)?
        .into_iter()
        .map(|(line, mut cells)| {
            Ok(FrequencyRow {
                count: crate::corpus::parse_count(&cells[2], source, line)?,
                entity_id: std::mem::take(&mut cells[1]),
                surface: std::mem::take(&mut cells[0]),
            })
        })
        .collect()
}

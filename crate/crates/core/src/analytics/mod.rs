//! Complexity classification of sentences and noun phrases, and count
//! tables over extraction results.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use regex::Regex;

use crate::corpus::{parse_count, read_file, tsv_records};
use crate::corpus::{EntityMention, SentenceParse};
use crate::error::{Error, Result};
use crate::openie_clean::{apply_entity_filter, CleanOptions, FilterMode, OpenIETriple};
use crate::statement::{CanonicalStatement, RawStatement};
use crate::text::{char_len, escape_field, normalize_phrase};

fn word_list(resource: &str) -> Vec<String> {
    resource.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(|l| l.to_lowercase()).collect()
}

fn whole_word_regex(words: &[String]) -> Result<Option<Regex>> {
    if words.is_empty() {
        return Ok(None);
    }
    let alternation = words.iter().map(|w| regex::escape(w)).collect::<Vec<_>>().join("|");
    Regex::new(&format!(r"(?i)\b(?:{alternation})\b"))
        .map(Some)
        .map_err(|e| Error::Invalid(format!("word list does not form a valid pattern: {e}")))
}

/// Word lists and compiled patterns of the classifier.
#[derive(Clone, Debug)]
pub struct Classifier {
    connectives: Option<Regex>,
    prepositions: Option<Regex>,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier::new(
            &word_list(include_str!("../../resources/connectives.txt")),
            &word_list(include_str!("../../resources/prepositions.txt")),
        )
        .expect("bundled word lists compile")
    }
}

impl Classifier {
    pub fn new(connectives: &[String], prepositions: &[String]) -> Result<Self> {
        Ok(Classifier { connectives: whole_word_regex(connectives)?, prepositions: whole_word_regex(prepositions)? })
    }

    /// Replace either list with the words of a file, one per line.
    pub fn with_overrides(connectives: Option<&Path>, prepositions: Option<&Path>) -> Result<Self> {
        let load = |p: Option<&Path>, bundled: &str| -> Result<Vec<String>> {
            Ok(match p {
                Some(p) => word_list(&read_file(p)?),
                None => word_list(bundled),
            })
        };
        Classifier::new(
            &load(connectives, include_str!("../../resources/connectives.txt"))?,
            &load(prepositions, include_str!("../../resources/prepositions.txt"))?,
        )
    }

    /// Complex if a `,`, `;` or `:` separates two clauses that both contain
    /// an alphanumeric character, or if a connective occurs as a whole word.
    pub fn classify_sentence(&self, text: &str) -> bool {
        has_split_clauses(text) || self.connectives.as_ref().is_some_and(|r| r.is_match(text))
    }

    /// Complex if the phrase is complex on its own, or if its sentence is
    /// complex and the phrase either covers more than half of the sentence's
    /// characters or contains a listed preposition.
    pub fn classify_phrase(&self, phrase: &str, sentence: &str, sentence_complex: bool) -> bool {
        if self.classify_sentence(phrase) {
            return true;
        }
        if !sentence_complex {
            return false;
        }
        let sentence_len = char_len(sentence);
        let long = sentence_len > 0 && char_len(phrase) * 2 > sentence_len;
        long || self.prepositions.as_ref().is_some_and(|r| r.is_match(phrase))
    }
}

fn has_split_clauses(text: &str) -> bool {
    let clauses: Vec<bool> = text.split([',', ';', ':']).map(|c| c.chars().any(char::is_alphanumeric)).collect();
    clauses.windows(2).any(|w| w[0] && w[1])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComplexityReport {
    pub sentences_total: usize,
    pub sentences_complex: usize,
    pub subjects_total: usize,
    pub subjects_complex: usize,
    pub objects_total: usize,
    pub objects_complex: usize,
}

pub const COMPLEXITY_HEADER: &str = "unit\tcomplex\ttotal\tpercent";

fn percentage(part: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * part as f64 / total as f64)
}

impl ComplexityReport {
    pub fn sentence_percentage(&self) -> Option<f64> {
        percentage(self.sentences_complex, self.sentences_total)
    }

    pub fn subject_percentage(&self) -> Option<f64> {
        percentage(self.subjects_complex, self.subjects_total)
    }

    pub fn object_percentage(&self) -> Option<f64> {
        percentage(self.objects_complex, self.objects_total)
    }

    pub fn rows(&self) -> Vec<(&'static str, usize, usize, Option<f64>)> {
        vec![
            ("sentences", self.sentences_complex, self.sentences_total, self.sentence_percentage()),
            ("subjects", self.subjects_complex, self.subjects_total, self.subject_percentage()),
            ("objects", self.objects_complex, self.objects_total, self.object_percentage()),
        ]
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{COMPLEXITY_HEADER}\n");
        for (unit, complex, total, pct) in self.rows() {
            let pct = pct.map(|p| format!("{p:.1}")).unwrap_or_default();
            out.push_str(&format!("{unit}\t{complex}\t{total}\t{pct}\n"));
        }
        out
    }
}

/// Inverse of [`ComplexityReport::to_tsv`]; the percent column is derived
/// and only checked for presence.
pub fn parse_complexity_tsv(content: &str, source: &Path) -> Result<ComplexityReport> {
    let mut report = ComplexityReport::default();
    let mut seen = BTreeSet::new();
    for (line, cells) in tsv_records(content, source, COMPLEXITY_HEADER)? {
        let complex = parse_count(&cells[1], source, line)?;
        let total = parse_count(&cells[2], source, line)?;
        if complex > total {
            return Err(Error::format(source, line, "complex count exceeds total"));
        }
        let slot = match cells[0].as_str() {
            "sentences" => (&mut report.sentences_complex, &mut report.sentences_total),
            "subjects" => (&mut report.subjects_complex, &mut report.subjects_total),
            "objects" => (&mut report.objects_complex, &mut report.objects_total),
            other => return Err(Error::format(source, line, format!("unknown unit `{other}`"))),
        };
        if !seen.insert(cells[0].clone()) {
            return Err(Error::format(source, line, format!("duplicate unit `{}`", cells[0])));
        }
        *slot.0 = complex;
        *slot.1 = total;
    }
    Ok(report)
}

/// Classify the sentences, subjects and objects of `(doc_id, sentence,
/// subject, object)` records. A sentence shared by several records counts
/// once; every record contributes one subject and one object.
pub fn complexity_report<'a, I>(records: I, classifier: &Classifier) -> ComplexityReport
where
    I: IntoIterator<Item = (&'a str, &'a str, &'a str, &'a str)>,
{
    let mut report = ComplexityReport::default();
    let mut sentences: BTreeMap<(&str, String), bool> = BTreeMap::new();
    for (doc_id, sentence, subject, object) in records {
        let complex = *sentences
            .entry((doc_id, normalize_phrase(sentence)))
            .or_insert_with(|| classifier.classify_sentence(sentence));
        report.subjects_total += 1;
        report.objects_total += 1;
        report.subjects_complex += usize::from(classifier.classify_phrase(subject, sentence, complex));
        report.objects_complex += usize::from(classifier.classify_phrase(object, sentence, complex));
    }
    report.sentences_total = sentences.len();
    report.sentences_complex = sentences.values().filter(|c| **c).count();
    report
}

pub fn triple_complexity(triples: &[OpenIETriple], classifier: &Classifier) -> ComplexityReport {
    complexity_report(
        triples.iter().map(|t| (t.doc_id.as_str(), t.sentence.as_str(), t.subject.as_str(), t.object.as_str())),
        classifier,
    )
}

pub fn statement_complexity(statements: &[RawStatement], classifier: &Classifier) -> ComplexityReport {
    complexity_report(
        statements.iter().map(|s| (s.doc_id.as_str(), s.sentence.as_str(), s.subject.text(), s.object.text())),
        classifier,
    )
}

/// Statement and surviving-triple counts of one filter mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterCount {
    pub statements: usize,
    pub triples: usize,
}

/// Run every filter mode over the same triples.
pub fn filter_mode_counts(
    triples: &[OpenIETriple],
    mentions: &[EntityMention],
    parses: &[SentenceParse],
    keep_negations: bool,
) -> BTreeMap<FilterMode, FilterCount> {
    FilterMode::ALL
        .into_iter()
        .map(|mode| {
            let st = apply_entity_filter(triples, mentions, parses, &CleanOptions { mode, keep_negations });
            let sources: BTreeSet<Option<usize>> = st.iter().map(|s| s.source).collect();
            (mode, FilterCount { statements: st.len(), triples: sources.len() })
        })
        .collect()
}

/// One line of the extraction count table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StatRow {
    pub section: String,
    pub key: String,
    pub count: usize,
}

fn row(section: &str, key: impl Into<String>, count: usize) -> StatRow {
    StatRow { section: section.to_string(), key: key.into(), count }
}

/// Count table: statements and surviving triples per filter mode, raw
/// statements per extractor, canonical statements per mapping and per
/// relation. Missing inputs contribute zero rows, filter modes always appear.
pub fn extraction_statistics(
    filter_counts: &BTreeMap<FilterMode, FilterCount>,
    raw: &[RawStatement],
    canonical: &[CanonicalStatement],
) -> Vec<StatRow> {
    let mut rows = Vec::new();
    for mode in FilterMode::ALL {
        let c = filter_counts.get(&mode).copied().unwrap_or_default();
        rows.push(row("filter_statements", mode.as_str(), c.statements));
    }
    for mode in FilterMode::ALL {
        let c = filter_counts.get(&mode).copied().unwrap_or_default();
        rows.push(row("filter_triples", mode.as_str(), c.triples));
    }
    let mut by_extractor: BTreeMap<&str, usize> = [("openie", 0), ("pathie", 0)].into_iter().collect();
    for s in raw {
        *by_extractor.entry(s.extractor.as_str()).or_default() += 1;
    }
    rows.extend(by_extractor.into_iter().map(|(k, v)| row("extractor", k, v)));
    let mut by_mapping: BTreeMap<&str, usize> =
        [("embedding", 0), ("exact_synonym", 0), ("unmapped", 0)].into_iter().collect();
    let mut by_relation: BTreeMap<&str, usize> = BTreeMap::new();
    for c in canonical {
        *by_mapping.entry(c.mapping.as_str()).or_default() += 1;
        if let Some(r) = &c.relation {
            *by_relation.entry(r).or_default() += 1;
        }
    }
    rows.extend(by_mapping.into_iter().map(|(k, v)| row("mapping", k, v)));
    rows.extend(by_relation.into_iter().map(|(k, v)| row("relation", k, v)));
    rows
}

pub const STAT_HEADER: &str = "section\tkey\tcount";

pub fn format_stat_rows(rows: &[StatRow]) -> String {
    let mut out = format!("{STAT_HEADER}\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\t{}\n", escape_field(&r.section), escape_field(&r.key), r.count));
    }
    out
}

/// Inverse of [`format_stat_rows`].
pub fn parse_stat_rows(content: &str, source: &Path) -> Result<Vec<StatRow>> {
    tsv_records(content, source, STAT_HEADER)?
        .into_iter()
        .map(|(line, mut cells)| {
            Ok(StatRow {
                count: parse_count(&cells[2], source, line)?,
                key: std::mem::take(&mut cells[1]),
                section: std::mem::take(&mut cells[0]),
            })
        })
        .collect()
}

/// Left-aligned plain text table with a header row.
pub fn aligned_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| char_len(h)).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(char_len(cell));
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&mut header.iter().copied());
    out.push_str(&line(&mut widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str)));
    for r in rows {
        out.push_str(&line(&mut r.iter().map(String::as_str)));
    }
    out
}

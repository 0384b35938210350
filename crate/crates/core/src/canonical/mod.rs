//! Mapping of normalized predicates to the relations of a curated
//! vocabulary.
//!
//! A predicate equal to a vocabulary synonym maps directly. Otherwise, if it
//! is frequent enough in the corpus, it maps to the relation of the most
//! similar synonym in embedding space, provided the cosine similarity reaches
//! the threshold. Frequencies are counted over the whole statement set given
//! to [`canonicalize`].

mod embedding;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{parse_count, read_file, tsv_records, write_file};
use crate::error::Result;
use crate::openie_clean::normalize_predicate;
use crate::statement::{CanonicalStatement, Mapping, RawStatement};
use crate::text::{escape_field, normalize_phrase};
use crate::vocabulary::{RelationVocabulary, TypeConstraintSet};

pub use embedding::{cosine, load_embeddings, parse_embeddings, phrase_tokens, phrase_vector, EmbeddingModel};

/// Similarities closer than this count as ties.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CanonicalizationParams {
    pub min_similarity: f64,
    pub min_phrase_frequency: usize,
    pub keep_unmapped: bool,
}

impl Default for CanonicalizationParams {
    fn default() -> Self {
        CanonicalizationParams { min_similarity: 0.4, min_phrase_frequency: 2, keep_unmapped: false }
    }
}

impl CanonicalizationParams {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(0.0..=1.0).contains(&self.min_similarity) {
            return Err(format!("min_similarity {} outside [0, 1]", self.min_similarity));
        }
        Ok(())
    }
}

/// Exact-synonym lookup. A predicate matches a synonym if both agree after
/// case-folding and whitespace collapse, or after predicate normalization of
/// the synonym. Normalized keys claimed by two relations are ambiguous and
/// left out.
struct SynonymIndex<'a> {
    vocab: &'a RelationVocabulary,
    normalized: HashMap<String, Option<&'a str>>,
}

impl<'a> SynonymIndex<'a> {
    fn new(vocab: &'a RelationVocabulary) -> Self {
        let mut normalized: HashMap<String, Option<&str>> = HashMap::new();
        for (synonym, relation) in vocab.synonyms() {
            let key = normalize_predicate(synonym, true);
            if key.is_empty() {
                continue;
            }
            normalized
                .entry(key)
                .and_modify(|r| {
                    if *r != Some(relation) {
                        *r = None;
                    }
                })
                .or_insert(Some(relation));
        }
        SynonymIndex { vocab, normalized }
    }

    fn lookup(&self, predicate: &str) -> Option<&'a str> {
        self.vocab
            .relation_for(predicate)
            .or_else(|| self.normalized.get(&normalize_phrase(predicate)).copied().flatten())
    }
}

/// Synonym vectors used for nearest-neighbor mapping.
pub struct SynonymVectors<'a> {
    entries: Vec<(&'a str, &'a str, Vec<f64>)>,
}

impl<'a> SynonymVectors<'a> {
    /// Synonyms without any known token are skipped.
    pub fn new(vocab: &'a RelationVocabulary, model: &EmbeddingModel) -> Self {
        let entries =
            vocab.synonyms().filter_map(|(syn, rel)| phrase_vector(model, syn).map(|v| (rel, syn, v))).collect();
        SynonymVectors { entries }
    }

    /// Relation of the most similar synonym and the similarity. Ties within
    /// [`TIE_EPSILON`] go to the smaller relation name.
    pub fn nearest(&self, vector: &[f64]) -> Option<(&'a str, f64)> {
        let sims: Vec<(&str, f64)> =
            self.entries.iter().filter_map(|(relation, _, v)| cosine(vector, v).map(|s| (*relation, s))).collect();
        let best = sims.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
        sims.iter().filter(|(_, s)| best - s <= TIE_EPSILON).map(|(r, _)| *r).min().map(|r| (r, best))
    }
}

/// Predicate frequencies over the statement set.
pub fn predicate_frequencies(statements: &[RawStatement]) -> HashMap<&str, usize> {
    let mut counts = HashMap::new();
    for s in statements {
        *counts.entry(s.predicate_lemma.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Decide the mapping of one predicate.
fn map_predicate(
    predicate: &str,
    frequency: usize,
    synonyms: &SynonymIndex,
    vectors: Option<(&SynonymVectors, &EmbeddingModel)>,
    params: &CanonicalizationParams,
) -> (Option<String>, Mapping, Option<f64>) {
    if let Some(relation) = synonyms.lookup(predicate) {
        return (Some(relation.to_string()), Mapping::ExactSynonym, None);
    }
    if let Some((vectors, model)) = vectors {
        if frequency >= params.min_phrase_frequency {
            if let Some((relation, sim)) = phrase_vector(model, predicate).and_then(|v| vectors.nearest(&v)) {
                if sim >= params.min_similarity {
                    return (Some(relation.to_string()), Mapping::Embedding, Some(sim));
                }
            }
        }
    }
    (None, Mapping::Unmapped, None)
}

/// Map every statement's predicate. Without a model only exact synonyms map.
/// Unmapped statements are dropped unless `keep_unmapped` is set.
pub fn canonicalize(
    statements: &[RawStatement],
    vocab: &RelationVocabulary,
    model: Option<&EmbeddingModel>,
    params: &CanonicalizationParams,
) -> Vec<CanonicalStatement> {
    let frequencies = predicate_frequencies(statements);
    let index = SynonymIndex::new(vocab);
    let vectors = model.map(|m| SynonymVectors::new(vocab, m));
    let decisions: BTreeMap<&str, (Option<String>, Mapping, Option<f64>)> = frequencies
        .iter()
        .map(|(&p, &f)| (p, map_predicate(p, f, &index, vectors.as_ref().zip(model), params)))
        .collect();
    statements
        .iter()
        .filter_map(|s| {
            let (relation, mapping, similarity) = decisions[s.predicate_lemma.as_str()].clone();
            if mapping == Mapping::Unmapped && !params.keep_unmapped {
                return None;
            }
            Some(CanonicalStatement { statement: s.clone(), relation, mapping, similarity })
        })
        .collect()
}

/// Keep statements whose relation is unconstrained or whose argument types
/// are allowed.
pub fn apply_relation_type_constraints(
    statements: &[CanonicalStatement],
    constraints: &TypeConstraintSet,
) -> Vec<CanonicalStatement> {
    statements
        .iter()
        .filter(|c| match &c.relation {
            None => true,
            Some(r) => constraints
                .allows(r, c.statement.subject.entity_type(), c.statement.object.entity_type())
                .unwrap_or(true),
        })
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateStat {
    pub predicate: String,
    pub count: usize,
    /// Up to three distinct sentences, lexicographically smallest first.
    pub samples: Vec<String>,
}

pub const PREDICATE_STATS_HEADER: &str = "predicate\tcount\tsample_1\tsample_2\tsample_3";

/// Frequency table of normalized predicates, descending by count, ties by
/// predicate.
pub fn export_predicate_statistics(statements: &[RawStatement]) -> Vec<PredicateStat> {
    let mut groups: BTreeMap<&str, (usize, std::collections::BTreeSet<&str>)> = BTreeMap::new();
    for s in statements {
        let g = groups.entry(&s.predicate_lemma).or_default();
        g.0 += 1;
        g.1.insert(&s.sentence);
    }
    let mut out: Vec<PredicateStat> = groups
        .into_iter()
        .map(|(p, (count, sentences))| PredicateStat {
            predicate: p.to_string(),
            count,
            samples: sentences.into_iter().take(3).map(str::to_string).collect(),
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.predicate.cmp(&b.predicate)));
    out
}

pub fn format_predicate_statistics(stats: &[PredicateStat]) -> String {
    let mut out = String::from(PREDICATE_STATS_HEADER);
    out.push('\n');
    for s in stats {
        let mut cols = vec![escape_field(&s.predicate).into_owned(), s.count.to_string()];
        cols.extend((0..3).map(|i| s.samples.get(i).map(|x| escape_field(x).into_owned()).unwrap_or_default()));
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    out
}

pub fn write_predicate_statistics(stats: &[PredicateStat], path: &Path) -> Result<()> {
    write_file(path, &format_predicate_statistics(stats))
}

pub fn read_predicate_statistics(path: &Path) -> Result<Vec<PredicateStat>> {
    parse_predicate_statistics(&read_file(path)?, path)
}

/// Inverse of [`format_predicate_statistics`]; empty sample cells are absent
/// samples.
pub fn parse_predicate_statistics(content: &str, source: &Path) -> Result<Vec<PredicateStat>> {
    tsv_records(content, source, PREDICATE_STATS_HEADER)?
        .into_iter()
        .map(|(line, mut cells)| {
            let samples = cells.split_off(2).into_iter().filter(|s| !s.is_empty()).collect();
            Ok(PredicateStat {
                count: parse_count(&cells[1], source, line)?,
                predicate: std::mem::take(&mut cells[0]),
                samples,
            })
        })
        .collect()
}

//! Entity and relation vocabularies, ignore lists and relation type
//! constraints.
//!
//! File layouts (tab separated, one record per line, blank lines ignored):
//!
//! * entity vocabulary: `entity_id  entity_type  synonym1;synonym2;…`, the
//!   first synonym being the preferred label. An optional header row starting
//!   with `entity_id` is skipped.
//! * relation vocabulary: `relation  synonym1;synonym2;…`
//! * ignore list: one term per line.
//! * type constraints: `relation  subject_type1;…  object_type1;…`

mod sparql;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{read_file, write_file};
use crate::error::{Error, Result};
use crate::text::{collapse_whitespace, normalize_phrase};

pub use sparql::{fetch_sparql_vocab, fetch_sparql_vocab_cached, parse_sparql_tsv, HttpGet, HttpResponse, UreqClient};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityEntry {
    pub entity_id: String,
    pub entity_type: String,
    /// Whitespace-collapsed synonyms, deduplicated case-insensitively; the
    /// first one is the preferred label.
    synonyms: Vec<String>,
}

impl EntityEntry {
    /// Fails if no synonym survives trimming.
    pub fn new<I, S>(
        entity_id: impl Into<String>,
        entity_type: impl Into<String>,
        synonyms: I,
    ) -> std::result::Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entry =
            EntityEntry { entity_id: entity_id.into(), entity_type: entity_type.into(), synonyms: Vec::new() };
        for s in synonyms {
            entry.add_synonym(s.as_ref());
        }
        if entry.synonyms.is_empty() {
            return Err(format!("entity `{}` ({}) has no synonyms", entry.entity_id, entry.entity_type));
        }
        Ok(entry)
    }

    fn add_synonym(&mut self, s: &str) {
        let s = collapse_whitespace(s);
        if s.is_empty() {
            return;
        }
        let key = normalize_phrase(&s);
        if !self.synonyms.iter().any(|x| normalize_phrase(x) == key) {
            self.synonyms.push(s);
        }
    }

    pub fn synonyms(&self) -> &[String] {
        &self.synonyms
    }

    pub fn preferred_label(&self) -> &str {
        &self.synonyms[0]
    }
}

/// Entries keyed by `(entity_id, entity_type)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntityVocabulary {
    entries: BTreeMap<(String, String), EntityEntry>,
}

impl EntityVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add an entry; a second entry for the same `(id, type)` is an error.
    pub fn insert(&mut self, entry: EntityEntry) -> std::result::Result<(), String> {
        let key = (entry.entity_id.clone(), entry.entity_type.clone());
        if self.entries.contains_key(&key) {
            return Err(format!("duplicate entry for ({}, {})", key.0, key.1));
        }
        self.entries.insert(key, entry);
        Ok(())
    }

    /// Union with another vocabulary; synonyms of shared entries are merged.
    pub fn merge(&mut self, other: EntityVocabulary) {
        for (key, entry) in other.entries {
            match self.entries.get_mut(&key) {
                Some(existing) => {
                    for s in entry.synonyms {
                        existing.add_synonym(&s);
                    }
                }
                None => {
                    self.entries.insert(key, entry);
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, entity_id: &str, entity_type: &str) -> Option<&EntityEntry> {
        self.entries.get(&(entity_id.to_string(), entity_type.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &EntityEntry> {
        self.entries.values()
    }

    pub fn types(&self) -> BTreeSet<&str> {
        self.entries.values().map(|e| e.entity_type.as_str()).collect()
    }

    pub fn synonym_count(&self) -> usize {
        self.entries.values().map(|e| e.synonyms.len()).sum()
    }
}

pub fn load_entity_vocab(path: &Path) -> Result<EntityVocabulary> {
    parse_entity_vocab(&read_file(path)?, path)
}

pub fn parse_entity_vocab(content: &str, source: &Path) -> Result<EntityVocabulary> {
    let mut vocab = EntityVocabulary::new();
    for (line_no, line) in crate::text::numbered_lines(content) {
        if line.trim().is_empty() || (line_no == 1 && line.starts_with("entity_id\t")) {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::format(source, line_no, format!("expected 3 columns, found {}", cols.len())));
        }
        let (id, ty) = (cols[0].trim(), cols[1].trim());
        if id.is_empty() || ty.is_empty() {
            return Err(Error::format(source, line_no, "empty entity id or type"));
        }
        let entry = EntityEntry::new(id, ty, cols[2].split(';')).map_err(|m| Error::format(source, line_no, m))?;
        vocab.insert(entry).map_err(|m| Error::format(source, line_no, m))?;
    }
    Ok(vocab)
}

/// Write entries sorted by `(entity_id, entity_type)`, no header row.
pub fn write_entity_vocab(vocab: &EntityVocabulary, path: &Path) -> Result<()> {
    let mut out = String::new();
    for e in vocab.entries() {
        if e.synonyms.iter().any(|s| s.contains([';', '\t'])) {
            return Err(Error::Invalid(format!("entity `{}` has a synonym containing `;` or a tab", e.entity_id)));
        }
        let _ = writeln!(out, "{}\t{}\t{}", e.entity_id, e.entity_type, e.synonyms.join(";"));
    }
    write_file(path, &out)
}

/// Keep an entry of `entity_type` only if its preferred label contains
/// `required_substring`, compared case-insensitively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRule {
    pub entity_type: String,
    pub required_substring: String,
}

/// Apply label rules. Types without a rule pass through; a type with several
/// rules must satisfy all of them.
pub fn filter_entity_vocab(vocab: &EntityVocabulary, rules: &[LabelRule]) -> EntityVocabulary {
    let types = vocab.types();
    for r in rules {
        if !types.contains(r.entity_type.as_str()) {
            log::warn!("label rule for unknown entity type `{}`", r.entity_type);
        }
    }
    let entries = vocab
        .entries
        .iter()
        .filter(|(_, e)| {
            let label = crate::text::fold(e.preferred_label());
            rules
                .iter()
                .filter(|r| r.entity_type == e.entity_type)
                .all(|r| label.contains(&crate::text::fold(&r.required_substring)))
        })
        .map(|(k, e)| (k.clone(), e.clone()))
        .collect();
    EntityVocabulary { entries }
}

/// Named relations with normalized (case-folded, whitespace-collapsed)
/// synonym sets. Every relation's normalized name is one of its synonyms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationVocabulary {
    relations: BTreeMap<String, BTreeSet<String>>,
    by_synonym: BTreeMap<String, String>,
}

impl RelationVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add synonyms to a relation, creating it if needed. Fails if a synonym
    /// already belongs to another relation.
    pub fn add<I, S>(&mut self, relation: &str, synonyms: I) -> std::result::Result<(), String>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = collapse_whitespace(relation);
        if name.is_empty() {
            return Err("empty relation name".to_string());
        }
        let mut new: Vec<String> = vec![normalize_phrase(&name)];
        new.extend(synonyms.into_iter().map(|s| normalize_phrase(s.as_ref())).filter(|s| !s.is_empty()));
        for s in &new {
            if let Some(owner) = self.by_synonym.get(s) {
                if owner != &name {
                    return Err(format!("synonym `{s}` is claimed by both `{owner}` and `{name}`"));
                }
            }
        }
        let set = self.relations.entry(name.clone()).or_default();
        for s in new {
            self.by_synonym.insert(s.clone(), name.clone());
            set.insert(s);
        }
        Ok(())
    }

    /// Relation owning a phrase, after normalization.
    pub fn relation_for(&self, phrase: &str) -> Option<&str> {
        self.by_synonym.get(&normalize_phrase(phrase)).map(String::as_str)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Every `(synonym, relation)` pair, sorted by synonym.
    pub fn synonyms(&self) -> impl Iterator<Item = (&str, &str)> {
        self.by_synonym.iter().map(|(s, r)| (s.as_str(), r.as_str()))
    }

    pub fn contains_relation(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn synonym_count(&self) -> usize {
        self.by_synonym.len()
    }
}

pub fn load_relation_vocab(path: &Path) -> Result<RelationVocabulary> {
    parse_relation_vocab(&read_file(path)?, path)
}

pub fn parse_relation_vocab(content: &str, source: &Path) -> Result<RelationVocabulary> {
    let mut vocab = RelationVocabulary::new();
    for (line_no, line) in crate::text::numbered_lines(content) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::format(source, line_no, format!("expected 2 columns, found {}", cols.len())));
        }
        vocab.add(cols[0], cols[1].split(';')).map_err(|m| Error::format(source, line_no, m))?;
    }
    Ok(vocab)
}

/// Write one row per relation, synonyms in sorted order.
pub fn write_relation_vocab(vocab: &RelationVocabulary, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (relation, synonyms) in vocab.relations() {
        if relation.contains(['\t', ';']) || synonyms.iter().any(|s| s.contains(['\t', ';'])) {
            return Err(Error::Invalid(format!("relation `{relation}` has a name or synonym containing `;` or a tab")));
        }
        let _ = writeln!(out, "{relation}\t{}", synonyms.iter().cloned().collect::<Vec<_>>().join(";"));
    }
    write_file(path, &out)
}

/// Case-folded terms that the linker must never emit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IgnoreList {
    terms: BTreeSet<String>,
}

impl IgnoreList {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        IgnoreList {
            terms: terms.into_iter().map(|t| normalize_phrase(t.as_ref())).filter(|t| !t.is_empty()).collect(),
        }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(&normalize_phrase(term))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

pub fn load_ignore_list(path: &Path) -> Result<IgnoreList> {
    Ok(IgnoreList::new(read_file(path)?.lines()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeConstraint {
    pub subject_types: BTreeSet<String>,
    pub object_types: BTreeSet<String>,
}

/// Allowed subject and object entity types per relation, keyed by the
/// normalized relation name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeConstraintSet {
    constraints: BTreeMap<String, TypeConstraint>,
}

impl TypeConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<I, J, S, T>(
        &mut self,
        relation: &str,
        subject_types: I,
        object_types: J,
    ) -> std::result::Result<(), String>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let key = normalize_phrase(relation);
        let clean = |v: &str| v.trim().to_string();
        let subject_types: BTreeSet<String> =
            subject_types.into_iter().map(|s| clean(s.as_ref())).filter(|s| !s.is_empty()).collect();
        let object_types: BTreeSet<String> =
            object_types.into_iter().map(|s| clean(s.as_ref())).filter(|s| !s.is_empty()).collect();
        if key.is_empty() {
            return Err("empty relation name".to_string());
        }
        if subject_types.is_empty() || object_types.is_empty() {
            return Err(format!("relation `{relation}` needs at least one subject and one object type"));
        }
        if self.constraints.contains_key(&key) {
            return Err(format!("duplicate constraint for relation `{relation}`"));
        }
        self.constraints.insert(key, TypeConstraint { subject_types, object_types });
        Ok(())
    }

    /// Constraints keyed by normalized relation name.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &TypeConstraint)> {
        self.constraints.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn get(&self, relation: &str) -> Option<&TypeConstraint> {
        self.constraints.get(&normalize_phrase(relation))
    }

    /// `None` when the relation is unconstrained; otherwise whether the pair
    /// of types is allowed. A missing type (verbatim phrase) is never allowed.
    pub fn allows(&self, relation: &str, subject_type: Option<&str>, object_type: Option<&str>) -> Option<bool> {
        let c = self.get(relation)?;
        Some(match (subject_type, object_type) {
            (Some(s), Some(o)) => c.subject_types.contains(s) && c.object_types.contains(o),
            _ => false,
        })
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }
}

pub fn load_type_constraints(path: &Path) -> Result<TypeConstraintSet> {
    parse_type_constraints(&read_file(path)?, path)
}

pub fn parse_type_constraints(content: &str, source: &Path) -> Result<TypeConstraintSet> {
    let mut set = TypeConstraintSet::new();
    for (line_no, line) in crate::text::numbered_lines(content) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::format(source, line_no, format!("expected 3 columns, found {}", cols.len())));
        }
        set.insert(cols[0], cols[1].split(';'), cols[2].split(';')).map_err(|m| Error::format(source, line_no, m))?;
    }
    Ok(set)
}

pub fn write_type_constraints(set: &TypeConstraintSet, path: &Path) -> Result<()> {
    let mut out = String::new();
    let join = |types: &BTreeSet<String>| types.iter().cloned().collect::<Vec<_>>().join(";");
    for (relation, c) in set.iter() {
        if c.subject_types.iter().chain(&c.object_types).any(|t| t.contains(['\t', ';'])) || relation.contains('\t') {
            return Err(Error::Invalid(format!("constraint for `{relation}` contains `;` or a tab")));
        }
        let _ = writeln!(out, "{relation}\t{}\t{}", join(&c.subject_types), join(&c.object_types));
    }
    write_file(path, &out)
}

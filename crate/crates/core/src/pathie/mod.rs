//! Statement extraction along dependency paths.
//!
//! For every ordered pair of entity mentions in a sentence the tree path
//! between their anchor tokens is computed. Each verb (other than be/have) or
//! keyword on the path between the two mentions yields one statement, so a
//! pair produces its mirror as well.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use crate::corpus::{read_file, EntityMention, SentenceParse};
use crate::error::{Error, Result};
use crate::statement::{Argument, Extractor, RawStatement, Trigger};
use crate::text::{fold, normalize_phrase};
use crate::vocabulary::{RelationVocabulary, TypeConstraintSet};

const AUXILIARY_LEMMAS: [&str; 2] = ["be", "have"];
const NEGATION_LEMMAS: [&str; 4] = ["not", "n't", "never", "no"];

/// Case-folded keyword lemmas; entries may span several tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeywordSet {
    phrases: BTreeSet<Vec<String>>,
}

impl KeywordSet {
    pub fn new<I, S>(keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let phrases = keywords
            .into_iter()
            .map(|k| normalize_phrase(k.as_ref()).split(' ').map(str::to_string).collect::<Vec<_>>())
            .filter(|p| p.iter().all(|w| !w.is_empty()))
            .collect();
        KeywordSet { phrases }
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn contains(&self, phrase: &str) -> bool {
        let key: Vec<String> = normalize_phrase(phrase).split(' ').map(str::to_string).collect();
        self.phrases.contains(&key)
    }

    fn phrases(&self) -> impl Iterator<Item = &[String]> {
        self.phrases.iter().map(Vec::as_slice)
    }
}

/// One keyword or phrase per line; blank lines and `#` comments are skipped.
pub fn load_keywords(path: &Path) -> Result<KeywordSet> {
    let content = read_file(path)?;
    Ok(KeywordSet::new(content.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct PathieOptions {
    pub keep_negations: bool,
}

/// The overlapping token closest to the root; ties go to the smaller index.
pub fn anchor_token(mention: &EntityMention, parse: &SentenceParse, depths: &[usize]) -> Result<usize> {
    parse
        .tokens
        .iter()
        .filter(|t| t.span.overlaps(&mention.span))
        .min_by_key(|t| (depths[t.index - 1], t.index))
        .map(|t| t.index)
        .ok_or_else(|| {
            Error::Invalid(format!(
                "mention `{}` at {} does not overlap any token of sentence {} in `{}`",
                mention.surface, mention.span, parse.sentence_index, parse.doc_id
            ))
        })
}

/// Token indices from `a` to `b` through their lowest common ancestor,
/// endpoints included.
pub fn tree_path(parse: &SentenceParse, depths: &[usize], a: usize, b: usize) -> Vec<usize> {
    let head = |i: usize| parse.tokens[i - 1].head;
    let (mut x, mut y) = (a, b);
    let mut up = vec![x];
    let mut down = vec![y];
    while depths[x - 1] > depths[y - 1] {
        x = head(x);
        up.push(x);
    }
    while depths[y - 1] > depths[x - 1] {
        y = head(y);
        down.push(y);
    }
    while x != y {
        x = head(x);
        y = head(y);
        up.push(x);
        down.push(y);
    }
    down.pop();
    up.extend(down.into_iter().rev());
    up
}

/// A contiguous token range `start..=end` acting as predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TriggerSpan {
    start: usize,
    end: usize,
    kind: Trigger,
}

/// Keyword occurrences in the sentence, longest first at each position and
/// without overlaps. Multi-word keywords match contiguous lemma sequences.
fn keyword_occurrences(parse: &SentenceParse, keywords: &KeywordSet) -> Vec<TriggerSpan> {
    let lemmas: Vec<String> = parse.tokens.iter().map(|t| fold(&t.lemma)).collect();
    let mut found: Vec<TriggerSpan> = Vec::new();
    for phrase in keywords.phrases() {
        let n = phrase.len();
        if n > lemmas.len() {
            continue;
        }
        for start in 0..=lemmas.len() - n {
            if lemmas[start..start + n] == *phrase {
                found.push(TriggerSpan { start: start + 1, end: start + n, kind: Trigger::Keyword });
            }
        }
    }
    found.sort_by(|a, b| (b.end - b.start).cmp(&(a.end - a.start)).then(a.start.cmp(&b.start)));
    let mut kept: Vec<TriggerSpan> = Vec::new();
    for f in found {
        if kept.iter().all(|k| f.end < k.start || f.start > k.end) {
            kept.push(f);
        }
    }
    kept.sort();
    kept
}

fn is_verb_trigger(parse: &SentenceParse, index: usize) -> bool {
    let t = parse.token(index);
    t.upos == "VERB" && !AUXILIARY_LEMMAS.contains(&fold(&t.lemma).as_str())
}

fn is_negated(parse: &SentenceParse, trigger: &TriggerSpan) -> bool {
    parse.tokens.iter().any(|t| {
        (trigger.start..=trigger.end).contains(&t.head)
            && !(trigger.start..=trigger.end).contains(&t.index)
            && (t.deprel == "neg" || NEGATION_LEMMAS.contains(&fold(&t.lemma).as_str()))
    })
}

/// Extract statements from one sentence. `mentions` may contain mentions of
/// other sentences or documents; only those inside the sentence are used.
pub fn extract_pathie(
    parse: &SentenceParse,
    mentions: &[EntityMention],
    keywords: &KeywordSet,
    options: &PathieOptions,
) -> Result<Vec<RawStatement>> {
    let sentence_span = parse.span();
    let mut inside: Vec<&EntityMention> =
        mentions.iter().filter(|m| m.doc_id == parse.doc_id && sentence_span.contains(&m.span)).collect();
    inside.sort();
    inside.dedup();
    if inside.len() < 2 {
        return Ok(Vec::new());
    }
    let depths = parse.depths();
    let anchors = inside.iter().map(|m| anchor_token(m, parse, &depths)).collect::<Result<Vec<_>>>()?;
    let keyword_spans = keyword_occurrences(parse, keywords);

    let mut out = Vec::new();
    for (i, subject) in inside.iter().enumerate() {
        for (j, object) in inside.iter().enumerate() {
            if i == j || subject.span == object.span {
                continue;
            }
            let path = tree_path(parse, &depths, anchors[i], anchors[j]);
            for trigger in path_triggers(parse, &path, subject, object, &keyword_spans) {
                let negated = is_negated(parse, &trigger);
                if negated && !options.keep_negations {
                    continue;
                }
                let tokens = &parse.tokens[trigger.start - 1..trigger.end];
                let mut surface = tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
                let mut lemma = tokens.iter().map(|t| fold(&t.lemma)).collect::<Vec<_>>().join(" ");
                if negated {
                    surface.insert_str(0, "not ");
                    lemma.insert_str(0, "not ");
                }
                out.push(RawStatement {
                    doc_id: parse.doc_id.clone(),
                    sentence_index: Some(parse.sentence_index),
                    source: None,
                    subject: Argument::Entity((*subject).clone()),
                    object: Argument::Entity((*object).clone()),
                    predicate_surface: surface,
                    predicate_lemma: lemma,
                    trigger: Some(trigger.kind),
                    extractor: Extractor::Pathie,
                    sentence: parse.text.clone(),
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Triggers on the path strictly between the two mentions. Tokens inside
/// either mention never trigger. A verb covered by a keyword occurrence is
/// reported once, as the keyword.
fn path_triggers(
    parse: &SentenceParse,
    path: &[usize],
    subject: &EntityMention,
    object: &EntityMention,
    keyword_spans: &[TriggerSpan],
) -> Vec<TriggerSpan> {
    let interior: Vec<usize> = path
        .iter()
        .copied()
        .filter(|&i| {
            let span = parse.token(i).span;
            !span.overlaps(&subject.span) && !span.overlaps(&object.span)
        })
        .collect();
    let on_path: HashSet<usize> = interior.iter().copied().collect();
    let mut triggers: BTreeSet<TriggerSpan> = BTreeSet::new();
    for k in keyword_spans {
        if (k.start..=k.end).any(|i| on_path.contains(&i)) {
            triggers.insert(*k);
        }
    }
    for &i in &interior {
        let covered = keyword_spans.iter().any(|k| (k.start..=k.end).contains(&i));
        if !covered && is_verb_trigger(parse, i) {
            triggers.insert(TriggerSpan { start: i, end: i, kind: Trigger::Verb });
        }
    }
    triggers.into_iter().collect()
}

/// Extract over many sentences in parallel; the result is sorted.
pub fn extract_corpus(
    parses: &[SentenceParse],
    mentions: &[EntityMention],
    keywords: &KeywordSet,
    options: &PathieOptions,
) -> Result<Vec<RawStatement>> {
    use rayon::prelude::*;
    use std::collections::BTreeMap;

    let mut by_doc: BTreeMap<&str, Vec<EntityMention>> = BTreeMap::new();
    for m in mentions {
        by_doc.entry(&m.doc_id).or_default().push(m.clone());
    }
    let empty = Vec::new();
    let chunks = parses
        .par_iter()
        .map(|p| extract_pathie(p, by_doc.get(p.doc_id.as_str()).unwrap_or(&empty), keywords, options))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<RawStatement> = chunks.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

/// Keep statements whose argument types are allowed for the relation their
/// predicate maps to. Predicates without a constrained relation pass.
pub fn filter_statements_by_type(
    statements: &[RawStatement],
    relations: &RelationVocabulary,
    constraints: &TypeConstraintSet,
) -> Vec<RawStatement> {
    statements
        .iter()
        .filter(|s| {
            let Some(relation) = relations.relation_for(&s.predicate_lemma) else {
                return true;
            };
            constraints.allows(relation, s.subject.entity_type(), s.object.entity_type()).unwrap_or(true)
        })
        .cloned()
        .collect()
}

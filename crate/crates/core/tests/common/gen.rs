//! Random valid instances of every file schema.

use ietk::analytics::{ComplexityReport, StatRow};
use ietk::canonical::PredicateStat;
use ietk::corpus::{Document, EntityMention, Origin, SentenceParse, TextSpan};
use ietk::linker::FrequencyRow;
use ietk::openie_clean::OpenIETriple;
use ietk::statement::{Argument, CanonicalStatement, Extractor, Mapping, RawStatement, Trigger};
use ietk::vocabulary::{EntityEntry, EntityVocabulary, RelationVocabulary, TypeConstraintSet};
use rand::Rng;

const ALPHABET: &[char] = &[
    'a', 'b', 'c', 'x', 'y', 'z', 'A', 'Q', 'Z', '0', '7', 'é', 'ü', 'ß', '中', 'Ω', '-', '\'', '.', ',', '(', ')', '|',
];
const HOSTILE: &[char] = &['\t', '\n', '\r', '\\', ';', '"', ' '];

pub fn word(rng: &mut impl Rng, max: usize) -> String {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
}

/// Words joined by single spaces.
pub fn phrase(rng: &mut impl Rng, max_words: usize) -> String {
    let n = rng.gen_range(1..=max_words);
    (0..n).map(|_| word(rng, 8)).collect::<Vec<_>>().join(" ")
}

/// Arbitrary text including characters that need escaping.
pub fn free_text(rng: &mut impl Rng, max: usize) -> String {
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.15) {
                HOSTILE[rng.gen_range(0..HOSTILE.len())]
            } else {
                ALPHABET[rng.gen_range(0..ALPHABET.len())]
            }
        })
        .collect()
}

pub fn ident(rng: &mut impl Rng, prefix: &str) -> String {
    format!("{prefix}{}", rng.gen_range(0..100_000))
}

pub fn documents(rng: &mut impl Rng, line_breaks: bool) -> Vec<Document> {
    let n = rng.gen_range(1..6);
    (0..n)
        .map(|i| {
            let mut title = phrase(rng, 6);
            let mut body = phrase(rng, 30);
            if line_breaks && rng.gen_bool(0.3) {
                title.push('\n');
                body = format!("{body}\t\"quoted\" \\ end\r\n");
            }
            Document::new(format!("doc{i}_{}", rng.gen_range(0..1000)), title, body)
        })
        .collect()
}

pub fn parses(rng: &mut impl Rng) -> Vec<SentenceParse> {
    let n = rng.gen_range(1..5);
    (0..n)
        .map(|s| {
            let size = rng.gen_range(1..15);
            let mut p = super::random_tree(rng, size);
            let mut offset = rng.gen_range(0..50);
            for t in &mut p.tokens {
                t.surface = word(rng, 6);
                t.lemma = word(rng, 6);
                t.upos = ["NOUN", "VERB", "ADP", "PROPN"][rng.gen_range(0..4)].to_string();
                let len = t.surface.chars().count();
                t.span = TextSpan::new(offset, offset + len);
                offset += len + rng.gen_range(1..3);
            }
            let start = p.tokens[0].span.start;
            let mut text = String::new();
            for t in &p.tokens {
                while text.chars().count() < t.span.start - start {
                    text.push(' ');
                }
                text.push_str(&t.surface);
            }
            p.text = text;
            p.doc_id = format!("d{}", rng.gen_range(0..3));
            p.sentence_index = s;
            p
        })
        .collect()
}

pub fn mention(rng: &mut impl Rng, doc_id: &str) -> EntityMention {
    let start = rng.gen_range(0..500);
    let surface = free_text(rng, 12);
    EntityMention {
        doc_id: doc_id.to_string(),
        span: TextSpan::new(start, start + surface.chars().count()),
        entity_type: ident(rng, "T"),
        entity_id: free_text(rng, 6),
        surface,
        origin: if rng.gen_bool(0.5) { Origin::Dictionary } else { Origin::External },
    }
}

pub fn mentions(rng: &mut impl Rng) -> Vec<EntityMention> {
    let n = rng.gen_range(0..20);
    (0..n)
        .map(|_| {
            let doc = free_text(rng, 5);
            mention(rng, &doc)
        })
        .collect()
}

fn argument(rng: &mut impl Rng, doc_id: &str) -> Argument {
    if rng.gen_bool(0.6) {
        Argument::Entity(mention(rng, doc_id))
    } else {
        Argument::Phrase(free_text(rng, 20))
    }
}

pub fn raw_statement(rng: &mut impl Rng) -> RawStatement {
    let doc_id = free_text(rng, 5);
    let pathie = rng.gen_bool(0.5);
    RawStatement {
        sentence_index: rng.gen_bool(0.8).then(|| rng.gen_range(0..40)),
        source: (!pathie).then(|| rng.gen_range(0..1000)),
        subject: argument(rng, &doc_id),
        object: argument(rng, &doc_id),
        predicate_surface: free_text(rng, 15),
        predicate_lemma: free_text(rng, 15),
        trigger: pathie.then(|| if rng.gen_bool(0.5) { Trigger::Verb } else { Trigger::Keyword }),
        extractor: if pathie { Extractor::Pathie } else { Extractor::Openie },
        sentence: free_text(rng, 60),
        doc_id,
    }
}

pub fn raw_statements(rng: &mut impl Rng) -> Vec<RawStatement> {
    let n = rng.gen_range(0..15);
    (0..n).map(|_| raw_statement(rng)).collect()
}

pub fn canonical_statements(rng: &mut impl Rng) -> Vec<CanonicalStatement> {
    let n = rng.gen_range(0..15);
    (0..n)
        .map(|_| {
            let mapping = [Mapping::ExactSynonym, Mapping::Embedding, Mapping::Unmapped][rng.gen_range(0..3)];
            CanonicalStatement {
                statement: raw_statement(rng),
                relation: (mapping != Mapping::Unmapped).then(|| free_text(rng, 12)),
                mapping,
                similarity: (mapping == Mapping::Embedding).then(|| rng.gen_range(-1.0..=1.0)),
            }
        })
        .collect()
}

fn nonblank(rng: &mut impl Rng, max: usize) -> String {
    loop {
        let s = free_text(rng, max);
        if !s.trim().is_empty() {
            return s;
        }
    }
}

fn type_list(rng: &mut impl Rng) -> Vec<String> {
    (0..rng.gen_range(1..4)).map(|_| ident(rng, "T")).collect()
}

pub fn triples(rng: &mut impl Rng) -> Vec<OpenIETriple> {
    let n = rng.gen_range(0..15);
    (0..n)
        .map(|_| OpenIETriple {
            doc_id: nonblank(rng, 6),
            sentence: nonblank(rng, 60),
            subject: nonblank(rng, 15),
            predicate: nonblank(rng, 10),
            object: nonblank(rng, 15),
            confidence: rng.gen_bool(0.7).then(|| rng.gen_range(0.0..=1.0)),
        })
        .collect()
}

pub fn entity_vocab(rng: &mut impl Rng) -> EntityVocabulary {
    let mut v = EntityVocabulary::new();
    for _ in 0..rng.gen_range(0..15) {
        let synonyms: Vec<String> = (0..rng.gen_range(1..5)).map(|_| phrase(rng, 3)).collect();
        let entry = EntityEntry::new(ident(rng, "Q"), ident(rng, "T"), &synonyms).unwrap();
        let _ = v.insert(entry);
    }
    v
}

pub fn relation_vocab(rng: &mut impl Rng) -> RelationVocabulary {
    let mut v = RelationVocabulary::new();
    for _ in 0..rng.gen_range(0..8) {
        let name = phrase(rng, 2);
        let synonyms: Vec<String> = (0..rng.gen_range(0..6)).map(|_| phrase(rng, 3)).collect();
        // a synonym collision with another relation is rejected; skip it
        let _ = v.add(&name, &synonyms);
    }
    v
}

pub fn type_constraints(rng: &mut impl Rng) -> TypeConstraintSet {
    let mut c = TypeConstraintSet::new();
    for _ in 0..rng.gen_range(0..8) {
        let (s, o) = (type_list(rng), type_list(rng));
        let _ = c.insert(&phrase(rng, 2), s, o);
    }
    c
}

pub fn predicate_stats(rng: &mut impl Rng) -> Vec<PredicateStat> {
    (0..rng.gen_range(0..10))
        .map(|_| PredicateStat {
            predicate: free_text(rng, 15),
            count: rng.gen_range(1..10_000),
            samples: (0..rng.gen_range(0..=3)).map(|_| free_text(rng, 40)).collect(),
        })
        .collect()
}

pub fn frequency_rows(rng: &mut impl Rng) -> Vec<FrequencyRow> {
    (0..rng.gen_range(0..10))
        .map(|_| FrequencyRow {
            surface: free_text(rng, 15),
            entity_id: free_text(rng, 6),
            count: rng.gen_range(1..500),
        })
        .collect()
}

pub fn stat_rows(rng: &mut impl Rng) -> Vec<StatRow> {
    (0..rng.gen_range(0..10))
        .map(|_| StatRow { section: free_text(rng, 10), key: free_text(rng, 10), count: rng.gen_range(0..10_000) })
        .collect()
}

pub fn complexity(rng: &mut impl Rng) -> ComplexityReport {
    let mut pair = || {
        let total = rng.gen_range(0..1000);
        (rng.gen_range(0..=total), total)
    };
    let ((sc, st), (uc, ut), (oc, ot)) = (pair(), pair(), pair());
    ComplexityReport {
        sentences_total: st,
        sentences_complex: sc,
        subjects_total: ut,
        subjects_complex: uc,
        objects_total: ot,
        objects_complex: oc,
    }
}

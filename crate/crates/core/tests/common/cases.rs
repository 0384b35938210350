//! Random inputs and independent reference answers for the property checks.

use std::collections::BTreeMap;

use ietk::canonical::EmbeddingModel;
use ietk::corpus::{EntityMention, Origin, SentenceParse, TextSpan, Token};
use ietk::openie_clean::{normalize_predicate, OpenIETriple};
use ietk::statement::{Argument, Extractor, RawStatement};
use ietk::vocabulary::RelationVocabulary;
use rand::Rng;

/// A verb root with `n` noun children, each child a mention of its own entity.
pub fn star_sentence(n: usize) -> (SentenceParse, Vec<EntityMention>) {
    let mut surfaces = vec![("treats".to_string(), "treat", "VERB")];
    surfaces.extend((0..n).map(|i| (format!("ent{i}"), "ent", "NOUN")));
    let mut tokens = Vec::new();
    let mut mentions = Vec::new();
    let mut offset = 0;
    for (i, (surface, lemma, upos)) in surfaces.iter().enumerate() {
        let span = TextSpan::new(offset, offset + surface.len());
        tokens.push(Token {
            index: i + 1,
            surface: surface.clone(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            head: if i == 0 { 0 } else { 1 },
            deprel: if i == 0 { "root".into() } else { "obj".into() },
            span,
        });
        if i > 0 {
            mentions.push(EntityMention {
                doc_id: "s".into(),
                span,
                entity_type: "Thing".into(),
                entity_id: format!("E{i}"),
                surface: surface.clone(),
                origin: Origin::Dictionary,
            });
        }
        offset += surface.len() + 1;
    }
    let text = surfaces.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(" ");
    let parse = SentenceParse { doc_id: "s".into(), sentence_index: 0, tokens, text };
    parse.validate().unwrap();
    (parse, mentions)
}

const ENTITY_SURFACES: [&str; 10] =
    ["alpha", "alpha beta", "beta", "gamma receptor", "Iris", "delta-9", "omega factor", "the Council", "X1", "zeta"];
const FILLER_PHRASES: [&str; 6] = ["it", "the results", "levels", "a new method", "many patients", "this"];

fn phrase_for(rng: &mut impl Rng, surfaces: &[&str]) -> String {
    if surfaces.is_empty() || rng.gen_bool(0.25) {
        return FILLER_PHRASES[rng.gen_range(0..FILLER_PHRASES.len())].to_string();
    }
    let s = surfaces[rng.gen_range(0..surfaces.len())];
    match rng.gen_range(0..6) {
        0 => format!("the {s}"),
        1 => s.to_uppercase(),
        2 => format!("levels of {s} in blood"),
        3 => format!("{s}s"),
        4 => format!("{s}  and {}", FILLER_PHRASES[rng.gen_range(0..FILLER_PHRASES.len())]),
        _ => s.to_string(),
    }
}

/// Mentions over a few documents and triples whose arguments are exact,
/// embedded, inflected or unrelated variants of the mention surfaces.
pub fn filter_corpus(rng: &mut impl Rng, n_triples: usize) -> (Vec<EntityMention>, Vec<OpenIETriple>) {
    let docs = 5;
    let mut mentions = Vec::new();
    let mut per_doc: Vec<Vec<&str>> = vec![Vec::new(); docs];
    for (d, surfaces) in per_doc.iter_mut().enumerate() {
        let mut offset = 0;
        for _ in 0..rng.gen_range(0..6) {
            let idx = rng.gen_range(0..ENTITY_SURFACES.len());
            let surface = ENTITY_SURFACES[idx];
            let len = surface.chars().count();
            mentions.push(EntityMention {
                doc_id: format!("d{d}"),
                span: TextSpan::new(offset, offset + len),
                entity_type: if idx % 3 == 0 { "A".into() } else { "B".into() },
                // a few surfaces share an entity
                entity_id: format!("E{}", idx / 2),
                surface: surface.to_string(),
                origin: Origin::Dictionary,
            });
            surfaces.push(surface);
            offset += len + rng.gen_range(1..20);
        }
    }
    let triples = (0..n_triples)
        .map(|_| {
            let d = rng.gen_range(0..docs);
            OpenIETriple {
                doc_id: format!("d{d}"),
                sentence: format!("sentence {}", rng.gen_range(0..50)),
                subject: phrase_for(rng, &per_doc[d]),
                predicate: ["treats", "is associated with", "does not bind"][rng.gen_range(0..3)].to_string(),
                object: phrase_for(rng, &per_doc[d]),
                confidence: None,
            }
        })
        .collect();
    (mentions, triples)
}

pub struct CanonicalCase {
    pub vocab: RelationVocabulary,
    pub model: EmbeddingModel,
    pub statements: Vec<RawStatement>,
}

const DIM: usize = 8;

/// `relations` relations over a pool of synthetic tokens, plus statements
/// over `predicates` distinct predicate phrases (some exact synonyms, some
/// with unknown tokens).
pub fn canonical_case(rng: &mut impl Rng, relations: usize, predicates: usize) -> CanonicalCase {
    let pool: Vec<String> = (0..40).map(|i| format!("tok{i}")).collect();
    let model = EmbeddingModel::new(
        DIM,
        pool.iter().map(|t| (t.clone(), (0..DIM).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>())),
    )
    .unwrap();
    let mut vocab = RelationVocabulary::new();
    let mut all_synonyms = Vec::new();
    for r in 0..relations {
        let mut synonyms = Vec::new();
        while synonyms.len() < 3 {
            let n = rng.gen_range(1..=2);
            let syn = (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect::<Vec<_>>().join(" ");
            assert_eq!(normalize_predicate(&syn, true), syn, "synonyms must be normalization-stable");
            if !all_synonyms.contains(&syn) {
                all_synonyms.push(syn.clone());
                synonyms.push(syn);
            }
        }
        vocab.add(&format!("rel{r}"), &synonyms).unwrap();
    }
    let mut phrases: Vec<String> = Vec::new();
    while phrases.len() < predicates {
        let p = if rng.gen_bool(0.15) {
            all_synonyms[rng.gen_range(0..all_synonyms.len())].to_uppercase()
        } else {
            let n = rng.gen_range(1..=3);
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        "unknownword".to_string()
                    } else {
                        pool[rng.gen_range(0..pool.len())].clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        if !phrases.contains(&p) {
            phrases.push(p);
        }
    }
    let mut statements = Vec::new();
    for p in &phrases {
        for _ in 0..rng.gen_range(1..=3) {
            statements.push(RawStatement {
                doc_id: "c".into(),
                sentence_index: Some(0),
                source: None,
                subject: Argument::Phrase("s".into()),
                object: Argument::Phrase("o".into()),
                predicate_surface: p.clone(),
                predicate_lemma: p.clone(),
                trigger: None,
                extractor: Extractor::Openie,
                sentence: "x".into(),
            });
        }
    }
    CanonicalCase { vocab, model, statements }
}

/// Reference mapping of every predicate: exact synonym first, otherwise the
/// relation of the most similar synonym by exhaustive cosine search.
pub fn canonical_oracle(
    case: &CanonicalCase,
    min_similarity: f64,
    min_frequency: usize,
) -> BTreeMap<String, Option<(String, Option<f64>)>> {
    let tokens = |p: &str| -> Vec<String> { p.to_lowercase().split_whitespace().map(str::to_string).collect() };
    let mean = |p: &str| -> Option<Vec<f64>> {
        let known: Vec<&[f64]> = tokens(p).iter().filter_map(|t| case.model.get(t)).collect();
        if known.is_empty() {
            return None;
        }
        Some((0..DIM).map(|i| known.iter().map(|v| v[i]).sum::<f64>() / known.len() as f64).collect())
    };
    let cos = |a: &[f64], b: &[f64]| {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        dot / (a.iter().map(|x| x * x).sum::<f64>().sqrt() * b.iter().map(|x| x * x).sum::<f64>().sqrt())
    };
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &case.statements {
        *freq.entry(&s.predicate_lemma).or_default() += 1;
    }
    let mut out = BTreeMap::new();
    for (p, f) in freq {
        let folded = tokens(p).join(" ");
        let exact = case.vocab.relations().find(|(_, syns)| syns.contains(&folded)).map(|(r, _)| r.to_string());
        let decision = if let Some(r) = exact {
            Some((r, None))
        } else if f < min_frequency {
            None
        } else {
            mean(p).and_then(|v| {
                let mut best: Option<(String, f64)> = None;
                for (r, syns) in case.vocab.relations() {
                    // synonyms without a known token have no vector
                    for w in syns.iter().filter_map(|syn| mean(syn)) {
                        let s = cos(&v, &w);
                        // relations iterate in name order, so a strict improvement keeps the smaller name on ties
                        if best.as_ref().is_none_or(|b| s > b.1 + 1e-12) {
                            best = Some((r.to_string(), s));
                        }
                    }
                }
                best.filter(|b| b.1 >= min_similarity).map(|(r, s)| (r, Some(s)))
            })
        };
        out.insert(p.to_string(), decision);
    }
    out
}

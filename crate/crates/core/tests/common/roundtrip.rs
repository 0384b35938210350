//! load(write(x)) = x checks, one per file schema.

use std::fmt::Debug;
use std::path::Path;

use ietk::analytics::{format_stat_rows, parse_complexity_tsv, parse_stat_rows};
use ietk::canonical::{read_predicate_statistics, write_predicate_statistics};
use ietk::corpus::{
    load_documents, load_parses, read_canonical_statements, read_mentions, read_statements, write_canonical_statements,
    write_documents, write_mentions, write_parses, write_statements, DocumentFormat, InvalidSentences,
};
use ietk::linker::{format_frequency_report, parse_frequency_report};
use ietk::openie_clean::{load_openie_tsv, write_openie_tsv};
use ietk::vocabulary::{
    load_entity_vocab, load_relation_vocab, load_type_constraints, write_entity_vocab, write_relation_vocab,
    write_type_constraints,
};
use rand::rngs::StdRng;

use super::gen;

pub type Check = fn(&mut StdRng, &Path) -> Result<(), String>;

pub const SCHEMAS: &[(&str, Check)] = &[
    ("pubtator", pubtator),
    ("jsonl", jsonl),
    ("conllu", conllu),
    ("mentions", mentions),
    ("statements", statements),
    ("canonical", canonical),
    ("openie", openie),
    ("entity_vocab", entity_vocab),
    ("relation_vocab", relation_vocab),
    ("type_constraints", type_constraints),
    ("predicate_statistics", predicate_statistics),
    ("mention_frequency", mention_frequency),
    ("extraction_statistics", extraction_statistics),
    ("complexity", complexity),
];

fn ok<E: std::fmt::Display, T>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn expect_eq<T: PartialEq + Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: reloaded {got:?}\nexpected {want:?}"))
    }
}

/// Same elements with the same multiplicities, in any order.
fn expect_permutation<T: PartialEq + Debug + Clone>(what: &str, got: Vec<T>, want: &[T]) -> Result<(), String> {
    let mut rest = want.to_vec();
    if got.len() != rest.len() {
        return Err(format!("{what}: {} records reloaded, {} written", got.len(), rest.len()));
    }
    for g in &got {
        match rest.iter().position(|w| w == g) {
            Some(i) => {
                rest.swap_remove(i);
            }
            None => return Err(format!("{what}: reloaded record not written: {g:?}")),
        }
    }
    Ok(())
}

fn sorted_by_id(mut docs: Vec<ietk::corpus::Document>) -> Vec<ietk::corpus::Document> {
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    docs
}

fn pubtator(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let docs = gen::documents(rng, false);
    let path = dir.join("docs.pubtator");
    ok(write_documents(&docs, &path, DocumentFormat::Pubtator))?;
    expect_eq("pubtator", ok(load_documents(&path, DocumentFormat::Pubtator))?, sorted_by_id(docs))
}

fn jsonl(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let docs = gen::documents(rng, true);
    let path = dir.join("docs.jsonl");
    ok(write_documents(&docs, &path, DocumentFormat::Jsonl))?;
    expect_eq("jsonl", ok(load_documents(&path, DocumentFormat::Jsonl))?, sorted_by_id(docs))
}

fn conllu(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let parses = gen::parses(rng);
    let path = dir.join("parses.conllu");
    ok(write_parses(&parses, &path))?;
    let loaded = ok(load_parses(&path, InvalidSentences::Abort))?;
    let mut want = parses;
    want.sort_by(|a, b| (&a.doc_id, a.sentence_index).cmp(&(&b.doc_id, b.sentence_index)));
    expect_eq("conllu", loaded.sentences, want)
}

fn mentions(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let ms = gen::mentions(rng);
    let path = dir.join("mentions.tsv");
    ok(write_mentions(&ms, &path))?;
    let mut want = ms;
    want.sort();
    expect_eq("mentions", ok(read_mentions(&path))?, want)
}

fn statements(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let st = gen::raw_statements(rng);
    let path = dir.join("statements.tsv");
    ok(write_statements(&st, &path))?;
    let mut want = st;
    want.sort();
    expect_eq("statements", ok(read_statements(&path))?, want)
}

fn canonical(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let st = gen::canonical_statements(rng);
    let path = dir.join("canonical.tsv");
    ok(write_canonical_statements(&st, &path))?;
    expect_permutation("canonical", ok(read_canonical_statements(&path))?, &st)
}

fn openie(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let t = gen::triples(rng);
    let path = dir.join("openie.tsv");
    ok(write_openie_tsv(&t, &path))?;
    expect_eq("openie", ok(load_openie_tsv(&path))?, t)
}

fn entity_vocab(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let v = gen::entity_vocab(rng);
    let path = dir.join("entities.tsv");
    ok(write_entity_vocab(&v, &path))?;
    expect_eq("entity vocabulary", ok(load_entity_vocab(&path))?, v)
}

fn relation_vocab(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let v = gen::relation_vocab(rng);
    let path = dir.join("relations.tsv");
    ok(write_relation_vocab(&v, &path))?;
    expect_eq("relation vocabulary", ok(load_relation_vocab(&path))?, v)
}

fn type_constraints(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let c = gen::type_constraints(rng);
    let path = dir.join("constraints.tsv");
    ok(write_type_constraints(&c, &path))?;
    expect_eq("type constraints", ok(load_type_constraints(&path))?, c)
}

fn predicate_statistics(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let s = gen::predicate_stats(rng);
    let path = dir.join("predicate_statistics.tsv");
    ok(write_predicate_statistics(&s, &path))?;
    expect_eq("predicate statistics", ok(read_predicate_statistics(&path))?, s)
}

fn mention_frequency(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let rows = gen::frequency_rows(rng);
    let text = format_frequency_report(&rows);
    expect_eq("mention frequency", ok(parse_frequency_report(&text, dir))?, rows)
}

fn extraction_statistics(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let rows = gen::stat_rows(rng);
    let text = format_stat_rows(&rows);
    expect_eq("extraction statistics", ok(parse_stat_rows(&text, dir))?, rows)
}

fn complexity(rng: &mut StdRng, dir: &Path) -> Result<(), String> {
    let r = gen::complexity(rng);
    expect_eq("complexity", ok(parse_complexity_tsv(&r.to_tsv(), dir))?, r)
}

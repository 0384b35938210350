//! The work done by each stage. Every stage reads its inputs from the
//! configured files and the upstream stage directories and writes its
//! outputs into its own directory.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::config::PipelineConfig;
use super::workspace::{InputDigest, Stage, Workspace};
use crate::analytics::{
    extraction_statistics, filter_mode_counts, format_stat_rows, statement_complexity, triple_complexity, Classifier,
};
use crate::canonical::{
    apply_relation_type_constraints, canonicalize, export_predicate_statistics, load_embeddings,
    write_predicate_statistics,
};
use crate::corpus::{
    load_documents, load_external_mentions, load_parses, read_canonical_statements, read_mentions, read_statements,
    write_canonical_statements, write_documents, write_file, write_mentions, write_parses, write_statements,
    DocumentFormat, DocumentStore, EntityMention, InvalidSentences, SentenceParse,
};
use crate::error::{Error, Result};
use crate::linker::{build_matcher, format_frequency_report, link_document, mention_frequency_report};
use crate::openie_clean::{
    apply_entity_filter, filter_triples_to_sentences, load_openie_tsv, restrict_to_entity_sentences, write_openie_tsv,
    CleanOptions, OpenIETriple,
};
use crate::pathie::{extract_corpus, load_keywords, KeywordSet, PathieOptions};
use crate::statement::RawStatement;
use crate::text::escape_field;
use crate::vocabulary::{
    filter_entity_vocab, load_entity_vocab, load_ignore_list, load_relation_vocab, load_type_constraints,
    write_entity_vocab, EntityVocabulary, IgnoreList, RelationVocabulary, TypeConstraintSet,
};

pub const DOCUMENTS: &str = "documents.jsonl";
pub const PARSES: &str = "parses.conllu";
pub const SKIPPED: &str = "skipped_sentences.tsv";
pub const TRIPLES: &str = "triples.tsv";
pub const EXTERNAL: &str = "external_mentions.tsv";
pub const MENTIONS: &str = "mentions.tsv";
pub const FREQUENCY: &str = "mention_frequency.tsv";
pub const ENTITIES: &str = "entities.tsv";
pub const STATEMENTS: &str = "statements.tsv";
pub const CANONICAL: &str = "canonical.tsv";
pub const PREDICATES: &str = "predicate_statistics.tsv";
pub const COMPLEXITY: &str = "complexity.tsv";
pub const EXTRACTIONS: &str = "extraction_statistics.tsv";

const FREQUENCY_TOP_K: usize = 500;

/// Output files of each stage.
pub fn outputs(stage: Stage) -> &'static [&'static str] {
    match stage {
        Stage::Ingest => &[DOCUMENTS, PARSES, SKIPPED, TRIPLES, EXTERNAL],
        Stage::Link => &[MENTIONS, FREQUENCY, ENTITIES],
        Stage::Pathie | Stage::CleanOpenie | Stage::Constrain => &[STATEMENTS],
        Stage::Canonicalize => &[CANONICAL, PREDICATES],
        Stage::Stats => &[COMPLEXITY, EXTRACTIONS],
    }
}

pub fn enabled(config: &PipelineConfig, stage: Stage) -> bool {
    match stage {
        Stage::Pathie => config.extractors.pathie,
        Stage::CleanOpenie => config.extractors.openie_clean,
        _ => true,
    }
}

/// Settings and configured files that feed a stage, excluding upstream
/// stage outputs.
pub fn own_inputs(config: &PipelineConfig, stage: Stage, digest: &mut InputDigest) -> Result<()> {
    let c = config;
    let file = |d: &mut InputDigest, name: &str, p: &Option<std::path::PathBuf>| -> Result<()> {
        match p {
            Some(p) => d.add_file(name, p),
            None => Ok(()),
        }
    };
    match stage {
        Stage::Ingest => {
            digest.add_settings(&json!({
                "document_format": c.document_format(),
                "invalid_sentences": c.corpus.invalid_sentences,
                "external_format": c.corpus.external_format,
            }));
            digest.add_file("documents", &c.corpus.documents)?;
            file(digest, "parses", &c.corpus.parses)?;
            file(digest, "openie", &c.corpus.openie)?;
            file(digest, "external_mentions", &c.corpus.external_mentions)?;
        }
        Stage::Link => {
            digest.add_settings(&json!({ "linker": c.linker, "rules": c.vocabulary.rules }));
            for (i, p) in c.vocabulary.entities.iter().enumerate() {
                digest.add_file(format!("entities[{i}]"), p)?;
            }
            file(digest, "ignore", &c.vocabulary.ignore)?;
        }
        Stage::Pathie => {
            digest.add_settings(&json!({ "keep_negations": c.pathie.keep_negations }));
            file(digest, "keywords", &c.pathie.keywords)?;
        }
        Stage::CleanOpenie => digest.add_settings(&c.openie),
        Stage::Canonicalize => {
            digest.add_settings(&json!({ "params": c.canonical, "extractors": c.extractors }));
            file(digest, "relations", &c.vocabulary.relations)?;
            file(digest, "embeddings", &c.vocabulary.embeddings)?;
        }
        Stage::Constrain => {
            digest.add_settings(&json!({}));
            file(digest, "constraints", &c.vocabulary.constraints)?;
        }
        Stage::Stats => {
            digest.add_settings(&json!({ "openie": c.openie, "extractors": c.extractors }));
            file(digest, "connectives", &c.analytics.connectives)?;
            file(digest, "prepositions", &c.analytics.prepositions)?;
        }
    }
    Ok(())
}

pub fn execute(config: &PipelineConfig, ws: &Workspace, stage: Stage) -> Result<()> {
    match stage {
        Stage::Ingest => ingest(config, ws),
        Stage::Link => link(config, ws),
        Stage::Pathie => pathie(config, ws),
        Stage::CleanOpenie => clean_openie(config, ws),
        Stage::Canonicalize => canonical(config, ws),
        Stage::Constrain => constrain(config, ws),
        Stage::Stats => stats(config, ws),
    }
}

fn ingest(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let docs = load_documents(&config.corpus.documents, config.document_format())?;
    let store = DocumentStore::new(docs.clone())?;
    write_documents(&docs, &ws.output(Stage::Ingest, DOCUMENTS), DocumentFormat::Jsonl)?;

    let on_invalid: InvalidSentences = config.corpus.invalid_sentences.into();
    let mut parses = Vec::new();
    let mut skipped = Vec::new();
    if let Some(path) = &config.corpus.parses {
        let loaded = load_parses(path, on_invalid)?;
        skipped.extend(loaded.skipped);
        for p in loaded.sentences {
            let check = match store.text(&p.doc_id) {
                None => Err(format!("unknown document `{}`", p.doc_id)),
                Some(text) => p.validate_against(text),
            };
            match check {
                Ok(()) => parses.push(p),
                Err(message) => {
                    let e = crate::error::SentenceError {
                        doc_id: Some(p.doc_id.clone()),
                        sentence_index: Some(p.sentence_index),
                        line: 0,
                        message,
                    };
                    if on_invalid == InvalidSentences::Abort {
                        return Err(e.into());
                    }
                    skipped.push(e);
                }
            }
        }
    }
    for e in &skipped {
        log::warn!("skipping {e}");
    }
    write_parses(&parses, &ws.output(Stage::Ingest, PARSES))?;
    let mut report = String::from("doc_id\tsentence_index\tline\tmessage\n");
    for e in &skipped {
        report.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            escape_field(e.doc_id.as_deref().unwrap_or("")),
            e.sentence_index.map(|i| i.to_string()).unwrap_or_default(),
            e.line,
            escape_field(&e.message)
        ));
    }
    write_file(&ws.output(Stage::Ingest, SKIPPED), &report)?;

    let triples = match &config.corpus.openie {
        Some(p) => load_openie_tsv(p)?,
        None => Vec::new(),
    };
    for t in triples.iter().filter(|t| store.get(&t.doc_id).is_none()) {
        log::warn!("OpenIE triple refers to unknown document `{}`", t.doc_id);
    }
    write_openie_tsv(&triples, &ws.output(Stage::Ingest, TRIPLES))?;

    let external = match &config.corpus.external_mentions {
        Some(p) => load_external_mentions(p, config.corpus.external_format, &store)?,
        None => Vec::new(),
    };
    write_mentions(&external, &ws.output(Stage::Ingest, EXTERNAL))
}

struct Ingested {
    store: DocumentStore,
    parses: Vec<SentenceParse>,
}

fn read_ingested(ws: &Workspace) -> Result<Ingested> {
    let docs = load_documents(&ws.output(Stage::Ingest, DOCUMENTS), DocumentFormat::Jsonl)?;
    let parses = load_parses(&ws.output(Stage::Ingest, PARSES), InvalidSentences::Abort)?.sentences;
    Ok(Ingested { store: DocumentStore::new(docs)?, parses })
}

fn read_triples(ws: &Workspace) -> Result<Vec<OpenIETriple>> {
    load_openie_tsv(&ws.output(Stage::Ingest, TRIPLES))
}

fn load_entities(config: &PipelineConfig) -> Result<EntityVocabulary> {
    let mut vocab = EntityVocabulary::new();
    for p in &config.vocabulary.entities {
        vocab.merge(load_entity_vocab(p)?);
    }
    Ok(filter_entity_vocab(&vocab, &config.vocabulary.rules))
}

fn link(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let Ingested { store, parses } = read_ingested(ws)?;
    let vocab = load_entities(config)?;
    let ignore = match &config.vocabulary.ignore {
        Some(p) => load_ignore_list(p)?,
        None => IgnoreList::default(),
    };
    let matcher = build_matcher(&vocab, &ignore, &config.linker);
    let mut by_doc: BTreeMap<&str, Vec<SentenceParse>> = BTreeMap::new();
    for p in &parses {
        by_doc.entry(&p.doc_id).or_default().push(p.clone());
    }
    let docs: Vec<_> = store.documents().collect();
    let no_parses = Vec::new();
    let linked: Vec<Vec<EntityMention>> = docs
        .par_iter()
        .map(|d| {
            let text = store.text(&d.id).expect("document in store");
            let sentences = by_doc.get(d.id.as_str()).unwrap_or(&no_parses);
            link_document(&d.id, text, sentences, &matcher, &config.linker)
        })
        .collect();
    let mut mentions: Vec<EntityMention> = linked.into_iter().flatten().collect();
    mentions.extend(read_mentions(&ws.output(Stage::Ingest, EXTERNAL))?);
    mentions.sort();
    mentions.dedup();
    write_mentions(&mentions, &ws.output(Stage::Link, MENTIONS))?;
    let report = mention_frequency_report(&mentions, FREQUENCY_TOP_K);
    write_file(&ws.output(Stage::Link, FREQUENCY), &format_frequency_report(&report))?;
    write_entity_vocab(&vocab, &ws.output(Stage::Link, ENTITIES))
}

fn read_linked(ws: &Workspace) -> Result<Vec<EntityMention>> {
    read_mentions(&ws.output(Stage::Link, MENTIONS))
}

fn pathie(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let Ingested { parses, .. } = read_ingested(ws)?;
    let mentions = read_linked(ws)?;
    let keywords = match &config.pathie.keywords {
        Some(p) => load_keywords(p)?,
        None => KeywordSet::default(),
    };
    let options = PathieOptions { keep_negations: config.pathie.keep_negations };
    let statements = extract_corpus(&parses, &mentions, &keywords, &options)?;
    write_statements(&statements, &ws.output(Stage::Pathie, STATEMENTS))
}

fn openie_input(
    config: &PipelineConfig,
    ws: &Workspace,
) -> Result<(Vec<OpenIETriple>, Vec<EntityMention>, Vec<SentenceParse>)> {
    let Ingested { parses, .. } = read_ingested(ws)?;
    let mentions = read_linked(ws)?;
    let mut triples = read_triples(ws)?;
    if config.openie.entity_sentences_only {
        let keep = restrict_to_entity_sentences(&parses, &mentions);
        triples = filter_triples_to_sentences(&triples, &parses, &keep);
    }
    Ok((triples, mentions, parses))
}

fn clean_openie(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let (triples, mentions, parses) = openie_input(config, ws)?;
    let options = CleanOptions { mode: config.openie.filter, keep_negations: config.openie.keep_negations };
    let statements = apply_entity_filter(&triples, &mentions, &parses, &options);
    write_statements(&statements, &ws.output(Stage::CleanOpenie, STATEMENTS))
}

fn raw_statements(config: &PipelineConfig, ws: &Workspace) -> Result<Vec<RawStatement>> {
    let mut all = Vec::new();
    for stage in [Stage::Pathie, Stage::CleanOpenie] {
        if enabled(config, stage) {
            all.extend(read_statements(&ws.output(stage, STATEMENTS))?);
        }
    }
    all.sort();
    Ok(all)
}

fn canonical(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let statements = raw_statements(config, ws)?;
    let relations = match &config.vocabulary.relations {
        Some(p) => load_relation_vocab(p)?,
        None => RelationVocabulary::new(),
    };
    let model = config.vocabulary.embeddings.as_deref().map(load_embeddings).transpose()?;
    let mapped = canonicalize(&statements, &relations, model.as_ref(), &config.canonical);
    write_canonical_statements(&mapped, &ws.output(Stage::Canonicalize, CANONICAL))?;
    write_predicate_statistics(&export_predicate_statistics(&statements), &ws.output(Stage::Canonicalize, PREDICATES))
}

fn constrain(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let statements = read_canonical_statements(&ws.output(Stage::Canonicalize, CANONICAL))?;
    let constraints = match &config.vocabulary.constraints {
        Some(p) => load_type_constraints(p)?,
        None => TypeConstraintSet::new(),
    };
    let kept = apply_relation_type_constraints(&statements, &constraints);
    write_canonical_statements(&kept, &ws.output(Stage::Constrain, STATEMENTS))
}

fn stats(config: &PipelineConfig, ws: &Workspace) -> Result<()> {
    let classifier =
        Classifier::with_overrides(config.analytics.connectives.as_deref(), config.analytics.prepositions.as_deref())?;
    let raw = raw_statements(config, ws)?;
    let constrained = read_canonical_statements(&ws.output(Stage::Constrain, STATEMENTS))?;
    let (complexity, counts) = if config.extractors.openie_clean {
        let (triples, mentions, parses) = openie_input(config, ws)?;
        (
            triple_complexity(&triples, &classifier),
            filter_mode_counts(&triples, &mentions, &parses, config.openie.keep_negations),
        )
    } else {
        (statement_complexity(&raw, &classifier), BTreeMap::new())
    };
    write_file(&ws.output(Stage::Stats, COMPLEXITY), &complexity.to_tsv())?;
    let rows = extraction_statistics(&counts, &raw, &constrained);
    write_file(&ws.output(Stage::Stats, EXTRACTIONS), &format_stat_rows(&rows))
}

/// Error for a stage that needs an upstream stage that has not completed.
pub fn missing_upstream(stage: Stage, upstream: Stage) -> Error {
    Error::Stage {
        stage: stage.name().to_string(),
        message: format!("stage `{upstream}` has not completed; run it first"),
    }
}

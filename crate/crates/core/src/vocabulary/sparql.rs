//! Vocabulary download from a SPARQL endpoint.
//!
//! The query is sent as an HTTP GET with a `query` parameter and the
//! endpoint must answer with SPARQL tab-separated results carrying the
//! variables `item`, `label` and optionally `altLabels`. Alternative labels
//! are expected as one `|`-separated literal, e.g. from
//! `GROUP_CONCAT(DISTINCT ?alt; separator="|") AS ?altLabels`. A template may
//! contain `{entity_type}`, which is replaced before sending.

use std::path::Path;

use super::{load_entity_vocab, write_entity_vocab, EntityEntry, EntityVocabulary};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

pub trait HttpGet {
    fn get(&self, url: &str, query: &[(&str, &str)]) -> Result<HttpResponse>;
}

/// Blocking HTTP client used outside tests.
pub struct UreqClient {
    agent: ureq::Agent,
}

impl Default for UreqClient {
    fn default() -> Self {
        let agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
        UreqClient { agent }
    }
}

impl HttpGet for UreqClient {
    fn get(&self, url: &str, query: &[(&str, &str)]) -> Result<HttpResponse> {
        let fail = |message: String| Error::Http { endpoint: url.to_string(), status: None, message };
        let mut req = self
            .agent
            .get(url)
            .header("Accept", "text/tab-separated-values")
            .header("User-Agent", concat!("ietk/", env!("CARGO_PKG_VERSION")));
        for (k, v) in query {
            req = req.query(*k, *v);
        }
        let mut resp = req.call().map_err(|e| fail(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| fail(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

pub fn fetch_sparql_vocab(
    client: &dyn HttpGet,
    endpoint_url: &str,
    query_template: &str,
    entity_type: &str,
) -> Result<EntityVocabulary> {
    let query = query_template.replace("{entity_type}", entity_type);
    let resp = client.get(endpoint_url, &[("query", &query)])?;
    if !(200..300).contains(&resp.status) {
        return Err(Error::Http {
            endpoint: endpoint_url.to_string(),
            status: Some(resp.status),
            message: resp.body.lines().next().unwrap_or_default().to_string(),
        });
    }
    parse_sparql_tsv(&resp.body, entity_type).map_err(|message| Error::Http {
        endpoint: endpoint_url.to_string(),
        status: Some(resp.status),
        message,
    })
}

/// Use the cached TSV at `cache` when present; otherwise fetch and write it
/// so later runs are reproducible offline.
pub fn fetch_sparql_vocab_cached(
    client: &dyn HttpGet,
    endpoint_url: &str,
    query_template: &str,
    entity_type: &str,
    cache: &Path,
) -> Result<EntityVocabulary> {
    if cache.exists() {
        return load_entity_vocab(cache);
    }
    let vocab = fetch_sparql_vocab(client, endpoint_url, query_template, entity_type)?;
    write_entity_vocab(&vocab, cache)?;
    Ok(vocab)
}

/// Assemble a vocabulary from a SPARQL TSV result body. Rows of the same
/// item are merged; rows without a label are skipped.
pub fn parse_sparql_tsv(body: &str, entity_type: &str) -> std::result::Result<EntityVocabulary, String> {
    let mut lines = body.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h,
        None => return Err("empty response body".to_string()),
    };
    let vars: Vec<&str> = header.split('\t').map(|v| v.trim().trim_start_matches(['?', '$'])).collect();
    let col = |name: &str| vars.iter().position(|v| *v == name);
    let item_col = col("item").ok_or("result has no `item` column")?;
    let label_col = col("label").ok_or("result has no `label` column")?;
    let alt_col = col("altLabels");

    let mut vocab = EntityVocabulary::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != vars.len() {
            return Err(format!("result row {} has {} columns, expected {}", i + 1, cols.len(), vars.len()));
        }
        let item = parse_term(cols[item_col]).map_err(|m| format!("row {}: {m}", i + 1))?;
        let label = parse_term(cols[label_col]).map_err(|m| format!("row {}: {m}", i + 1))?;
        let (Some(item), Some(label)) = (item, label) else { continue };
        let mut synonyms = vec![label];
        if let Some(c) = alt_col {
            if let Some(alts) = parse_term(cols[c]).map_err(|m| format!("row {}: {m}", i + 1))? {
                synonyms.extend(alts.split('|').map(str::to_string));
            }
        }
        let id = entity_id_from_iri(&item);
        let entry = EntityEntry::new(id, entity_type, &synonyms)?;
        let mut one = EntityVocabulary::new();
        one.insert(entry)?;
        vocab.merge(one);
    }
    Ok(vocab)
}

fn entity_id_from_iri(item: &str) -> String {
    item.rsplit(['/', '#']).next().unwrap_or(item).to_string()
}

/// Decode one RDF term of the SPARQL TSV format. Unbound is `None`.
fn parse_term(raw: &str) -> std::result::Result<Option<String>, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    if let Some(iri) = raw.strip_prefix('<') {
        return iri.strip_suffix('>').map(|s| Some(s.to_string())).ok_or_else(|| format!("unterminated IRI {raw:?}"));
    }
    if let Some(rest) = raw.strip_prefix('"') {
        let mut out = String::new();
        let mut chars = rest.chars();
        loop {
            match chars.next() {
                None => return Err(format!("unterminated literal {raw:?}")),
                Some('"') => break,
                Some('\\') => match chars.next() {
                    Some('t') => out.push('\t'),
                    Some('n') => out.push('\n'),
                    Some('r') => out.push('\r'),
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    other => return Err(format!("bad escape {other:?} in {raw:?}")),
                },
                Some(c) => out.push(c),
            }
        }
        let suffix: String = chars.collect();
        if !(suffix.is_empty() || suffix.starts_with('@') || suffix.starts_with("^^<")) {
            return Err(format!("unexpected text after literal in {raw:?}"));
        }
        return Ok(Some(out));
    }
    // bare numbers and booleans
    if raw.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+')) {
        return Ok(Some(raw.to_string()));
    }
    Err(format!("cannot parse RDF term {raw:?}"))
}

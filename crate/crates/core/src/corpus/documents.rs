use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, write_file, Document, DocumentFormat, EntityMention};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct JsonDocument<'a> {
    #[serde(borrow)]
    id: std::borrow::Cow<'a, str>,
    #[serde(borrow)]
    title: std::borrow::Cow<'a, str>,
    #[serde(rename = "abstract", borrow)]
    body: std::borrow::Cow<'a, str>,
}

pub fn load_documents(path: &Path, format: DocumentFormat) -> Result<Vec<Document>> {
    let content = read_file(path)?;
    parse_documents(&content, format, path)
}

/// Parse documents from text; `source` is only used in error messages.
pub fn parse_documents(content: &str, format: DocumentFormat, source: &Path) -> Result<Vec<Document>> {
    let docs = match format {
        DocumentFormat::Jsonl => parse_jsonl(content, source)?,
        DocumentFormat::Pubtator => parse_pubtator(content, source)?.into_iter().map(|b| b.doc).collect(),
    };
    Ok(docs)
}

fn parse_jsonl(content: &str, source: &Path) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in crate::text::numbered_lines(content) {
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonDocument = serde_json::from_str(line)
            .map_err(|e| Error::format(source, line_no, format!("malformed jsonl record: {e}")))?;
        Document::validate_id(&rec.id).map_err(|m| Error::format(source, line_no, m))?;
        if !seen.insert(rec.id.to_string()) {
            return Err(Error::format(source, line_no, format!("duplicate document id `{}`", rec.id)));
        }
        docs.push(Document::new(rec.id, rec.title, rec.body));
    }
    Ok(docs)
}

/// A PubTator block: title and abstract lines plus raw annotation lines.
pub(super) struct PubtatorBlock<'a> {
    pub doc: Document,
    pub annotations: Vec<(usize, &'a str)>,
}

/// A block being read: first line number, id, title, abstract, annotations.
type OpenBlock<'a> = (usize, String, Option<String>, Option<String>, Vec<(usize, &'a str)>);

pub(super) fn parse_pubtator<'a>(content: &'a str, source: &Path) -> Result<Vec<PubtatorBlock<'a>>> {
    let mut blocks = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<OpenBlock<'a>> = None;

    let mut finish = |cur: Option<OpenBlock<'a>>, blocks: &mut Vec<PubtatorBlock<'a>>| -> Result<()> {
        if let Some((start, id, title, body, annotations)) = cur {
            let title =
                title.ok_or_else(|| Error::format(source, start, format!("document `{id}` has no title line")))?;
            let body =
                body.ok_or_else(|| Error::format(source, start, format!("document `{id}` has no abstract line")))?;
            if !seen.insert(id.clone()) {
                return Err(Error::format(source, start, format!("duplicate document id `{id}`")));
            }
            blocks.push(PubtatorBlock { doc: Document::new(id, title, body), annotations });
        }
        Ok(())
    };

    for (line_no, line) in crate::text::numbered_lines(content) {
        if line.is_empty() {
            finish(current.take(), &mut blocks)?;
            continue;
        }
        if let Some((id, kind, text)) = split_text_line(line) {
            Document::validate_id(id).map_err(|m| Error::format(source, line_no, m))?;
            let same_block = current.as_ref().is_some_and(|c| c.1 == id);
            if !same_block {
                finish(current.take(), &mut blocks)?;
                current = Some((line_no, id.to_string(), None, None, Vec::new()));
            }
            let cur = current.as_mut().expect("block just opened");
            let slot = if kind == 't' { &mut cur.2 } else { &mut cur.3 };
            if slot.is_some() {
                return Err(Error::format(source, line_no, format!("repeated |{kind}| line for `{id}`")));
            }
            *slot = Some(text.to_string());
        } else if line.contains('\t') {
            match current.as_mut() {
                Some(cur) => cur.4.push((line_no, line)),
                None => return Err(Error::format(source, line_no, "annotation line outside a document block")),
            }
        } else {
            return Err(Error::format(source, line_no, "expected `id|t|title`, `id|a|abstract` or an annotation line"));
        }
    }
    finish(current.take(), &mut blocks)?;
    Ok(blocks)
}

fn split_text_line(line: &str) -> Option<(&str, char, &str)> {
    let (id, rest) = line.split_once('|')?;
    if id.contains('\t') {
        return None;
    }
    let (kind, text) = rest.split_once('|')?;
    match kind {
        "t" => Some((id, 't', text)),
        "a" => Some((id, 'a', text)),
        _ => None,
    }
}

/// Write documents sorted by id. PubTator output cannot carry line breaks in
/// titles or bodies; such documents are rejected.
pub fn write_documents(docs: &[Document], path: &Path, format: DocumentFormat) -> Result<()> {
    match format {
        DocumentFormat::Jsonl => {
            let mut sorted: Vec<&Document> = docs.iter().collect();
            sorted.sort_by(|a, b| a.id.cmp(&b.id));
            let mut out = String::new();
            for d in sorted {
                Document::validate_id(&d.id).map_err(Error::Invalid)?;
                let rec = JsonDocument {
                    id: d.id.as_str().into(),
                    title: d.title.as_str().into(),
                    body: d.body.as_str().into(),
                };
                out.push_str(&serde_json::to_string(&rec).expect("string fields serialize"));
                out.push('\n');
            }
            write_file(path, &out)
        }
        DocumentFormat::Pubtator => write_pubtator(docs, &[], path),
    }
}

/// Write PubTator blocks with their annotation lines, documents sorted by id
/// and annotations by span.
pub fn write_pubtator(docs: &[Document], mentions: &[EntityMention], path: &Path) -> Result<()> {
    let mut sorted: Vec<&Document> = docs.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut by_doc: std::collections::BTreeMap<&str, Vec<&EntityMention>> = Default::default();
    for m in mentions {
        by_doc.entry(m.doc_id.as_str()).or_default().push(m);
    }
    let mut out = String::new();
    for d in sorted {
        Document::validate_id(&d.id).map_err(Error::Invalid)?;
        if d.title.contains(['\n', '\r']) || d.body.contains(['\n', '\r']) {
            return Err(Error::Invalid(format!("document `{}` has a line break; PubTator cannot represent it", d.id)));
        }
        let _ = writeln!(out, "{}|t|{}", d.id, d.title);
        let _ = writeln!(out, "{}|a|{}", d.id, d.body);
        if let Some(ms) = by_doc.get_mut(d.id.as_str()) {
            ms.sort();
            for m in ms.iter() {
                if m.surface.contains(['\t', '\n', '\r'])
                    || m.entity_type.contains(['\t', '\n'])
                    || m.entity_id.contains(['\t', '\n'])
                {
                    return Err(Error::Invalid(format!("annotation in `{}` contains a tab or line break", d.id)));
                }
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    m.doc_id, m.span.start, m.span.end, m.surface, m.entity_type, m.entity_id
                );
            }
        }
        out.push('\n');
    }
    write_file(path, &out)
}

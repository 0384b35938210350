use std::fmt::Write as _;
use std::path::Path;

use super::documents::parse_pubtator;
use super::{read_file, write_file, AnnotationFormat, DocumentStore, DocumentText, EntityMention, Origin, TextSpan};
use crate::error::{Error, Result};
use crate::text::{escape_field, unescape_field};

pub const MENTION_HEADER: &str = "doc_id\tstart\tend\tsurface\tentity_type\tentity_id\torigin";

/// Load externally produced annotations (e.g. NER output) and check every
/// span against its document.
///
/// Both formats use `id TAB start TAB end TAB mention TAB type TAB entity_id`
/// lines; the PubTator variant interleaves them with `|t|`/`|a|` blocks, which
/// also serve as the reference text when `docs` lacks the document. Four
/// column PubTator relation lines are ignored.
pub fn load_external_mentions(
    path: &Path,
    format: AnnotationFormat,
    docs: &DocumentStore,
) -> Result<Vec<EntityMention>> {
    let content = read_file(path)?;
    parse_external_mentions(&content, format, docs, path)
}

pub fn parse_external_mentions(
    content: &str,
    format: AnnotationFormat,
    docs: &DocumentStore,
    source: &Path,
) -> Result<Vec<EntityMention>> {
    let mut out = Vec::new();
    match format {
        AnnotationFormat::Tsv => {
            for (line_no, line) in crate::text::numbered_lines(content) {
                if line.is_empty() || (line_no == 1 && line.starts_with("doc_id\t")) {
                    continue;
                }
                let m = parse_annotation(line, line_no, source)?;
                let Some(m) = m else {
                    return Err(Error::format(source, line_no, "expected 6 tab-separated columns"));
                };
                let text = docs
                    .text(&m.doc_id)
                    .ok_or_else(|| Error::format(source, line_no, format!("unknown document `{}`", m.doc_id)))?;
                check_span(&m, text, line_no, source)?;
                out.push(m);
            }
        }
        AnnotationFormat::Pubtator => {
            for block in parse_pubtator(content, source)? {
                let own;
                let text = match docs.text(&block.doc.id) {
                    Some(t) => t,
                    None => {
                        own = DocumentText::new(&block.doc);
                        &own
                    }
                };
                for (line_no, line) in block.annotations {
                    if let Some(m) = parse_annotation(line, line_no, source)? {
                        if m.doc_id != block.doc.id {
                            return Err(Error::format(
                                source,
                                line_no,
                                format!("annotation for `{}` inside the block of `{}`", m.doc_id, block.doc.id),
                            ));
                        }
                        check_span(&m, text, line_no, source)?;
                        out.push(m);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Ok(None)` for a 4-column relation line.
fn parse_annotation(line: &str, line_no: usize, source: &Path) -> Result<Option<EntityMention>> {
    let cols: Vec<&str> = line.split('\t').collect();
    match cols.len() {
        4 => return Ok(None),
        6 => {}
        n => return Err(Error::format(source, line_no, format!("expected 6 columns, found {n}"))),
    }
    let start: usize =
        cols[1].parse().map_err(|_| Error::format(source, line_no, format!("bad start offset {:?}", cols[1])))?;
    let end: usize =
        cols[2].parse().map_err(|_| Error::format(source, line_no, format!("bad end offset {:?}", cols[2])))?;
    Ok(Some(EntityMention {
        doc_id: cols[0].to_string(),
        span: TextSpan::new(start, end),
        entity_type: cols[4].to_string(),
        entity_id: cols[5].to_string(),
        surface: cols[3].to_string(),
        origin: Origin::External,
    }))
}

fn check_span(m: &EntityMention, text: &DocumentText, line_no: usize, source: &Path) -> Result<()> {
    if m.span.start >= m.span.end {
        return Err(Error::format(source, line_no, format!("empty span {}", m.span)));
    }
    match text.slice(m.span) {
        None => Err(Error::format(
            source,
            line_no,
            format!("span {} is outside document `{}` ({} characters)", m.span, m.doc_id, text.char_len()),
        )),
        Some(s) if s != m.surface => Err(Error::format(
            source,
            line_no,
            format!("mention {:?} does not match content {:?} at {}", m.surface, s, m.span),
        )),
        Some(_) => Ok(()),
    }
}

/// Write mentions sorted by document, span, type and id, with a header row.
pub fn write_mentions(mentions: &[EntityMention], path: &Path) -> Result<()> {
    let mut sorted: Vec<&EntityMention> = mentions.iter().collect();
    sorted.sort();
    let mut out = String::from(MENTION_HEADER);
    out.push('\n');
    for m in sorted {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            escape_field(&m.doc_id),
            m.span.start,
            m.span.end,
            escape_field(&m.surface),
            escape_field(&m.entity_type),
            escape_field(&m.entity_id),
            m.origin.as_str()
        );
    }
    write_file(path, &out)
}

pub fn read_mentions(path: &Path) -> Result<Vec<EntityMention>> {
    let content = read_file(path)?;
    let mut lines = crate::text::numbered_lines(&content);
    match lines.next() {
        Some((_, h)) if h == MENTION_HEADER => {}
        Some((n, _)) => return Err(Error::format(path, n, "missing mention header row")),
        None => return Err(Error::format(path, 1, "empty mention file (header row expected)")),
    }
    let mut out = Vec::new();
    for (line_no, line) in lines {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(Error::format(path, line_no, format!("expected 7 columns, found {}", cols.len())));
        }
        let field =
            |i: usize| unescape_field(cols[i]).map(|c| c.into_owned()).map_err(|m| Error::format(path, line_no, m));
        let num = |i: usize| {
            cols[i].parse::<usize>().map_err(|_| Error::format(path, line_no, format!("bad offset {:?}", cols[i])))
        };
        out.push(EntityMention {
            doc_id: field(0)?,
            span: TextSpan::new(num(1)?, num(2)?),
            surface: field(3)?,
            entity_type: field(4)?,
            entity_id: field(5)?,
            origin: cols[6].parse().map_err(|m: String| Error::format(path, line_no, m))?,
        });
    }
    Ok(out)
}

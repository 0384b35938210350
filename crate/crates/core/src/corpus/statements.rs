//! Statement TSV schemas.
//!
//! Raw statements use the 20 columns of [`STATEMENT_HEADER`]. An argument
//! that is a linked entity fills the text, id, type, start, end and origin
//! columns; a verbatim phrase fills only the text column. Optional columns
//! are empty when absent. Canonical statements append `relation`, `mapping`
//! and `similarity`. Free-text fields are backslash-escaped.

use std::fmt::Write as _;
use std::path::Path;

use super::{read_file, write_file, EntityMention, TextSpan};
use crate::error::{Error, Result};
use crate::statement::{Argument, CanonicalStatement, Mapping, RawStatement};
use crate::text::{escape_field, unescape_field};

pub const STATEMENT_HEADER: &str = "doc_id\tsentence_index\textractor\ttrigger\tsource\t\
subject\tsubject_id\tsubject_type\tsubject_start\tsubject_end\tsubject_origin\t\
predicate\tpredicate_lemma\t\
object\tobject_id\tobject_type\tobject_start\tobject_end\tobject_origin\tsentence";

pub const CANONICAL_HEADER: &str = "doc_id\tsentence_index\textractor\ttrigger\tsource\t\
subject\tsubject_id\tsubject_type\tsubject_start\tsubject_end\tsubject_origin\t\
predicate\tpredicate_lemma\t\
object\tobject_id\tobject_type\tobject_start\tobject_end\tobject_origin\tsentence\t\
relation\tmapping\tsimilarity";

const RAW_COLUMNS: usize = 20;

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn push_argument(out: &mut String, arg: &Argument) {
    match arg {
        Argument::Entity(m) => {
            let _ = write!(
                out,
                "\t{}\t{}\t{}\t{}\t{}\t{}",
                escape_field(&m.surface),
                escape_field(&m.entity_id),
                escape_field(&m.entity_type),
                m.span.start,
                m.span.end,
                m.origin.as_str()
            );
        }
        Argument::Phrase(p) => {
            let _ = write!(out, "\t{}\t\t\t\t\t", escape_field(p));
        }
    }
}

fn push_raw(out: &mut String, s: &RawStatement) {
    let _ = write!(
        out,
        "{}\t{}\t{}\t{}\t{}",
        escape_field(&s.doc_id),
        opt(s.sentence_index),
        s.extractor,
        opt(s.trigger),
        opt(s.source)
    );
    push_argument(out, &s.subject);
    let _ = write!(out, "\t{}\t{}", escape_field(&s.predicate_surface), escape_field(&s.predicate_lemma));
    push_argument(out, &s.object);
    let _ = write!(out, "\t{}", escape_field(&s.sentence));
}

/// Write statements in sorted order with a header row.
pub fn write_statements(statements: &[RawStatement], path: &Path) -> Result<()> {
    let mut sorted: Vec<&RawStatement> = statements.iter().collect();
    sorted.sort();
    let mut out = String::from(STATEMENT_HEADER);
    out.push('\n');
    for s in sorted {
        push_raw(&mut out, s);
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn write_canonical_statements(statements: &[CanonicalStatement], path: &Path) -> Result<()> {
    let mut sorted: Vec<&CanonicalStatement> = statements.iter().collect();
    sorted.sort_by(|a, b| {
        a.statement.cmp(&b.statement).then_with(|| a.relation.cmp(&b.relation)).then_with(|| a.mapping.cmp(&b.mapping))
    });
    let mut out = String::from(CANONICAL_HEADER);
    out.push('\n');
    for c in sorted {
        push_raw(&mut out, &c.statement);
        let _ = writeln!(
            out,
            "\t{}\t{}\t{}",
            c.relation.as_deref().map(escape_field).unwrap_or_default(),
            c.mapping,
            opt(c.similarity)
        );
    }
    write_file(path, &out)
}

struct Row<'a> {
    path: &'a Path,
    line: usize,
    cols: Vec<&'a str>,
}

impl Row<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::format(self.path, self.line, message)
    }

    fn text(&self, i: usize) -> Result<String> {
        unescape_field(self.cols[i]).map(|c| c.into_owned()).map_err(|m| self.err(m))
    }

    fn opt_parse<T: std::str::FromStr>(&self, i: usize) -> Result<Option<T>> {
        if self.cols[i].is_empty() {
            return Ok(None);
        }
        self.cols[i]
            .parse()
            .map(Some)
            .map_err(|_| self.err(format!("bad value {:?} in column {}", self.cols[i], i + 1)))
    }

    fn argument(&self, base: usize, doc_id: &str) -> Result<Argument> {
        let text = self.text(base)?;
        if self.cols[base + 5].is_empty() {
            return Ok(Argument::Phrase(text));
        }
        let start = self.opt_parse(base + 3)?.ok_or_else(|| self.err("entity argument without start"))?;
        let end = self.opt_parse(base + 4)?.ok_or_else(|| self.err("entity argument without end"))?;
        Ok(Argument::Entity(EntityMention {
            doc_id: doc_id.to_string(),
            span: TextSpan::new(start, end),
            entity_type: self.text(base + 2)?,
            entity_id: self.text(base + 1)?,
            surface: text,
            origin: self.cols[base + 5].parse().map_err(|m: String| self.err(m))?,
        }))
    }

    fn raw(&self) -> Result<RawStatement> {
        let doc_id = self.text(0)?;
        Ok(RawStatement {
            sentence_index: self.opt_parse(1)?,
            extractor: self.cols[2].parse().map_err(|m: String| self.err(m))?,
            trigger: self.opt_parse(3)?,
            source: self.opt_parse(4)?,
            subject: self.argument(5, &doc_id)?,
            predicate_surface: self.text(11)?,
            predicate_lemma: self.text(12)?,
            object: self.argument(13, &doc_id)?,
            sentence: self.text(19)?,
            doc_id,
        })
    }
}

fn rows<'a>(content: &'a str, path: &'a Path, header: &str, columns: usize) -> Result<Vec<Row<'a>>> {
    let mut lines = crate::text::numbered_lines(content);
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((n, _)) => return Err(Error::format(path, n, "missing or unexpected header row")),
        None => return Err(Error::format(path, 1, "empty file (header row expected)")),
    }
    lines
        .map(|(line, l)| {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() != columns {
                return Err(Error::format(path, line, format!("expected {columns} columns, found {}", cols.len())));
            }
            Ok(Row { path, line, cols })
        })
        .collect()
}

pub fn read_statements(path: &Path) -> Result<Vec<RawStatement>> {
    let content = read_file(path)?;
    rows(&content, path, STATEMENT_HEADER, RAW_COLUMNS)?.iter().map(Row::raw).collect()
}

pub fn read_canonical_statements(path: &Path) -> Result<Vec<CanonicalStatement>> {
    let content = read_file(path)?;
    rows(&content, path, CANONICAL_HEADER, RAW_COLUMNS + 3)?
        .iter()
        .map(|row| {
            let relation = if row.cols[20].is_empty() { None } else { Some(row.text(20)?) };
            let mapping: Mapping = row.cols[21].parse().map_err(|m: String| row.err(m))?;
            Ok(CanonicalStatement { statement: row.raw()?, relation, mapping, similarity: row.opt_parse(22)? })
        })
        .collect()
}

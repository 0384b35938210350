//! CoNLL-U with two required comment keys per sentence (`# doc_id = X` and
//! `# sent_index = N`) and `SpanStart=…|SpanEnd=…` entries in the MISC column
//! that give character offsets into the document content.

use std::fmt::Write as _;
use std::path::Path;

use super::{read_file, write_file, SentenceParse, TextSpan, Token};
use crate::error::{Error, Result, SentenceError};

/// What to do with a sentence that fails validation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InvalidSentences {
    /// Drop the sentence, keep its error, and continue.
    #[default]
    Skip,
    /// Return the first sentence error.
    Abort,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadedParses {
    pub sentences: Vec<SentenceParse>,
    pub skipped: Vec<SentenceError>,
}

pub fn load_parses(path: &Path, on_invalid: InvalidSentences) -> Result<LoadedParses> {
    let content = read_file(path)?;
    parse_conllu(&content, on_invalid)
}

struct Pending {
    start_line: usize,
    doc_id: Option<String>,
    sentence_index: Option<usize>,
    text: Option<String>,
    tokens: Vec<Token>,
    error: Option<String>,
}

impl Pending {
    fn new(start_line: usize) -> Self {
        Pending { start_line, doc_id: None, sentence_index: None, text: None, tokens: Vec::new(), error: None }
    }

    fn fail(&mut self, message: String) {
        if self.error.is_none() {
            self.error = Some(message);
        }
    }

    fn finish(self) -> std::result::Result<SentenceParse, SentenceError> {
        let err = |message: String| SentenceError {
            doc_id: self.doc_id.clone(),
            sentence_index: self.sentence_index,
            line: self.start_line,
            message,
        };
        if let Some(message) = self.error.clone() {
            return Err(err(message));
        }
        let doc_id = self.doc_id.clone().ok_or_else(|| err("missing `# doc_id` comment".to_string()))?;
        let sentence_index = self.sentence_index.ok_or_else(|| err("missing `# sent_index` comment".to_string()))?;
        let mut parse = SentenceParse { doc_id, sentence_index, tokens: self.tokens.clone(), text: String::new() };
        parse.validate().map_err(err)?;
        parse.text = match &self.text {
            Some(t) => t.clone(),
            None => reconstruct_text(&parse.tokens),
        };
        if crate::text::char_len(&parse.text) != parse.span().len() {
            return Err(err(format!(
                "sentence text has {} characters but the token offsets cover {}",
                crate::text::char_len(&parse.text),
                parse.span().len()
            )));
        }
        Ok(parse)
    }
}

/// Place each form at its offset relative to the first token, padding gaps
/// with spaces.
fn reconstruct_text(tokens: &[Token]) -> String {
    let base = tokens.first().map_or(0, |t| t.span.start);
    let mut out = String::new();
    let mut pos = base;
    for t in tokens {
        for _ in pos..t.span.start {
            out.push(' ');
        }
        out.push_str(&t.surface);
        pos = t.span.start + crate::text::char_len(&t.surface);
    }
    out
}

pub fn parse_conllu(content: &str, on_invalid: InvalidSentences) -> Result<LoadedParses> {
    let mut loaded = LoadedParses::default();
    let mut pending: Option<Pending> = None;

    let flush = |p: Option<Pending>, loaded: &mut LoadedParses| -> Result<()> {
        let Some(p) = p else { return Ok(()) };
        match p.finish() {
            Ok(parse) => loaded.sentences.push(parse),
            Err(e) => match on_invalid {
                InvalidSentences::Skip => {
                    log::warn!("skipping {e}");
                    loaded.skipped.push(e);
                }
                InvalidSentences::Abort => return Err(Error::Sentence(e)),
            },
        }
        Ok(())
    };

    for (line_no, line) in crate::text::numbered_lines(content) {
        if line.trim().is_empty() {
            flush(pending.take(), &mut loaded)?;
            continue;
        }
        let p = pending.get_or_insert_with(|| Pending::new(line_no));
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.strip_prefix(' ').unwrap_or(comment);
            if let Some(v) = comment.strip_prefix("doc_id = ") {
                p.doc_id = Some(v.to_string());
            } else if let Some(v) = comment.strip_prefix("sent_index = ") {
                match v.trim().parse() {
                    Ok(i) => p.sentence_index = Some(i),
                    Err(_) => p.fail(format!("line {line_no}: bad sent_index {v:?}")),
                }
            } else if let Some(v) = comment.strip_prefix("text = ") {
                p.text = Some(v.to_string());
            }
            continue;
        }
        match parse_token_line(line) {
            Ok(Some(tok)) => p.tokens.push(tok),
            Ok(None) => {}
            Err(m) => p.fail(format!("line {line_no}: {m}")),
        }
    }
    flush(pending.take(), &mut loaded)?;
    Ok(loaded)
}

fn parse_token_line(line: &str) -> std::result::Result<Option<Token>, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(format!("expected 10 columns, found {}", cols.len()));
    }
    // multiword ranges and empty nodes carry no offsets of their own
    if cols[0].contains('-') || cols[0].contains('.') {
        return Ok(None);
    }
    let index: usize = cols[0].parse().map_err(|_| format!("bad token id {:?}", cols[0]))?;
    let head: usize = cols[6].parse().map_err(|_| format!("bad head {:?}", cols[6]))?;
    let mut start = None;
    let mut end = None;
    for entry in cols[9].split('|') {
        if let Some(v) = entry.strip_prefix("SpanStart=") {
            start = Some(v.parse::<usize>().map_err(|_| format!("bad SpanStart {v:?}"))?);
        } else if let Some(v) = entry.strip_prefix("SpanEnd=") {
            end = Some(v.parse::<usize>().map_err(|_| format!("bad SpanEnd {v:?}"))?);
        }
    }
    let (Some(start), Some(end)) = (start, end) else {
        return Err(format!("token {index} is missing SpanStart/SpanEnd offsets"));
    };
    Ok(Some(Token {
        index,
        surface: cols[1].to_string(),
        lemma: cols[2].to_string(),
        upos: cols[3].to_string(),
        head,
        deprel: cols[7].to_string(),
        span: TextSpan::new(start, end),
    }))
}

/// Write parses sorted by (doc_id, sentence_index).
pub fn write_parses(parses: &[SentenceParse], path: &Path) -> Result<()> {
    let mut sorted: Vec<&SentenceParse> = parses.iter().collect();
    sorted.sort_by(|a, b| (&a.doc_id, a.sentence_index).cmp(&(&b.doc_id, b.sentence_index)));
    let mut out = String::new();
    for p in sorted {
        p.validate().map_err(|m| Error::Invalid(format!("{} sentence {}: {m}", p.doc_id, p.sentence_index)))?;
        if p.text.contains(['\n', '\r']) || p.doc_id.contains(['\n', '\r']) {
            return Err(Error::Invalid(format!("{} sentence {} contains a line break", p.doc_id, p.sentence_index)));
        }
        let _ = writeln!(out, "# doc_id = {}", p.doc_id);
        let _ = writeln!(out, "# sent_index = {}", p.sentence_index);
        let _ = writeln!(out, "# text = {}", p.text);
        for t in &p.tokens {
            let fields = [&t.surface, &t.lemma, &t.upos, &t.deprel];
            if fields.iter().any(|f| f.contains(['\t', '\n', '\r']) || f.is_empty()) {
                return Err(Error::Invalid(format!(
                    "{} sentence {} token {} has an empty field or one with a tab or line break",
                    p.doc_id, p.sentence_index, t.index
                )));
            }
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\tSpanStart={}|SpanEnd={}",
                t.index, t.surface, t.lemma, t.upos, t.head, t.deprel, t.span.start, t.span.end
            );
        }
        out.push('\n');
    }
    write_file(path, &out)
}

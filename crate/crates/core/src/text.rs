//! String helpers shared by the loaders, the linker and the cleaners.
//!
//! All offsets handed around by this crate count Unicode scalar values, not
//! bytes. Case folding is done per character and only when the lowercase
//! mapping is a single character, so folded text keeps the character offsets
//! of its source.

use std::borrow::Cow;

pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Length-preserving case fold.
pub fn fold(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

/// Case fold, trim, and collapse internal whitespace runs to one space.
pub fn normalize_phrase(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().map(fold_char));
    }
    out
}

/// Trim and collapse internal whitespace without changing case.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offsets for every character boundary of a string.
///
/// `offsets[i]` is the byte position of character `i`; the final entry is
/// `text.len()`.
#[derive(Clone, Debug)]
pub struct CharIndex {
    offsets: Vec<usize>,
}

impl CharIndex {
    pub fn new(text: &str) -> Self {
        let mut offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        offsets.push(text.len());
        CharIndex { offsets }
    }

    pub fn char_len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn byte(&self, char_offset: usize) -> usize {
        self.offsets[char_offset]
    }

    /// Character offset for a byte position on a character boundary.
    pub fn char_at_byte(&self, byte: usize) -> Option<usize> {
        self.offsets.binary_search(&byte).ok()
    }

    pub fn slice<'a>(&self, text: &'a str, start: usize, end: usize) -> Option<&'a str> {
        if start > end || end > self.char_len() {
            return None;
        }
        Some(&text[self.offsets[start]..self.offsets[end]])
    }
}

/// Escape a free-text TSV field: backslash, tab, newline and carriage return
/// become `\\`, `\t`, `\n` and `\r`.
pub fn escape_field(s: &str) -> Cow<'_, str> {
    if !s.contains(['\\', '\t', '\n', '\r']) {
        return Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

pub fn unescape_field(s: &str) -> Result<Cow<'_, str>, String> {
    if !s.contains('\\') {
        return Ok(Cow::Borrowed(s));
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape `\\{other}`")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(Cow::Owned(out))
}

/// Lines of a text file with 1-based numbers and line terminators removed.
pub(crate) fn numbered_lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content.lines().enumerate().map(|(i, l)| (i + 1, l))
}

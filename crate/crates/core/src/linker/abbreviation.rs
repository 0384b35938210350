//! Parenthesized short forms and their long forms in running text.
//!
//! A candidate short form is a single parenthesized token of 2 to 10
//! characters that starts with a letter or digit and contains a letter. Its
//! long form is searched in the at most eight words before the parenthesis,
//! without crossing sentence punctuation, by matching the short form's
//! letters right to left in order; the first letter must begin a word. The
//! long form is the shortest word-aligned suffix of that window satisfying
//! the match.

use crate::corpus::TextSpan;
use crate::text::fold_char;

const MAX_SHORT_LEN: usize = 10;
const MIN_SHORT_LEN: usize = 2;
const MAX_WINDOW_WORDS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbbreviationPair {
    pub long_span: TextSpan,
    pub short_span: TextSpan,
    pub abbreviation: String,
}

fn is_window_stop(c: char) -> bool {
    matches!(c, '.' | ';' | ':' | '!' | '?' | '(' | ')' | '[' | ']')
}

pub fn detect_abbreviations(content: &str) -> Vec<AbbreviationPair> {
    let chars: Vec<char> = content.chars().collect();
    let mut out = Vec::new();
    for open in 0..chars.len() {
        if chars[open] != '(' {
            continue;
        }
        let Some(close) =
            chars[open + 1..].iter().take(MAX_SHORT_LEN + 1).position(|&c| c == ')').map(|i| open + 1 + i)
        else {
            continue;
        };
        let short = &chars[open + 1..close];
        if !is_short_form(short) {
            continue;
        }
        let Some((win_start, win_end)) = window_before(&chars, open) else {
            continue;
        };
        let window = &chars[win_start..win_end];
        if let Some(rel) = best_long_form(window, short) {
            let long_start = win_start + rel;
            if win_end - long_start <= short.len() {
                continue;
            }
            out.push(AbbreviationPair {
                long_span: TextSpan::new(long_start, win_end),
                short_span: TextSpan::new(open + 1, close),
                abbreviation: short.iter().collect(),
            });
        }
    }
    out
}

fn is_short_form(short: &[char]) -> bool {
    (MIN_SHORT_LEN..=MAX_SHORT_LEN).contains(&short.len())
        && short[0].is_alphanumeric()
        && short.iter().any(|c| c.is_alphabetic())
        && !short.iter().any(|c| c.is_whitespace() || matches!(c, '(' | ')'))
}

/// Character range of the words preceding `open`, trailing whitespace
/// excluded.
fn window_before(chars: &[char], open: usize) -> Option<(usize, usize)> {
    let mut end = open;
    while end > 0 && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    if end == 0 {
        return None;
    }
    let mut start = end;
    let mut words = 0;
    let mut in_word = false;
    while start > 0 {
        let c = chars[start - 1];
        if is_window_stop(c) {
            break;
        }
        if c.is_whitespace() {
            in_word = false;
        } else if !in_word {
            if words == MAX_WINDOW_WORDS {
                break;
            }
            words += 1;
            in_word = true;
        }
        start -= 1;
    }
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    (start < end).then_some((start, end))
}

/// Start offset (within `long`) of the shortest word-aligned suffix whose
/// characters cover the short form's letters and digits in order.
fn best_long_form(long: &[char], short: &[char]) -> Option<usize> {
    let mut s = short.len() as isize - 1;
    let mut l = long.len() as isize - 1;
    while s >= 0 {
        let c = fold_char(short[s as usize]);
        if !c.is_alphanumeric() {
            s -= 1;
            continue;
        }
        while (l >= 0 && fold_char(long[l as usize]) != c)
            || (s == 0 && l > 0 && long[l as usize - 1].is_alphanumeric())
        {
            l -= 1;
        }
        if l < 0 {
            return None;
        }
        l -= 1;
        s -= 1;
    }
    let first = (l + 1) as usize;
    Some(long[..first].iter().rposition(|c| c.is_whitespace()).map_or(0, |i| i + 1))
}

//! Predicate phrase normalization: drop function words, adverbs and
//! auxiliaries, then lemmatize what is left.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use crate::text::fold;

const BE_HAVE: [&str; 14] =
    ["be", "am", "is", "are", "was", "were", "been", "being", "have", "has", "had", "having", "'ve", "'m"];
const NEGATIONS: [&str; 3] = ["not", "never", "no"];

struct Lexicon {
    stopwords: HashSet<&'static str>,
    adverbs: HashSet<&'static str>,
    ly_exceptions: HashSet<&'static str>,
    lemmas: HashMap<&'static str, &'static str>,
}

fn entries(resource: &'static str) -> impl Iterator<Item = &'static str> {
    resource.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn lexicon() -> &'static Lexicon {
    static LEXICON: OnceLock<Lexicon> = OnceLock::new();
    LEXICON.get_or_init(|| Lexicon {
        stopwords: entries(include_str!("../../resources/stopwords.txt")).collect(),
        adverbs: entries(include_str!("../../resources/adverbs.txt")).collect(),
        ly_exceptions: entries(include_str!("../../resources/ly_exceptions.txt")).collect(),
        lemmas: entries(include_str!("../../resources/lemma_exceptions.txt"))
            .filter_map(|l| l.split_once('\t'))
            .collect(),
    })
}

fn is_adverb(word: &str) -> bool {
    let lex = lexicon();
    lex.adverbs.contains(word) || (word.len() > 4 && word.ends_with("ly") && !lex.ly_exceptions.contains(word))
}

fn is_removable(word: &str) -> bool {
    let lex = lexicon();
    BE_HAVE.contains(&word) || lex.stopwords.contains(word) || is_adverb(word)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Restore the stem of an `-ed`/`-ing` form.
fn restore_stem(stem: &str) -> Option<String> {
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n < 2 || !chars.iter().any(|&c| is_vowel(c) || c == 'y') {
        return None;
    }
    if n >= 3
        && chars[n - 1] == chars[n - 2]
        && !is_vowel(chars[n - 1])
        && !matches!(chars[n - 1], 'l' | 's' | 'z' | 'f')
    {
        return Some(chars[..n - 1].iter().collect());
    }
    const E_ENDINGS: [&str; 15] =
        ["at", "iz", "bl", "pl", "tl", "dl", "uc", "ac", "us", "ag", "rg", "v", "ois", "ais", "eas"];
    if E_ENDINGS.iter().any(|e| stem.ends_with(e)) {
        return Some(format!("{stem}e"));
    }
    Some(stem.to_string())
}

/// One step of the exception table or the suffix rules.
fn lemma_step(word: &str) -> String {
    if let Some(l) = lexicon().lemmas.get(word) {
        return l.to_string();
    }
    let len = word.chars().count();
    let rules: Option<String> = if len > 4 && (word.ends_with("ies") || word.ends_with("ied")) {
        Some(format!("{}y", &word[..word.len() - 3]))
    } else if len > 4 && word.ends_with("eed") {
        Some(word[..word.len() - 1].to_string())
    } else if len > 4 && word.ends_with("ing") {
        restore_stem(&word[..word.len() - 3])
    } else if len > 3 && word.ends_with("ed") {
        restore_stem(&word[..word.len() - 2])
    } else if len > 3 && ["ches", "shes", "sses", "xes", "zes"].iter().any(|s| word.ends_with(s)) {
        Some(word[..word.len() - 2].to_string())
    } else if len > 3 && word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        Some(word[..word.len() - 1].to_string())
    } else {
        None
    };
    rules.unwrap_or_else(|| word.to_string())
}

/// Lemma of a folded token. A rewrite is applied only when its result is
/// stable under another rewrite and is not itself a removable word; this
/// keeps normalization idempotent.
pub fn lemmatize(word: &str) -> String {
    if !word.chars().all(char::is_alphabetic) {
        return word.to_string();
    }
    let once = lemma_step(word);
    let blocked = is_removable(&once) || NEGATIONS.contains(&once.as_str()) || once == "to";
    if once != word && lemma_step(&once) == once && !blocked {
        once
    } else {
        word.to_string()
    }
}

fn tokenize(phrase: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in fold(phrase).split_whitespace() {
        let token = raw.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'');
        let token = token.trim_start_matches('\'');
        if token.is_empty() {
            continue;
        }
        match token {
            "can't" | "cannot" => out.extend(["can".to_string(), "not".to_string()]),
            "won't" => out.extend(["will".to_string(), "not".to_string()]),
            t if t.ends_with("n't") => {
                out.push(t[..t.len() - 3].trim_matches('\'').to_string());
                out.push("not".to_string());
            }
            t => out.push(t.trim_end_matches('\'').to_string()),
        }
    }
    out.retain(|t| !t.is_empty());
    out
}

/// Normalize a verb phrase to space-separated lemmas. With `keep_negations`
/// the words not, never and no stay in position; otherwise they are removed
/// along with stopwords, adverbs and forms of be and have. The result may be
/// empty.
pub fn normalize_predicate(phrase: &str, keep_negations: bool) -> String {
    let mut kept: Vec<String> = Vec::new();
    for token in tokenize(phrase) {
        if NEGATIONS.contains(&token.as_str()) {
            if keep_negations {
                kept.push(token);
            }
            continue;
        }
        if is_removable(&token) {
            continue;
        }
        kept.push(lemmatize(&token));
    }
    let first = kept.iter().position(|t| t != "to").unwrap_or(kept.len());
    kept[first..].join(" ")
}

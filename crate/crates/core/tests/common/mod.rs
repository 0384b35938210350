#![allow(dead_code)]

pub mod cases;
pub mod gen;
pub mod roundtrip;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};

use ietk::corpus::{
    load_documents, load_parses, DocumentFormat, DocumentStore, DocumentText, EntityMention, InvalidSentences,
    SentenceParse, TextSpan, Token,
};
use ietk::linker::{build_matcher, link_document, LinkerOptions};
use ietk::openie_clean::{load_openie_tsv, OpenIETriple};
use ietk::vocabulary::{load_entity_vocab, load_ignore_list, EntityVocabulary};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub struct Mini {
    pub docs: DocumentStore,
    pub parses: Vec<SentenceParse>,
    pub mentions: Vec<EntityMention>,
    pub triples: Vec<OpenIETriple>,
}

/// The mini corpus with dictionary mentions linked under default options.
pub fn mini() -> Mini {
    let docs =
        DocumentStore::new(load_documents(&fixture("mini/documents.pubtator"), DocumentFormat::Pubtator).unwrap())
            .unwrap();
    let parses = load_parses(&fixture("mini/parses.conllu"), InvalidSentences::Abort).unwrap().sentences;
    let mut vocab = EntityVocabulary::new();
    for f in ["mini/entities_wikidata.tsv", "mini/entities_pharmacy.tsv"] {
        vocab.merge(load_entity_vocab(&fixture(f)).unwrap());
    }
    let ignore = load_ignore_list(&fixture("mini/ignore.txt")).unwrap();
    let options = LinkerOptions::default();
    let matcher = build_matcher(&vocab, &ignore, &options);
    let mut mentions = Vec::new();
    for d in docs.documents() {
        let text = docs.text(&d.id).unwrap();
        mentions.extend(link_document(&d.id, text, &parses, &matcher, &options));
    }
    let triples = load_openie_tsv(&fixture("mini/openie.tsv")).unwrap();
    Mini { docs, parses, mentions, triples }
}

/// A random tree over `n` tokens: a random order, each later node attached
/// to a uniformly chosen earlier one.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> SentenceParse {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0usize; n + 1];
    for i in 1..n {
        heads[order[i]] = order[rng.gen_range(0..i)];
    }
    let mut tokens = Vec::with_capacity(n);
    let mut offset = 0;
    for (i, &head) in heads.iter().enumerate().skip(1) {
        let surface = format!("w{i}");
        let len = surface.len();
        tokens.push(Token {
            index: i,
            surface: surface.clone(),
            lemma: surface,
            upos: "NOUN".into(),
            head,
            deprel: if head == 0 { "root".into() } else { "dep".into() },
            span: TextSpan::new(offset, offset + len),
        });
        offset += len + 1;
    }
    let text = tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
    let parse = SentenceParse { doc_id: "t".into(), sentence_index: 0, tokens, text };
    parse.validate().unwrap();
    parse
}

/// Shortest path by breadth-first search over the undirected tree.
pub fn bfs_path(parse: &SentenceParse, a: usize, b: usize) -> Vec<usize> {
    let n = parse.tokens.len();
    let mut adj = vec![Vec::new(); n + 1];
    for t in &parse.tokens {
        if t.head != 0 {
            adj[t.index].push(t.head);
            adj[t.head].push(t.index);
        }
    }
    let mut prev = vec![usize::MAX; n + 1];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &y in &adj[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Surviving triple indices per filter mode.
pub fn survivors(statements: &[ietk::statement::RawStatement]) -> BTreeSet<usize> {
    statements.iter().filter_map(|s| s.source).collect()
}

pub fn doc_text(id: &str, title: &str, body: &str) -> DocumentText {
    DocumentText::new(&ietk::corpus::Document::new(id, title, body))
}

pub const ORACLE_VOCAB: &str = "\
P1\tPerson\tAlbert Einstein;Einstein
P2\tPerson\tHans Albert Einstein;Hans Albert
O1\tOrg\tRoyal Society;RS
O2\tOrg\tWorld Health Organization;WHO
C1\tDisease\tdiabetes mellitus;diabetes
C2\tDisease\ttype 1 diabetes mellitus;T1DM
C3\tDisease\tdiabetes
D1\tDrug\taspirin;acetylsalicylic acid;ASA
D2\tDrug\tvalsartan
D3\tDrug\tIris
G1\tGene\tcyclooxygenase-2;COX-2
G2\tGene\tvalsartan receptor
N1\tCountry\tUnited States;United States of America;USA;US
";

const FILLERS: [&str; 24] = [
    "the",
    "patients",
    "were",
    "treated",
    "with",
    "and",
    "in",
    "of",
    "study",
    "effect",
    "trial",
    "society",
    "world",
    "health",
    "type",
    "receptor",
    "States",
    "Albert",
    "einsteinium",
    "aspirins",
    "iris",
    "diabetic",
    "mellitus",
    "organization",
];

const PLANTS: [&str; 20] = [
    "Albert Einstein",
    "Einstein",
    "Hans Albert Einstein",
    "Hans Albert",
    "Royal Society (RS)",
    "RS",
    "World Health Organization (WHO)",
    "WHO",
    "diabetes mellitus",
    "diabetes",
    "type 1 diabetes mellitus (T1DM)",
    "T1DM",
    "aspirin",
    "acetylsalicylic acid (ASA)",
    "ASA",
    "valsartan receptor",
    "valsartan",
    "COX-2",
    "United States of America (USA)",
    "US",
];

/// A random ASCII document of `words` words with planted synonyms, random
/// casing and punctuation.
pub fn random_document(rng: &mut impl Rng, words: usize) -> String {
    let mut parts: Vec<String> = Vec::with_capacity(words);
    while parts.len() < words {
        let mut w = if rng.gen_bool(0.3) {
            PLANTS[rng.gen_range(0..PLANTS.len())].to_string()
        } else {
            FILLERS[rng.gen_range(0..FILLERS.len())].to_string()
        };
        match rng.gen_range(0..10) {
            0 => w = w.to_uppercase(),
            1 => w = w.to_lowercase(),
            _ => {}
        }
        match rng.gen_range(0..12) {
            0 => w.push(','),
            1 => w.push('.'),
            2 => w = format!("\"{w}\""),
            _ => {}
        }
        parts.push(w);
    }
    parts.join(" ")
}

fn word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Linker oracle: every substring is checked against the synonym set, then
/// the longest-match, homonym and abbreviation rules are applied.
pub fn brute_force_link(
    doc_id: &str,
    text: &str,
    vocab: &EntityVocabulary,
    ignore: &[&str],
    options: &LinkerOptions,
) -> Vec<EntityMention> {
    use ietk::linker::{detect_abbreviations, is_abbreviation_like, is_short_homonym};

    let norm = |s: &str| if options.case_sensitive { s.to_string() } else { s.to_lowercase() };
    // folded synonym -> (id, type, short, abbreviation)
    let mut table: BTreeMap<String, Vec<(String, String, bool, bool)>> = BTreeMap::new();
    for e in vocab.entries() {
        for s in e.synonyms() {
            if s.chars().count() < options.min_length || ignore.iter().any(|i| i.to_lowercase() == s.to_lowercase()) {
                continue;
            }
            table.entry(norm(s)).or_default().push((
                e.entity_id.clone(),
                e.entity_type.clone(),
                is_short_homonym(e, s),
                is_abbreviation_like(s),
            ));
        }
    }
    let max_len = table.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();

    // (start, end, id, short, abbr)
    type Candidate = (usize, usize, String, bool, bool);
    let mut by_type: BTreeMap<String, Vec<Candidate>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..=n.min(i + max_len) {
            let sub: String = chars[i..j].iter().collect();
            let Some(targets) = table.get(&norm(&sub)) else { continue };
            if i > 0 && word_char(chars[i - 1]) && word_char(chars[i]) {
                continue;
            }
            if j < n && word_char(chars[j - 1]) && word_char(chars[j]) {
                continue;
            }
            for (id, ty, short, abbr) in targets {
                by_type.entry(ty.clone()).or_default().push((i, j, id.clone(), *short, *abbr));
            }
        }
    }
    let mut resolved: Vec<(usize, usize, String, String, bool, bool)> = Vec::new();
    for (ty, mut cands) in by_type {
        cands.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)));
        let mut taken: Vec<(usize, usize)> = Vec::new();
        for (s, e, id, short, abbr) in cands {
            if taken.iter().all(|&(ts, te)| e <= ts || te <= s) {
                taken.push((s, e));
                resolved.push((s, e, id, ty.clone(), short, abbr));
            }
        }
    }
    let pairs = detect_abbreviations(text);
    let licensers: Vec<&(usize, usize, String, String, bool, bool)> =
        resolved.iter().filter(|r| !r.4 && !r.5).collect();
    let mut out: Vec<EntityMention> = Vec::new();
    for r in &resolved {
        let (s, e, id, ty, short, abbr) = r;
        if options.homonym_rule && *short && !licensers.iter().any(|l| &l.2 == id && &l.3 == ty && l.1 - l.0 > e - s) {
            continue;
        }
        if options.abbreviation_rule && *abbr {
            let surface: String = chars[*s..*e].iter().collect();
            let ok = pairs.iter().any(|p| {
                norm(&p.abbreviation) == norm(&surface)
                    && licensers
                        .iter()
                        .any(|l| &l.2 == id && &l.3 == ty && p.long_span.start <= l.0 && l.1 <= p.long_span.end)
            });
            if !ok {
                continue;
            }
        }
        out.push(EntityMention {
            doc_id: doc_id.to_string(),
            span: TextSpan::new(*s, *e),
            entity_type: ty.clone(),
            entity_id: id.clone(),
            surface: chars[*s..*e].iter().collect(),
            origin: ietk::corpus::Origin::Dictionary,
        });
    }
    out.sort();
    out
}

fn key_rows(rel: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(fixture(rel))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

/// `(complex, sentence)` rows of the hand-labeled sentence key.
pub fn sentence_key() -> Vec<(bool, String)> {
    key_rows("complexity/sentences.tsv").into_iter().map(|r| (r[0] == "complex", r[1].clone())).collect()
}

pub struct PhraseCase {
    pub complex: bool,
    pub sentence_complex: bool,
    pub phrase: String,
    pub sentence: String,
}

pub fn phrase_key() -> Vec<PhraseCase> {
    key_rows("complexity/phrases.tsv")
        .into_iter()
        .map(|r| PhraseCase {
            complex: r[0] == "complex",
            sentence_complex: r[1] == "true",
            phrase: r[2].clone(),
            sentence: r[3].clone(),
        })
        .collect()
}

/// `(text, [(long form, short form)])` rows of the abbreviation key.
pub fn abbreviation_key() -> Vec<(String, Vec<(String, String)>)> {
    key_rows("abbreviations/key.tsv")
        .into_iter()
        .map(|r| {
            let pairs = r
                .get(1)
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.split('|')
                        .map(|pair| {
                            let (l, s) = pair.split_once("=>").unwrap();
                            (l.to_string(), s.to_string())
                        })
                        .collect()
                })
                .unwrap_or_default();
            (r[0].clone(), pairs)
        })
        .collect()
}

/// `(long form, short form)` pairs found by the detector.
pub fn detected_pairs(text: &str) -> Vec<(String, String)> {
    let chars: Vec<char> = text.chars().collect();
    ietk::linker::detect_abbreviations(text)
        .into_iter()
        .map(|p| (chars[p.long_span.start..p.long_span.end].iter().collect(), p.abbreviation))
        .collect()
}

/// A private copy of the mini corpus files; returns the directory guard and
/// the path of its configuration.
pub fn mini_copy() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture("mini")).unwrap() {
        let path = entry.unwrap().path();
        if path.is_file() {
            std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
        }
    }
    let config = dir.path().join("config.toml");
    (dir, config)
}

/// Stage output files under a workspace by relative path. Manifests and the
/// run log carry timings and are left out.
pub fn workspace_outputs(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let name = path.file_name().unwrap().to_str().unwrap();
            if name == "manifest.json" || name == "run_log.json" {
                continue;
            }
            let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            out.insert(rel, std::fs::read(&path).unwrap());
        }
    }
    out
}

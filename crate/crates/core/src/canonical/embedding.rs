//! Word vectors in the plain text format: a `count dimension` header line,
//! then one `token v1 ... vd` line per vector.

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::read_file;
use crate::error::{Error, Result};
use crate::text::fold;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingModel {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingModel {
    /// Build from `(token, vector)` pairs. Tokens are case-folded; the first
    /// vector wins when two tokens fold together.
    pub fn new<I, S>(dimension: usize, vectors: I) -> std::result::Result<Self, String>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        if dimension == 0 {
            return Err("embedding dimension must be positive".to_string());
        }
        let mut map = HashMap::new();
        for (token, v) in vectors {
            if v.len() != dimension {
                return Err(format!(
                    "vector for `{}` has {} components, expected {dimension}",
                    token.as_ref(),
                    v.len()
                ));
            }
            map.entry(fold(token.as_ref())).or_insert(v);
        }
        Ok(EmbeddingModel { dimension, vectors: map })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(&fold(token)).map(Vec::as_slice)
    }

    /// Multiply every vector by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        EmbeddingModel {
            dimension: self.dimension,
            vectors: self.vectors.iter().map(|(k, v)| (k.clone(), v.iter().map(|x| x * factor).collect())).collect(),
        }
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingModel> {
    parse_embeddings(&read_file(path)?, path)
}

pub fn parse_embeddings(content: &str, source: &Path) -> Result<EmbeddingModel> {
    let mut lines = content.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::format(source, 1, "missing `count dimension` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_count = |s: &str| s.parse::<usize>().ok();
    let (count, dimension) = match fields.as_slice() {
        [c, d] => match (parse_count(c), parse_count(d)) {
            (Some(c), Some(d)) if d > 0 => (c, d),
            _ => return Err(Error::format(source, 1, format!("invalid header `{header}`"))),
        },
        _ => return Err(Error::format(source, 1, format!("invalid header `{header}`"))),
    };
    let mut rows = Vec::with_capacity(count);
    for (line_no, line) in lines {
        let mut parts = line.split_whitespace();
        let token = parts.next().unwrap_or_default();
        let values = parts
            .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::format(source, line_no, "vector component is not a finite number"))?;
        if values.len() != dimension {
            return Err(Error::format(
                source,
                line_no,
                format!("expected {dimension} components, found {}", values.len()),
            ));
        }
        rows.push((token.to_string(), values));
    }
    if rows.len() != count {
        return Err(Error::format(source, 1, format!("header announces {count} vectors, file has {}", rows.len())));
    }
    EmbeddingModel::new(dimension, rows).map_err(Error::Invalid)
}

pub fn phrase_tokens(phrase: &str) -> Vec<String> {
    fold(phrase)
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Mean of the vectors of the known tokens, or `None` if no token is known.
pub fn phrase_vector(model: &EmbeddingModel, phrase: &str) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; model.dimension()];
    let mut known = 0usize;
    for token in phrase_tokens(phrase) {
        if let Some(v) = model.vectors.get(&token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            known += 1;
        }
    }
    if known == 0 {
        return None;
    }
    for s in &mut sum {
        *s /= known as f64;
    }
    Some(sum)
}

/// Cosine similarity; `None` when either vector has zero length.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "2 3\nTreat 1 0 0\ncure 0 1 0\n";

    #[test]
    fn loads_small_model() {
        let m = parse_embeddings(SMALL, Path::new("v")).unwrap();
        assert_eq!(m.dimension(), 3);
        assert_eq!(m.len(), 2);
        assert_eq!(m.get("treat"), Some(&[1.0, 0.0, 0.0][..]));
    }

    #[test]
    fn wrong_arity_is_a_line_error() {
        let e = parse_embeddings("2 3\na 1 0 0\nb 1 0\n", Path::new("v")).unwrap_err().to_string();
        assert!(e.contains("v:3"), "{e}");
        assert!(parse_embeddings("3 3\na 1 0 0\n", Path::new("v")).is_err());
        assert!(parse_embeddings("x\n", Path::new("v")).is_err());
    }

    #[test]
    fn phrase_vector_is_mean_of_known_tokens() {
        let m = parse_embeddings(SMALL, Path::new("v")).unwrap();
        assert_eq!(phrase_vector(&m, "treat"), Some(vec![1.0, 0.0, 0.0]));
        assert_eq!(phrase_vector(&m, "treat cure"), Some(vec![0.5, 0.5, 0.0]));
        assert_eq!(phrase_vector(&m, "unknown words"), None);
    }

    #[test]
    fn cosine_handles_zero_vectors() {
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), None);
        assert!((cosine(&[1.0, 1.0], &[2.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
    }
}

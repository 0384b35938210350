//! Subject–predicate–object records shared by the extractors, the cleaners
//! and canonicalization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::EntityMention;

/// One side of a statement: a linked entity or, for unfiltered OpenIE
/// output, the original noun phrase.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Argument {
    Entity(EntityMention),
    Phrase(String),
}

impl Argument {
    pub fn text(&self) -> &str {
        match self {
            Argument::Entity(m) => &m.surface,
            Argument::Phrase(p) => p,
        }
    }

    pub fn entity_type(&self) -> Option<&str> {
        match self {
            Argument::Entity(m) => Some(&m.entity_type),
            Argument::Phrase(_) => None,
        }
    }

    pub fn entity_id(&self) -> Option<&str> {
        match self {
            Argument::Entity(m) => Some(&m.entity_id),
            Argument::Phrase(_) => None,
        }
    }

    pub fn mention(&self) -> Option<&EntityMention> {
        match self {
            Argument::Entity(m) => Some(m),
            Argument::Phrase(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trigger {
    Verb,
    Keyword,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extractor {
    Pathie,
    Openie,
}

macro_rules! str_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    other => Err(format!("unknown {} `{other}`", stringify!($ty).to_lowercase())),
                }
            }
        }
    };
}

str_enum!(Trigger { Verb => "verb", Keyword => "keyword" });
str_enum!(Extractor { Pathie => "pathie", Openie => "openie" });
str_enum!(Mapping { ExactSynonym => "exact_synonym", Embedding => "embedding", Unmapped => "unmapped" });

/// A statement before canonicalization. Field order gives the output sort
/// order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawStatement {
    pub doc_id: String,
    /// Known for PathIE; for OpenIE only when the sentence could be located.
    pub sentence_index: Option<usize>,
    /// Index of the OpenIE triple this statement came from.
    pub source: Option<usize>,
    pub subject: Argument,
    pub object: Argument,
    pub predicate_surface: String,
    pub predicate_lemma: String,
    /// Only PathIE statements have a trigger.
    pub trigger: Option<Trigger>,
    pub extractor: Extractor,
    pub sentence: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    ExactSynonym,
    Embedding,
    Unmapped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalStatement {
    pub statement: RawStatement,
    /// Present unless `mapping` is `Unmapped`.
    pub relation: Option<String>,
    pub mapping: Mapping,
    /// Cosine similarity, only for embedding mappings.
    pub similarity: Option<f64>,
}

//! Declarative pipeline configuration in TOML. Relative paths are resolved
//! against the directory of the configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalizationParams;
use crate::corpus::{read_file, AnnotationFormat, DocumentFormat, InvalidSentences};
use crate::error::{Error, Result};
use crate::linker::LinkerOptions;
use crate::openie_clean::FilterMode;
use crate::vocabulary::LabelRule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub workspace: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub corpus: CorpusConfig,
    pub vocabulary: VocabularyConfig,
    #[serde(default)]
    pub linker: LinkerOptions,
    #[serde(default)]
    pub extractors: ExtractorSelection,
    #[serde(default)]
    pub pathie: PathieConfig,
    #[serde(default)]
    pub openie: OpenieConfig,
    #[serde(default)]
    pub canonical: CanonicalizationParams,
    #[serde(default)]
    pub analytics: AnalyticsConfig,
}

fn default_workers() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub documents: PathBuf,
    pub document_format: Option<DocumentFormat>,
    pub parses: Option<PathBuf>,
    #[serde(default = "default_invalid")]
    pub invalid_sentences: InvalidSentencesSetting,
    pub openie: Option<PathBuf>,
    pub external_mentions: Option<PathBuf>,
    #[serde(default = "default_annotation_format")]
    pub external_format: AnnotationFormat,
}

fn default_invalid() -> InvalidSentencesSetting {
    InvalidSentencesSetting::Skip
}

fn default_annotation_format() -> AnnotationFormat {
    AnnotationFormat::Pubtator
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvalidSentencesSetting {
    Skip,
    Abort,
}

impl From<InvalidSentencesSetting> for InvalidSentences {
    fn from(s: InvalidSentencesSetting) -> Self {
        match s {
            InvalidSentencesSetting::Skip => InvalidSentences::Skip,
            InvalidSentencesSetting::Abort => InvalidSentences::Abort,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabularyConfig {
    pub entities: Vec<PathBuf>,
    pub relations: Option<PathBuf>,
    pub ignore: Option<PathBuf>,
    pub constraints: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    #[serde(default)]
    pub rules: Vec<LabelRule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractorSelection {
    #[serde(default)]
    pub pathie: bool,
    #[serde(default)]
    pub openie_clean: bool,
}

impl Default for ExtractorSelection {
    fn default() -> Self {
        ExtractorSelection { pathie: true, openie_clean: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathieConfig {
    pub keywords: Option<PathBuf>,
    #[serde(default)]
    pub keep_negations: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenieConfig {
    #[serde(default)]
    pub filter: FilterMode,
    #[serde(default)]
    pub keep_negations: bool,
    #[serde(default)]
    pub entity_sentences_only: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticsConfig {
    pub connectives: Option<PathBuf>,
    pub prepositions: Option<PathBuf>,
}

impl PipelineConfig {
    /// Parse without checking referenced files. Relative paths are resolved
    /// against `base`.
    pub fn from_toml(content: &str, base: &Path) -> Result<Self> {
        let mut config: PipelineConfig =
            toml::from_str(content).map_err(|e| Error::Config(vec![e.message().to_string()]))?;
        config.resolve(base);
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let fix_opt = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        fix(&mut self.workspace);
        fix(&mut self.corpus.documents);
        fix_opt(&mut self.corpus.parses);
        fix_opt(&mut self.corpus.openie);
        fix_opt(&mut self.corpus.external_mentions);
        self.vocabulary.entities.iter_mut().for_each(fix);
        fix_opt(&mut self.vocabulary.relations);
        fix_opt(&mut self.vocabulary.ignore);
        fix_opt(&mut self.vocabulary.constraints);
        fix_opt(&mut self.vocabulary.embeddings);
        fix_opt(&mut self.pathie.keywords);
        fix_opt(&mut self.analytics.connectives);
        fix_opt(&mut self.analytics.prepositions);
    }

    /// Document format from the setting or, failing that, the extension.
    pub fn document_format(&self) -> DocumentFormat {
        self.corpus.document_format.unwrap_or_else(|| {
            match self.corpus.documents.extension().and_then(|e| e.to_str()) {
                Some("jsonl") | Some("json") => DocumentFormat::Jsonl,
                _ => DocumentFormat::Pubtator,
            }
        })
    }

    /// Every problem with the configuration.
    pub fn problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut require = |label: &str, path: &Path| {
            if !path.is_file() {
                problems.push(format!("{label}: file not found: {}", path.display()));
            }
        };
        require("corpus.documents", &self.corpus.documents);
        for (label, p) in [
            ("corpus.parses", &self.corpus.parses),
            ("corpus.openie", &self.corpus.openie),
            ("corpus.external_mentions", &self.corpus.external_mentions),
            ("vocabulary.relations", &self.vocabulary.relations),
            ("vocabulary.ignore", &self.vocabulary.ignore),
            ("vocabulary.constraints", &self.vocabulary.constraints),
            ("vocabulary.embeddings", &self.vocabulary.embeddings),
            ("pathie.keywords", &self.pathie.keywords),
            ("analytics.connectives", &self.analytics.connectives),
            ("analytics.prepositions", &self.analytics.prepositions),
        ] {
            if let Some(p) = p {
                require(label, p);
            }
        }
        for (i, p) in self.vocabulary.entities.iter().enumerate() {
            require(&format!("vocabulary.entities[{i}]"), p);
        }
        if self.vocabulary.entities.is_empty() {
            problems.push("vocabulary.entities: at least one entity vocabulary is required".to_string());
        }
        if self.workers == 0 {
            problems.push("workers must be at least 1".to_string());
        }
        if let Err(e) = self.linker.validate() {
            problems.push(format!("linker: {e}"));
        }
        if let Err(e) = self.canonical.validate() {
            problems.push(format!("canonical: {e}"));
        }
        if !self.extractors.pathie && !self.extractors.openie_clean {
            problems.push("extractors: enable at least one of pathie and openie_clean".to_string());
        }
        if self.extractors.pathie && self.corpus.parses.is_none() {
            problems.push("extractors.pathie requires corpus.parses".to_string());
        }
        if self.extractors.openie_clean && self.corpus.openie.is_none() {
            problems.push("extractors.openie_clean requires corpus.openie".to_string());
        }
        if self.openie.entity_sentences_only && self.corpus.parses.is_none() {
            problems.push("openie.entity_sentences_only requires corpus.parses".to_string());
        }
        problems
    }
}

/// Load, resolve and validate a configuration file. All problems are
/// reported together.
pub fn validate_config(path: &Path) -> Result<PipelineConfig> {
    let content = read_file(path).map_err(|e| Error::Config(vec![e.to_string()]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let config = PipelineConfig::from_toml(&content, base)?;
    config.check()?;
    Ok(config)
}

impl PipelineConfig {
    pub fn check(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

//! Consolidated report over a workspace.

use std::path::Path;

use super::stages::{outputs, COMPLEXITY, PREDICATES};
use super::workspace::{RunLog, Stage, StageStatus, Workspace, RUN_LOG_FILE};
use crate::analytics::aligned_table;
use crate::corpus::read_file;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct StageSummary {
    pub stage: Stage,
    pub status: StageStatus,
    /// Wall time in the most recent run; zero when the stage was skipped.
    pub last_run_seconds: f64,
    /// Wall time of the run that produced the current outputs.
    pub build_seconds: f64,
    /// Data rows per output file, headers excluded.
    pub rows: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub stages: Vec<StageSummary>,
    pub total_seconds: f64,
    pub complexity: Option<String>,
    pub top_predicates: Vec<String>,
}

const TOP_PREDICATES: usize = 10;

fn data_rows(path: &Path) -> Result<usize> {
    let content = read_file(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    let lines = content.lines().filter(|l| !l.is_empty());
    Ok(match ext {
        "conllu" => lines.filter(|l| l.starts_with("# sent_index")).count(),
        // entity vocabularies and jsonl carry no header line
        "jsonl" => lines.count(),
        _ if path.file_name().is_some_and(|n| n == "entities.tsv") => lines.count(),
        _ => lines.count().saturating_sub(1),
    })
}

/// Summarize every stage with a manifest. Fails when no stage has completed.
pub fn report(workspace: &Path) -> Result<RunReport> {
    let ws = Workspace::new(workspace);
    let log: RunLog = match read_file(&workspace.join(RUN_LOG_FILE)) {
        Ok(s) => serde_json::from_str(&s)
            .map_err(|e| Error::format(workspace.join(RUN_LOG_FILE), e.line(), e.to_string()))?,
        Err(_) => RunLog::default(),
    };
    let mut stages = Vec::new();
    for stage in Stage::ALL {
        let Some(m) = ws.manifest(stage)? else { continue };
        let mut rows = Vec::new();
        if m.status == StageStatus::Done {
            for file in outputs(stage) {
                rows.push((file.to_string(), data_rows(&ws.output(stage, file))?));
            }
        }
        let last_run_seconds = log.stages.iter().find(|e| e.stage == stage).map_or(0.0, |e| e.elapsed_seconds);
        stages.push(StageSummary { stage, status: m.status, last_run_seconds, build_seconds: m.elapsed_seconds, rows });
    }
    if !stages.iter().any(|s| s.status == StageStatus::Done) {
        return Err(Error::Invalid(format!("workspace {} has no completed stage", workspace.display())));
    }
    let done = |stage: Stage| stages.iter().any(|s| s.stage == stage && s.status == StageStatus::Done);
    let complexity = if done(Stage::Stats) { Some(read_file(&ws.output(Stage::Stats, COMPLEXITY))?) } else { None };
    let top_predicates = if done(Stage::Canonicalize) {
        read_file(&ws.output(Stage::Canonicalize, PREDICATES))?
            .lines()
            .skip(1)
            .take(TOP_PREDICATES)
            .map(str::to_string)
            .collect()
    } else {
        Vec::new()
    };
    Ok(RunReport { stages, total_seconds: log.total_seconds, complexity, top_predicates })
}

impl RunReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("stage\tstatus\tlast_run_seconds\tbuild_seconds\toutput\trows\n");
        for s in &self.stages {
            let status = format!("{:?}", s.status).to_lowercase();
            if s.rows.is_empty() {
                out.push_str(&format!(
                    "{}\t{status}\t{:.3}\t{:.3}\t\t\n",
                    s.stage, s.last_run_seconds, s.build_seconds
                ));
            }
            for (file, n) in &s.rows {
                out.push_str(&format!(
                    "{}\t{status}\t{:.3}\t{:.3}\t{file}\t{n}\n",
                    s.stage, s.last_run_seconds, s.build_seconds
                ));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut table = Vec::new();
        for s in &self.stages {
            let outputs = s.rows.iter().map(|(f, n)| format!("{f}={n}")).collect::<Vec<_>>().join(" ");
            table.push(vec![
                s.stage.to_string(),
                format!("{:?}", s.status).to_lowercase(),
                format!("{:.3}", s.last_run_seconds),
                format!("{:.3}", s.build_seconds),
                outputs,
            ]);
        }
        let mut out = aligned_table(&["stage", "status", "last run (s)", "build (s)", "rows"], &table);
        out.push_str(&format!("total wall time of last run: {:.3} s\n", self.total_seconds));
        if let Some(c) = &self.complexity {
            out.push_str("\ncomplexity\n");
            let rows: Vec<Vec<String>> =
                c.lines().skip(1).map(|l| l.split('\t').map(str::to_string).collect()).collect();
            out.push_str(&aligned_table(&["unit", "complex", "total", "percent"], &rows));
        }
        if !self.top_predicates.is_empty() {
            out.push_str("\nmost frequent predicates\n");
            let rows: Vec<Vec<String>> =
                self.top_predicates.iter().map(|l| l.split('\t').take(2).map(str::to_string).collect()).collect();
            out.push_str(&aligned_table(&["predicate", "count"], &rows));
        }
        out
    }
}

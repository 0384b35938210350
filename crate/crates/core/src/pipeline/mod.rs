//! Staged, resumable execution over a workspace directory.
//!
//! Each stage owns a subdirectory holding its output files and a
//! `manifest.json`. The manifest records a digest over the stage settings,
//! its configured input files and the digests of the upstream stages. A
//! stage whose digest and outputs are unchanged is skipped, and a changed
//! input invalidates every stage downstream of it.

mod config;
mod report;
mod stages;
mod workspace;

use std::collections::BTreeMap;
use std::time::Instant;

pub use config::{
    validate_config, AnalyticsConfig, CorpusConfig, ExtractorSelection, InvalidSentencesSetting, OpenieConfig,
    PathieConfig, PipelineConfig, VocabularyConfig,
};
pub use report::{report, RunReport, StageSummary};
pub use stages::outputs;
pub use workspace::{
    digest_bytes, digest_file, RunLog, RunLogEntry, Stage, StageManifest, StageStatus, Workspace, MANIFEST_FILE,
    RUN_LOG_FILE,
};

use crate::corpus::write_file;
use crate::error::{Error, Result};
use workspace::InputDigest;

/// Stages to run for the configuration, optionally restricted to `only`.
pub fn plan(config: &PipelineConfig, only: Option<&[Stage]>) -> Vec<Stage> {
    Stage::ALL
        .into_iter()
        .filter(|s| stages::enabled(config, *s))
        .filter(|s| only.is_none_or(|o| o.contains(s)))
        .collect()
}

fn input_digest(config: &PipelineConfig, ws: &Workspace, stage: Stage) -> Result<(String, BTreeMap<String, String>)> {
    let mut digest = InputDigest::default();
    stages::own_inputs(config, stage, &mut digest)?;
    for &up in stage.upstream() {
        if !stages::enabled(config, up) {
            continue;
        }
        let manifest = ws
            .manifest(up)?
            .filter(|m| m.status == StageStatus::Done)
            .ok_or_else(|| stages::missing_upstream(stage, up))?;
        digest.add(format!("{up}"), &manifest.input_digest);
        for (file, d) in &manifest.outputs {
            digest.add(format!("{up}/{file}"), d);
        }
    }
    Ok(digest.finish())
}

fn stage_error(stage: Stage, e: Error) -> Error {
    match e {
        e @ Error::Stage { .. } => e,
        other => Error::Stage { stage: stage.name().to_string(), message: other.to_string() },
    }
}

/// Run the planned stages in order, skipping stages that are current. A
/// failing stage is recorded in its manifest and stops the run.
pub fn run(config: &PipelineConfig, only: Option<&[Stage]>) -> Result<RunLog> {
    config.check()?;
    let started = Instant::now();
    let ws = Workspace::new(&config.workspace);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    let mut log = RunLog::default();
    let result = (|| -> Result<()> {
        for stage in plan(config, only) {
            let (digest, inputs) = input_digest(config, &ws, stage).map_err(|e| stage_error(stage, e))?;
            if ws.is_current(stage, &digest)? {
                log::info!("{stage}: up to date");
                log.stages.push(RunLogEntry { stage, executed: false, elapsed_seconds: 0.0 });
                continue;
            }
            log::info!("{stage}: running");
            let mut manifest = StageManifest {
                stage,
                status: StageStatus::Pending,
                input_digest: digest,
                inputs,
                outputs: BTreeMap::new(),
                elapsed_seconds: 0.0,
                error: None,
            };
            let dir = ws.stage_dir(stage);
            if dir.exists() {
                std::fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            }
            ws.write_manifest(&manifest)?;
            let t = Instant::now();
            let outcome = pool.install(|| stages::execute(config, &ws, stage));
            manifest.elapsed_seconds = t.elapsed().as_secs_f64();
            if let Err(e) = outcome {
                manifest.status = StageStatus::Failed;
                manifest.error = Some(e.to_string());
                ws.write_manifest(&manifest)?;
                return Err(stage_error(stage, e));
            }
            for file in stages::outputs(stage) {
                manifest.outputs.insert(file.to_string(), digest_file(&ws.output(stage, file))?);
            }
            manifest.status = StageStatus::Done;
            ws.write_manifest(&manifest)?;
            log.stages.push(RunLogEntry { stage, executed: true, elapsed_seconds: manifest.elapsed_seconds });
        }
        Ok(())
    })();
    log.total_seconds = started.elapsed().as_secs_f64();
    let mut json = serde_json::to_string_pretty(&log).expect("run log serializes");
    json.push('\n');
    write_file(&ws.root().join(RUN_LOG_FILE), &json)?;
    result.map(|()| log)
}

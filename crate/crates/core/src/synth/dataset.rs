//! Dataset builder: slides, plans, descriptions and frames on disk, indexed
//! by `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{scheme_seed, service, slide_id, slide_seed, synth_scheme, synth_slide, SynthConfig, SynthError};
use crate::grammar::{format_action_list, render_narrative};
use crate::model::{AnimationPlan, Language, SlideSpec};
use crate::render::{frame_count_for, render_video, RenderManifest, RenderOptions, FRAMES_DIR, RENDER_MANIFEST};

pub const DATASET_MANIFEST: &str = "manifest.json";
pub const SLIDE_FILE: &str = "slide.json";
pub const PLAN_FILE: &str = "plan.json";
pub const DESCRIPTION_FILE: &str = "description.txt";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Complete,
    Incomplete,
}

/// One rendered frame sequence of a triplet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderRef {
    pub fps: f64,
    pub frames_dir: String,
    pub manifest: String,
    pub n_frames: usize,
}

/// Paths are relative to the dataset root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletRecord {
    pub slide_id: String,
    pub scheme: usize,
    pub language: Language,
    pub slide_path: String,
    pub plan_path: String,
    pub description_path: String,
    pub renders: Vec<RenderRef>,
    pub n_steps: usize,
    pub split: Split,
    pub status: RecordStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub seed: u64,
    pub plan_only: bool,
    pub config: SynthConfig,
    pub records: Vec<TripletRecord>,
}

impl DatasetManifest {
    pub fn read(path: &Path) -> Result<Self, SynthError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| SynthError::Manifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn write(&self, root: &Path) -> Result<PathBuf, SynthError> {
        let path = root.join(DATASET_MANIFEST);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn complete(&self) -> impl Iterator<Item = &TripletRecord> {
        self.records.iter().filter(|r| r.status == RecordStatus::Complete)
    }

    pub fn count(&self, split: Split) -> usize {
        self.records.iter().filter(|r| r.split == split).count()
    }
}

#[derive(Clone, Debug, Default)]
pub struct DatasetOptions {
    /// Write plans and descriptions only.
    pub plan_only: bool,
    /// Reuse triplets whose files are already on disk.
    pub resume: bool,
    pub render: RenderOptions,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SynthError + '_ {
    move |source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// 1 in `every` records goes to test, keyed on a hash of (slide, scheme).
pub fn split_for(slide_id: &str, scheme: usize, every: u32) -> Split {
    let digest = Sha256::digest(format!("{slide_id}/{scheme}").as_bytes());
    let h = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    if h % every as u64 == 0 {
        Split::Test
    } else {
        Split::Train
    }
}

pub fn scheme_dir(slide_id: &str, scheme: usize) -> String {
    format!("{slide_id}/{scheme:02}")
}

fn fps_tag(fps: f64) -> String {
    format!("{fps}").replace('.', "_")
}

/// Render locations for each fps. A single fps uses the plain names.
fn render_names(dir: &str, fps_list: &[f64]) -> Vec<(f64, String, String)> {
    fps_list
        .iter()
        .map(|&fps| {
            if fps_list.len() == 1 {
                (fps, format!("{dir}/{FRAMES_DIR}"), format!("{dir}/{RENDER_MANIFEST}"))
            } else {
                let t = fps_tag(fps);
                (fps, format!("{dir}/{FRAMES_DIR}_{t}fps"), format!("{dir}/render_{t}fps.manifest"))
            }
        })
        .collect()
}

/// The text stored in `description.txt`.
pub fn description_text(plan: &AnimationPlan, narrative: &str) -> String {
    format!("{}\n\n{}\n", format_action_list(plan), narrative)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SynthError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn render_done(root: &Path, manifest: &str, slide: &SlideSpec) -> Option<usize> {
    let m = RenderManifest::read(&root.join(manifest)).ok()?;
    (m.slide_id == slide.slide_id).then_some(m.n_frames())
}

fn build_record(
    root: &Path,
    slide: &SlideSpec,
    scheme: usize,
    config: &SynthConfig,
    opts: &DatasetOptions,
    slide_index: usize,
) -> TripletRecord {
    let dir = scheme_dir(&slide.slide_id, scheme);
    let mut record = TripletRecord {
        slide_id: slide.slide_id.clone(),
        scheme,
        language: slide.language,
        slide_path: format!("{}/{SLIDE_FILE}", slide.slide_id),
        plan_path: format!("{dir}/{PLAN_FILE}"),
        description_path: format!("{dir}/{DESCRIPTION_FILE}"),
        renders: Vec::new(),
        n_steps: 0,
        split: split_for(&slide.slide_id, scheme, config.test_every),
        status: RecordStatus::Incomplete,
        annotations: Vec::new(),
        error: None,
    };
    if let Err(e) = fill_record(root, slide, scheme, config, opts, slide_index, &mut record) {
        warn!("{}/{}: {e}", slide.slide_id, scheme);
        record.error = Some(e);
    } else {
        record.status = RecordStatus::Complete;
    }
    record
}

fn fill_record(
    root: &Path,
    slide: &SlideSpec,
    scheme: usize,
    config: &SynthConfig,
    opts: &DatasetOptions,
    slide_index: usize,
    record: &mut TripletRecord,
) -> Result<(), String> {
    let plan = synth_scheme(scheme_seed(config, slide_index, scheme), slide, config).map_err(|e| e.to_string())?;
    record.n_steps = plan.steps.len();
    let dir = root.join(scheme_dir(&slide.slide_id, scheme));
    fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;

    let plan_path = root.join(&record.plan_path);
    let desc_path = root.join(&record.description_path);
    let have_text = opts.resume && plan_path.is_file() && desc_path.is_file();
    // On resume, service annotations come from the previous manifest.
    if !have_text {
        fs::write(&plan_path, plan.to_json() + "\n").map_err(|e| format!("{}: {e}", plan_path.display()))?;
        let narrative = match &config.external {
            Some(client) => {
                let (text, note) = service::describe_with_fallback(&plan, client);
                record.annotations.extend(note);
                text
            }
            None => render_narrative(&plan),
        };
        fs::write(&desc_path, description_text(&plan, &narrative))
            .map_err(|e| format!("{}: {e}", desc_path.display()))?;
    }

    if opts.plan_only {
        return Ok(());
    }
    let rel_dir = scheme_dir(&slide.slide_id, scheme);
    for (fps, frames_dir, manifest) in render_names(&rel_dir, &config.fps) {
        let n_frames = match opts.resume.then(|| render_done(root, &manifest, slide)).flatten() {
            Some(n) if frame_count_for(&plan, fps).ok() == Some(n) => n,
            _ => {
                let out = root.join(&frames_dir);
                let m = render_into(slide, &plan, fps, &out, &root.join(&manifest), &opts.render)?;
                m.n_frames()
            }
        };
        record.renders.push(RenderRef {
            fps,
            frames_dir,
            manifest,
            n_frames,
        });
    }
    Ok(())
}

/// Renders frames into `frames_dir` and the manifest into `manifest_path`.
fn render_into(
    slide: &SlideSpec,
    plan: &AnimationPlan,
    fps: f64,
    frames_dir: &Path,
    manifest_path: &Path,
    opts: &RenderOptions,
) -> Result<RenderManifest, String> {
    let staging = frames_dir.with_extension("staging");
    let m = render_video(slide, plan, fps, &staging, opts).map_err(|e| e.to_string())?;
    let _ = fs::remove_dir_all(frames_dir);
    fs::rename(staging.join(FRAMES_DIR), frames_dir).map_err(|e| format!("{}: {e}", frames_dir.display()))?;
    fs::rename(staging.join(RENDER_MANIFEST), manifest_path)
        .map_err(|e| format!("{}: {e}", manifest_path.display()))?;
    let _ = fs::remove_dir_all(&staging);
    Ok(m)
}

/// Builds the whole dataset under `out_root` and writes `manifest.json`
/// last. Per-record failures are recorded, not raised.
pub fn synth_dataset(config: &SynthConfig, out_root: &Path, opts: &DatasetOptions) -> Result<DatasetManifest, SynthError> {
    config.validate()?;
    fs::create_dir_all(out_root).map_err(io_err(out_root))?;
    let previous = if opts.resume {
        DatasetManifest::read(&out_root.join(DATASET_MANIFEST)).ok()
    } else {
        None
    };

    let slides: Vec<SlideSpec> = (0..config.n_slides)
        .into_par_iter()
        .map(|i| synth_slide(&slide_id(i), slide_seed(config, i), config))
        .collect::<Result<_, _>>()?;
    for slide in &slides {
        let dir = out_root.join(&slide.slide_id);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        write_json(&dir.join(SLIDE_FILE), slide)?;
    }

    let jobs: Vec<(usize, usize)> = (0..config.n_slides)
        .flat_map(|i| (0..config.schemes_per_slide).map(move |j| (i, j)))
        .collect();
    let mut records: Vec<TripletRecord> = jobs
        .par_iter()
        .map(|&(i, j)| build_record(out_root, &slides[i], j, config, opts, i))
        .collect();

    if let Some(prev) = &previous {
        for r in &mut records {
            if let Some(old) = prev.records.iter().find(|o| o.slide_id == r.slide_id && o.scheme == r.scheme) {
                if r.annotations.is_empty() {
                    r.annotations = old.annotations.clone();
                }
            }
        }
    }

    let manifest = DatasetManifest {
        dataset_id: format!("{}-{}", config.name, config.seed),
        seed: config.seed,
        plan_only: opts.plan_only,
        config: config.clone(),
        records,
    };
    manifest.write(out_root)?;
    let done = manifest.complete().count();
    info!(
        "dataset {}: {done}/{} records complete ({} test)",
        manifest.dataset_id,
        manifest.records.len(),
        manifest.count(Split::Test)
    );
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_deterministic_and_near_one_in_twelve() {
        assert_eq!(split_for("slide_0001", 3, 12), split_for("slide_0001", 3, 12));
        let test = (0..300)
            .flat_map(|i| (0..40).map(move |j| (i, j)))
            .filter(|&(i, j)| split_for(&slide_id(i), j, 12) == Split::Test)
            .count();
        assert!((900..1100).contains(&test), "{test}");
    }

    #[test]
    fn render_names_by_fps_count() {
        let one = render_names("s/00", &[2.0]);
        assert_eq!(one[0].1, "s/00/frames");
        assert_eq!(one[0].2, "s/00/render.manifest");
        let two = render_names("s/00", &[2.0, 0.5]);
        assert_eq!(two[1].1, "s/00/frames_0_5fps");
        assert_eq!(two[0].2, "s/00/render_2fps.manifest");
    }
}

//! Headless frame rendering: effect transforms, rasterization, and
//! frame-sequence export with a per-video manifest.

pub mod effect;
pub mod raster;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use image::ImageEncoder;
use rayon::prelude::*;
use thiserror::Error;

pub use effect::{effect_transform, EffectError, Mask, VisualState};
pub use raster::{rasterize, rasterize_with, Canvas, RenderOptions, Sprites};

use crate::model::{validate_plan, AnimationPlan, ModelError, SlideSpec, Violation};
use crate::timeline::{compile, frame_count, frame_times, TimelineError};

pub const FRAMES_DIR: &str = "frames";
pub const RENDER_MANIFEST: &str = "render.manifest";

/// Frames rendered in memory before being flushed to disk.
const BATCH: usize = 32;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("image asset '{asset}' could not be loaded: {reason}")]
    MissingAsset { asset: String, reason: String },
    #[error("frame state refers to unknown element '{0}'")]
    UnknownElement(String),
    #[error("invalid plan: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidPlan(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Timeline(#[from] TimelineError),
    #[error("encoding {}: {source}", path.display())]
    Encode { path: PathBuf, source: image::ImageError },
    #[error("malformed render manifest: {0}")]
    Manifest(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RenderError + '_ {
    move |source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn frame_name(i: usize) -> String {
    format!("frame_{i:05}.png")
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderManifest {
    pub slide_id: String,
    pub fps: f64,
    pub total_s: f64,
    /// `(file name, sha256 of the raw RGBA buffer)` per frame.
    pub frames: Vec<(String, String)>,
}

impl RenderManifest {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "slide = {}", self.slide_id);
        let _ = writeln!(s, "fps = {}", self.fps);
        let _ = writeln!(s, "total_s = {}", self.total_s);
        let _ = writeln!(s, "n_frames = {}", self.frames.len());
        for (name, hash) in &self.frames {
            let _ = writeln!(s, "{name} = {hash}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, RenderError> {
        let bad = |m: &str| RenderError::Manifest(m.to_string());
        let mut slide_id = None;
        let mut fps = None;
        let mut total_s = None;
        let mut n_frames = None;
        let mut frames = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line.split_once(" = ").ok_or_else(|| bad(line))?;
            match k {
                "slide" => slide_id = Some(v.to_string()),
                "fps" => fps = Some(v.parse().map_err(|_| bad(line))?),
                "total_s" => total_s = Some(v.parse().map_err(|_| bad(line))?),
                "n_frames" => n_frames = Some(v.parse::<usize>().map_err(|_| bad(line))?),
                _ if k.starts_with("frame_") => frames.push((k.to_string(), v.to_string())),
                _ => return Err(bad(line)),
            }
        }
        let m = RenderManifest {
            slide_id: slide_id.ok_or_else(|| bad("missing slide"))?,
            fps: fps.ok_or_else(|| bad("missing fps"))?,
            total_s: total_s.ok_or_else(|| bad("missing total_s"))?,
            frames,
        };
        if n_frames != Some(m.frames.len()) {
            return Err(bad("n_frames does not match frame entries"));
        }
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self, RenderError> {
        Self::parse(&fs::read_to_string(path).map_err(io_err(path))?)
    }
}

fn encode_png(canvas: &Canvas, path: &Path) -> Result<Vec<u8>, RenderError> {
    let mut buf = Vec::new();
    image::codecs::png::PngEncoder::new_with_quality(
        &mut buf,
        image::codecs::png::CompressionType::Fast,
        image::codecs::png::FilterType::Sub,
    )
    .write_image(&canvas.pixels, canvas.width, canvas.height, image::ExtendedColorType::Rgba8)
    .map_err(|source| RenderError::Encode {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(buf)
}

/// Number of frames `render_video` produces for `plan` at `fps`.
pub fn frame_count_for(plan: &AnimationPlan, fps: f64) -> Result<usize, RenderError> {
    Ok(frame_count(compile(plan)?.total_s, fps)?)
}

/// Renders every frame of `plan` on `slide` at `fps` into
/// `out_dir/frames/frame_%05d.png`, then writes `out_dir/render.manifest`
/// last.
pub fn render_video(
    slide: &SlideSpec,
    plan: &AnimationPlan,
    fps: f64,
    out_dir: &Path,
    opts: &RenderOptions,
) -> Result<RenderManifest, RenderError> {
    let report = validate_plan(plan, slide)?;
    if !report.is_valid() {
        return Err(RenderError::InvalidPlan(report.violations));
    }
    let timeline = compile(plan)?;
    let times = frame_times(&timeline, fps)?;
    let sprites = Sprites::prepare(slide, opts)?;

    let frames_dir = out_dir.join(FRAMES_DIR);
    fs::create_dir_all(&frames_dir).map_err(io_err(&frames_dir))?;

    let mut frames = Vec::with_capacity(times.len());
    for (batch_idx, batch) in times.chunks(BATCH).enumerate() {
        let rendered: Vec<(String, String, Vec<u8>)> = batch
            .par_iter()
            .enumerate()
            .map(|(j, &t)| {
                let i = batch_idx * BATCH + j;
                let state = timeline.sample_clamped(slide, t)?;
                let mut canvas = Canvas::new(slide.canvas);
                rasterize_with(slide, &state, &mut canvas, &sprites)?;
                let name = frame_name(i);
                let png = encode_png(&canvas, &frames_dir.join(&name))?;
                Ok((name, canvas.content_hash(), png))
            })
            .collect::<Result<_, RenderError>>()?;
        for (name, hash, png) in rendered {
            let path = frames_dir.join(&name);
            fs::write(&path, png).map_err(io_err(&path))?;
            frames.push((name, hash));
        }
    }

    let manifest = RenderManifest {
        slide_id: slide.slide_id.clone(),
        fps,
        total_s: timeline.total_s,
        frames,
    };
    let path = out_dir.join(RENDER_MANIFEST);
    fs::write(&path, manifest.to_text()).map_err(io_err(&path))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_text_round_trip() {
        let m = RenderManifest {
            slide_id: "slide_0001".into(),
            fps: 2.0,
            total_s: 3.5,
            frames: vec![(frame_name(0), "ab".into()), (frame_name(1), "cd".into())],
        };
        let text = m.to_text();
        assert!(text.contains("n_frames = 2\n"));
        assert!(text.contains("frame_00001.png = cd\n"));
        assert_eq!(RenderManifest::parse(&text).unwrap(), m);
        assert!(RenderManifest::parse("fps = 2\n").is_err());
    }
}

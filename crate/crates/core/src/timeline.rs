//! Compiles plans into absolute intervals and samples per-element visual
//! state at arbitrary times.

use log::warn;
use thiserror::Error;

use crate::model::{check_plan, AnimationPlan, AnimationStep, Category, RangePolicy, SlideSpec, Violation};
use crate::render::effect::{effect_transform, EffectError, VisualState};

/// Slack for floating-point comparisons against interval boundaries.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TimelineError {
    #[error("invalid plan: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("sample time {t} s outside [0, {total}]")]
    OutOfRange { t: f64, total: f64 },
    #[error("frame rate must be positive, got {0}")]
    BadFps(f64),
    #[error("step {step} refers to element '{element}' which is not on the slide")]
    MissingElement { step: u32, element: String },
    #[error(transparent)]
    Effect(#[from] EffectError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimelineEntry {
    pub step: AnimationStep,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timeline {
    pub slide_id: String,
    pub entries: Vec<TimelineEntry>,
    pub total_s: f64,
}

/// Schedules steps back to back: each starts `delay_s` after the previous
/// one ends and runs for `duration_s * repeat`.
pub fn compile(plan: &AnimationPlan) -> Result<Timeline, TimelineError> {
    let report = check_plan(plan, RangePolicy::Lenient);
    if !report.is_valid() {
        return Err(TimelineError::Invalid(report.violations));
    }
    let mut end = 0.0;
    let entries = plan
        .steps
        .iter()
        .map(|s| {
            let start_s = end + s.delay_s;
            end = start_s + s.active_s();
            TimelineEntry {
                step: s.clone(),
                start_s,
                end_s: end,
            }
        })
        .collect();
    Ok(Timeline {
        slide_id: plan.slide_id.clone(),
        entries,
        total_s: end,
    })
}

/// Visual state of one element at a sample time.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementState {
    pub name: String,
    pub visible: bool,
    pub visual: VisualState,
}

/// Per-element state for every element of the slide, in slide order.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameState {
    pub t: f64,
    pub elements: Vec<ElementState>,
}

impl FrameState {
    pub fn element(&self, name: &str) -> Option<&ElementState> {
        self.elements.iter().find(|e| e.name == name)
    }
}

/// Progress within the current repeat cycle and the cycle index.
pub fn cycle_progress(elapsed: f64, duration: f64) -> (f64, u32) {
    let x = (elapsed / duration).max(0.0);
    let mut cycle = x.floor();
    let mut p = x - cycle;
    // Land exactly on cycle boundaries despite rounding in the division.
    if 1.0 - p < TIME_EPS {
        cycle += 1.0;
        p = 0.0;
    }
    (p, cycle as u32)
}

impl Timeline {
    /// Samples every element of `slide` at time `t`.
    pub fn sample(&self, slide: &SlideSpec, t: f64) -> Result<FrameState, TimelineError> {
        if !(t >= -TIME_EPS && t <= self.total_s + TIME_EPS) {
            return Err(TimelineError::OutOfRange { t, total: self.total_s });
        }
        for e in &self.entries {
            if slide.element(&e.step.element).is_none() {
                return Err(TimelineError::MissingElement {
                    step: e.step.index,
                    element: e.step.element.clone(),
                });
            }
        }
        let mut elements = Vec::with_capacity(slide.elements.len());
        for el in &slide.elements {
            let mut state = ElementState {
                name: el.name.clone(),
                visible: false,
                visual: VisualState::rest(),
            };
            for entry in self.entries.iter().filter(|e| e.step.element == el.name) {
                if t < entry.start_s - TIME_EPS {
                    break;
                }
                let s = &entry.step;
                if t < entry.end_s - TIME_EPS {
                    let (p, _) = cycle_progress(t - entry.start_s, s.duration_s);
                    state.visible = true;
                    state.visual = effect_transform(s.effect, s.category, s.direction, p, el, slide.canvas)?;
                } else {
                    state.visible = s.category != Category::Exit;
                    state.visual = VisualState::rest();
                }
            }
            elements.push(state);
        }
        Ok(FrameState { t, elements })
    }

    /// Samples at `t` clamped into `[0, total_s]`.
    pub fn sample_clamped(&self, slide: &SlideSpec, t: f64) -> Result<FrameState, TimelineError> {
        let mut state = self.sample(slide, t.clamp(0.0, self.total_s))?;
        state.t = t;
        Ok(state)
    }
}

/// Free-function form of [`Timeline::sample`].
pub fn sample(timeline: &Timeline, slide: &SlideSpec, t: f64) -> Result<FrameState, TimelineError> {
    timeline.sample(slide, t)
}

/// Number of frames exported for a timeline at `fps`: the grid `0, 1/fps,
/// ...` up to and including the first point at or past `total_s`.
pub fn frame_count(total_s: f64, fps: f64) -> Result<usize, TimelineError> {
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(TimelineError::BadFps(fps));
    }
    let x = total_s * fps;
    let n = if (x - x.round()).abs() < 1e-6 {
        x.round()
    } else {
        x.ceil()
    };
    Ok(n as usize + 1)
}

pub fn frame_times(timeline: &Timeline, fps: f64) -> Result<Vec<f64>, TimelineError> {
    let n = frame_count(timeline.total_s, fps)?;
    if ![1.0, 2.0, 4.0].contains(&fps) {
        warn!("frame rate {fps} is not one of the standard 1, 2, 4 FPS");
    }
    Ok((0..n).map(|i| i as f64 / fps).collect())
}

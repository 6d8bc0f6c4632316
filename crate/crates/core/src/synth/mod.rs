//! Seeded procedural generation of slides, animation schemes, and
//! text/plan/frames datasets.

pub mod config;
mod corpus;
pub mod dataset;
pub mod service;

use std::collections::HashSet;
use std::io;
use std::path::PathBuf;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{CategoryWeights, EffectTable, ExternalClient, SynthConfig};
pub use dataset::{synth_dataset, DatasetManifest, DatasetOptions, RecordStatus, Split, TripletRecord};
pub use service::{describe_via_service, describe_with_fallback, ServiceError};

use crate::model::{
    AnimationPlan, AnimationStep, Category, EffectChoice, Element, ElementKind, KindGroup, Language, Size,
    SlideSpec, CANVAS_HEIGHT, CANVAS_WIDTH,
};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    Config(String),
    #[error("layout failed for '{slide}': could not place image {image} after {attempts} attempts")]
    Layout {
        slide: String,
        image: usize,
        attempts: usize,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed dataset manifest {}: {reason}", path.display())]
    Manifest { path: PathBuf, reason: String },
}

/// Placement attempts per image before layout gives up.
pub const LAYOUT_ATTEMPTS: usize = 64;
/// Largest allowed pairwise overlap, as a fraction of the smaller element.
pub const MAX_OVERLAP: f64 = 0.10;

const MARGIN: u32 = 64;
const CONTENT_TOP: u32 = 160;
const CONTENT_BOTTOM: u32 = CANVAS_HEIGHT - 24;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-record seed from the dataset seed, a stream tag and indices.
/// Independent of generation order, so records can be regenerated alone.
pub fn derive_seed(base: u64, tag: &str, i: u64, j: u64) -> u64 {
    let mut h = splitmix64(base);
    for b in tag.bytes() {
        h = splitmix64(h ^ b as u64);
    }
    h = splitmix64(h ^ i);
    splitmix64(h ^ j.rotate_left(32))
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weighted<'a, T, R: Rng>(rng: &mut R, table: &'a [(T, f64)]) -> &'a T {
    let dist = WeightedIndex::new(table.iter().map(|(_, w)| *w)).expect("validated weights");
    &table[dist.sample(rng)].0
}

#[derive(Clone, Copy)]
struct Rect {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
}

fn overlap_ok(el: &Element, others: &[Element]) -> bool {
    others.iter().all(|o| {
        let smaller = el.area().min(o.area()) as f64;
        el.intersection_area(o) as f64 <= MAX_OVERLAP * smaller
    })
}

/// Cell grid for `n` images inside `region`.
fn image_cells(n: usize, region: Rect, narrow: bool) -> Vec<Rect> {
    let (cols, rows) = match (n, narrow) {
        (1, _) => (1, 1),
        (2, true) => (1, 2),
        (2, false) => (2, 1),
        (3, false) => (3, 1),
        _ => (2, 2),
    };
    let (cw, ch) = (region.w / cols, region.h / rows);
    (0..n)
        .map(|i| Rect {
            x: region.x + (i as u32 % cols) * cw,
            y: region.y + (i as u32 / cols) * ch,
            w: cw,
            h: ch,
        })
        .collect()
}

/// Generates one slide layout. Deterministic in `seed`.
pub fn synth_slide(slide_id: &str, seed: u64, config: &SynthConfig) -> Result<SlideSpec, SynthError> {
    let mut rng = rng_for(seed);
    let language = if rng.gen_bool(config.english_fraction) {
        Language::En
    } else {
        Language::Zh
    };
    let (title_text, body_text) = corpus::title_and_body(&mut rng, language);

    let mut elements = Vec::new();
    let title_w = rng.gen_range(640..=CANVAS_WIDTH - 2 * MARGIN);
    let title_h = rng.gen_range(72..=110);
    elements.push(Element {
        name: "Title".into(),
        kind: ElementKind::Title,
        x: MARGIN,
        y: rng.gen_range(20..=CONTENT_TOP - title_h - 16),
        w: title_w,
        h: title_h,
        content: title_text,
    });

    let has_body = rng.gen_bool(config.body_probability);
    let content_h = CONTENT_BOTTOM - CONTENT_TOP;
    if has_body {
        elements.push(Element {
            name: "Body".into(),
            kind: ElementKind::Body,
            x: MARGIN,
            y: CONTENT_TOP,
            w: rng.gen_range(480..=540),
            h: rng.gen_range(content_h / 2..=content_h),
            content: body_text,
        });
    }

    let counts = [1usize, 2, 3, 4];
    let table: Vec<(usize, f64)> = counts.iter().copied().zip(config.image_count_weights).collect();
    let n_images = *weighted(&mut rng, &table);
    let region = if has_body {
        Rect {
            x: 640,
            y: CONTENT_TOP,
            w: CANVAS_WIDTH - MARGIN - 640,
            h: content_h,
        }
    } else {
        Rect {
            x: MARGIN,
            y: CONTENT_TOP,
            w: CANVAS_WIDTH - 2 * MARGIN,
            h: content_h,
        }
    };
    const ASPECTS: [f64; 4] = [0.75, 0.5625, 1.0, 2.0 / 3.0];
    for (i, cell) in image_cells(n_images, region, has_body).into_iter().enumerate() {
        let content = format!("placeholder:img_{:04}", rng.gen_range(0..config.image_pool.max(1)));
        let mut placed = None;
        for _ in 0..LAYOUT_ATTEMPTS {
            let aspect = ASPECTS[rng.gen_range(0..ASPECTS.len())];
            let mut w = cell.w as f64 * rng.gen_range(0.6..0.95);
            let mut h = w * aspect;
            if h > cell.h as f64 * 0.95 {
                let s = cell.h as f64 * 0.95 / h;
                w *= s;
                h *= s;
            }
            let (w, h) = ((w.round() as u32).max(16), (h.round() as u32).max(16));
            // Centre in the cell, then jitter so neighbours may touch.
            let jx = (cell.w as f64 * 0.08) as i64;
            let jy = (cell.h as f64 * 0.08) as i64;
            let cx = cell.x as i64 + (cell.w as i64 - w as i64) / 2 + rng.gen_range(-jx..=jx);
            let cy = cell.y as i64 + (cell.h as i64 - h as i64) / 2 + rng.gen_range(-jy..=jy);
            let x = cx.clamp(0, (CANVAS_WIDTH - w) as i64) as u32;
            let y = cy.clamp(0, (CANVAS_HEIGHT - h) as i64) as u32;
            let el = Element {
                name: format!("Img{}", i + 1),
                kind: ElementKind::Image,
                x,
                y,
                w,
                h,
                content: content.clone(),
            };
            if overlap_ok(&el, &elements) {
                placed = Some(el);
                break;
            }
        }
        match placed {
            Some(el) => elements.push(el),
            None => {
                return Err(SynthError::Layout {
                    slide: slide_id.to_string(),
                    image: i + 1,
                    attempts: LAYOUT_ATTEMPTS,
                })
            }
        }
    }

    Ok(SlideSpec {
        slide_id: slide_id.to_string(),
        language,
        canvas: Size::default(),
        elements,
    })
}

/// Generates one animation scheme for `slide`. The result always passes
/// strict validation.
pub fn synth_scheme(seed: u64, slide: &SlideSpec, config: &SynthConfig) -> Result<AnimationPlan, SynthError> {
    let mut tables = Vec::new();
    for category in Category::ALL {
        for group in KindGroup::ALL {
            let t = config
                .table(category, group)
                .ok_or_else(|| SynthError::Config(format!("missing table {category} {}", group.as_str())))?;
            tables.push(((category, group), t.resolve()?));
        }
    }
    let effects_for = |c: Category, g: KindGroup| -> &[(EffectChoice, f64)] {
        &tables.iter().find(|(k, _)| *k == (c, g)).expect("all cells present").1
    };

    let mut rng = rng_for(seed);
    let n = slide.elements.len();
    let k = (*weighted(&mut rng, &config.step_counts) as usize).max(n);

    let mut pending: Vec<&Element> = slide.elements.iter().collect();
    let mut visible: Vec<&Element> = Vec::new();
    let mut hidden: Vec<&Element> = Vec::new();
    let mut steps = Vec::with_capacity(k);

    for i in 0..k {
        let remaining = k - i;
        let first_entrance = !pending.is_empty()
            && (pending.len() >= remaining
                || (visible.is_empty() && hidden.is_empty())
                || rng.gen_bool(config.first_entrance_bias));
        let (category, element) = if first_entrance {
            let el = pending.remove(rng.gen_range(0..pending.len()));
            visible.push(el);
            (Category::Entrance, el)
        } else {
            let cw = &config.category_weights;
            let mut opts: Vec<(Category, f64)> = Vec::new();
            if !hidden.is_empty() {
                opts.push((Category::Entrance, cw.entrance));
            }
            if !visible.is_empty() {
                opts.push((Category::Emphasis, cw.emphasis));
                opts.push((Category::Exit, cw.exit));
            }
            if opts.iter().all(|(_, w)| *w <= 0.0) {
                opts.iter_mut().for_each(|o| o.1 = 1.0);
            }
            let category = *weighted(&mut rng, &opts);
            let pool = match category {
                Category::Entrance => &mut hidden,
                _ => &mut visible,
            };
            let idx = rng.gen_range(0..pool.len());
            let el = pool[idx];
            match category {
                Category::Entrance => {
                    hidden.swap_remove(idx);
                    visible.push(el);
                }
                Category::Exit => {
                    visible.swap_remove(idx);
                    hidden.push(el);
                }
                Category::Emphasis => {}
            }
            (category, el)
        };

        let choice = *weighted(&mut rng, effects_for(category, element.kind.group()));
        let duration_s = *weighted(&mut rng, &config.durations);
        let delay_s = *weighted(&mut rng, &config.delays);
        let repeat = if category == Category::Emphasis {
            *weighted(&mut rng, &config.emphasis_repeats)
        } else {
            1
        };
        steps.push(AnimationStep {
            index: i as u32 + 1,
            category,
            element: element.name.clone(),
            effect: choice.family,
            direction: choice.direction,
            duration_s,
            delay_s,
            repeat,
        });
    }

    Ok(AnimationPlan {
        slide_id: slide.slide_id.clone(),
        steps,
    })
}

/// Slide id for slide `i` of a dataset.
pub fn slide_id(i: usize) -> String {
    format!("slide_{i:04}")
}

/// Seed for slide `i` of a dataset.
pub fn slide_seed(config: &SynthConfig, i: usize) -> u64 {
    derive_seed(config.seed, "slide", i as u64, 0)
}

/// Seed for scheme `j` of slide `i`.
pub fn scheme_seed(config: &SynthConfig, i: usize, j: usize) -> u64 {
    derive_seed(config.seed, "scheme", i as u64, j as u64)
}

/// Generates `n_slides × schemes_per_slide` plans without touching disk.
pub fn synth_plans(config: &SynthConfig) -> Result<Vec<(SlideSpec, Vec<AnimationPlan>)>, SynthError> {
    use rayon::prelude::*;
    config.validate()?;
    (0..config.n_slides)
        .into_par_iter()
        .map(|i| {
            let slide = synth_slide(&slide_id(i), slide_seed(config, i), config)?;
            let plans = (0..config.schemes_per_slide)
                .map(|j| synth_scheme(scheme_seed(config, i, j), &slide, config))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((slide, plans))
        })
        .collect()
}

/// True when every element entered at least once.
pub fn all_elements_enter(plan: &AnimationPlan, slide: &SlideSpec) -> bool {
    let entered: HashSet<&str> = plan
        .steps
        .iter()
        .filter(|s| s.category == Category::Entrance)
        .map(|s| s.element.as_str())
        .collect();
    slide.elements.iter().all(|e| entered.contains(e.name.as_str()))
}

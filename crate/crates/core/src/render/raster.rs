//! Software rasterizer for slide frames.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use font8x8::UnicodeFonts;
use image::{imageops, RgbaImage};
use sha2::{Digest, Sha256};

use super::RenderError;
use crate::model::{Element, ElementKind, Size, SlideSpec};
use crate::timeline::FrameState;

pub const BACKGROUND: [u8; 4] = [255, 255, 255, 255];
const TITLE_PANEL: [u8; 4] = [226, 234, 250, 255];
const BODY_PANEL: [u8; 4] = [244, 244, 244, 255];
const INK: [u8; 4] = [28, 32, 64, 255];
const GLYPH: u32 = 8;

/// Content references with this prefix are always drawn procedurally.
pub const PLACEHOLDER_PREFIX: &str = "placeholder:";

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    /// Draw hatched blocks instead of glyphs.
    pub placeholder_text: bool,
    /// Draw a procedural pattern when an image asset is missing.
    pub placeholder_images: bool,
    /// Directory image references are resolved against.
    pub asset_root: Option<PathBuf>,
}

/// RGBA8 frame buffer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub background: [u8; 4],
    pub pixels: Vec<u8>,
}

impl Canvas {
    pub fn new(size: Size) -> Self {
        Self::with_background(size, BACKGROUND)
    }

    pub fn with_background(size: Size, background: [u8; 4]) -> Self {
        let mut c = Canvas {
            width: size.width,
            height: size.height,
            background,
            pixels: vec![0; size.width as usize * size.height as usize * 4],
        };
        c.clear();
        c
    }

    pub fn clear(&mut self) {
        for px in self.pixels.chunks_exact_mut(4) {
            px.copy_from_slice(&self.background);
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].try_into().unwrap()
    }

    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(&self.pixels);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_image(&self) -> RgbaImage {
        RgbaImage::from_raw(self.width, self.height, self.pixels.clone()).expect("buffer size matches")
    }
}

/// Pre-drawn, untransformed bitmaps for each element of a slide.
#[derive(Clone, Debug)]
pub struct Sprites {
    sprites: HashMap<String, RgbaImage>,
}

impl Sprites {
    pub fn prepare(slide: &SlideSpec, opts: &RenderOptions) -> Result<Self, RenderError> {
        let mut sprites = HashMap::new();
        for el in &slide.elements {
            let img = match el.kind {
                ElementKind::Image => image_sprite(el, opts)?,
                ElementKind::Title | ElementKind::Body => text_sprite(el, opts.placeholder_text),
            };
            sprites.insert(el.name.clone(), img);
        }
        Ok(Sprites { sprites })
    }

    pub fn get(&self, name: &str) -> Option<&RgbaImage> {
        self.sprites.get(name)
    }

    /// Replaces an element's bitmap, e.g. with a solid test pattern.
    pub fn insert(&mut self, name: &str, img: RgbaImage) {
        self.sprites.insert(name.to_string(), img);
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Deterministic gradient-and-stripes pattern keyed by the asset name.
pub fn placeholder_pattern(key: &str, w: u32, h: u32) -> RgbaImage {
    let seed = fnv1a(key);
    let base = [(seed & 0xff) as u32, ((seed >> 8) & 0xff) as u32, ((seed >> 16) & 0xff) as u32];
    let period = 16 + (seed >> 24) as u32 % 32;
    RgbaImage::from_fn(w, h, |x, y| {
        let gx = x * 255 / w.max(1);
        let gy = y * 255 / h.max(1);
        let stripe = ((x + y) / period) % 2 == 0;
        let mix = |c: u32, g: u32| -> u8 {
            let v = (c + g) / 2;
            if stripe {
                v as u8
            } else {
                (v * 3 / 4) as u8
            }
        };
        image::Rgba([mix(base[0], gx), mix(base[1], gy), mix(base[2], 255 - gx), 255])
    })
}

fn resolve_asset(reference: &str, opts: &RenderOptions) -> PathBuf {
    let p = Path::new(reference);
    match &opts.asset_root {
        Some(root) if p.is_relative() => root.join(p),
        _ => p.to_path_buf(),
    }
}

fn image_sprite(el: &Element, opts: &RenderOptions) -> Result<RgbaImage, RenderError> {
    if let Some(key) = el.content.strip_prefix(PLACEHOLDER_PREFIX) {
        return Ok(placeholder_pattern(key, el.w, el.h));
    }
    let path = resolve_asset(&el.content, opts);
    match image::open(&path) {
        Ok(img) => Ok(imageops::resize(&img.to_rgba8(), el.w, el.h, imageops::FilterType::Nearest)),
        Err(_) if opts.placeholder_images => Ok(placeholder_pattern(&el.content, el.w, el.h)),
        Err(e) => Err(RenderError::MissingAsset {
            asset: el.content.clone(),
            reason: e.to_string(),
        }),
    }
}

fn glyph_rows(c: char, placeholder: bool) -> [u8; 8] {
    if !placeholder {
        if let Some(g) = font8x8::BASIC_FONTS.get(c) {
            return g;
        }
    }
    // Hatched block.
    let mut rows = [0u8; 8];
    for (y, row) in rows.iter_mut().enumerate().take(7).skip(1) {
        for x in 1..7 {
            if (x + y) % 3 == 0 {
                *row |= 1 << x;
            }
        }
    }
    rows
}

/// Greedy word wrap to `cols` characters per line; overlong words are split.
fn wrap(text: &str, cols: usize) -> Vec<Vec<char>> {
    let cols = cols.max(1);
    let mut lines: Vec<Vec<char>> = Vec::new();
    let mut line: Vec<char> = Vec::new();
    for word in text.split_whitespace() {
        let mut w: Vec<char> = word.chars().collect();
        while !w.is_empty() {
            let need = if line.is_empty() { w.len() } else { line.len() + 1 + w.len() };
            if need <= cols {
                if !line.is_empty() {
                    line.push(' ');
                }
                line.append(&mut w);
            } else if line.is_empty() {
                let rest = w.split_off(cols);
                lines.push(std::mem::replace(&mut w, rest));
            } else {
                lines.push(std::mem::take(&mut line));
            }
        }
    }
    if !line.is_empty() {
        lines.push(line);
    }
    lines
}

fn text_sprite(el: &Element, placeholder: bool) -> RgbaImage {
    let (panel, scale) = match el.kind {
        ElementKind::Title => (TITLE_PANEL, (el.h / 28).clamp(1, 4)),
        _ => (BODY_PANEL, 2.min((el.h / 16).max(1))),
    };
    let mut img = RgbaImage::from_pixel(el.w, el.h, image::Rgba(panel));
    let cell = GLYPH * scale;
    let pad = cell / 2;
    if el.w <= 2 * pad || el.h <= 2 * pad {
        return img;
    }
    let cols = ((el.w - 2 * pad) / cell) as usize;
    let max_lines = ((el.h - 2 * pad) / (cell + scale * 2)) as usize;
    for (li, line) in wrap(&el.content, cols).iter().take(max_lines).enumerate() {
        let oy = pad + li as u32 * (cell + scale * 2);
        for (ci, &ch) in line.iter().enumerate() {
            if ch == ' ' {
                continue;
            }
            let ox = pad + ci as u32 * cell;
            let rows = glyph_rows(ch, placeholder);
            for (gy, bits) in rows.iter().enumerate() {
                for gx in 0..8 {
                    if bits & (1 << gx) == 0 {
                        continue;
                    }
                    for sy in 0..scale {
                        for sx in 0..scale {
                            let x = ox + gx * scale + sx;
                            let y = oy + gy as u32 * scale + sy;
                            if x < el.w && y < el.h {
                                img.put_pixel(x, y, image::Rgba(INK));
                            }
                        }
                    }
                }
            }
        }
    }
    img
}

fn blend(dst: &mut [u8], src: [u8; 4], alpha: f64, brightness: f64) {
    let a = (alpha * src[3] as f64 / 255.0).clamp(0.0, 1.0);
    for c in 0..3 {
        let s = (src[c] as f64 * brightness).min(255.0);
        let d = dst[c] as f64;
        dst[c] = (s * a + d * (1.0 - a)).round() as u8;
    }
    let da = dst[3] as f64 / 255.0;
    dst[3] = ((a + da * (1.0 - a)) * 255.0).round() as u8;
}

/// Draws one element's bitmap under its visual state.
fn draw_element(canvas: &mut Canvas, el: &Element, sprite: &RgbaImage, v: &crate::render::VisualState) {
    if v.alpha <= 0.0 || v.scale <= 0.0 {
        return;
    }
    let (w, h) = (el.w as f64, el.h as f64);
    let cx = el.x as f64 + w / 2.0 + v.dx;
    let cy = el.y as f64 + h / 2.0 + v.dy;
    let (sin, cos) = v.rotation_deg.to_radians().sin_cos();
    let (hw, hh) = (w / 2.0 * v.scale, h / 2.0 * v.scale);
    let ex = (hw * cos).abs() + (hh * sin).abs();
    let ey = (hw * sin).abs() + (hh * cos).abs();
    let x0 = (cx - ex).floor().max(0.0);
    let y0 = (cy - ey).floor().max(0.0);
    let x1 = (cx + ex).ceil().min(canvas.width as f64);
    let y1 = (cy + ey).ceil().min(canvas.height as f64);
    if x1 <= x0 || y1 <= y0 {
        return;
    }
    let stride = canvas.width as usize * 4;
    for py in y0 as u32..y1 as u32 {
        let ry = py as f64 + 0.5 - cy;
        for px in x0 as u32..x1 as u32 {
            let rx = px as f64 + 0.5 - cx;
            // Inverse rotation then inverse scale, back to element space.
            let u = (cos * rx + sin * ry) / v.scale + w / 2.0;
            let vv = (-sin * rx + cos * ry) / v.scale + h / 2.0;
            if !(u >= 0.0 && u < w && vv >= 0.0 && vv < h) {
                continue;
            }
            if !v.mask.reveals(u / w, vv / h) {
                continue;
            }
            let src = sprite.get_pixel((u as u32).min(el.w - 1), (vv as u32).min(el.h - 1)).0;
            let i = py as usize * stride + px as usize * 4;
            blend(&mut canvas.pixels[i..i + 4], src, v.alpha, v.brightness);
        }
    }
}

/// Draws every visible element back to front in slide order.
pub fn rasterize_with(slide: &SlideSpec, state: &FrameState, canvas: &mut Canvas, sprites: &Sprites) -> Result<(), RenderError> {
    canvas.clear();
    for es in &state.elements {
        if slide.element(&es.name).is_none() {
            return Err(RenderError::UnknownElement(es.name.clone()));
        }
    }
    for el in &slide.elements {
        let Some(es) = state.element(&el.name) else { continue };
        if !es.visible {
            continue;
        }
        let sprite = sprites
            .get(&el.name)
            .ok_or_else(|| RenderError::UnknownElement(el.name.clone()))?;
        draw_element(canvas, el, sprite, &es.visual);
    }
    Ok(())
}

/// Convenience form that prepares sprites on every call.
pub fn rasterize(slide: &SlideSpec, state: &FrameState, canvas: &mut Canvas, opts: &RenderOptions) -> Result<(), RenderError> {
    let sprites = Sprites::prepare(slide, opts)?;
    rasterize_with(slide, state, canvas, &sprites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Language;
    use crate::render::VisualState;
    use crate::timeline::ElementState;

    fn slide() -> SlideSpec {
        SlideSpec {
            slide_id: "s".into(),
            language: Language::En,
            canvas: Size { width: 16, height: 16 },
            elements: vec![Element {
                name: "E".into(),
                kind: ElementKind::Image,
                x: 4,
                y: 4,
                w: 4,
                h: 4,
                content: "placeholder:x".into(),
            }],
        }
    }

    fn state(visible: bool, visual: VisualState) -> FrameState {
        FrameState {
            t: 0.0,
            elements: vec![ElementState {
                name: "E".into(),
                visible,
                visual,
            }],
        }
    }

    #[test]
    fn hidden_is_background_only() {
        let s = slide();
        let mut c = Canvas::new(s.canvas);
        rasterize(&s, &state(false, VisualState::rest()), &mut c, &RenderOptions::default()).unwrap();
        assert_eq!(c, Canvas::new(s.canvas));
    }

    #[test]
    fn half_alpha_blend_matches_analytic() {
        let s = slide();
        let color = [200u8, 40, 90, 255];
        let mut sprites = Sprites::prepare(&s, &RenderOptions::default()).unwrap();
        sprites.insert("E", RgbaImage::from_pixel(4, 4, image::Rgba(color)));
        let mut c = Canvas::new(s.canvas);
        let st = state(true, VisualState { alpha: 0.5, ..VisualState::rest() });
        rasterize_with(&s, &st, &mut c, &sprites).unwrap();
        for y in 4..8 {
            for x in 4..8 {
                let px = c.pixel(x, y);
                for ch in 0..3 {
                    let analytic = 0.5 * color[ch] as f64 + 0.5 * 255.0;
                    assert!((px[ch] as f64 - analytic).abs() <= 1.0, "{px:?}");
                }
            }
        }
        assert_eq!(c.pixel(0, 0), BACKGROUND);
    }

    #[test]
    fn missing_asset_named() {
        let mut s = slide();
        s.elements[0].content = "nope/missing.png".into();
        let err = Sprites::prepare(&s, &RenderOptions::default()).unwrap_err();
        assert!(err.to_string().contains("nope/missing.png"));
        let ok = Sprites::prepare(
            &s,
            &RenderOptions {
                placeholder_images: true,
                ..Default::default()
            },
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn wraps_words() {
        let lines = wrap("hello big world", 9);
        let lines: Vec<String> = lines.into_iter().map(|l| l.into_iter().collect()).collect();
        assert_eq!(lines, ["hello big", "world"]);
        assert_eq!(wrap("abcdefgh", 3).len(), 3);
    }

    #[test]
    fn off_canvas_is_fine() {
        let s = slide();
        let mut c = Canvas::new(s.canvas);
        let st = state(true, VisualState { dx: -500.0, ..VisualState::rest() });
        rasterize(&s, &st, &mut c, &RenderOptions::default()).unwrap();
        assert_eq!(c, Canvas::new(s.canvas));
    }
}

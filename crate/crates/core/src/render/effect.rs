//! Per-family visual transforms as functions of progress.
//!
//! Entrances play forward; exits replay the paired entrance backwards, so
//! an exit at progress `p` looks like its entrance at `1 - p`. Emphasis
//! effects start and end at the rest pose.

use std::f64::consts::PI;

use thiserror::Error;

use crate::model::{Category, Direction, EffectFamily, Element, Size};

pub const BLINDS_STRIPES: u32 = 6;
pub const CHECKER_ROWS: u32 = 6;
pub const CHECKER_COLS: u32 = 8;
pub const PINWHEEL_BLADES: u32 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum EffectError {
    #[error("{family} cannot be used as {category}")]
    UnsupportedCategory { family: EffectFamily, category: Category },
    #[error("{family} direction mismatch: got {direction:?}")]
    Direction {
        family: EffectFamily,
        direction: Option<Direction>,
    },
    #[error("progress {0} outside [0, 1]")]
    Progress(f64),
}

/// Clip region in element space. `progress` fields are in `[0, 1]`; at 1
/// every reveal mask uncovers the whole element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mask {
    None,
    /// Reveals a band starting at the `from` edge.
    Wipe { from: Direction, progress: f64 },
    Box { progress: f64 },
    Blinds { stripes: u32, progress: f64 },
    Checkerboard { rows: u32, cols: u32, progress: f64 },
    Circle { progress: f64 },
    Pinwheel { blades: u32, progress: f64 },
}

impl Mask {
    /// Whether the point at normalized element coordinates `(nx, ny)`
    /// (both in `[0, 1)`, origin top-left) is uncovered.
    pub fn reveals(&self, nx: f64, ny: f64) -> bool {
        match *self {
            Mask::None => true,
            Mask::Wipe { from, progress } => match from {
                Direction::Left => nx < progress,
                Direction::Right => 1.0 - nx < progress,
                Direction::Top => ny < progress,
                Direction::Bottom => 1.0 - ny < progress,
            },
            Mask::Box { progress } => {
                (nx - 0.5).abs() < progress / 2.0 && (ny - 0.5).abs() < progress / 2.0
            }
            Mask::Blinds { stripes, progress } => (ny * stripes as f64).fract() < progress,
            Mask::Checkerboard { rows, cols, progress } => {
                let c = ((nx * cols as f64).floor() as u32).min(cols - 1);
                let r = ((ny * rows as f64).floor() as u32).min(rows - 1);
                let threshold = (c as f64 + (r % 2) as f64 / 2.0) / cols as f64;
                progress > threshold
            }
            Mask::Circle { progress } => {
                // Ellipse inscribed in the element's aspect, whose diameter
                // along the diagonal is progress * diagonal.
                let (dx, dy) = (nx - 0.5, ny - 0.5);
                (dx * dx + dy * dy).sqrt() < progress * std::f64::consts::FRAC_1_SQRT_2
            }
            Mask::Pinwheel { blades, progress } => {
                let angle = (ny - 0.5).atan2(nx - 0.5).to_degrees().rem_euclid(360.0);
                let sector = 360.0 / blades as f64;
                angle.rem_euclid(sector) < sector * progress
            }
        }
    }

    pub fn progress(&self) -> Option<f64> {
        match *self {
            Mask::None => None,
            Mask::Wipe { progress, .. }
            | Mask::Box { progress }
            | Mask::Blinds { progress, .. }
            | Mask::Checkerboard { progress, .. }
            | Mask::Circle { progress }
            | Mask::Pinwheel { progress, .. } => Some(progress),
        }
    }
}

/// Transform applied to an element when drawing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisualState {
    pub alpha: f64,
    pub dx: f64,
    pub dy: f64,
    pub scale: f64,
    pub rotation_deg: f64,
    pub mask: Mask,
    pub brightness: f64,
}

impl VisualState {
    pub fn rest() -> Self {
        VisualState {
            alpha: 1.0,
            dx: 0.0,
            dy: 0.0,
            scale: 1.0,
            rotation_deg: 0.0,
            mask: Mask::None,
            brightness: 1.0,
        }
    }

    /// Fully hidden: exits end here.
    pub fn hidden() -> Self {
        VisualState {
            alpha: 0.0,
            ..VisualState::rest()
        }
    }

    pub fn is_rest(&self) -> bool {
        *self == VisualState::rest()
    }
}

fn entrance(family: EffectFamily, direction: Option<Direction>, p: f64, el: &Element, canvas: Size) -> VisualState {
    let rest = VisualState::rest();
    let masked = |mask| VisualState { mask, ..rest };
    match family {
        EffectFamily::Fade => VisualState { alpha: p, ..rest },
        EffectFamily::FlyFrom | EffectFamily::FlyTo => {
            let (dx0, dy0) = match direction.unwrap_or(Direction::Left) {
                Direction::Left => (-((el.x + el.w) as f64), 0.0),
                Direction::Right => ((canvas.width - el.x) as f64, 0.0),
                Direction::Top => (0.0, -((el.y + el.h) as f64)),
                Direction::Bottom => (0.0, (canvas.height - el.y) as f64),
            };
            VisualState {
                dx: dx0 * (1.0 - p),
                dy: dy0 * (1.0 - p),
                ..rest
            }
        }
        EffectFamily::Wipe => masked(Mask::Wipe {
            from: direction.unwrap_or(Direction::Bottom),
            progress: p,
        }),
        EffectFamily::Box => masked(Mask::Box { progress: p }),
        EffectFamily::Blinds => masked(Mask::Blinds {
            stripes: BLINDS_STRIPES,
            progress: p,
        }),
        EffectFamily::Checkerboard => masked(Mask::Checkerboard {
            rows: CHECKER_ROWS,
            cols: CHECKER_COLS,
            progress: p,
        }),
        EffectFamily::Circle => masked(Mask::Circle { progress: p }),
        EffectFamily::Pinwheel => masked(Mask::Pinwheel {
            blades: PINWHEEL_BLADES,
            progress: p,
        }),
        _ => rest,
    }
}

fn emphasis(family: EffectFamily, p: f64, el: &Element) -> VisualState {
    let rest = VisualState::rest();
    let bump = (PI * p).sin();
    match family {
        EffectFamily::Spin => VisualState {
            rotation_deg: 360.0 * p,
            ..rest
        },
        EffectFamily::Teeter => VisualState {
            rotation_deg: 5.0 * (4.0 * PI * p).sin(),
            ..rest
        },
        EffectFamily::FlashBulb => VisualState {
            brightness: 1.0 + 0.75 * bump,
            ..rest
        },
        EffectFamily::GrowShrink => VisualState {
            scale: 1.0 + 0.5 * bump,
            ..rest
        },
        EffectFamily::Pulse => VisualState {
            scale: 1.0 + 0.1 * bump,
            ..rest
        },
        EffectFamily::Transparency => VisualState {
            alpha: 1.0 - 0.5 * bump,
            ..rest
        },
        EffectFamily::Darken => VisualState {
            brightness: 1.0 - 0.4 * bump,
            ..rest
        },
        EffectFamily::Lighten => VisualState {
            brightness: 1.0 + 0.3 * bump,
            ..rest
        },
        EffectFamily::Blink => VisualState {
            alpha: if (0.25..0.75).contains(&p) { 0.0 } else { 1.0 },
            ..rest
        },
        EffectFamily::Wave => VisualState {
            dy: -0.15 * el.h as f64 * (2.0 * PI * p).sin(),
            ..rest
        },
        _ => rest,
    }
}

/// Visual state of `el` at progress `p` through one cycle of an effect.
pub fn effect_transform(
    family: EffectFamily,
    category: Category,
    direction: Option<Direction>,
    p: f64,
    el: &Element,
    canvas: Size,
) -> Result<VisualState, EffectError> {
    if !family.supports(category) {
        return Err(EffectError::UnsupportedCategory { family, category });
    }
    if family.is_directional() != direction.is_some() {
        return Err(EffectError::Direction { family, direction });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(EffectError::Progress(p));
    }
    Ok(match category {
        Category::Entrance => entrance(family, direction, p, el, canvas),
        Category::Exit => {
            let paired = family.kind().pair.unwrap_or(family);
            entrance(paired, direction, 1.0 - p, el, canvas)
        }
        Category::Emphasis => emphasis(family, p, el),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EffectChoice, ElementKind};

    fn el() -> Element {
        Element {
            name: "E".into(),
            kind: ElementKind::Image,
            x: 100,
            y: 50,
            w: 300,
            h: 200,
            content: String::new(),
        }
    }

    fn t(f: EffectFamily, c: Category, d: Option<Direction>, p: f64) -> VisualState {
        effect_transform(f, c, d, p, &el(), Size::default()).unwrap()
    }

    #[test]
    fn fade_midpoint() {
        let v = t(EffectFamily::Fade, Category::Entrance, None, 0.5);
        assert_eq!(v, VisualState { alpha: 0.5, ..VisualState::rest() });
        assert_eq!(t(EffectFamily::Fade, Category::Exit, None, 0.25).alpha, 0.75);
    }

    #[test]
    fn fly_from_left_starts_off_canvas() {
        let v = t(EffectFamily::FlyFrom, Category::Entrance, Some(Direction::Left), 0.0);
        assert_eq!(v.dx, -400.0);
        assert_eq!(v.dy, 0.0);
        let v = t(EffectFamily::FlyFrom, Category::Entrance, Some(Direction::Bottom), 0.0);
        assert_eq!(v.dy, 670.0);
        let v = t(EffectFamily::FlyTo, Category::Exit, Some(Direction::Right), 1.0);
        assert_eq!(v.dx, 1180.0);
    }

    #[test]
    fn spin_quarter() {
        assert_eq!(t(EffectFamily::Spin, Category::Emphasis, None, 0.25).rotation_deg, 90.0);
    }

    #[test]
    fn emphasis_endpoints_are_rest() {
        for k in crate::model::effect_catalog().iter().filter(|k| k.categories.emphasis) {
            for p in [0.0, 1.0] {
                let v = t(k.family, Category::Emphasis, None, p);
                assert!((v.alpha - 1.0).abs() < 1e-12, "{}", k.family);
                assert!((v.scale - 1.0).abs() < 1e-12);
                assert!((v.brightness - 1.0).abs() < 1e-12);
                assert!(v.dx.abs() < 1e-9 && v.dy.abs() < 1e-9);
                assert!(v.rotation_deg.abs() < 1e-9 || (v.rotation_deg - 360.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn peaks() {
        assert!((t(EffectFamily::FlashBulb, Category::Emphasis, None, 0.5).brightness - 1.75).abs() < 1e-12);
        assert!((t(EffectFamily::GrowShrink, Category::Emphasis, None, 0.5).scale - 1.5).abs() < 1e-12);
        assert!((t(EffectFamily::Teeter, Category::Emphasis, None, 0.125).rotation_deg - 5.0).abs() < 1e-12);
    }

    #[test]
    fn entrance_end_is_rest_exit_end_is_hidden() {
        for cat in [Category::Entrance, Category::Exit] {
            for c in EffectChoice::all_for(cat) {
                let v = t(c.family, cat, c.direction, 1.0);
                let grid = (0..20).flat_map(|i| (0..20).map(move |j| ((i as f64 + 0.5) / 20.0, (j as f64 + 0.5) / 20.0)));
                match cat {
                    Category::Entrance => {
                        assert_eq!(v.alpha, 1.0);
                        assert_eq!((v.dx, v.dy), (0.0, 0.0));
                        assert!(grid.clone().all(|(x, y)| v.mask.reveals(x, y)), "{c}");
                    }
                    _ => {
                        let gone = v.alpha == 0.0
                            || v.dx.abs() >= 300.0
                            || v.dy.abs() >= 200.0
                            || grid.clone().all(|(x, y)| !v.mask.reveals(x, y));
                        assert!(gone, "{c} exit still visible at p=1");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = el();
        assert!(effect_transform(EffectFamily::Spin, Category::Entrance, None, 0.5, &e, Size::default()).is_err());
        assert!(effect_transform(EffectFamily::Wipe, Category::Entrance, None, 0.5, &e, Size::default()).is_err());
        assert!(effect_transform(EffectFamily::Fade, Category::Entrance, None, 1.5, &e, Size::default()).is_err());
    }
}

//! Domain vocabulary: slides, elements, the effect catalog, animation steps
//! and plans, plus plan validation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const CANVAS_WIDTH: u32 = 1280;
pub const CANVAS_HEIGHT: u32 = 720;

/// Bounds that synthesized plans always satisfy. External plans outside them
/// only produce warnings.
pub const MIN_DURATION_S: f64 = 0.5;
pub const MAX_DURATION_S: f64 = 3.0;
pub const MAX_DELAY_S: f64 = 4.0;
pub const MIN_STEPS: usize = 4;
pub const MAX_STEPS: usize = 15;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("plan targets slide '{plan}' but slide is '{slide}'")]
    SlideMismatch { plan: String, slide: String },
    #[error("unknown effect family '{0}'")]
    UnknownEffect(String),
    #[error("unknown direction '{0}'")]
    UnknownDirection(String),
    #[error("unknown category '{0}'")]
    UnknownCategory(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Entrance,
    Emphasis,
    Exit,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Entrance, Category::Emphasis, Category::Exit];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Entrance => "entrance",
            Category::Emphasis => "emphasis",
            Category::Exit => "exit",
        }
    }

    /// Capitalized form used in action lines, e.g. `(Entrance)`.
    pub fn title(self) -> &'static str {
        match self {
            Category::Entrance => "Entrance",
            Category::Emphasis => "Emphasis",
            Category::Exit => "Exit",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "entrance" => Ok(Category::Entrance),
            "emphasis" => Ok(Category::Emphasis),
            "exit" => Ok(Category::Exit),
            _ => Err(ModelError::UnknownCategory(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Title,
    Body,
    Image,
}

impl ElementKind {
    pub fn group(self) -> KindGroup {
        match self {
            ElementKind::Title | ElementKind::Body => KindGroup::Text,
            ElementKind::Image => KindGroup::Image,
        }
    }
}

/// Effect preferences are tabulated for text (title/body) and images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindGroup {
    Text,
    Image,
}

impl KindGroup {
    pub const ALL: [KindGroup; 2] = [KindGroup::Text, KindGroup::Image];

    pub fn as_str(self) -> &'static str {
        match self {
            KindGroup::Text => "text",
            KindGroup::Image => "image",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Zh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    Top,
    Bottom,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Left,
        Direction::Right,
        Direction::Top,
        Direction::Bottom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Top => "top",
            Direction::Bottom => "bottom",
        }
    }

    /// Parses a direction; `"none"` maps to `None`.
    pub fn parse_opt(s: &str) -> Result<Option<Direction>, ModelError> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(None),
            other => other.parse().map(Some),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            "top" => Ok(Direction::Top),
            "bottom" => Ok(Direction::Bottom),
            _ => Err(ModelError::UnknownDirection(s.to_string())),
        }
    }
}

/// Serde adapter for `Option<Direction>`: writes a string or `null`, reads a
/// string, `"none"`, or `null`.
pub mod direction_opt {
    use super::*;

    pub fn serialize<S: Serializer>(d: &Option<Direction>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_str(d.as_str()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Direction>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        match raw {
            None => Ok(None),
            Some(s) => Direction::parse_opt(&s).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Size {
    pub width: u32,
    pub height: u32,
}

impl Default for Size {
    fn default() -> Self {
        Size {
            width: CANVAS_WIDTH,
            height: CANVAS_HEIGHT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub name: String,
    pub kind: ElementKind,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    /// Text for title/body, asset reference for images.
    pub content: String,
}

impl Element {
    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn intersection_area(&self, other: &Element) -> u64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = (self.x + self.w).min(other.x + other.w);
        let y1 = (self.y + self.h).min(other.y + other.h);
        if x1 <= x0 || y1 <= y0 {
            0
        } else {
            (x1 - x0) as u64 * (y1 - y0) as u64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlideSpec {
    pub slide_id: String,
    pub language: Language,
    pub canvas: Size,
    pub elements: Vec<Element>,
}

impl SlideSpec {
    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name)
    }

    /// Lists every broken slide invariant; empty when the slide is well formed.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        let (mut titles, mut bodies, mut images) = (0, 0, 0);
        for e in &self.elements {
            if seen.insert(e.name.as_str(), ()).is_some() {
                out.push(format!("duplicate element name '{}'", e.name));
            }
            if e.w == 0 || e.h == 0 {
                out.push(format!("element '{}' has zero size", e.name));
            }
            if e.x + e.w > self.canvas.width || e.y + e.h > self.canvas.height {
                out.push(format!("element '{}' extends past the canvas", e.name));
            }
            match e.kind {
                ElementKind::Title => titles += 1,
                ElementKind::Body => bodies += 1,
                ElementKind::Image => images += 1,
            }
        }
        if titles != 1 {
            out.push(format!("expected exactly one title, found {titles}"));
        }
        if bodies > 1 {
            out.push(format!("expected at most one body, found {bodies}"));
        }
        if !(1..=4).contains(&images) {
            out.push(format!("expected 1-4 images, found {images}"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EffectFamily {
    Fade,
    FlyFrom,
    FlyTo,
    Wipe,
    Box,
    Blinds,
    Checkerboard,
    Circle,
    Pinwheel,
    Spin,
    Teeter,
    FlashBulb,
    GrowShrink,
    Pulse,
    Transparency,
    Darken,
    Lighten,
    Blink,
    Wave,
}

impl EffectFamily {
    pub const ALL: [EffectFamily; 19] = [
        EffectFamily::Fade,
        EffectFamily::FlyFrom,
        EffectFamily::FlyTo,
        EffectFamily::Wipe,
        EffectFamily::Box,
        EffectFamily::Blinds,
        EffectFamily::Checkerboard,
        EffectFamily::Circle,
        EffectFamily::Pinwheel,
        EffectFamily::Spin,
        EffectFamily::Teeter,
        EffectFamily::FlashBulb,
        EffectFamily::GrowShrink,
        EffectFamily::Pulse,
        EffectFamily::Transparency,
        EffectFamily::Darken,
        EffectFamily::Lighten,
        EffectFamily::Blink,
        EffectFamily::Wave,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EffectFamily::Fade => "Fade",
            EffectFamily::FlyFrom => "FlyFrom",
            EffectFamily::FlyTo => "FlyTo",
            EffectFamily::Wipe => "Wipe",
            EffectFamily::Box => "Box",
            EffectFamily::Blinds => "Blinds",
            EffectFamily::Checkerboard => "Checkerboard",
            EffectFamily::Circle => "Circle",
            EffectFamily::Pinwheel => "Pinwheel",
            EffectFamily::Spin => "Spin",
            EffectFamily::Teeter => "Teeter",
            EffectFamily::FlashBulb => "FlashBulb",
            EffectFamily::GrowShrink => "GrowShrink",
            EffectFamily::Pulse => "Pulse",
            EffectFamily::Transparency => "Transparency",
            EffectFamily::Darken => "Darken",
            EffectFamily::Lighten => "Lighten",
            EffectFamily::Blink => "Blink",
            EffectFamily::Wave => "Wave",
        }
    }

    pub fn kind(self) -> EffectKind {
        *effect_catalog()
            .iter()
            .find(|k| k.family == self)
            .expect("every family is registered")
    }

    pub fn is_directional(self) -> bool {
        self.kind().directional
    }

    pub fn supports(self, category: Category) -> bool {
        self.kind().categories.contains(category)
    }
}

impl fmt::Display for EffectFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EffectFamily {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EffectFamily::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownEffect(s.to_string()))
    }
}

impl Serialize for EffectFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EffectFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which categories an effect family may be used in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CategoryMask {
    pub entrance: bool,
    pub emphasis: bool,
    pub exit: bool,
}

impl CategoryMask {
    const ENTRANCE_EXIT: CategoryMask = CategoryMask {
        entrance: true,
        emphasis: false,
        exit: true,
    };
    const ENTRANCE: CategoryMask = CategoryMask {
        entrance: true,
        emphasis: false,
        exit: false,
    };
    const EXIT: CategoryMask = CategoryMask {
        entrance: false,
        emphasis: false,
        exit: true,
    };
    const EMPHASIS: CategoryMask = CategoryMask {
        entrance: false,
        emphasis: true,
        exit: false,
    };

    pub fn contains(self, category: Category) -> bool {
        match category {
            Category::Entrance => self.entrance,
            Category::Emphasis => self.emphasis,
            Category::Exit => self.exit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EffectKind {
    pub family: EffectFamily,
    pub categories: CategoryMask,
    pub directional: bool,
    /// The family that plays this effect in the opposite direction
    /// (entrance <-> exit). Symmetric families pair with themselves.
    pub pair: Option<EffectFamily>,
}

const fn kind(
    family: EffectFamily,
    categories: CategoryMask,
    directional: bool,
    pair: Option<EffectFamily>,
) -> EffectKind {
    EffectKind {
        family,
        categories,
        directional,
        pair,
    }
}

static CATALOG: [EffectKind; 19] = {
    use EffectFamily as F;
    let both = CategoryMask::ENTRANCE_EXIT;
    let emph = CategoryMask::EMPHASIS;
    [
        kind(F::Fade, both, false, Some(F::Fade)),
        kind(F::FlyFrom, CategoryMask::ENTRANCE, true, Some(F::FlyTo)),
        kind(F::FlyTo, CategoryMask::EXIT, true, Some(F::FlyFrom)),
        kind(F::Wipe, both, true, Some(F::Wipe)),
        kind(F::Box, both, false, Some(F::Box)),
        kind(F::Blinds, both, false, Some(F::Blinds)),
        kind(F::Checkerboard, both, false, Some(F::Checkerboard)),
        kind(F::Circle, both, false, Some(F::Circle)),
        kind(F::Pinwheel, both, false, Some(F::Pinwheel)),
        kind(F::Spin, emph, false, None),
        kind(F::Teeter, emph, false, None),
        kind(F::FlashBulb, emph, false, None),
        kind(F::GrowShrink, emph, false, None),
        kind(F::Pulse, emph, false, None),
        kind(F::Transparency, emph, false, None),
        kind(F::Darken, emph, false, None),
        kind(F::Lighten, emph, false, None),
        kind(F::Blink, emph, false, None),
        kind(F::Wave, emph, false, None),
    ]
};

/// The registered effect catalog in a fixed order.
pub fn effect_catalog() -> &'static [EffectKind] {
    &CATALOG
}

/// Entrance/exit pairs, counting each direction of a directional family as
/// its own pair (as PowerPoint lists "Fly In From Left" separately).
pub fn entrance_exit_pairs() -> Vec<(EffectChoice, EffectChoice)> {
    let mut out = Vec::new();
    for k in effect_catalog().iter().filter(|k| k.categories.entrance) {
        let Some(exit) = k.pair else { continue };
        if !exit.supports(Category::Exit) {
            continue;
        }
        if k.directional {
            for d in Direction::ALL {
                out.push((EffectChoice::new(k.family, Some(d)), EffectChoice::new(exit, Some(d))));
            }
        } else {
            out.push((EffectChoice::new(k.family, None), EffectChoice::new(exit, None)));
        }
    }
    out
}

/// A concrete effect: family plus direction when the family needs one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EffectChoice {
    pub family: EffectFamily,
    pub direction: Option<Direction>,
}

impl EffectChoice {
    pub fn new(family: EffectFamily, direction: Option<Direction>) -> Self {
        EffectChoice { family, direction }
    }

    /// Every concrete effect usable in `category`, in catalog order.
    pub fn all_for(category: Category) -> Vec<EffectChoice> {
        let mut out = Vec::new();
        for k in effect_catalog().iter().filter(|k| k.categories.contains(category)) {
            if k.directional {
                out.extend(Direction::ALL.iter().map(|d| EffectChoice::new(k.family, Some(*d))));
            } else {
                out.push(EffectChoice::new(k.family, None));
            }
        }
        out
    }

    /// Display label such as `Box`, `FlyFromTop`, `WipeBottom`.
    pub fn label(&self) -> String {
        match self.direction {
            None => self.family.name().to_string(),
            Some(d) => {
                let s = d.as_str();
                format!("{}{}{}", self.family.name(), s[..1].to_ascii_uppercase(), &s[1..])
            }
        }
    }
}

impl fmt::Display for EffectChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for EffectChoice {
    type Err = ModelError;

    /// Accepts labels produced by [`EffectChoice::label`] as well as
    /// `Family:direction`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((fam, dir)) = s.split_once(':') {
            return Ok(EffectChoice::new(fam.parse()?, Direction::parse_opt(dir)?));
        }
        if let Ok(family) = s.parse::<EffectFamily>() {
            return Ok(EffectChoice::new(family, None));
        }
        for d in Direction::ALL {
            for family in EffectFamily::ALL.iter().filter(|f| f.is_directional()) {
                let c = EffectChoice::new(*family, Some(d));
                if c.label().eq_ignore_ascii_case(s) {
                    return Ok(c);
                }
            }
        }
        Err(ModelError::UnknownEffect(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnimationStep {
    pub index: u32,
    pub category: Category,
    pub element: String,
    pub effect: EffectFamily,
    #[serde(with = "direction_opt", default)]
    pub direction: Option<Direction>,
    pub duration_s: f64,
    pub delay_s: f64,
    pub repeat: u32,
}

impl AnimationStep {
    pub fn choice(&self) -> EffectChoice {
        EffectChoice::new(self.effect, self.direction)
    }

    /// Wall-clock length of the step, excluding its delay.
    pub fn active_s(&self) -> f64 {
        self.duration_s * self.repeat as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnimationPlan {
    #[serde(rename = "slide")]
    pub slide_id: String,
    pub steps: Vec<AnimationStep>,
}

impl AnimationPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans always serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// End time of the last step under sequential scheduling.
pub fn plan_duration(plan: &AnimationPlan) -> f64 {
    plan.steps
        .iter()
        .fold(0.0, |end, s| end + s.delay_s + s.active_s())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnknownElement,
    Lifecycle,
    Index,
    Direction,
    Category,
    Duration,
    Delay,
    Repeat,
    StepCount,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub step: Option<u32>,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Out-of-range timing or step counts on plans checked leniently.
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// How timing ranges are enforced: synthesized plans must respect them,
/// externally supplied plans only get warnings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RangePolicy {
    Strict,
    #[default]
    Lenient,
}

/// Validates an externally supplied plan against its slide.
pub fn validate_plan(plan: &AnimationPlan, slide: &SlideSpec) -> Result<ValidationReport, ModelError> {
    validate_plan_with(plan, slide, RangePolicy::Lenient)
}

pub fn validate_plan_with(
    plan: &AnimationPlan,
    slide: &SlideSpec,
    policy: RangePolicy,
) -> Result<ValidationReport, ModelError> {
    if plan.slide_id != slide.slide_id {
        return Err(ModelError::SlideMismatch {
            plan: plan.slide_id.clone(),
            slide: slide.slide_id.clone(),
        });
    }
    let mut report = check_plan(plan, policy);
    for s in &plan.steps {
        if slide.element(&s.element).is_none() {
            report.violations.push(Violation {
                step: Some(s.index),
                kind: ViolationKind::UnknownElement,
                message: format!("element '{}' is not on slide '{}'", s.element, slide.slide_id),
            });
        }
    }
    report.violations.sort_by_key(|v| v.step);
    Ok(report)
}

/// Checks every plan invariant that does not need the slide.
pub fn check_plan(plan: &AnimationPlan, policy: RangePolicy) -> ValidationReport {
    let mut report = ValidationReport::default();
    let range = |v: Violation, report: &mut ValidationReport| match policy {
        RangePolicy::Strict => report.violations.push(v),
        RangePolicy::Lenient => report.warnings.push(v),
    };

    let k = plan.steps.len();
    if !(MIN_STEPS..=MAX_STEPS).contains(&k) {
        range(
            Violation {
                step: None,
                kind: ViolationKind::StepCount,
                message: format!("plan has {k} steps, outside {MIN_STEPS}..={MAX_STEPS}"),
            },
            &mut report,
        );
    }

    let mut shown: HashMap<&str, bool> = HashMap::new();
    for (pos, s) in plan.steps.iter().enumerate() {
        let step = Some(s.index);
        let mut err = |kind, message: String| {
            report.violations.push(Violation { step, kind, message });
        };
        if s.index as usize != pos + 1 {
            err(ViolationKind::Index, format!("index {} at position {}", s.index, pos + 1));
        }
        if !s.effect.supports(s.category) {
            err(
                ViolationKind::Category,
                format!("{} cannot be used as {}", s.effect, s.category),
            );
        }
        match (s.effect.is_directional(), s.direction) {
            (true, None) => err(ViolationKind::Direction, format!("{} needs a direction", s.effect)),
            (false, Some(d)) => err(
                ViolationKind::Direction,
                format!("{} takes no direction but got '{d}'", s.effect),
            ),
            _ => {}
        }
        if !(s.duration_s.is_finite() && s.duration_s > 0.0) {
            err(ViolationKind::Duration, format!("duration {} s must be positive", s.duration_s));
        }
        if !(s.delay_s.is_finite() && s.delay_s >= 0.0) {
            err(ViolationKind::Delay, format!("delay {} s must be non-negative", s.delay_s));
        }
        if s.repeat == 0 {
            err(ViolationKind::Repeat, "repeat must be at least 1".to_string());
        }

        let visible = shown.entry(s.element.as_str()).or_insert(false);
        match (s.category, *visible) {
            (Category::Entrance, true) => err(
                ViolationKind::Lifecycle,
                format!("'{}' enters again without exiting", s.element),
            ),
            (Category::Entrance, false) => *visible = true,
            (Category::Emphasis, false) => err(
                ViolationKind::Lifecycle,
                format!("'{}' is emphasized while hidden", s.element),
            ),
            (Category::Exit, false) => err(
                ViolationKind::Lifecycle,
                format!("'{}' exits while hidden", s.element),
            ),
            (Category::Exit, true) => *visible = false,
            (Category::Emphasis, true) => {}
        }

        if s.duration_s > 0.0 && !(MIN_DURATION_S..=MAX_DURATION_S).contains(&s.duration_s) {
            range(
                Violation {
                    step,
                    kind: ViolationKind::Duration,
                    message: format!("duration {} s outside [0.5, 3.0]", s.duration_s),
                },
                &mut report,
            );
        }
        if s.delay_s > MAX_DELAY_S {
            range(
                Violation {
                    step,
                    kind: ViolationKind::Delay,
                    message: format!("delay {} s outside [0, 4.0]", s.delay_s),
                },
                &mut report,
            );
        }
    }
    report
}

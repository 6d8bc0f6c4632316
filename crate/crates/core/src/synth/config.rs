//! Synthesis configuration and the bundled `paper_default` preset.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::model::{Category, EffectChoice, EffectFamily, KindGroup, MAX_DELAY_S, MAX_DURATION_S, MAX_STEPS, MIN_DURATION_S, MIN_STEPS};

/// Partial effect preferences for one (category, element group) cell.
///
/// Keys are effect labels (`Box`, `FlyFromTop`) or, for directional
/// families, a bare family name (`Wipe`) whose weight is split evenly over
/// its directions. Probability mass not assigned is spread uniformly over
/// the remaining effects of the category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectTable {
    pub category: Category,
    pub group: KindGroup,
    pub weights: BTreeMap<String, f64>,
}

impl EffectTable {
    /// Expands into a full distribution over concrete effects, in catalog
    /// order. Weights sum to 1.
    pub fn resolve(&self) -> Result<Vec<(EffectChoice, f64)>, SynthError> {
        let all = EffectChoice::all_for(self.category);
        let mut named: BTreeMap<EffectChoice, f64> = BTreeMap::new();
        for (label, &w) in &self.weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(SynthError::Config(format!("negative weight for '{label}'")));
            }
            let bad = || SynthError::Config(format!("'{label}' is not a {} effect", self.category));
            let targets: Vec<EffectChoice> = match label.parse::<EffectFamily>() {
                Ok(f) if f.is_directional() => all.iter().copied().filter(|c| c.family == f).collect(),
                _ => {
                    let c: EffectChoice = label.parse().map_err(|_| bad())?;
                    vec![c]
                }
            };
            if targets.is_empty() || targets.iter().any(|c| !all.contains(c)) {
                return Err(bad());
            }
            for c in &targets {
                *named.entry(*c).or_insert(0.0) += w / targets.len() as f64;
            }
        }
        let assigned: f64 = named.values().sum();
        if assigned > 1.0 + 1e-9 {
            return Err(SynthError::Config(format!(
                "{} {} weights sum to {assigned} > 1",
                self.category,
                self.group.as_str()
            )));
        }
        let rest: Vec<EffectChoice> = all.iter().copied().filter(|c| !named.contains_key(c)).collect();
        let share = if rest.is_empty() { 0.0 } else { (1.0 - assigned) / rest.len() as f64 };
        let total = if rest.is_empty() { assigned } else { 1.0 };
        if total <= 0.0 {
            return Err(SynthError::Config("effect table has no mass".into()));
        }
        Ok(all
            .into_iter()
            .map(|c| (c, named.get(&c).copied().unwrap_or(share) / total))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryWeights {
    pub entrance: f64,
    pub emphasis: f64,
    pub exit: f64,
}

impl CategoryWeights {
    pub fn get(&self, c: Category) -> f64 {
        match c {
            Category::Entrance => self.entrance,
            Category::Emphasis => self.emphasis,
            Category::Exit => self.exit,
        }
    }
}

/// Optional text-generation service that paraphrases action lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalClient {
    pub endpoint: String,
    pub timeout_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub name: String,
    pub seed: u64,
    pub n_slides: usize,
    pub schemes_per_slide: usize,
    /// Steps per scheme, `(count, weight)`.
    pub step_counts: Vec<(u32, f64)>,
    /// Step durations in seconds, `(value, weight)`.
    pub durations: Vec<(f64, f64)>,
    /// Delays before each step in seconds, `(value, weight)`.
    pub delays: Vec<(f64, f64)>,
    /// Repeat counts for emphasis steps; entrances and exits play once.
    pub emphasis_repeats: Vec<(u32, f64)>,
    /// Category mix for steps not spent on first entrances.
    pub category_weights: CategoryWeights,
    /// Chance that a step introduces a not-yet-shown element while some
    /// remain.
    pub first_entrance_bias: f64,
    pub effect_tables: Vec<EffectTable>,
    /// Probability that a slide has a body text block.
    pub body_probability: f64,
    /// Weights for 1, 2, 3 and 4 images.
    pub image_count_weights: [f64; 4],
    pub english_fraction: f64,
    /// Size of the placeholder image pool references are drawn from.
    pub image_pool: u32,
    pub fps: Vec<f64>,
    /// One record in `test_every` goes to the test split.
    pub test_every: u32,
    #[serde(default)]
    pub external: Option<ExternalClient>,
}

/// Weights of `4 + Binomial(11, q)` with mean 7.6.
fn step_count_weights() -> Vec<(u32, f64)> {
    let n = (MAX_STEPS - MIN_STEPS) as u32;
    let q = (7.6 - MIN_STEPS as f64) / n as f64;
    let mut out = Vec::new();
    let mut binom = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        let p = binom * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32);
        out.push((MIN_STEPS as u32 + k, p));
    }
    out
}

fn table(category: Category, group: KindGroup, entries: &[(&str, f64)]) -> EffectTable {
    EffectTable {
        category,
        group,
        weights: entries.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

impl SynthConfig {
    /// Distributions matching the published dataset statistics: 300 slides
    /// with 40 schemes each, 4-15 steps averaging 7.6, durations peaking at
    /// 1.0 s and 1.5 s, and the reported per-category effect preferences.
    pub fn paper_default() -> Self {
        use Category::*;
        use KindGroup::*;
        SynthConfig {
            name: "paper_default".into(),
            seed: 20250701,
            n_slides: 300,
            schemes_per_slide: 40,
            step_counts: step_count_weights(),
            durations: vec![(0.5, 0.10), (1.0, 0.32), (1.5, 0.30), (2.0, 0.15), (2.5, 0.08), (3.0, 0.05)],
            delays: vec![
                (0.0, 0.30),
                (0.5, 0.22),
                (1.0, 0.18),
                (1.5, 0.12),
                (2.0, 0.08),
                (2.5, 0.04),
                (3.0, 0.03),
                (3.5, 0.02),
                (4.0, 0.01),
            ],
            emphasis_repeats: vec![(1, 0.85), (2, 0.12), (3, 0.03)],
            category_weights: CategoryWeights {
                entrance: 0.2,
                emphasis: 0.45,
                exit: 0.35,
            },
            first_entrance_bias: 0.6,
            effect_tables: vec![
                table(Entrance, Text, &[("Box", 0.193), ("Blinds", 0.152), ("FlyFromTop", 0.158)]),
                table(Entrance, Image, &[("Pinwheel", 0.176), ("FlyFromLeft", 0.119), ("FlyFromTop", 0.111)]),
                table(Emphasis, Text, &[("Teeter", 0.335), ("FlashBulb", 0.303)]),
                table(Emphasis, Image, &[("GrowShrink", 0.304), ("Spin", 0.163)]),
                table(Exit, Text, &[("Wipe", 0.224), ("Checkerboard", 0.141), ("Fade", 0.171)]),
                table(
                    Exit,
                    Image,
                    &[
                        ("Wipe", 0.228),
                        ("Checkerboard", 0.212),
                        ("Fade", 0.173),
                        ("FlyToBottom", 0.125),
                        ("FlyToRight", 0.065),
                    ],
                ),
            ],
            body_probability: 0.75,
            image_count_weights: [0.25; 4],
            english_fraction: 0.5,
            image_pool: 1000,
            fps: vec![2.0],
            test_every: 12,
            external: None,
        }
    }

    /// Looks up a bundled preset by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper_default" => Some(Self::paper_default()),
            _ => None,
        }
    }

    /// Loads a preset name or a JSON config file.
    pub fn load(name_or_path: &str) -> Result<Self, SynthError> {
        if let Some(c) = Self::preset(name_or_path) {
            return Ok(c);
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: SynthConfig = serde_json::from_str(&text)
            .map_err(|e| SynthError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn table(&self, category: Category, group: KindGroup) -> Option<&EffectTable> {
        self.effect_tables
            .iter()
            .find(|t| t.category == category && t.group == group)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |m: String| Err(SynthError::Config(m));
        fn check_weights<T>(name: &str, w: &[(T, f64)]) -> Result<(), SynthError> {
            if w.is_empty() || w.iter().any(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
                return Err(SynthError::Config(format!("{name}: weights must be non-negative")));
            }
            if w.iter().map(|(_, p)| p).sum::<f64>() <= 0.0 {
                return Err(SynthError::Config(format!("{name}: weights sum to zero")));
            }
            Ok(())
        }
        check_weights("step_counts", &self.step_counts)?;
        check_weights("durations", &self.durations)?;
        check_weights("delays", &self.delays)?;
        check_weights("emphasis_repeats", &self.emphasis_repeats)?;
        if let Some((k, _)) = self
            .step_counts
            .iter()
            .find(|(k, w)| *w > 0.0 && !(MIN_STEPS as u32..=MAX_STEPS as u32).contains(k))
        {
            return err(format!("step count {k} outside {MIN_STEPS}..={MAX_STEPS}"));
        }
        if let Some((d, _)) = self
            .durations
            .iter()
            .find(|(d, w)| *w > 0.0 && !(MIN_DURATION_S..=MAX_DURATION_S).contains(d))
        {
            return err(format!("duration {d} outside [0.5, 3.0]"));
        }
        if let Some((d, _)) = self.delays.iter().find(|(d, w)| *w > 0.0 && !(0.0..=MAX_DELAY_S).contains(d)) {
            return err(format!("delay {d} outside [0, 4.0]"));
        }
        if self.emphasis_repeats.iter().any(|(r, w)| *w > 0.0 && *r == 0) {
            return err("repeat counts must be at least 1".into());
        }
        let cw = &self.category_weights;
        if [cw.entrance, cw.emphasis, cw.exit].iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return err("category weights must be non-negative".into());
        }
        for p in [self.first_entrance_bias, self.body_probability, self.english_fraction] {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("probability {p} outside [0, 1]"));
            }
        }
        if self.image_count_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0))
            || self.image_count_weights.iter().sum::<f64>() <= 0.0
        {
            return err("image_count_weights must be non-negative with positive sum".into());
        }
        for category in Category::ALL {
            for group in KindGroup::ALL {
                match self.table(category, group) {
                    Some(t) => {
                        t.resolve()?;
                    }
                    None => return err(format!("missing effect table for {category} {}", group.as_str())),
                }
            }
        }
        if self.fps.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return err("fps values must be positive".into());
        }
        if self.test_every == 0 {
            return err("test_every must be at least 1".into());
        }
        Ok(())
    }
}

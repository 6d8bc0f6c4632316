//! Dataset statistics: effect preferences, step-count, duration and delay
//! distributions, and CSV/text/SVG reports.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::warn;
use thiserror::Error;

use crate::grammar::format_seconds;
use crate::model::{AnimationPlan, Category, KindGroup, SlideSpec, MAX_STEPS, MIN_STEPS};
use crate::synth::DatasetManifest;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no complete records with readable plans")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StatsError + '_ {
    move |source| StatsError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Seconds as integer milliseconds, so histogram keys order and compare
/// exactly.
fn ms(x: f64) -> i64 {
    (x * 1000.0).round() as i64
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetStats {
    pub schemes: usize,
    pub total_instances: usize,
    /// Records skipped because their plan or slide could not be read.
    pub excluded: usize,
    pub category_counts: BTreeMap<Category, usize>,
    /// Effect label counts per (category, element group).
    pub effects: BTreeMap<(Category, KindGroup), BTreeMap<String, usize>>,
    pub step_counts: BTreeMap<usize, usize>,
    /// Keyed by milliseconds.
    pub durations: BTreeMap<i64, usize>,
    pub delays: BTreeMap<i64, usize>,
    pub group_counts: BTreeMap<KindGroup, usize>,
}

impl DatasetStats {
    /// Adds one plan. Steps on elements missing from `slide` are counted as
    /// text.
    pub fn add(&mut self, plan: &AnimationPlan, slide: &SlideSpec) {
        self.schemes += 1;
        *self.step_counts.entry(plan.steps.len()).or_default() += 1;
        for s in &plan.steps {
            self.total_instances += 1;
            let group = slide.element(&s.element).map_or(KindGroup::Text, |e| e.kind.group());
            *self.category_counts.entry(s.category).or_default() += 1;
            *self.group_counts.entry(group).or_default() += 1;
            *self
                .effects
                .entry((s.category, group))
                .or_default()
                .entry(s.choice().label())
                .or_default() += 1;
            *self.durations.entry(ms(s.duration_s)).or_default() += 1;
            *self.delays.entry(ms(s.delay_s)).or_default() += 1;
        }
    }

    /// Merges shard statistics; order does not matter.
    pub fn merge(&mut self, other: &DatasetStats) {
        fn add_map<K: Ord + Clone>(a: &mut BTreeMap<K, usize>, b: &BTreeMap<K, usize>) {
            for (k, v) in b {
                *a.entry(k.clone()).or_default() += v;
            }
        }
        self.schemes += other.schemes;
        self.total_instances += other.total_instances;
        self.excluded += other.excluded;
        add_map(&mut self.category_counts, &other.category_counts);
        add_map(&mut self.step_counts, &other.step_counts);
        add_map(&mut self.durations, &other.durations);
        add_map(&mut self.delays, &other.delays);
        add_map(&mut self.group_counts, &other.group_counts);
        for (k, m) in &other.effects {
            add_map(self.effects.entry(*k).or_default(), m);
        }
    }

    pub fn mean_steps(&self) -> f64 {
        if self.schemes == 0 {
            return 0.0;
        }
        self.total_instances as f64 / self.schemes as f64
    }

    /// `(label, count, percent)` for one table, most frequent first.
    pub fn effect_table(&self, category: Category, group: KindGroup) -> Vec<(String, usize, f64)> {
        let Some(m) = self.effects.get(&(category, group)) else {
            return Vec::new();
        };
        let total: usize = m.values().sum();
        let mut rows: Vec<_> = m
            .iter()
            .map(|(k, &v)| (k.clone(), v, 100.0 * v as f64 / total as f64))
            .collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        rows
    }

    /// Percentage of one effect within its table; directional variants of a
    /// bare family name are summed.
    pub fn effect_percent(&self, category: Category, group: KindGroup, label: &str) -> f64 {
        self.effect_table(category, group)
            .iter()
            .filter(|(l, _, _)| l == label || family_of(l) == label)
            .map(|r| r.2)
            .sum()
    }

    pub fn image_share(&self) -> f64 {
        percent(self.group_counts.get(&KindGroup::Image).copied().unwrap_or(0), self.total_instances)
    }
}

fn family_of(label: &str) -> &str {
    for d in ["Left", "Right", "Top", "Bottom"] {
        if let Some(f) = label.strip_suffix(d) {
            return f;
        }
    }
    label
}

fn percent(n: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * n as f64 / total as f64
    }
}

/// Aggregates every complete record of `manifest`, reading files under
/// `root`.
pub fn dataset_stats(manifest: &DatasetManifest, root: &Path) -> Result<DatasetStats, StatsError> {
    let mut stats = DatasetStats::default();
    let mut slides: HashMap<&str, Option<SlideSpec>> = HashMap::new();
    for r in manifest.complete() {
        let slide = slides
            .entry(r.slide_path.as_str())
            .or_insert_with(|| {
                let path = root.join(&r.slide_path);
                fs::read_to_string(&path)
                    .ok()
                    .and_then(|t| serde_json::from_str(&t).ok())
            })
            .as_ref();
        let plan = fs::read_to_string(root.join(&r.plan_path))
            .ok()
            .and_then(|t| AnimationPlan::from_json(&t).ok());
        match (plan, slide) {
            (Some(plan), Some(slide)) => stats.add(&plan, slide),
            _ => {
                warn!("skipping {}/{}: unreadable plan or slide", r.slide_id, r.scheme);
                stats.excluded += 1;
            }
        }
    }
    if stats.schemes == 0 {
        return Err(StatsError::Empty);
    }
    Ok(stats)
}

fn write(dir: &Path, name: &str, text: &str, out: &mut Vec<PathBuf>) -> Result<(), StatsError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(io_err(&path))?;
    out.push(path);
    Ok(())
}

fn histogram_csv(header: &str, rows: &[(String, usize)], total: usize) -> String {
    let mut s = format!("{header},count,percent\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{v},{:.2}", percent(*v, total));
    }
    s
}

fn seconds_rows(m: &BTreeMap<i64, usize>) -> Vec<(String, usize)> {
    m.iter().map(|(k, v)| (format_seconds(*k as f64 / 1000.0), *v)).collect()
}

fn step_rows(stats: &DatasetStats) -> Vec<(String, usize)> {
    let mut m = stats.step_counts.clone();
    for k in MIN_STEPS..=MAX_STEPS {
        m.entry(k).or_default();
    }
    m.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn text_bars(rows: &[(String, usize)], total: usize) -> String {
    let mut s = String::new();
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (k, v) in rows {
        let p = percent(*v, total);
        let _ = writeln!(s, "  {k:>width$} | {:<50} {p:5.1}%", "#".repeat((p / 2.0).round() as usize));
    }
    s
}

fn summary(stats: &DatasetStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "schemes: {}", stats.schemes);
    let _ = writeln!(s, "animation instances: {}", stats.total_instances);
    let _ = writeln!(s, "excluded records: {}", stats.excluded);
    let _ = writeln!(s, "mean steps per scheme: {:.4}", stats.mean_steps());
    for c in Category::ALL {
        let n = stats.category_counts.get(&c).copied().unwrap_or(0);
        let _ = writeln!(s, "{c}: {n} ({:.2}%)", percent(n, stats.total_instances));
    }
    let _ = writeln!(s, "image share: {:.2}%", stats.image_share());
    for c in Category::ALL {
        for g in KindGroup::ALL {
            let _ = writeln!(s, "\n{} / {} (top 5)", c, g.as_str());
            for (label, n, p) in stats.effect_table(c, g).iter().take(5) {
                let _ = writeln!(s, "  {label:<20} {n:>7} {p:6.2}%");
            }
        }
    }
    let _ = writeln!(s, "\nsteps per scheme");
    s.push_str(&text_bars(&step_rows(stats), stats.schemes));
    let _ = writeln!(s, "\nduration (s)");
    s.push_str(&text_bars(&seconds_rows(&stats.durations), stats.total_instances));
    let _ = writeln!(s, "\ndelay (s)");
    s.push_str(&text_bars(&seconds_rows(&stats.delays), stats.total_instances));
    s
}

fn bar_svg(title: &str, rows: &[(String, usize)]) -> String {
    let (w, h, pad) = (640.0, 320.0, 40.0);
    let max = rows.iter().map(|r| r.1).max().unwrap_or(1).max(1) as f64;
    let bw = (w - 2.0 * pad) / rows.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{pad}" y="20" font-size="14">{title}</text>"#);
    for (i, (k, v)) in rows.iter().enumerate() {
        let bh = (h - 2.0 * pad - 10.0) * *v as f64 / max;
        let x = pad + i as f64 * bw;
        let y = h - pad - bh;
        let _ = writeln!(
            s,
            r##"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{bh:.1}" fill="#4a78b5"/>"##,
            bw * 0.8
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#,
            x + bw * 0.4,
            h - pad + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `effects.csv`, `step_counts.csv`, `durations.csv`, `delays.csv`
/// and `summary.txt`, plus bar charts when `svg` is set.
pub fn emit_reports(stats: &DatasetStats, out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>, StatsError> {
    if stats.schemes == 0 || stats.total_instances == 0 {
        return Err(StatsError::Empty);
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut out = Vec::new();

    let mut effects = String::from("category,group,effect,count,percent\n");
    for c in Category::ALL {
        for g in KindGroup::ALL {
            for (label, n, p) in stats.effect_table(c, g) {
                let _ = writeln!(effects, "{c},{},{label},{n},{p:.2}", g.as_str());
            }
        }
    }
    write(out_dir, "effects.csv", &effects, &mut out)?;
    let steps = step_rows(stats);
    let durations = seconds_rows(&stats.durations);
    let delays = seconds_rows(&stats.delays);
    write(out_dir, "step_counts.csv", &histogram_csv("steps", &steps, stats.schemes), &mut out)?;
    write(out_dir, "durations.csv", &histogram_csv("duration_s", &durations, stats.total_instances), &mut out)?;
    write(out_dir, "delays.csv", &histogram_csv("delay_s", &delays, stats.total_instances), &mut out)?;
    write(out_dir, "summary.txt", &summary(stats), &mut out)?;
    if svg {
        write(out_dir, "step_counts.svg", &bar_svg("Steps per scheme", &steps), &mut out)?;
        write(out_dir, "durations.svg", &bar_svg("Duration (s)", &durations), &mut out)?;
        write(out_dir, "delays.svg", &bar_svg("Delay (s)", &delays), &mut out)?;
    }
    Ok(out)
}

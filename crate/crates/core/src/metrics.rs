//! Description metrics: BLEU-4, ROUGE-1/2/L, SPICE-lite and CODA
//! (coverage, order, detail), with corpus aggregation and report output.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::hash::Hash;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::grammar::{extract_action_units, format_seconds, ActionUnit};

/// Numeric parameters within this many seconds count as matching in CODA
/// detail scoring.
pub const SECONDS_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("corpus has no pairs")]
    EmptyCorpus,
    #[error("prediction and reference files differ in length: {pred} vs {reference} lines")]
    Misaligned { pred: usize, reference: usize },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

/// Lowercases, splits on whitespace, and strips punctuation from token
/// edges. Interior punctuation survives, so `1.5` stays one token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            t.trim_matches(|c: char| c.is_ascii_punctuation() || (!c.is_alphanumeric() && !c.is_whitespace()))
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for g in tokens.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BleuBreakdown {
    /// Clipped n-gram precisions for n = 1..4.
    pub precisions: [f64; 4],
    pub matches: [usize; 4],
    pub totals: [usize; 4],
    pub weights: [f64; 4],
    pub brevity_penalty: f64,
    pub candidate_len: usize,
    /// Length of the reference closest to the candidate (ties: shorter).
    pub reference_len: usize,
    pub score: f64,
}

/// Unsmoothed BLEU-4 with uniform weights. Any zero precision gives a zero
/// score; an empty candidate gets a brevity penalty of 0.
pub fn bleu4<T: Eq + Hash>(candidate: &[T], references: &[Vec<T>]) -> BleuBreakdown {
    let weights = [0.25; 4];
    let c = candidate.len();
    let r = references
        .iter()
        .map(|r| r.len())
        .min_by_key(|&len| (len.abs_diff(c), len))
        .unwrap_or(0);

    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let mut precisions = [0.0; 4];
    for n in 1..=4 {
        let cand = ngram_counts(candidate, n);
        let mut max_ref: HashMap<&[T], usize> = HashMap::new();
        for reference in references {
            for (g, k) in ngram_counts(reference, n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(k);
            }
        }
        let matched: usize = cand
            .iter()
            .map(|(g, &k)| k.min(max_ref.get(g).copied().unwrap_or(0)))
            .sum();
        let total = c.saturating_sub(n - 1);
        matches[n - 1] = matched;
        totals[n - 1] = total;
        precisions[n - 1] = if total == 0 { 0.0 } else { matched as f64 / total as f64 };
    }

    let brevity_penalty = if c == 0 {
        0.0
    } else if c > r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    let score = if references.is_empty() || precisions.iter().any(|&p| p == 0.0) {
        0.0
    } else {
        let log_sum: f64 = precisions.iter().zip(weights).map(|(p, w)| w * p.ln()).sum();
        brevity_penalty * log_sum.exp()
    };
    BleuBreakdown {
        precisions,
        matches,
        totals,
        weights,
        brevity_penalty,
        candidate_len: c,
        reference_len: r,
        score,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RougeVariant {
    One,
    Two,
    L,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RougeBreakdown {
    pub variant: RougeVariant,
    /// Matched n-grams, or the LCS length for ROUGE-L.
    pub matched: usize,
    /// Reference n-gram count, or reference length for ROUGE-L.
    pub total: usize,
    pub score: f64,
    /// Set when the reference has nothing to recall; the score is then 0.
    pub degenerate: bool,
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Length of the longest strictly increasing subsequence.
pub fn lis_len<T: Ord>(xs: &[T]) -> usize {
    let mut tails: Vec<&T> = Vec::new();
    for x in xs {
        let pos = tails.partition_point(|t| *t < x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
    }
    tails.len()
}

/// Recall-oriented ROUGE of `candidate` against one reference.
pub fn rouge<T: Eq + Hash>(candidate: &[T], reference: &[T], variant: RougeVariant) -> RougeBreakdown {
    let (matched, total) = match variant {
        RougeVariant::L => (lcs_len(reference, candidate), reference.len()),
        RougeVariant::One | RougeVariant::Two => {
            let n = if variant == RougeVariant::One { 1 } else { 2 };
            let cand = ngram_counts(candidate, n);
            let refs = ngram_counts(reference, n);
            let matched = refs
                .iter()
                .map(|(g, &k)| k.min(cand.get(g).copied().unwrap_or(0)))
                .sum();
            (matched, reference.len().saturating_sub(n - 1))
        }
    };
    let degenerate = total == 0;
    RougeBreakdown {
        variant,
        matched,
        total,
        score: if degenerate { 0.0 } else { matched as f64 / total as f64 },
        degenerate,
    }
}

/// A semantic tuple: `(element)`, `(element, category)`,
/// `(element, category, effect)` or `(element, parameter, value)`.
pub type SemanticTuple = Vec<String>;

pub fn unit_tuples(unit: &ActionUnit) -> Vec<SemanticTuple> {
    let el = unit.element.to_lowercase();
    let cat = unit.category.as_str().to_string();
    let mut out = vec![vec![el.clone()], vec![el.clone(), cat.clone()]];
    if let Some(effect) = unit.effect {
        out.push(vec![el.clone(), cat, effect.name().to_string()]);
    }
    let mut param = |name: &str, value: String| out.push(vec![el.clone(), name.to_string(), value]);
    if let Some(d) = unit.direction {
        param("direction", d.as_str().to_string());
    }
    if let Some(d) = unit.duration_s {
        param("duration", format_seconds(d));
    }
    if let Some(d) = unit.delay_s {
        param("delay", format_seconds(d));
    }
    if let Some(r) = unit.repeat {
        param("repeat", r.to_string());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpiceBreakdown {
    pub candidate: BTreeSet<SemanticTuple>,
    pub reference: BTreeSet<SemanticTuple>,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// F1 over tuple sets; 0 when precision + recall is 0.
pub fn f1_from_sets(candidate: BTreeSet<SemanticTuple>, reference: BTreeSet<SemanticTuple>) -> SpiceBreakdown {
    let tp = candidate.intersection(&reference).count();
    let fp = candidate.len() - tp;
    let fn_ = reference.len() - tp;
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    SpiceBreakdown {
        candidate,
        reference,
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1,
    }
}

/// SPICE-style F1 over tuples derived from action units instead of parsed
/// scene graphs.
pub fn spice_lite(candidate: &[ActionUnit], reference: &[ActionUnit]) -> SpiceBreakdown {
    let c = candidate.iter().flat_map(unit_tuples).collect();
    let r = reference.iter().flat_map(unit_tuples).collect();
    f1_from_sets(c, r)
}

/// Pairs units left to right: each reference unit, in order, takes the
/// lowest-index unused prediction unit with the same element and category.
/// Returns `(reference index, prediction index)` pairs in reference order.
pub fn coda_match(pred: &[ActionUnit], reference: &[ActionUnit]) -> Vec<(usize, usize)> {
    let mut used = vec![false; pred.len()];
    let mut out = Vec::new();
    for (i, r) in reference.iter().enumerate() {
        let key = r.match_key();
        if let Some(j) = (0..pred.len()).find(|&j| !used[j] && pred[j].match_key() == key) {
            used[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Parameter agreement of a matched pair: 1 if every compared parameter
/// matches, 0.5 if some do, 0 if none do. Parameters the reference leaves
/// unspecified are not compared; a parameter the reference states but the
/// prediction omits counts as a mismatch.
pub fn detail_score(reference: &ActionUnit, pred: &ActionUnit) -> f64 {
    fn secs(a: Option<f64>, b: Option<f64>) -> Option<bool> {
        a.map(|a| b.is_some_and(|b| (a - b).abs() <= SECONDS_TOLERANCE + 1e-9))
    }
    let checks = [
        reference.effect.map(|e| pred.effect == Some(e)),
        reference.direction.map(|d| pred.direction == Some(d)),
        secs(reference.duration_s, pred.duration_s),
        secs(reference.delay_s, pred.delay_s),
        reference.repeat.map(|r| pred.repeat == Some(r)),
    ];
    let compared = checks.iter().flatten().count();
    let agreed = checks.iter().flatten().filter(|&&ok| ok).count();
    if agreed == compared {
        1.0
    } else if agreed > 0 {
        0.5
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodaBreakdown {
    /// Prediction unit count.
    pub m: usize,
    /// Reference unit count.
    pub n: usize,
    pub matches: Vec<(usize, usize)>,
    /// Longest run of matched pairs whose prediction order agrees with the
    /// reference order.
    pub lcs: usize,
    pub coverage: f64,
    pub order: f64,
    pub detail: f64,
    pub pair_details: Vec<f64>,
}

pub fn coda_score(pred: &[ActionUnit], reference: &[ActionUnit]) -> CodaBreakdown {
    let n = reference.len();
    let matches = coda_match(pred, reference);
    // Matches are in reference order, so the prediction indices form a
    // sequence whose increasing runs are the order-preserving subsets.
    let pred_order: Vec<usize> = matches.iter().map(|&(_, j)| j).collect();
    let lcs = lis_len(&pred_order);
    let pair_details: Vec<f64> = matches
        .iter()
        .map(|&(i, j)| detail_score(&reference[i], &pred[j]))
        .collect();
    let (coverage, order) = if n == 0 {
        (1.0, 1.0)
    } else {
        (matches.len() as f64 / n as f64, lcs as f64 / n as f64)
    };
    let detail = if pair_details.is_empty() {
        0.0
    } else {
        pair_details.iter().sum::<f64>() / pair_details.len() as f64
    };
    CodaBreakdown {
        m: pred.len(),
        n,
        matches,
        lcs,
        coverage,
        order,
        detail,
        pair_details,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalConfig {
    pub tokenizer: String,
    /// Kept for scoring backends that are not deterministic; the built-in
    /// decomposer needs a single pass.
    pub coda_repetitions: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tokenizer: "lowercase-whitespace-edge-punct".to_string(),
            coda_repetitions: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairScores {
    pub bleu: BleuBreakdown,
    pub rouge1: RougeBreakdown,
    pub rouge2: RougeBreakdown,
    pub rouge_l: RougeBreakdown,
    pub spice: SpiceBreakdown,
    pub coda: CodaBreakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub index: usize,
    pub scores: Result<PairScores, String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CorpusMeans {
    pub bleu4: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub spice: f64,
    pub coda_coverage: f64,
    pub coda_order: f64,
    pub coda_detail: f64,
}

impl CorpusMeans {
    fn of(s: &PairScores) -> Self {
        CorpusMeans {
            bleu4: s.bleu.score,
            rouge1: s.rouge1.score,
            rouge2: s.rouge2.score,
            rouge_l: s.rouge_l.score,
            spice: s.spice.f1,
            coda_coverage: s.coda.coverage,
            coda_order: s.coda.order,
            coda_detail: s.coda.detail,
        }
    }

    fn values(&self) -> [f64; 8] {
        [
            self.bleu4,
            self.rouge1,
            self.rouge2,
            self.rouge_l,
            self.spice,
            self.coda_coverage,
            self.coda_order,
            self.coda_detail,
        ]
    }
}

pub const CSV_COLUMNS: [&str; 10] = [
    "pair",
    "status",
    "bleu4",
    "rouge1",
    "rouge2",
    "rouge_l",
    "spice",
    "coda_coverage",
    "coda_order",
    "coda_detail",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub pairs: Vec<PairReport>,
    pub means: CorpusMeans,
    pub n_pairs: usize,
    pub n_scored: usize,
    pub n_failed: usize,
    pub config: EvalConfig,
}

pub fn score_pair(pred: &str, reference: &str) -> Result<PairScores, String> {
    let ref_tokens = tokenize(reference);
    if ref_tokens.is_empty() {
        return Err("empty reference".to_string());
    }
    let pred_tokens = tokenize(pred);
    let pred_units = extract_action_units(pred);
    let ref_units = extract_action_units(reference);
    Ok(PairScores {
        bleu: bleu4(&pred_tokens, std::slice::from_ref(&ref_tokens)),
        rouge1: rouge(&pred_tokens, &ref_tokens, RougeVariant::One),
        rouge2: rouge(&pred_tokens, &ref_tokens, RougeVariant::Two),
        rouge_l: rouge(&pred_tokens, &ref_tokens, RougeVariant::L),
        spice: spice_lite(&pred_units, &ref_units),
        coda: coda_score(&pred_units, &ref_units),
    })
}

/// Scores every `(prediction, reference)` pair and averages over the pairs
/// that could be scored. Pairs with an empty reference are recorded as
/// failures and left out of the means.
pub fn evaluate_corpus(pairs: &[(String, String)], config: &EvalConfig) -> Result<MetricReport, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let reports: Vec<PairReport> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, (p, r))| PairReport {
            index,
            scores: score_pair(p, r),
        })
        .collect();
    let scored: Vec<CorpusMeans> = reports
        .iter()
        .filter_map(|r| r.scores.as_ref().ok().map(CorpusMeans::of))
        .collect();
    let mut sums = [0.0; 8];
    for s in &scored {
        for (acc, v) in sums.iter_mut().zip(s.values()) {
            *acc += v;
        }
    }
    let k = scored.len().max(1) as f64;
    let means = CorpusMeans {
        bleu4: sums[0] / k,
        rouge1: sums[1] / k,
        rouge2: sums[2] / k,
        rouge_l: sums[3] / k,
        spice: sums[4] / k,
        coda_coverage: sums[5] / k,
        coda_order: sums[6] / k,
        coda_detail: sums[7] / k,
    };
    Ok(MetricReport {
        n_pairs: pairs.len(),
        n_scored: scored.len(),
        n_failed: pairs.len() - scored.len(),
        pairs: reports,
        means,
        config: config.clone(),
    })
}

/// Reads line-aligned prediction and reference files into pairs.
pub fn read_pairs(pred_path: &Path, ref_path: &Path) -> Result<Vec<(String, String)>, MetricsError> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|source| MetricsError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    let pred = read(pred_path)?;
    let reference = read(ref_path)?;
    let pl: Vec<&str> = pred.lines().collect();
    let rl: Vec<&str> = reference.lines().collect();
    if pl.len() != rl.len() {
        return Err(MetricsError::Misaligned {
            pred: pl.len(),
            reference: rl.len(),
        });
    }
    Ok(pl
        .into_iter()
        .zip(rl)
        .map(|(p, r)| (p.to_string(), r.to_string()))
        .collect())
}

impl MetricReport {
    pub fn to_csv(&self) -> String {
        let mut s = CSV_COLUMNS.join(",");
        s.push('\n');
        for p in &self.pairs {
            match &p.scores {
                Ok(scores) => {
                    let _ = write!(s, "{},ok", p.index);
                    for v in CorpusMeans::of(scores).values() {
                        let _ = write!(s, ",{v:.6}");
                    }
                }
                Err(_) => {
                    let _ = write!(s, "{},failed", p.index);
                    s.push_str(&",".repeat(8));
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let m = &self.means;
        let mut s = String::new();
        let _ = writeln!(s, "pairs: {} (scored {}, failed {})", self.n_pairs, self.n_scored, self.n_failed);
        let _ = writeln!(s, "tokenizer: {}", self.config.tokenizer);
        let _ = writeln!(s, "coda_repetitions: {}", self.config.coda_repetitions);
        for (name, v) in CSV_COLUMNS[2..].iter().zip(m.values()) {
            let _ = writeln!(s, "{name}: {v:.4}");
        }
        s
    }

    /// Writes `metrics.csv` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), MetricsError> {
        let io = |path: PathBuf| move |source| MetricsError::Io { path, source };
        fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
        let csv = dir.join("metrics.csv");
        fs::write(&csv, self.to_csv()).map_err(io(csv.clone()))?;
        let summary = dir.join("summary.txt");
        fs::write(&summary, self.summary()).map_err(io(summary.clone()))?;
        Ok(())
    }
}

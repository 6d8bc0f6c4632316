//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! to stderr;
//! the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::time::{Duration, Instant};

use image::RgbaImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slideanim::grammar::{extract_action_units, format_action_line, parse_action_line, render_narrative, ActionUnit};
use slideanim::metrics::{bleu4, coda_score, rouge, score_pair, RougeVariant};
use slideanim::model::{
    AnimationPlan, AnimationStep, Category, Direction, EffectChoice, EffectFamily, Element, ElementKind, KindGroup,
    Language, Size, SlideSpec,
};
use slideanim::render::{
    effect_transform, rasterize_with, render_video, Canvas, Mask, RenderOptions, Sprites, VisualState, FRAMES_DIR,
    RENDER_MANIFEST,
};
use slideanim::stats::dataset_stats;
use slideanim::synth::{scheme_seed, slide_seed, synth_dataset, synth_scheme, synth_slide, DatasetOptions, SynthConfig};
use slideanim::timeline::{ElementState, FrameState};

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(elapsed: Duration, limit_s: u64, what: &str) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_s as f64,
        format!("{what} took {:.1} s (limit {limit_s} s)", elapsed.as_secs_f64()),
    )
}

/// Synthesized plans for sweeps, one slide per plan.
fn plans(n: usize, seed: u64) -> Vec<(SlideSpec, AnimationPlan)> {
    let mut cfg = SynthConfig::paper_default();
    cfg.seed = seed;
    (0..n)
        .map(|i| {
            let slide = synth_slide(&format!("slide_{i:04}"), slide_seed(&cfg, i), &cfg).unwrap();
            let plan = synth_scheme(scheme_seed(&cfg, i, 0), &slide, &cfg).unwrap();
            (slide, plan)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Oracles

/// Occurrences of `gram` in `seq`, by scanning every window.
fn count_windows(seq: &[u8], gram: &[u8]) -> usize {
    if gram.len() > seq.len() {
        return 0;
    }
    (0..=seq.len() - gram.len()).filter(|&i| &seq[i..i + gram.len()] == gram).count()
}

fn oracle_bleu(c: &[u8], r: &[u8]) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4 {
        if c.len() < n {
            return 0.0;
        }
        let total = c.len() - n + 1;
        // Clip each distinct candidate n-gram once.
        let mut matched = 0;
        for i in 0..total {
            let g = &c[i..i + n];
            let first = (0..i).all(|j| &c[j..j + n] != g);
            if first {
                matched += count_windows(c, g).min(count_windows(r, g));
            }
        }
        if matched == 0 {
            return 0.0;
        }
        log_sum += 0.25 * (matched as f64 / total as f64).ln();
    }
    let bp = if c.len() > r.len() {
        1.0
    } else {
        (1.0 - r.len() as f64 / c.len() as f64).exp()
    };
    bp * log_sum.exp()
}

fn oracle_rouge_n(c: &[u8], r: &[u8], n: usize) -> f64 {
    if r.len() < n || r.is_empty() {
        return 0.0;
    }
    let total = r.len() - n + 1;
    let mut matched = 0;
    for i in 0..total {
        let g = &r[i..i + n];
        if (0..i).all(|j| &r[j..j + n] != g) {
            matched += count_windows(r, g).min(count_windows(c, g));
        }
    }
    matched as f64 / total as f64
}

fn is_subsequence(sub: &[u8], seq: &[u8]) -> bool {
    let mut it = seq.iter();
    sub.iter().all(|x| it.any(|y| y == x))
}

/// LCS by trying every subsequence of `a`.
fn oracle_lcs(a: &[u8], b: &[u8]) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let sub: Vec<u8> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
        if sub.len() > best && is_subsequence(&sub, b) {
            best = sub.len();
        }
    }
    best
}

fn oracle_rouge_l(c: &[u8], r: &[u8]) -> f64 {
    if r.is_empty() {
        return 0.0;
    }
    oracle_lcs(c, r) as f64 / r.len() as f64
}

/// The k-th reference unit with a given key pairs with the k-th prediction
/// unit with that key.
fn oracle_match(p: &[ActionUnit], r: &[ActionUnit]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, ru) in r.iter().enumerate() {
        let key = ru.match_key();
        let k = r[..i].iter().filter(|u| u.match_key() == key).count();
        if let Some(j) = p
            .iter()
            .enumerate()
            .filter(|(_, u)| u.match_key() == key)
            .map(|(j, _)| j)
            .nth(k)
        {
            out.push((i, j));
        }
    }
    out
}

/// Largest subset of matched pairs ordered the same way in both sequences.
fn oracle_order_len(m: &[(usize, usize)]) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << m.len()) {
        let chosen: Vec<&(usize, usize)> = (0..m.len()).filter(|i| mask >> i & 1 == 1).map(|i| &m[i]).collect();
        let ok = chosen.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        if ok {
            best = best.max(chosen.len());
        }
    }
    best
}

fn oracle_detail(r: &ActionUnit, p: &ActionUnit) -> f64 {
    let mut compared = 0;
    let mut agreed = 0;
    let mut cmp = |present: bool, same: bool| {
        if present {
            compared += 1;
            if same {
                agreed += 1;
            }
        }
    };
    cmp(r.effect.is_some(), r.effect == p.effect);
    cmp(r.direction.is_some(), r.direction == p.direction);
    let close = |a: Option<f64>, b: Option<f64>| matches!((a, b), (Some(a), Some(b)) if (a - b).abs() <= 0.05 + 1e-9);
    cmp(r.duration_s.is_some(), close(r.duration_s, p.duration_s));
    cmp(r.delay_s.is_some(), close(r.delay_s, p.delay_s));
    cmp(r.repeat.is_some(), r.repeat == p.repeat);
    match agreed {
        a if a == compared => 1.0,
        0 => 0.0,
        _ => 0.5,
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> ActionUnit {
    let category = Category::ALL[rng.gen_range(0..3)];
    let families = [EffectFamily::Fade, EffectFamily::Wipe, EffectFamily::Box];
    let effect = rng.gen_bool(0.8).then(|| families[rng.gen_range(0..3)]);
    ActionUnit {
        category,
        element: ["Title", "title", "Img1", "Body"][rng.gen_range(0..4)].to_string(),
        effect,
        direction: rng.gen_bool(0.3).then(|| Direction::ALL[rng.gen_range(0..4)]),
        duration_s: rng.gen_bool(0.8).then(|| [0.5, 1.0, 1.04, 1.5][rng.gen_range(0..4)]),
        delay_s: rng.gen_bool(0.5).then(|| [0.0, 0.5][rng.gen_range(0..2)]),
        repeat: rng.gen_bool(0.5).then(|| rng.gen_range(1..3)),
        source_span: 0..0,
    }
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_metric_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let alphabet = rng.gen_range(1..=6u8);
        let tokens = |rng: &mut ChaCha8Rng| -> Vec<u8> {
            let len = rng.gen_range(0..=10);
            (0..len).map(|_| rng.gen_range(0..alphabet)).collect()
        };
        let (c, r) = (tokens(&mut rng), tokens(&mut rng));
        let pairs = [
            (bleu4(&c, &[r.clone()]).score, oracle_bleu(&c, &r), "bleu4"),
            (rouge(&c, &r, RougeVariant::One).score, oracle_rouge_n(&c, &r, 1), "rouge1"),
            (rouge(&c, &r, RougeVariant::Two).score, oracle_rouge_n(&c, &r, 2), "rouge2"),
            (rouge(&c, &r, RougeVariant::L).score, oracle_rouge_l(&c, &r), "rougeL"),
        ];
        for (got, want, name) in pairs {
            worst = worst.max((got - want).abs());
            check((got - want).abs() <= 1e-9, format!("pair {i} {name}: {got} vs oracle {want} ({c:?} / {r:?})"))?;
        }

        let p: Vec<ActionUnit> = (0..rng.gen_range(0..=8)).map(|_| random_unit(&mut rng)).collect();
        let r: Vec<ActionUnit> = (0..rng.gen_range(0..=8)).map(|_| random_unit(&mut rng)).collect();
        let got = coda_score(&p, &r);
        let m = oracle_match(&p, &r);
        let n = r.len();
        let (coverage, order) = if n == 0 {
            (1.0, 1.0)
        } else {
            (m.len() as f64 / n as f64, oracle_order_len(&m) as f64 / n as f64)
        };
        let details: Vec<f64> = m.iter().map(|&(i, j)| oracle_detail(&r[i], &p[j])).collect();
        let detail = if details.is_empty() {
            0.0
        } else {
            details.iter().sum::<f64>() / details.len() as f64
        };
        check(got.matches == m, format!("pair {i}: CODA matching differs"))?;
        check(
            got.coverage == coverage && got.order == order && got.detail == detail,
            format!(
                "pair {i}: CODA ({}, {}, {}) vs oracle ({coverage}, {order}, {detail})",
                got.coverage, got.order, got.detail
            ),
        )?;
    }
    within(start.elapsed(), 10, "oracle sweep")?;
    Ok(format!(
        "200 pairs, max |BLEU/ROUGE - oracle| = {worst:.1e}, CODA exact, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn unit(category: Category, element: &str, effect: EffectFamily, direction: Option<Direction>, dur: f64) -> ActionUnit {
    ActionUnit {
        category,
        element: element.into(),
        effect: Some(effect),
        direction,
        duration_s: Some(dur),
        delay_s: None,
        repeat: None,
        source_span: 0..0,
    }
}

fn c2_coda_worked_example() -> Outcome {
    use Category::*;
    let r = [
        unit(Entrance, "Title", EffectFamily::Fade, None, 1.5),
        unit(Entrance, "Img1", EffectFamily::FlyFrom, Some(Direction::Left), 1.0),
        unit(Exit, "Title", EffectFamily::Wipe, Some(Direction::Left), 1.0),
    ];
    let p = [
        unit(Entrance, "Img1", EffectFamily::FlyFrom, Some(Direction::Left), 1.0),
        unit(Entrance, "Title", EffectFamily::Fade, None, 2.0),
    ];
    let s = coda_score(&p, &r);
    check(s.matches == [(0, 1), (1, 0)], format!("matches {:?}", s.matches))?;
    check(
        s.coverage == 2.0 / 3.0 && s.order == 1.0 / 3.0 && s.detail == 0.75,
        format!("got ({}, {}, {})", s.coverage, s.order, s.detail),
    )?;
    Ok("(2/3, 1/3, 0.75)".into())
}

fn c3_identity_sweep() -> Outcome {
    let start = Instant::now();
    for (i, (_, plan)) in plans(1000, 3).iter().enumerate() {
        let text = render_narrative(plan);
        let s = score_pair(&text, &text).map_err(|e| format!("plan {i}: {e}"))?;
        check(
            (s.coda.coverage, s.coda.order, s.coda.detail) == (1.0, 1.0, 1.0),
            format!("plan {i}: CODA ({}, {}, {})", s.coda.coverage, s.coda.order, s.coda.detail),
        )?;
        check(s.bleu.score == 1.0 && s.rouge_l.score == 1.0, format!("plan {i}: BLEU {} ROUGE-L {}", s.bleu.score, s.rouge_l.score))?;
    }
    within(start.elapsed(), 60, "identity sweep")?;
    Ok(format!("1000 self-pairs score (1,1,1), BLEU-4 = ROUGE-L = 1, {:.2} s", start.elapsed().as_secs_f64()))
}

/// Narrative with its sentences in reverse order.
fn reversed_sentences(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let spans: Vec<_> = extract_action_units(text).into_iter().map(|u| u.source_span).collect();
    spans
        .iter()
        .rev()
        .map(|s| chars[s.clone()].iter().collect::<String>() + ".")
        .collect::<Vec<_>>()
        .join(" ")
}

fn c4_order_sensitivity() -> Outcome {
    let mut done = 0;
    let mut seed = 0;
    let mut lowest: f64 = 1.0;
    while done < 500 {
        seed += 1;
        for (_, plan) in plans(50, 1000 + seed) {
            if plan.steps.len() < 6 || done == 500 {
                continue;
            }
            done += 1;
            let reference = render_narrative(&plan);
            let pred = reversed_sentences(&reference);
            let base = score_pair(&reference, &reference).map_err(|e| e.to_string())?;
            let rev = score_pair(&pred, &reference).map_err(|e| e.to_string())?;
            check(
                rev.coda.coverage == base.coda.coverage,
                format!("{}: coverage {} -> {}", plan.slide_id, base.coda.coverage, rev.coda.coverage),
            )?;
            check(
                rev.coda.order < base.coda.order,
                format!("{}: order {} not lowered", plan.slide_id, rev.coda.order),
            )?;
            check(rev.coda.order <= rev.coda.coverage, format!("{}: order > coverage", plan.slide_id))?;
            lowest = lowest.min(rev.coda.order);
        }
    }
    Ok(format!("500 plans with >= 6 steps: coverage unchanged, order strictly lower (min {lowest:.3})"))
}

fn c5_dataset_statistics() -> Outcome {
    let start = Instant::now();
    let cfg = SynthConfig::paper_default();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let opts = DatasetOptions {
        plan_only: true,
        ..Default::default()
    };
    let manifest = synth_dataset(&cfg, dir.path(), &opts).map_err(|e| e.to_string())?;
    let st = dataset_stats(&manifest, dir.path()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    check(st.schemes == 12_000, format!("{} schemes", st.schemes))?;
    let mean = st.mean_steps();
    check((7.4..=7.8).contains(&mean), format!("mean steps {mean:.3}"))?;
    let total = st.total_instances as f64;
    check((total - 91_411.0).abs() <= 0.05 * 91_411.0, format!("{total} instances"))?;
    check(st.step_counts.keys().all(|k| (4..=15).contains(k)), "step count outside 4..=15")?;
    let box_p = st.effect_percent(Category::Entrance, KindGroup::Text, "Box");
    let blinds_p = st.effect_percent(Category::Entrance, KindGroup::Text, "Blinds");
    check((box_p - 19.3).abs() <= 2.0, format!("Box {box_p:.2}%"))?;
    check((blinds_p - 15.2).abs() <= 2.0, format!("Blinds {blinds_p:.2}%"))?;
    within(elapsed, 300, "plan-only synthesis")?;
    let cats: Vec<String> = Category::ALL
        .iter()
        .map(|c| format!("{c} {:.1}%", 100.0 * st.category_counts[c] as f64 / total))
        .collect();
    Ok(format!(
        "mean {mean:.3} steps, {} instances, Box {box_p:.2}%, Blinds {blinds_p:.2}%, image share {:.2}%, {}, {:.1} s",
        st.total_instances,
        st.image_share(),
        cats.join(", "),
        elapsed.as_secs_f64()
    ))
}

fn toy_slide() -> SlideSpec {
    SlideSpec {
        slide_id: "toy".into(),
        language: Language::En,
        canvas: Size::default(),
        elements: vec![
            Element {
                name: "Title".into(),
                kind: ElementKind::Title,
                x: 64,
                y: 32,
                w: 800,
                h: 90,
                content: "Animated Slides".into(),
            },
            Element {
                name: "Img1".into(),
                kind: ElementKind::Image,
                x: 400,
                y: 200,
                w: 400,
                h: 300,
                content: "placeholder:img_0001".into(),
            },
        ],
    }
}

fn step(index: u32, category: Category, element: &str, effect: EffectFamily, dir: Option<Direction>, d: f64) -> AnimationStep {
    AnimationStep {
        index,
        category,
        element: element.into(),
        effect,
        direction: dir,
        duration_s: d,
        delay_s: 0.0,
        repeat: 1,
    }
}

/// Normalized sample points inside an element.
fn grid() -> Vec<(f64, f64)> {
    (0..40).flat_map(|i| (0..40).map(move |j| ((i as f64 + 0.5) / 40.0, (j as f64 + 0.5) / 40.0))).collect()
}

fn c6_renderer() -> Outcome {
    let slide = toy_slide();
    let plan = AnimationPlan {
        slide_id: "toy".into(),
        steps: vec![
            step(1, Category::Entrance, "Title", EffectFamily::Fade, None, 1.0),
            step(2, Category::Entrance, "Img1", EffectFamily::Wipe, Some(Direction::Left), 1.5),
            step(3, Category::Emphasis, "Img1", EffectFamily::Spin, None, 1.0),
            step(4, Category::Exit, "Title", EffectFamily::Fade, None, 0.5),
        ],
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let opts = RenderOptions::default();
    let a = render_video(&slide, &plan, 2.0, &dir.path().join("a"), &opts).map_err(|e| e.to_string())?;
    check(a.total_s == 4.0 && a.n_frames() == 9, format!("{} s -> {} frames", a.total_s, a.n_frames()))?;
    let on_disk = fs::read_dir(dir.path().join("a").join(FRAMES_DIR)).map_err(|e| e.to_string())?.count();
    check(on_disk == 9, format!("{on_disk} frame files"))?;
    render_video(&slide, &plan, 2.0, &dir.path().join("b"), &opts).map_err(|e| e.to_string())?;
    let read = |d: &str| fs::read(dir.path().join(d).join(RENDER_MANIFEST)).unwrap();
    check(read("a") == read("b"), "manifests differ between runs")?;

    // Fade midpoint on a solid element over the background.
    let el = &slide.elements[1];
    let mid = effect_transform(EffectFamily::Fade, Category::Entrance, None, 0.5, el, slide.canvas).map_err(|e| e.to_string())?;
    let color = [30u8, 160, 220, 255];
    let mut sprites = Sprites::prepare(&slide, &opts).map_err(|e| e.to_string())?;
    sprites.insert("Img1", RgbaImage::from_pixel(el.w, el.h, image::Rgba(color)));
    let state = FrameState {
        t: 0.0,
        elements: vec![
            ElementState { name: "Title".into(), visible: false, visual: VisualState::hidden() },
            ElementState { name: "Img1".into(), visible: true, visual: mid },
        ],
    };
    let mut canvas = Canvas::new(slide.canvas);
    let bg = canvas.background;
    rasterize_with(&slide, &state, &mut canvas, &sprites).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (x, y) in [(401, 201), (600, 350), (799, 499)] {
        let px = canvas.pixel(x, y);
        for ch in 0..3 {
            let analytic = mid.alpha * color[ch] as f64 + (1.0 - mid.alpha) * bg[ch] as f64;
            worst = worst.max((px[ch] as f64 - analytic).abs());
        }
    }
    check(worst <= 1.0, format!("fade midpoint off by {worst}"))?;

    // Mask monotonicity for every reveal family and direction.
    let reveal = [
        EffectFamily::Wipe,
        EffectFamily::Box,
        EffectFamily::Blinds,
        EffectFamily::Checkerboard,
        EffectFamily::Circle,
        EffectFamily::Pinwheel,
    ];
    let ps = [0.0, 0.25, 0.5, 0.75, 1.0];
    let pts = grid();
    let mut checked = 0;
    for choice in EffectChoice::all_for(Category::Entrance).into_iter().filter(|c| reveal.contains(&c.family)) {
        let mut prev: Option<Vec<bool>> = None;
        for &p in &ps {
            let st = effect_transform(choice.family, Category::Entrance, choice.direction, p, el, slide.canvas)
                .map_err(|e| e.to_string())?;
            check(!matches!(st.mask, Mask::None) || p == 1.0, format!("{choice} has no mask at {p}"))?;
            let shown: Vec<bool> = pts.iter().map(|&(x, y)| st.mask.reveals(x, y)).collect();
            if p == 0.0 {
                check(shown.iter().all(|s| !s), format!("{choice} reveals at p=0"))?;
            }
            if p == 1.0 {
                check(shown.iter().all(|s| *s), format!("{choice} incomplete at p=1"))?;
            }
            if let Some(prev) = &prev {
                check(prev.iter().zip(&shown).all(|(a, b)| !a || *b), format!("{choice} shrinks before p={p}"))?;
            }
            prev = Some(shown);
        }
        checked += 1;
    }

    // Desk-scale render.
    let start = Instant::now();
    let mut cfg = SynthConfig::paper_default();
    cfg.n_slides = 50;
    cfg.schemes_per_slide = 2;
    cfg.fps = vec![2.0];
    let ds = tempfile::tempdir().map_err(|e| e.to_string())?;
    let m = synth_dataset(&cfg, ds.path(), &DatasetOptions::default()).map_err(|e| e.to_string())?;
    let complete = m.complete().count();
    let frames: usize = m.records.iter().flat_map(|r| &r.renders).map(|r| r.n_frames).sum();
    check(complete == 100, format!("{complete}/100 triplets complete"))?;
    within(start.elapsed(), 300, "100-triplet render")?;
    Ok(format!(
        "9 frames, identical manifests, midpoint error {worst}, {checked} masks monotone, 100 triplets ({frames} frames) in {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn c7_grammar_round_trip() -> Outcome {
    let data = plans(1500, 7);
    let steps: Vec<&AnimationStep> = data.iter().flat_map(|(_, p)| &p.steps).take(10_000).collect();
    check(steps.len() == 10_000, format!("only {} steps", steps.len()))?;
    for s in &steps {
        let line = format_action_line(s);
        let back = parse_action_line(&line).map_err(|e| format!("{line}: {e}"))?;
        check(&back == *s, format!("round trip changed '{line}'"))?;
    }
    let narratives = plans(10_000, 8);
    let mut units = 0;
    for (_, plan) in &narratives {
        let got = extract_action_units(&render_narrative(plan));
        check(got.len() == plan.steps.len(), format!("{}: {} of {} units", plan.slide_id, got.len(), plan.steps.len()))?;
        for (u, s) in got.iter().zip(&plan.steps) {
            let mut want = ActionUnit::from_step(s);
            want.source_span = u.source_span.clone();
            check(*u == want, format!("{}: step {} recovered as {u:?}", plan.slide_id, s.index))?;
        }
        units += got.len();
    }
    Ok(format!("10000 steps parse(format) exactly; 10000 narratives, {units} units recovered"))
}

fn c8_bleu_hand_case() -> Outcome {
    let c: Vec<&str> = "the cat sat on the mat".split(' ').collect();
    let r: Vec<&str> = "the cat sat on a mat".split(' ').collect();
    let b = bleu4(&c, &[r]);
    check(b.matches == [5, 3, 2, 1] && b.totals == [6, 5, 4, 3], format!("{:?}/{:?}", b.matches, b.totals))?;
    check((b.score - 0.5373).abs() < 1e-4, format!("score {}", b.score))?;
    Ok(format!("score {:.6}", b.score))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 metric oracle equivalence", c1_metric_oracles),
        ("2 CODA worked example", c2_coda_worked_example),
        ("3 CODA identity sweep", c3_identity_sweep),
        ("4 CODA order sensitivity", c4_order_sensitivity),
        ("5 dataset statistics", c5_dataset_statistics),
        ("6 renderer determinism and arithmetic", c6_renderer),
        ("7 grammar round trip", c7_grammar_round_trip),
        ("8 BLEU hand case", c8_bleu_hand_case),
    ];
    let mut results = BTreeMap::new();
    for (name, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        // Written to the raw handle so the lines survive output capture.
        let line = match &outcome {
            Ok(detail) => format!("PASS criterion {name}: {detail}"),
            Err(why) => format!("FAIL criterion {name}: {why}"),
        };
        let _ = writeln!(std::io::stderr(), "{line}");
        results.insert(name, outcome.is_ok());
    }
    let failed: Vec<_> = results.iter().filter(|(_, ok)| !**ok).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

use proptest::prelude::*;

use slideanim::grammar::{extract_action_units, format_action_line, parse_action_line, render_narrative, ActionUnit};
use slideanim::metrics::{bleu4, coda_score, rouge, RougeVariant};
use slideanim::model::{plan_duration, AnimationPlan, AnimationStep, Category, Direction, EffectChoice};
use slideanim::synth::{synth_scheme, synth_slide, SynthConfig};
use slideanim::timeline::{compile, frame_count, frame_times};

fn arb_step() -> impl Strategy<Value = AnimationStep> {
    let choices: Vec<(Category, EffectChoice)> = Category::ALL
        .iter()
        .flat_map(|&c| EffectChoice::all_for(c).into_iter().map(move |e| (c, e)))
        .collect();
    (
        proptest::sample::select(choices),
        "[A-Za-z][A-Za-z0-9 _]{0,12}[A-Za-z0-9]",
        1u32..=99,
        1u32..=10_000,
        0u32..=10_000,
        1u32..=9,
    )
        .prop_map(|((category, choice), element, index, dur_ms, delay_ms, repeat)| AnimationStep {
            index,
            category,
            element,
            effect: choice.family,
            direction: choice.direction,
            duration_s: dur_ms as f64 / 1000.0,
            delay_s: delay_ms as f64 / 1000.0,
            repeat,
        })
}

fn synthesized(seed: u64) -> AnimationPlan {
    let cfg = SynthConfig::paper_default();
    let slide = synth_slide("slide_0000", seed, &cfg).unwrap();
    synth_scheme(seed.wrapping_mul(31).wrapping_add(7), &slide, &cfg).unwrap()
}

fn units(plan: &AnimationPlan) -> Vec<ActionUnit> {
    plan.steps.iter().map(ActionUnit::from_step).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn action_line_round_trip(step in arb_step()) {
        let line = format_action_line(&step);
        prop_assert_eq!(parse_action_line(&line).unwrap(), step);
    }

    #[test]
    fn narrative_recovers_every_step(seed in any::<u64>()) {
        let plan = synthesized(seed);
        let got = extract_action_units(&render_narrative(&plan));
        prop_assert_eq!(got.len(), plan.steps.len());
        for (u, s) in got.iter().zip(&plan.steps) {
            let mut want = ActionUnit::from_step(s);
            want.source_span = u.source_span.clone();
            prop_assert_eq!(u, &want);
        }
    }

    #[test]
    fn timeline_is_sequential(seed in any::<u64>()) {
        let plan = synthesized(seed);
        let tl = compile(&plan).unwrap();
        let mut prev_end = 0.0;
        for e in &tl.entries {
            prop_assert!(e.start_s >= prev_end - 1e-9);
            prop_assert!((e.start_s - prev_end - e.step.delay_s).abs() < 1e-9);
            prop_assert!(e.end_s > e.start_s);
            prev_end = e.end_s;
        }
        prop_assert!((tl.total_s - plan_duration(&plan)).abs() < 1e-9);
        for fps in [1.0, 2.0, 4.0] {
            let times = frame_times(&tl, fps).unwrap();
            prop_assert_eq!(times.len(), frame_count(tl.total_s, fps).unwrap());
            prop_assert_eq!(times.len(), (tl.total_s * fps).ceil() as usize + 1);
            let (last, inner) = times.split_last().unwrap();
            prop_assert!(inner.iter().all(|&t| t < tl.total_s));
            prop_assert!(*last >= tl.total_s - 1e-9);
        }
    }

    #[test]
    fn text_metrics_bounded(
        c in proptest::collection::vec(0u8..5, 0..14),
        r in proptest::collection::vec(0u8..5, 0..14),
    ) {
        let b = bleu4(&c, &[r.clone()]).score;
        let r1 = rouge(&c, &r, RougeVariant::One).score;
        let r2 = rouge(&c, &r, RougeVariant::Two).score;
        let rl = rouge(&c, &r, RougeVariant::L).score;
        for s in [b, r1, r2, rl] {
            prop_assert!((0.0..=1.0).contains(&s));
        }
        prop_assert!(rl <= r1 + 1e-12);
        if c.len() >= 4 {
            prop_assert_eq!(bleu4(&c, &[c.clone()]).score, 1.0);
        }
        if !c.is_empty() {
            prop_assert_eq!(rouge(&c, &c, RougeVariant::L).score, 1.0);
            prop_assert_eq!(rouge(&c, &c, RougeVariant::One).score, 1.0);
        }
    }

    #[test]
    fn coda_invariants(seed in any::<u64>(), perm_seed in any::<u64>(), drop in 0usize..16) {
        let plan = synthesized(seed);
        let reference = units(&plan);
        let n = reference.len();

        // Distinct keys so a permutation's order score is its LIS.
        let mut pred: Vec<ActionUnit> = reference.clone();
        for (i, u) in pred.iter_mut().enumerate() {
            u.element = format!("e{i}");
        }
        let reference_keyed = pred.clone();
        let mut idx: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted: Vec<ActionUnit> = idx.iter().map(|&i| reference_keyed[i].clone()).collect();
        let score = coda_score(&permuted, &reference_keyed);
        prop_assert_eq!(score.coverage, 1.0);
        let lis = slideanim::metrics::lis_len(&idx);
        prop_assert_eq!(score.order, lis as f64 / n as f64);
        prop_assert!(score.order <= score.coverage);

        let full = coda_score(&reference, &reference);
        prop_assert_eq!((full.coverage, full.order, full.detail), (1.0, 1.0, 1.0));
        let mut fewer = reference.clone();
        fewer.remove(drop % n);
        let less = coda_score(&fewer, &reference);
        prop_assert!(less.coverage <= full.coverage);
        prop_assert!(less.order <= less.coverage);

        pred.reverse();
        let rev = coda_score(&pred, &reference_keyed);
        prop_assert!(rev.order <= rev.coverage);
    }

    #[test]
    fn direction_labels_parse(d in proptest::sample::select(Direction::ALL.to_vec())) {
        for c in Category::ALL {
            for choice in EffectChoice::all_for(c).into_iter().filter(|e| e.direction == Some(d)) {
                prop_assert_eq!(choice.label().parse::<EffectChoice>().unwrap(), choice);
            }
        }
    }
}

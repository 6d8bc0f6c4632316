//! Controlled text grammar for animation descriptions.
//!
//! Two surface forms are produced from a plan:
//!
//! * action lines, one per step:
//!   `1. (Entrance) element 'Title' fades in over 1.5 s, 0 s delay, repeat 1`
//! * a narrative, one sentence per step:
//!   `First, the element 'Title' fades in over 1.5 seconds.`
//!
//! [`parse_action_line`] inverts the first form exactly. [`extract_action_units`]
//! reads both forms, and also free text, into ordered [`ActionUnit`]s for
//! scoring.

use std::fmt::Write as _;
use std::ops::Range;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::model::{AnimationPlan, AnimationStep, Category, Direction, EffectChoice, EffectFamily};

/// The smallest scored segment of a description. Only `category` and
/// `element` are guaranteed; free text may leave the rest unknown.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionUnit {
    pub category: Category,
    pub element: String,
    pub effect: Option<EffectFamily>,
    pub direction: Option<Direction>,
    pub duration_s: Option<f64>,
    pub delay_s: Option<f64>,
    pub repeat: Option<u32>,
    /// Character offsets of the sentence the unit came from.
    pub source_span: Range<usize>,
}

impl ActionUnit {
    /// A fully populated unit describing `step`, with an empty span.
    pub fn from_step(step: &AnimationStep) -> Self {
        ActionUnit {
            category: step.category,
            element: step.element.clone(),
            effect: Some(step.effect),
            direction: step.direction,
            duration_s: Some(step.duration_s),
            delay_s: Some(step.delay_s),
            repeat: Some(step.repeat),
            source_span: 0..0,
        }
    }

    /// The `(element, category)` key used to pair units, element name
    /// compared case-insensitively.
    pub fn match_key(&self) -> (String, Category) {
        (self.element.to_lowercase(), self.category)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Expected(&'static str),
    UnknownPhrase(String),
    CategoryMismatch { phrase: String, category: Category },
    BadNumber(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} at bytes {}..{}", span.start, span.end)]
pub struct ParseError {
    pub span: Range<usize>,
    pub kind: ParseErrorKind,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnknownPhrase(p) => write!(f, "unknown effect phrase '{p}'"),
            ParseErrorKind::CategoryMismatch { phrase, category } => {
                write!(f, "phrase '{phrase}' is not a {category} effect")
            }
            ParseErrorKind::BadNumber(n) => write!(f, "bad number '{n}'"),
        }
    }
}

/// One registered effect phrase and what it denotes.
#[derive(Clone, Debug)]
pub struct Phrase {
    pub text: String,
    pub category: Category,
    pub choice: EffectChoice,
}

fn phrase_stems(family: EffectFamily, category: Category) -> &'static [&'static str] {
    use Category::*;
    use EffectFamily as F;
    // `{d}` stands for a direction word.
    match (family, category) {
        (F::Fade, Entrance) => &["fades in", "fades into view"],
        (F::Fade, Exit) => &["fades out", "fades away"],
        (F::FlyFrom, _) => &["flies in from the {d}", "sweeps in from the {d}"],
        (F::FlyTo, _) => &["flies out toward the {d}", "flies off to the {d}"],
        (F::Wipe, Entrance) => &["wipes in from the {d}", "is wiped in from the {d}"],
        (F::Wipe, Exit) => &["wipes out toward the {d}", "is wiped away toward the {d}"],
        (F::Box, Entrance) => &["appears through a box", "enters with a box reveal"],
        (F::Box, Exit) => &["disappears into a box", "exits with a box reveal"],
        (F::Blinds, Entrance) => &["opens in like blinds", "enters with blinds"],
        (F::Blinds, Exit) => &["closes out like blinds", "exits with blinds"],
        (F::Checkerboard, Entrance) => {
            &["enters in a checkerboard pattern", "appears in a checkerboard"]
        }
        (F::Checkerboard, Exit) => &["exits in a checkerboard pattern", "disappears in a checkerboard"],
        (F::Circle, Entrance) => &["enters through a circle", "appears in a growing circle"],
        (F::Circle, Exit) => &["exits through a circle", "disappears in a shrinking circle"],
        (F::Pinwheel, Entrance) => &["pinwheels in", "spins in like a pinwheel"],
        (F::Pinwheel, Exit) => &["pinwheels out", "spins out like a pinwheel"],
        (F::Spin, _) => &["spins", "rotates a full turn"],
        (F::Teeter, _) => &["teeters", "wobbles"],
        (F::FlashBulb, _) => &["flashes like a bulb", "flashes"],
        (F::GrowShrink, _) => &["grows and shrinks", "grows then shrinks back"],
        (F::Pulse, _) => &["pulses", "throbs"],
        (F::Transparency, _) => &["turns transparent", "becomes semi-transparent"],
        (F::Darken, _) => &["darkens", "dims"],
        (F::Lighten, _) => &["lightens", "brightens"],
        (F::Blink, _) => &["blinks", "blinks on and off"],
        (F::Wave, _) => &["waves", "ripples like a wave"],
        _ => &[],
    }
}

/// All phrases for one effect in one category; the first is canonical.
pub fn phrases_for(choice: EffectChoice, category: Category) -> Vec<String> {
    phrase_stems(choice.family, category)
        .iter()
        .map(|stem| match choice.direction {
            Some(d) => stem.replace("{d}", d.as_str()),
            None => stem.to_string(),
        })
        .collect()
}

/// The full phrase bank, longest phrases first.
pub fn phrase_bank() -> &'static [Phrase] {
    static BANK: OnceLock<Vec<Phrase>> = OnceLock::new();
    BANK.get_or_init(|| {
        let mut bank = Vec::new();
        for category in Category::ALL {
            for choice in EffectChoice::all_for(category) {
                for text in phrases_for(choice, category) {
                    bank.push(Phrase {
                        text,
                        category,
                        choice,
                    });
                }
            }
        }
        bank.sort_by(|a, b| b.text.len().cmp(&a.text.len()).then_with(|| a.text.cmp(&b.text)));
        bank
    })
}

fn lookup_phrase(text: &str) -> Option<&'static Phrase> {
    let lower = text.to_lowercase();
    phrase_bank().iter().find(|p| p.text == lower)
}

/// Seconds as written in descriptions: `0` for zero, otherwise one decimal
/// place, widening to two or three only when needed to stay exact.
pub fn format_seconds(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    for places in 1..=3 {
        let s = format!("{x:.places$}");
        if s.parse::<f64>().ok() == Some(x) {
            return s;
        }
    }
    format!("{x:.3}")
}

pub fn format_action_line(step: &AnimationStep) -> String {
    let phrase = phrases_for(step.choice(), step.category)
        .into_iter()
        .next()
        .unwrap_or_else(|| step.effect.name().to_lowercase());
    format!(
        "{}. ({}) element '{}' {} over {} s, {} s delay, repeat {}",
        step.index,
        step.category.title(),
        step.element,
        phrase,
        format_seconds(step.duration_s),
        format_seconds(step.delay_s),
        step.repeat
    )
}

/// Action lines for a whole plan, LF separated, no trailing newline.
pub fn format_action_list(plan: &AnimationPlan) -> String {
    plan.steps
        .iter()
        .map(format_action_line)
        .collect::<Vec<_>>()
        .join("\n")
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn fail<T>(&self, what: &'static str) -> Result<T, ParseError> {
        let end = self.rest().find(char::is_whitespace).map_or(self.text.len(), |i| self.pos + i);
        Err(ParseError {
            span: self.pos..end.max(self.pos),
            kind: ParseErrorKind::Expected(what),
        })
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn lit(&mut self, lit: &'static str) -> Result<(), ParseError> {
        if self.rest().len() >= lit.len() && self.rest()[..lit.len()].eq_ignore_ascii_case(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            self.fail(lit)
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let n = self.rest().find(|c: char| !f(c)).unwrap_or(self.rest().len());
        let s = &self.rest()[..n];
        self.pos += n;
        s
    }

    fn uint(&mut self, what: &'static str) -> Result<u32, ParseError> {
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.fail(what);
        }
        digits.parse().map_err(|_| ParseError {
            span: start..self.pos,
            kind: ParseErrorKind::BadNumber(digits.to_string()),
        })
    }

    /// A decimal with an optional fraction of 1-3 digits.
    fn seconds(&mut self, what: &'static str) -> Result<f64, ParseError> {
        let start = self.pos;
        let whole = self.take_while(|c| c.is_ascii_digit());
        if whole.is_empty() {
            return self.fail(what);
        }
        if self.rest().starts_with('.') {
            self.pos += 1;
            let frac = self.take_while(|c| c.is_ascii_digit());
            if !(1..=3).contains(&frac.len()) {
                return Err(ParseError {
                    span: start..self.pos,
                    kind: ParseErrorKind::BadNumber(self.text[start..self.pos].to_string()),
                });
            }
        }
        let raw = &self.text[start..self.pos];
        raw.parse().map_err(|_| ParseError {
            span: start..self.pos,
            kind: ParseErrorKind::BadNumber(raw.to_string()),
        })
    }
}

/// Parses one canonical action line back into a step.
pub fn parse_action_line(text: &str) -> Result<AnimationStep, ParseError> {
    let mut c = Cursor { text, pos: 0 };
    c.skip_ws();
    let index = c.uint("step index")?;
    c.lit(".")?;
    c.skip_ws();
    c.lit("(")?;
    let cat_start = c.pos;
    let cat_word = c.take_while(|ch| ch.is_ascii_alphabetic());
    let category: Category = cat_word.parse().map_err(|_| ParseError {
        span: cat_start..c.pos,
        kind: ParseErrorKind::Expected("Entrance, Emphasis or Exit"),
    })?;
    c.lit(")")?;
    c.skip_ws();
    c.lit("element")?;
    c.skip_ws();
    c.lit("'")?;
    let name_start = c.pos;
    let name = c.take_while(|ch| ch != '\'');
    if name.is_empty() {
        return Err(ParseError {
            span: name_start..c.pos,
            kind: ParseErrorKind::Expected("element name"),
        });
    }
    c.lit("'")?;
    c.skip_ws();

    let phrase_start = c.pos;
    let Some(over) = c.rest().rfind(" over ") else {
        return c.fail("'over <duration> s'");
    };
    let raw_phrase = &c.rest()[..over];
    let phrase_span = phrase_start..phrase_start + over;
    let phrase = lookup_phrase(raw_phrase.trim()).ok_or_else(|| ParseError {
        span: phrase_span.clone(),
        kind: ParseErrorKind::UnknownPhrase(raw_phrase.trim().to_string()),
    })?;
    if phrase.category != category {
        return Err(ParseError {
            span: phrase_span,
            kind: ParseErrorKind::CategoryMismatch {
                phrase: phrase.text.clone(),
                category,
            },
        });
    }
    c.pos += over;
    c.lit(" over ")?;
    c.skip_ws();
    let duration_s = c.seconds("duration")?;
    c.skip_ws();
    c.lit("s,")?;
    c.skip_ws();
    let delay_s = c.seconds("delay")?;
    c.skip_ws();
    c.lit("s delay,")?;
    c.skip_ws();
    c.lit("repeat")?;
    c.skip_ws();
    let repeat = c.uint("repeat count")?;
    c.skip_ws();
    if !c.rest().is_empty() {
        return c.fail("end of line");
    }
    Ok(AnimationStep {
        index,
        category,
        element: name.to_string(),
        effect: phrase.choice.family,
        direction: phrase.choice.direction,
        duration_s,
        delay_s,
        repeat,
    })
}

const MIDDLE_MARKERS: [&str; 3] = ["Then", "Next", "After that"];

/// One sentence per step, joined by single spaces.
pub fn render_narrative(plan: &AnimationPlan) -> String {
    let k = plan.steps.len();
    let mut out = String::new();
    for (i, step) in plan.steps.iter().enumerate() {
        let marker = if i == 0 {
            "First"
        } else if i + 1 == k {
            "Finally"
        } else {
            MIDDLE_MARKERS[(i - 1) % MIDDLE_MARKERS.len()]
        };
        let phrases = phrases_for(step.choice(), step.category);
        let phrase = &phrases[(step.index as usize + 1) % phrases.len()];
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(
            out,
            "{marker}, the element '{}' {phrase} over {} seconds",
            step.element,
            format_seconds(step.duration_s)
        );
        if step.delay_s > 0.0 {
            let _ = write!(out, ", after a {}-second delay", format_seconds(step.delay_s));
        }
        if step.repeat > 1 {
            let _ = write!(out, ", repeating {} times", step.repeat);
        }
        out.push('.');
    }
    out
}

/// Splits text into sentence byte ranges: first by line, then at `.`, `!`,
/// `?` or `;` followed by whitespace or end of line.
fn sentences(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut line_start = 0;
    for line in text.split('\n') {
        let bytes = line.as_bytes();
        let mut start = 0;
        for (i, &b) in bytes.iter().enumerate() {
            if matches!(b, b'.' | b'!' | b'?' | b';')
                && bytes.get(i + 1).map_or(true, |n| n.is_ascii_whitespace())
            {
                out.push(line_start + start..line_start + i);
                start = i + 1;
            }
        }
        out.push(line_start + start..line_start + line.len());
        line_start += line.len() + 1;
    }
    out.into_iter()
        .map(|r| trim_range(text, r))
        .filter(|r| !r.is_empty())
        .collect()
}

fn trim_range(text: &str, r: Range<usize>) -> Range<usize> {
    let s = &text[r.clone()];
    let lead = s.len() - s.trim_start().len();
    let trail = s.len() - s.trim_end().len();
    r.start + lead..(r.end - trail).max(r.start + lead)
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Byte offset of the first whole-word occurrence of `needle` in `hay`
/// at or after `from`.
fn find_word(hay: &str, needle: &str, from: usize) -> Option<usize> {
    let bytes = hay.as_bytes();
    let mut at = from;
    while let Some(i) = hay.get(at..).and_then(|s| s.find(needle)) {
        let s = at + i;
        let e = s + needle.len();
        let left_ok = s == 0 || !is_word_byte(bytes[s - 1]);
        let right_ok = e >= bytes.len() || !is_word_byte(bytes[e]);
        if left_ok && right_ok {
            return Some(s);
        }
        at = s + 1;
    }
    None
}

/// Finds the element a sentence talks about: a quoted name, else a bare
/// mention of the title, body, or an image by number. Returns the name and
/// the byte offset where the mention ends.
fn find_element(sentence: &str, lower: &str) -> Option<(String, usize)> {
    if let Some(open) = sentence.find('\'') {
        if let Some(len) = sentence[open + 1..].find('\'') {
            let name = &sentence[open + 1..open + 1 + len];
            if !name.trim().is_empty() {
                return Some((name.to_string(), open + len + 2));
            }
        }
    }
    let mut best: Option<(usize, String, usize)> = None;
    let mut consider = |pos: usize, name: String, end: usize| {
        if best.as_ref().map_or(true, |b| pos < b.0) {
            best = Some((pos, name, end));
        }
    };
    if let Some(p) = find_word(lower, "title", 0) {
        consider(p, "Title".into(), p + 5);
    }
    if let Some(p) = find_word(lower, "body", 0) {
        consider(p, "Body".into(), p + 4);
    }
    let bytes = lower.as_bytes();
    for prefix in ["img", "image", "picture"] {
        let mut from = 0;
        while let Some(i) = lower.get(from..).and_then(|s| s.find(prefix)) {
            let p = from + i;
            from = p + 1;
            if p > 0 && is_word_byte(bytes[p - 1]) {
                continue;
            }
            let mut q = p + prefix.len();
            while q < bytes.len() && bytes[q] == b' ' {
                q += 1;
            }
            let ds = q;
            while q < bytes.len() && bytes[q].is_ascii_digit() {
                q += 1;
            }
            if q > ds && (q >= bytes.len() || !is_word_byte(bytes[q])) {
                consider(p, format!("Img{}", &lower[ds..q]), q);
                break;
            }
        }
    }
    best.map(|(_, name, end)| (name, end))
}

fn find_category_cue(lower: &str, from: usize) -> Option<Category> {
    for (tag, cat) in [
        ("(entrance)", Category::Entrance),
        ("(emphasis)", Category::Emphasis),
        ("(exit)", Category::Exit),
    ] {
        if lower.contains(tag) {
            return Some(cat);
        }
    }
    const VERBS: [(&str, Category); 16] = [
        ("appears", Category::Entrance),
        ("enters", Category::Entrance),
        ("comes in", Category::Entrance),
        ("flies in", Category::Entrance),
        ("shows up", Category::Entrance),
        ("slides in", Category::Entrance),
        ("is emphasized", Category::Emphasis),
        ("is highlighted", Category::Emphasis),
        ("emphasis", Category::Emphasis),
        ("highlights", Category::Emphasis),
        ("disappears", Category::Exit),
        ("exits", Category::Exit),
        ("leaves", Category::Exit),
        ("vanishes", Category::Exit),
        ("flies out", Category::Exit),
        ("slides out", Category::Exit),
    ];
    VERBS
        .iter()
        .filter_map(|(v, c)| find_word(lower, v, from).map(|p| (p, *c)))
        .min_by_key(|(p, _)| *p)
        .map(|(_, c)| c)
}

fn find_phrase(lower: &str, from: usize) -> Option<&'static Phrase> {
    // Earliest match wins; the bank is sorted longest first so ties go to
    // the longer phrase.
    phrase_bank()
        .iter()
        .filter_map(|p| find_word(lower, &p.text, from).map(|pos| (pos, p)))
        .min_by_key(|(pos, _)| *pos)
        .map(|(_, p)| p)
}

fn number_at(lower: &str, at: usize) -> Option<(f64, usize)> {
    let bytes = lower.as_bytes();
    let mut q = at;
    while q < bytes.len() && (bytes[q].is_ascii_digit() || bytes[q] == b'.') {
        q += 1;
    }
    let raw = lower[at..q].trim_end_matches('.');
    raw.parse().ok().map(|v| (v, at + raw.len()))
}

fn number_after(lower: &str, keyword: &str) -> Option<(f64, usize)> {
    let p = find_word(lower, keyword, 0)?;
    let mut q = p + keyword.len();
    while lower.as_bytes().get(q) == Some(&b' ') {
        q += 1;
    }
    number_at(lower, q)
}

/// The number immediately before `suffix`, e.g. `0.5` in "0.5-second delay".
fn number_before(lower: &str, suffix: &str) -> Option<f64> {
    let p = lower.find(suffix)?;
    let head = lower[..p].trim_end();
    let start = head
        .rfind(|c: char| !(c.is_ascii_digit() || c == '.'))
        .map_or(0, |i| i + 1);
    head[start..].parse().ok()
}

fn parse_sentence(sentence: &str, span: Range<usize>) -> Option<ActionUnit> {
    let lower = sentence.to_lowercase();
    let (element, after) = find_element(sentence, &lower)?;
    let after = after.min(lower.len());
    let phrase = find_phrase(&lower, after);
    let category = match phrase {
        Some(p) => p.category,
        None => find_category_cue(&lower, 0)?,
    };

    let duration_s = number_after(&lower, "over")
        .filter(|(_, end)| {
            let tail = lower[*end..].trim_start();
            tail.starts_with('s') || tail.starts_with("sec")
        })
        .map(|(v, _)| v);
    let delay_s = number_before(&lower, "-second delay")
        .or_else(|| number_before(&lower, " second delay"))
        .or_else(|| number_before(&lower, " seconds delay"))
        .or_else(|| number_before(&lower, " s delay"));
    let repeat = number_after(&lower, "repeat")
        .or_else(|| number_after(&lower, "repeating"))
        .map(|(v, _)| v)
        .filter(|v| v.fract() == 0.0 && *v >= 1.0)
        .map(|v| v as u32);

    // A recognized effect phrase with a duration is a sentence of the
    // controlled grammar, where an omitted delay means none and an omitted
    // repeat means once.
    let controlled = phrase.is_some() && duration_s.is_some();
    Some(ActionUnit {
        category,
        element,
        effect: phrase.map(|p| p.choice.family),
        direction: phrase.and_then(|p| p.choice.direction),
        duration_s,
        delay_s: delay_s.or(if controlled { Some(0.0) } else { None }),
        repeat: repeat.or(if controlled { Some(1) } else { None }),
        source_span: span,
    })
}

/// Decomposes a description into ordered action units. Never fails; text
/// with no recognizable action yields an empty list.
pub fn extract_action_units(text: &str) -> Vec<ActionUnit> {
    let mut units = Vec::new();
    let mut line_start = 0;
    let char_offset = |byte: usize| text[..byte].chars().count();
    for line in text.split('\n') {
        let line_range = trim_range(text, line_start..line_start + line.len());
        line_start += line.len() + 1;
        if line_range.is_empty() {
            continue;
        }
        let span = char_offset(line_range.start)..char_offset(line_range.end);
        if let Ok(step) = parse_action_line(&text[line_range.clone()]) {
            units.push(ActionUnit {
                source_span: span,
                ..ActionUnit::from_step(&step)
            });
            continue;
        }
        for r in sentences(&text[line_range.clone()]) {
            let r = line_range.start + r.start..line_range.start + r.end;
            let span = char_offset(r.start)..char_offset(r.end);
            if let Some(u) = parse_sentence(&text[r], span) {
                units.push(u);
            }
        }
    }
    units
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AnimationStep;

    fn step(
        index: u32,
        category: Category,
        element: &str,
        effect: EffectFamily,
        direction: Option<Direction>,
        duration_s: f64,
        delay_s: f64,
        repeat: u32,
    ) -> AnimationStep {
        AnimationStep {
            index,
            category,
            element: element.into(),
            effect,
            direction,
            duration_s,
            delay_s,
            repeat,
        }
    }

    #[test]
    fn formats_canonical_lines() {
        let s = step(1, Category::Entrance, "Title", EffectFamily::Fade, None, 1.5, 0.0, 1);
        assert_eq!(
            format_action_line(&s),
            "1. (Entrance) element 'Title' fades in over 1.5 s, 0 s delay, repeat 1"
        );
        let s = step(3, Category::Emphasis, "Img1", EffectFamily::Spin, None, 2.0, 0.5, 2);
        assert_eq!(
            format_action_line(&s),
            "3. (Emphasis) element 'Img1' spins over 2.0 s, 0.5 s delay, repeat 2"
        );
        let s = step(
            7,
            Category::Exit,
            "Body",
            EffectFamily::FlyTo,
            Some(Direction::Bottom),
            1.0,
            0.0,
            1,
        );
        assert_eq!(
            format_action_line(&s),
            "7. (Exit) element 'Body' flies out toward the bottom over 1.0 s, 0 s delay, repeat 1"
        );
    }

    #[test]
    fn parses_canonical_line() {
        let s = parse_action_line("1. (Entrance) element 'Title' fades in over 1.5 s, 0 s delay, repeat 1")
            .unwrap();
        assert_eq!(s, step(1, Category::Entrance, "Title", EffectFamily::Fade, None, 1.5, 0.0, 1));
    }

    #[test]
    fn rejects_garbage() {
        let e = parse_action_line("hello world").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Expected("step index"));
        assert_eq!(e.span, 0..5);
    }

    #[test]
    fn unknown_phrase_is_named() {
        let e = parse_action_line("2. (Entrance) element 'Title' sparkles in over 1.0 s, 0 s delay, repeat 1")
            .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownPhrase("sparkles in".into()));
        assert_eq!(&"2. (Entrance) element 'Title' sparkles in over"[e.span.clone()], "sparkles in");
    }

    #[test]
    fn category_must_agree_with_phrase() {
        let e = parse_action_line("1. (Exit) element 'Title' fades in over 1.0 s, 0 s delay, repeat 1")
            .unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::CategoryMismatch { .. }));
    }

    #[test]
    fn accepts_up_to_three_decimals() {
        let s = parse_action_line("1. (Entrance) element 'T' fades in over 1.125 s, 0.25 s delay, repeat 1")
            .unwrap();
        assert_eq!(s.duration_s, 1.125);
        assert_eq!(s.delay_s, 0.25);
        assert!(parse_action_line("1. (Entrance) element 'T' fades in over 1.1255 s, 0 s delay, repeat 1").is_err());
        assert_eq!(format_seconds(1.125), "1.125");
        assert_eq!(format_seconds(2.0), "2.0");
    }

    #[test]
    fn phrase_bank_is_unambiguous() {
        let bank = phrase_bank();
        for (i, a) in bank.iter().enumerate() {
            for b in &bank[i + 1..] {
                assert_ne!(a.text, b.text, "duplicate phrase");
            }
        }
        for cat in Category::ALL {
            for choice in EffectChoice::all_for(cat) {
                let n = phrases_for(choice, cat).len();
                assert!((1..=3).contains(&n), "{choice} {cat}");
            }
        }
    }

    #[test]
    fn single_step_narrative() {
        let plan = AnimationPlan {
            slide_id: "s".into(),
            steps: vec![step(1, Category::Entrance, "Title", EffectFamily::Fade, None, 1.5, 0.0, 1)],
        };
        assert_eq!(render_narrative(&plan), "First, the element 'Title' fades in over 1.5 seconds.");
    }

    #[test]
    fn narrative_units_recovered() {
        let plan = AnimationPlan {
            slide_id: "s".into(),
            steps: vec![
                step(1, Category::Entrance, "Title", EffectFamily::Fade, None, 1.5, 0.0, 1),
                step(2, Category::Entrance, "Img1", EffectFamily::Pinwheel, None, 1.0, 0.5, 1),
                step(3, Category::Emphasis, "Img1", EffectFamily::Spin, None, 2.0, 0.0, 3),
                step(4, Category::Exit, "Title", EffectFamily::Wipe, Some(Direction::Left), 1.0, 1.5, 1),
            ],
        };
        let text = render_narrative(&plan);
        let units = extract_action_units(&text);
        assert_eq!(units.len(), 4, "{text}");
        for (u, s) in units.iter().zip(&plan.steps) {
            let expect = ActionUnit {
                source_span: u.source_span.clone(),
                ..ActionUnit::from_step(s)
            };
            assert_eq!(u, &expect);
        }
        for w in units.windows(2) {
            assert!(w[0].source_span.end <= w[1].source_span.start);
        }
    }

    #[test]
    fn unrecognized_sentence_is_skipped() {
        assert!(extract_action_units("The title shimmers mysteriously.").is_empty());
        assert!(extract_action_units("").is_empty());
    }

    #[test]
    fn partial_units_from_free_text() {
        let units = extract_action_units("The title appears. Then image 2 disappears quickly!");
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].element, "Title");
        assert_eq!(units[0].category, Category::Entrance);
        assert_eq!(units[0].effect, None);
        assert_eq!(units[1].element, "Img2");
        assert_eq!(units[1].category, Category::Exit);
        assert_eq!(units[1].duration_s, None);
    }

    #[test]
    fn free_text_with_known_phrase() {
        let units = extract_action_units("Img3 flies in from the left in about 2 seconds.");
        assert_eq!(units.len(), 1);
        assert_eq!(units[0].effect, Some(EffectFamily::FlyFrom));
        assert_eq!(units[0].direction, Some(Direction::Left));
        assert_eq!(units[0].delay_s, None);
    }

    #[test]
    fn spans_are_character_offsets() {
        let text = "标题. The title appears.";
        let units = extract_action_units(text);
        assert_eq!(units.len(), 1);
        let s: String = text.chars().skip(units[0].source_span.start).take(units[0].source_span.len()).collect();
        assert_eq!(s, "The title appears");
    }
}

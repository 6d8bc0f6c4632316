//! Bundled phrase corpus for slide titles and body text.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::Language;

const TOPICS_EN: &[&str] = &[
    "Renewable Energy",
    "Machine Learning",
    "Ocean Conservation",
    "Urban Mobility",
    "Space Exploration",
    "Healthy Eating",
    "Remote Work",
    "Climate Resilience",
    "Digital Privacy",
    "Coffee Culture",
    "Wildlife Photography",
    "Supply Chains",
    "Quantum Computing",
    "Mountain Hiking",
    "Financial Literacy",
    "Smart Agriculture",
    "Ancient Architecture",
    "Music Education",
    "Electric Vehicles",
    "Water Management",
];

const TITLE_PATTERNS_EN: &[&str] = &[
    "{} at a Glance",
    "Why {} Matters",
    "{}: Key Trends",
    "The Future of {}",
    "Getting Started with {}",
    "{} in Five Minutes",
];

const BODY_SENTENCES_EN: &[&str] = &[
    "{} is reshaping how teams plan their next decade.",
    "Recent studies show steady growth across every region.",
    "Small changes in daily habits add up to measurable impact.",
    "Costs have fallen sharply while adoption keeps rising.",
    "Clear goals and open data help projects stay on track.",
    "Experts recommend starting with a focused pilot program.",
    "Local communities play a central role in long-term success.",
    "The next section highlights three practical examples.",
];

const TOPICS_ZH: &[&str] = &[
    "可再生能源",
    "机器学习",
    "海洋保护",
    "城市交通",
    "太空探索",
    "健康饮食",
    "远程办公",
    "数字隐私",
    "智慧农业",
    "古代建筑",
];

const TITLE_PATTERNS_ZH: &[&str] = &["{}概览", "为什么{}很重要", "{}的未来", "{}：关键趋势"];

const BODY_SENTENCES_ZH: &[&str] = &[
    "{}正在改变我们规划未来的方式。",
    "最新研究显示各地区都在稳步增长。",
    "日常习惯的小改变会带来可衡量的影响。",
    "成本大幅下降，而采用率持续上升。",
    "专家建议从一个小型试点项目开始。",
];

/// Draws a title and a body paragraph on a random topic.
pub fn title_and_body<R: Rng>(rng: &mut R, language: Language) -> (String, String) {
    let (topics, titles, bodies) = match language {
        Language::En => (TOPICS_EN, TITLE_PATTERNS_EN, BODY_SENTENCES_EN),
        Language::Zh => (TOPICS_ZH, TITLE_PATTERNS_ZH, BODY_SENTENCES_ZH),
    };
    let topic = topics.choose(rng).expect("non-empty corpus");
    let title = titles.choose(rng).expect("non-empty corpus").replace("{}", topic);
    let n = rng.gen_range(2..=3);
    let sep = if language == Language::En { " " } else { "" };
    let body = bodies
        .choose_multiple(rng, n)
        .map(|s| s.replace("{}", topic))
        .collect::<Vec<_>>()
        .join(sep);
    (title, body)
}

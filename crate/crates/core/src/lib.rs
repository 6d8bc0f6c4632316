//! Slide-animation dataset toolkit: seeded synthesis of slides and
//! animation plans, a controlled description grammar, timeline sampling,
//! headless frame rendering, dataset statistics, and description metrics
//! (BLEU-4, ROUGE, SPICE-lite, CODA).

pub mod cli;
pub mod grammar;
pub mod metrics;
pub mod model;
pub mod render;
pub mod stats;
pub mod synth;
pub mod timeline;

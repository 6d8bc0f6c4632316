//! Optional HTTP text-generation client that paraphrases action lists.

use std::time::Duration;

use log::warn;
use thiserror::Error;

use super::ExternalClient;
use crate::grammar::{extract_action_units, format_action_list, render_narrative, ActionUnit};
use crate::model::AnimationPlan;

/// Bearer token for the endpoint, if it needs one.
pub const TOKEN_ENV: &str = "SLIDEANIM_ENDPOINT_TOKEN";
/// Manifest annotation for records that fell back to the template narrative.
pub const FALLBACK_NOTE: &str = "fallback";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("request to {endpoint} failed: {reason}")]
    Transport { endpoint: String, reason: String },
    #[error("response recovers {recovered} of {expected} actions")]
    Rejected { recovered: usize, expected: usize },
}

/// Counts plan steps recovered in order from `text`; extra or missing
/// units count as a loss.
pub fn recovered_steps(plan: &AnimationPlan, text: &str) -> usize {
    let units = extract_action_units(text);
    let matched = plan
        .steps
        .iter()
        .zip(&units)
        .take_while(|(step, unit)| {
            let want = ActionUnit::from_step(step);
            unit.match_key() == want.match_key() && unit.effect == want.effect
        })
        .count();
    if units.len() > plan.steps.len() {
        matched.min(plan.steps.len() - 1)
    } else {
        matched
    }
}

/// Posts the plan's action list and returns the paraphrase, provided every
/// step can be recovered from it.
pub fn describe_via_service(plan: &AnimationPlan, endpoint: &str, timeout: Duration) -> Result<String, ServiceError> {
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let mut req = agent.post(endpoint).set("Content-Type", "text/plain; charset=utf-8");
    if let Ok(token) = std::env::var(TOKEN_ENV) {
        req = req.set("Authorization", &format!("Bearer {token}"));
    }
    let transport = |reason: String| ServiceError::Transport {
        endpoint: endpoint.to_string(),
        reason,
    };
    let text = req
        .send_string(&format_action_list(plan))
        .map_err(|e| transport(e.to_string()))?
        .into_string()
        .map_err(|e| transport(e.to_string()))?;
    let recovered = recovered_steps(plan, &text);
    if recovered != plan.steps.len() {
        return Err(ServiceError::Rejected {
            recovered,
            expected: plan.steps.len(),
        });
    }
    Ok(text.trim().to_string())
}

/// Service paraphrase, or the template narrative plus a `fallback`
/// annotation when the call fails or loses actions.
pub fn describe_with_fallback(plan: &AnimationPlan, client: &ExternalClient) -> (String, Option<String>) {
    match describe_via_service(plan, &client.endpoint, Duration::from_millis(client.timeout_ms)) {
        Ok(text) => (text, None),
        Err(e) => {
            warn!("{}: {e}; using template narrative", plan.slide_id);
            (render_narrative(plan), Some(FALLBACK_NOTE.to_string()))
        }
    }
}

//! Browser demo bindings: small JSON-speaking wrappers around the toolkit
//! for the static page in `www/`. Three operations are exposed: purity
//! decay of a compressed shift tuple, the Beurling factorization on the
//! disc, and monomial-ideal multipliers on the two-ball.
//!
//! Every function returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never deals with exceptions.

use wasm_bindgen::prelude::wasm_bindgen;

pub mod demo;

#[wasm_bindgen]
pub fn purity_decay(n: usize, lambda: f64, degree: u32) -> String {
    demo::render(demo::purity_decay(n, lambda, degree))
}

#[wasm_bindgen]
pub fn beurling_disc(lambda: f64, degree: u32, zero_order: u32) -> String {
    demo::render(demo::beurling_disc(lambda, degree, zero_order))
}

#[wasm_bindgen]
pub fn ball_ideal_symbol(lambda: f64, degree: u32, ideal: &str) -> String {
    demo::render(demo::ball_ideal_symbol(lambda, degree, ideal))
}

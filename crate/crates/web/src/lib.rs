//! Browser bindings. Each export has a plain Rust counterpart returning
//! `Result<String, String>` so the logic is testable off the browser.

use orderthree::automata::to_text;
use orderthree::kripke::countermodel_search;
use orderthree::reductions::classical::classical_order3;
use orderthree::reductions::{ipc_to_automaton, ipc_to_iipc3};
use orderthree::{parse_context, parse_formula, prove, Context, Formula};
use wasm_bindgen::prelude::*;

fn parse_judgement(text: &str) -> Result<(Context, Formula), String> {
    let err = |e: orderthree::Error| e.to_string();
    match text.rsplit_once("|-") {
        Some((ctx, goal)) => Ok((
            parse_context(ctx).map_err(err)?,
            parse_formula(goal.trim()).map_err(err)?,
        )),
        None => Ok((Context::new(), parse_formula(text.trim()).map_err(err)?)),
    }
}

/// `provable` and a witness term, or `unprovable`.
pub fn prove_text(input: &str) -> Result<String, String> {
    let (ctx, goal) = parse_judgement(input)?;
    Ok(match prove(&ctx, &goal).witness() {
        Some(w) => format!("provable\nwitness: {w}\n"),
        None => "unprovable\n".to_string(),
    })
}

/// A countermodel with at most `max_states` states and its transcript.
pub fn refute_text(input: &str, max_states: usize) -> Result<String, String> {
    let (ctx, goal) = parse_judgement(input)?;
    Ok(match countermodel_search(&ctx, &goal, max_states) {
        Some((m, c)) => format!(
            "refuted at c{c}\n{m}transcript:\n{}",
            m.transcript(c, &ctx, &goal)
        ),
        None => format!("no countermodel with at most {max_states} states\n"),
    })
}

/// Target is `iipc3`, `automaton` or `classical3`.
pub fn reduce_text(input: &str, target: &str) -> Result<String, String> {
    let (ctx, goal) = parse_judgement(input)?;
    let phi = ctx.implication_to(goal);
    match target {
        "iipc3" => Ok(format!("{}\n", ipc_to_iipc3(&phi))),
        "automaton" => {
            let m = ipc_to_automaton(&phi);
            Ok(to_text(&m.automaton, Some(&m.initial)))
        }
        "classical3" => classical_order3(&phi)
            .map(|f| format!("{f}\n"))
            .map_err(|e| e.to_string()),
        other => Err(format!("unknown target {other}")),
    }
}

#[wasm_bindgen(js_name = prove)]
pub fn prove_js(input: &str) -> Result<String, JsValue> {
    prove_text(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = refute)]
pub fn refute_js(input: &str, max_states: usize) -> Result<String, JsValue> {
    refute_text(input, max_states).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = reduce)]
pub fn reduce_js(input: &str, target: &str) -> Result<String, JsValue> {
    reduce_text(input, target).map_err(|e| JsValue::from_str(&e))
}

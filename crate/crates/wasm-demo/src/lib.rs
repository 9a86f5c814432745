//! Browser bindings for the counting engines: parse a sentence and weights,
//! count over a range of domain sizes, classify fragments and prefixes.

use wasm_bindgen::prelude::*;
use wfomc_core::engine::{self, Engine};
use wfomc_core::normalize::{
    describe_corrections, scott_normal_form, skolemize, ScottFragment, WeightedSentence,
};
use wfomc_core::prefix::{classify_prefix as classify_prefix_core, PrefixClass};
use wfomc_core::syntax::{classify_fragment, parse_sentence_file, parse_weights, WeightMap};

fn load(sentence: &str, weights: &str) -> Result<WeightedSentence, JsValue> {
    let (formula, vocab) =
        parse_sentence_file(sentence).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let weights = if weights.trim().is_empty() {
        WeightMap::ones(&vocab)
    } else {
        parse_weights(weights, &vocab).map_err(|e| JsValue::from_str(&e.to_string()))?
    };
    Ok(WeightedSentence::new(formula, vocab, weights))
}

/// Exact weighted model counts for n in `from..=to`, one `n<TAB>count` line
/// per row.
#[wasm_bindgen]
pub fn count_range(
    sentence: &str,
    weights: &str,
    from: usize,
    to: usize,
    engine: &str,
) -> Result<String, JsValue> {
    let ws = load(sentence, weights)?;
    let engine: Engine = engine.parse().map_err(|e: String| JsValue::from_str(&e))?;
    let mut out = String::new();
    for n in from..=to.min(from + 200) {
        let count =
            engine::count(&ws, n, engine).map_err(|e| JsValue::from_str(&e.to_string()))?;
        out.push_str(&format!("{n}\t{}\n", wfomc_core::show_rational(&count)));
    }
    Ok(out)
}

/// Fragment flags of the sentence, one `name: bool` line each.
#[wasm_bindgen]
pub fn classify_sentence(sentence: &str) -> Result<String, JsValue> {
    let (formula, _) =
        parse_sentence_file(sentence).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let v = classify_fragment(&formula);
    Ok(format!(
        "fo2: {}\nfo2+functionality: {}\nsu1: {}\nu1: {}\nforallstar-conjunction: {}\nprefix: {}",
        v.is_fo2,
        v.is_fo2_plus_functionality,
        v.is_su1,
        v.is_u1,
        v.is_forallstar_conjunction,
        v.prefix.as_deref().unwrap_or("-")
    ))
}

/// Polynomial-time / hardness verdict for a quantifier prefix over A/E.
#[wasm_bindgen]
pub fn classify_prefix(prefix: &str) -> Result<String, JsValue> {
    let v = classify_prefix_core(prefix).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let label = match v.verdict {
        PrefixClass::Ptime => "ptime",
        PrefixClass::ContainsSharpP1Complete => "contains-#P1-complete",
    };
    Ok(format!("{}: {}\n{}", v.prefix, label, v.explanation()))
}

/// Scott normal form followed by Skolemization, with the extended weight map
/// and correction ledger.
#[wasm_bindgen]
pub fn normalize(sentence: &str, weights: &str) -> Result<String, JsValue> {
    let ws = load(sentence, weights)?;
    let prepared = WeightedSentence {
        sentence: wfomc_core::syntax::normalize_scopes(&ws.sentence),
        ..ws
    };
    let fragment = if classify_fragment(&prepared.sentence).is_fo2 {
        ScottFragment::Fo2
    } else {
        ScottFragment::U1
    };
    let sc = scott_normal_form(&prepared, fragment)
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    let sk = skolemize(&sc).map_err(|e| JsValue::from_str(&e.to_string()))?;
    Ok(format!(
        "{}\n\nweights:\n{}\ncorrections: {}",
        sk.sentence,
        sk.weights,
        describe_corrections(&sk.corrections)
    ))
}

//! Counting engines and the automatic engine dispatch.

pub mod fo2func;
pub mod su1;
pub mod u1;

use crate::normalize::WeightedSentence;
use crate::oracle;
use crate::syntax::classify_fragment;
use num::BigRational;

pub use fo2func::EngineError;

/// Engine selection for the counting entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Auto,
    Fo2Func,
    Su1,
    U1,
    Oracle,
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Engine::Auto),
            "fo2func" => Ok(Engine::Fo2Func),
            "su1" => Ok(Engine::Su1),
            "u1" => Ok(Engine::U1),
            "oracle" => Ok(Engine::Oracle),
            other => Err(format!("unknown engine `{other}`")),
        }
    }
}

/// Counts with the requested engine; `Auto` routes by fragment
/// classification and never selects an engine whose precondition fails.
pub fn count(ws: &WeightedSentence, n: usize, engine: Engine) -> Result<BigRational, EngineError> {
    match engine {
        Engine::Oracle => {
            Ok(oracle::wfomc_brute(&ws.sentence, &ws.vocab, n, &ws.weights)?)
        }
        Engine::Fo2Func => {
            let verdict = classify_fragment(&ws.sentence);
            if verdict.is_fo2_plus_functionality {
                fo2func::count_fo2func(ws, n)
            } else if verdict.is_fo2 {
                fo2func::count_fo2_plain(&ws.sentence, &ws.vocab, &ws.weights, n)
            } else {
                Err(EngineError::Other(
                    "fo2func engine requires an FO2 sentence, optionally with one functionality axiom"
                        .into(),
                ))
            }
        }
        Engine::Su1 => su1::count_su1_sentence(ws, n),
        Engine::U1 => u1::count_u1(ws, n),
        Engine::Auto => {
            let verdict = classify_fragment(&ws.sentence);
            if verdict.is_fo2_plus_functionality {
                fo2func::count_fo2func(ws, n)
            } else if verdict.is_su1 {
                su1::count_su1_sentence(ws, n)
            } else if verdict.is_u1 {
                u1::count_u1(ws, n)
            } else {
                Ok(oracle::wfomc_brute(&ws.sentence, &ws.vocab, n, &ws.weights)?)
            }
        }
    }
}

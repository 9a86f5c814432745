//! Quantifier-prefix classification and the prefix-retargeting chain built
//! from suffix dualizations.

use crate::normalize::{generalized_dual_skolemize, WeightedSentence};
use crate::syntax::Quant;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PrefixError {
    #[error("prefix may only contain the characters A and E, got `{0}`")]
    BadCharacter(char),
    #[error("target prefix {target} is not reachable from {from}; attempted moves: {attempted}")]
    Unreachable { from: String, target: String, attempted: String },
    #[error("target length {target} differs from the sentence prefix length {actual}")]
    LengthMismatch { target: usize, actual: usize },
    #[error("sentence is not prenex")]
    NotPrenex,
    #[error(transparent)]
    Normalize(#[from] crate::normalize::NormalizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixClass {
    Ptime,
    ContainsSharpP1Complete,
}

/// Verdict for one quantifier-prefix class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixVerdict {
    pub prefix: String,
    pub verdict: PrefixClass,
}

impl PrefixVerdict {
    /// Which classification clause applied.
    pub fn explanation(&self) -> String {
        match self.verdict {
            PrefixClass::Ptime => format!(
                "prefixes of length {} (< 3) stay within two-variable logic, whose weighted \
                 model counting is polynomial-time",
                self.prefix.len()
            ),
            PrefixClass::ContainsSharpP1Complete => format!(
                "prefixes of length {} (>= 3) contain a sentence whose symmetric weighted \
                 model counting problem is #P1-complete; the witness construction is in the \
                 literature and is not reproduced here",
                self.prefix.len()
            ),
        }
    }
}

fn validate(prefix: &str) -> Result<(), PrefixError> {
    match prefix.chars().find(|c| *c != 'A' && *c != 'E') {
        Some(c) => Err(PrefixError::BadCharacter(c)),
        None => Ok(()),
    }
}

/// Length-based classification: hardness arises exactly for prefixes with
/// three or more quantifiers.
pub fn classify_prefix(prefix: &str) -> Result<PrefixVerdict, PrefixError> {
    validate(prefix)?;
    let verdict = if prefix.len() >= 3 {
        PrefixClass::ContainsSharpP1Complete
    } else {
        PrefixClass::Ptime
    };
    Ok(PrefixVerdict { prefix: prefix.to_string(), verdict })
}

fn dual(c: char) -> char {
    if c == 'A' { 'E' } else { 'A' }
}

/// One move dualizes a trailing suffix whose preceding quantifiers are all
/// universal.
fn moves_from(prefix: &str) -> Vec<(usize, String)> {
    let chars: Vec<char> = prefix.chars().collect();
    let mut out = Vec::new();
    for count in 1..=chars.len() {
        let split = chars.len() - count;
        if chars[..split].iter().all(|&c| c == 'A') {
            let mut next: String = chars[..split].iter().collect();
            next.extend(chars[split..].iter().map(|&c| dual(c)));
            out.push((count, next));
        }
    }
    out
}

/// Shortest dualization-move sequence from `source` to `target`, as suffix
/// lengths.
pub fn move_sequence(source: &str, target: &str) -> Result<Vec<usize>, PrefixError> {
    validate(source)?;
    validate(target)?;
    if source.len() != target.len() {
        return Err(PrefixError::LengthMismatch { target: target.len(), actual: source.len() });
    }
    let mut queue = VecDeque::new();
    let mut seen: BTreeMap<String, (String, usize)> = BTreeMap::new();
    let mut visited: BTreeSet<String> = BTreeSet::new();
    queue.push_back(source.to_string());
    visited.insert(source.to_string());
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            let mut path = Vec::new();
            let mut node = cur;
            while node != source {
                let (prev, mv) = seen[&node].clone();
                path.push(mv);
                node = prev;
            }
            path.reverse();
            return Ok(path);
        }
        for (count, next) in moves_from(&cur) {
            if visited.insert(next.clone()) {
                seen.insert(next.clone(), (cur.clone(), count));
                queue.push_back(next);
            }
        }
    }
    Err(PrefixError::Unreachable {
        from: source.to_string(),
        target: target.to_string(),
        attempted: visited.into_iter().collect::<Vec<_>>().join(", "),
    })
}

fn prefix_string(ws: &WeightedSentence) -> Result<String, PrefixError> {
    let Some((prefix, _)) = ws.sentence.prenex_split() else {
        return Err(PrefixError::NotPrenex);
    };
    prefix
        .iter()
        .map(|(q, _)| match q {
            Quant::Forall => Ok('A'),
            Quant::Exists => Ok('E'),
            Quant::ExistsEq1 => Err(PrefixError::NotPrenex),
        })
        .collect()
}

/// Rewrites a prenex sentence to carry the target prefix through a chain of
/// suffix dualizations. Each move introduces one fresh predicate weighted
/// (1,−1); the weighted count is preserved. Returns the rewritten sentence
/// and the applied suffix lengths.
pub fn retarget_prefix(
    ws: &WeightedSentence,
    target: &str,
) -> Result<(WeightedSentence, Vec<usize>), PrefixError> {
    let source = prefix_string(ws)?;
    let path = move_sequence(&source, target)?;
    let mut current = ws.clone();
    for &count in &path {
        current = generalized_dual_skolemize(&current, count)?;
    }
    Ok((current, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_sentence, VocabMode};
    use crate::syntax::WeightMap;

    #[test]
    fn classification_table() {
        // All 8 length-3 prefixes are hard; all 7 shorter ones are ptime.
        for bits in 0..8u8 {
            let prefix: String = (0..3)
                .map(|i| if bits >> i & 1 == 1 { 'E' } else { 'A' })
                .collect();
            assert_eq!(
                classify_prefix(&prefix).unwrap().verdict,
                PrefixClass::ContainsSharpP1Complete
            );
        }
        for prefix in ["", "A", "E", "AA", "AE", "EA", "EE"] {
            assert_eq!(classify_prefix(prefix).unwrap().verdict, PrefixClass::Ptime);
        }
        assert!(classify_prefix("AXE").is_err());
    }

    #[test]
    fn all_length3_prefixes_reachable_from_aaa() {
        for bits in 0..8u8 {
            let target: String = (0..3)
                .map(|i| if bits >> i & 1 == 1 { 'E' } else { 'A' })
                .collect();
            let path = move_sequence("AAA", &target).unwrap();
            // Replay the moves on the string to confirm the path.
            let mut cur = "AAA".to_string();
            for count in path {
                let moves = moves_from(&cur);
                let (_, next) = moves.into_iter().find(|(c, _)| *c == count).unwrap();
                cur = next;
            }
            assert_eq!(cur, target);
        }
    }

    #[test]
    fn retarget_records_moves() {
        let (f, vocab) =
            parse_sentence("forall x forall y forall z S(x,y,z)", VocabMode::Inferred).unwrap();
        let ws = WeightedSentence::new(f, vocab.clone(), WeightMap::ones(&vocab));
        // ∃∃∃ by one full dualization.
        let (out, path) = retarget_prefix(&ws, "EEE").unwrap();
        assert_eq!(path, vec![3]);
        let (prefix, _) = out.sentence.prenex_split().unwrap();
        assert!(prefix.iter().all(|(q, _)| *q == Quant::Exists));
        // ∀∃∀ via ∀∀∃ then dualizing the last two.
        let (out, path) = retarget_prefix(&ws, "AEA").unwrap();
        assert_eq!(path, vec![1, 2]);
        let (prefix, _) = out.sentence.prenex_split().unwrap();
        let kinds: Vec<Quant> = prefix.iter().map(|(q, _)| *q).collect();
        assert_eq!(kinds, vec![Quant::Forall, Quant::Exists, Quant::Forall]);
        // Two fresh Skolem markers with weights (1, −1).
        assert_eq!(out.vocab.len(), 3);
    }
}

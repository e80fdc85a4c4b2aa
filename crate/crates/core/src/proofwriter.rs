//! ProofWriter rulebases: the raw distribution records, Unknown filtering
//! and entity-id depersonalization.
//!
//! Records are read from the published JSONL layout (`theory`, `triples`,
//! `rules`, `questions`, each item with its `text` and a parenthesized
//! `representation`). The representations supply the lexicon of subjects,
//! objects and attributes that get replaced by `e1, e2, ...`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Context, Dataset, Problem, Query, Question, DATASET_FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PwError {
    #[error("record {record}: {reason}")]
    Malformed { record: String, reason: String },
    #[error("record {record}: name {name} has no entity id")]
    UnmappedName { record: String, name: String },
}

/// Placeholders of rule representations; never replaced.
const VARIABLES: [&str; 4] = ["someone", "something", "they", "it"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawItem {
    pub text: String,
    #[serde(default)]
    pub representation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawAnswer {
    Bool(bool),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawQuestion {
    pub question: String,
    pub answer: RawAnswer,
    #[serde(default)]
    pub representation: String,
}

/// One line of a ProofWriter `meta-*.jsonl` file; unknown keys are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub theory: String,
    #[serde(default)]
    pub triples: BTreeMap<String, RawItem>,
    #[serde(default)]
    pub rules: BTreeMap<String, RawItem>,
    #[serde(default)]
    pub questions: BTreeMap<String, RawQuestion>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PwAnswer {
    True,
    False,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PwQuestion {
    pub id: String,
    pub text: String,
    pub answer: PwAnswer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PwRecord {
    pub id: String,
    /// Theory sentences in their original order.
    pub sentences: Vec<String>,
    pub questions: Vec<PwQuestion>,
    /// Subjects, objects and attributes, in order of first appearance.
    pub lexicon: Vec<String>,
}

fn malformed(record: &str, reason: impl Into<String>) -> PwError {
    PwError::Malformed { record: record.to_string(), reason: reason.into() }
}

/// Trailing number of a key such as `Q12` or `triple3`, for natural ordering.
fn key_number(key: &str) -> (u64, &str) {
    let digits = key.trim_start_matches(|c: char| !c.is_ascii_digit());
    (digits.parse().unwrap_or(u64::MAX), key)
}

/// Splits `"The cow is round. If ... then ...."` into sentences.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        cur.push(c);
        if matches!(c, '.' | '?' | '!') && chars.peek().is_none_or(|n| n.is_whitespace()) {
            let s = cur.trim();
            if !s.is_empty() {
                out.push(s.to_string());
            }
            cur.clear();
        }
    }
    let s = cur.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
    out
}

/// Quoted-token tuples of a representation, innermost groups first:
/// `(("a" "is" "b" "+")) -> ("a" "c" "d" "+")` gives two tuples.
pub fn representation_tuples(repr: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<String>> = Vec::new();
    let mut chars = repr.chars();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                if let Some(group) = stack.pop() {
                    if !group.is_empty() {
                        out.push(group);
                    }
                }
            }
            '"' => {
                let tok: String = chars.by_ref().take_while(|&c| c != '"').collect();
                if let Some(group) = stack.last_mut() {
                    group.push(tok);
                }
            }
            _ => {}
        }
    }
    out
}

fn push_term(lexicon: &mut Vec<String>, seen: &mut BTreeSet<String>, term: &str) {
    let term = term.trim();
    if term.is_empty() || VARIABLES.contains(&term) {
        return;
    }
    if seen.insert(term.to_string()) {
        lexicon.push(term.to_string());
    }
}

/// Subject and object of every `(subject verb object polarity)` tuple.
fn lexicon_of<'a>(reprs: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let (mut lexicon, mut seen) = (Vec::new(), BTreeSet::new());
    for repr in reprs {
        for tuple in representation_tuples(repr) {
            if tuple.len() >= 3 {
                push_term(&mut lexicon, &mut seen, &tuple[0]);
                push_term(&mut lexicon, &mut seen, &tuple[2]);
            }
        }
    }
    lexicon
}

impl PwRecord {
    pub fn from_raw(raw: &RawRecord) -> Result<PwRecord, PwError> {
        let sentences = split_sentences(&raw.theory);
        if sentences.is_empty() {
            return Err(malformed(&raw.id, "empty theory"));
        }
        let mut keys: Vec<&String> = raw.questions.keys().collect();
        keys.sort_by_key(|k| key_number(k));
        let mut questions = Vec::new();
        for k in &keys {
            let q = &raw.questions[*k];
            let answer = match &q.answer {
                RawAnswer::Bool(true) => PwAnswer::True,
                RawAnswer::Bool(false) => PwAnswer::False,
                RawAnswer::Text(t) => match t.to_ascii_lowercase().as_str() {
                    "true" => PwAnswer::True,
                    "false" => PwAnswer::False,
                    "unknown" => PwAnswer::Unknown,
                    _ => return Err(malformed(&raw.id, format!("question {k} has answer {t:?}"))),
                },
            };
            questions.push(PwQuestion { id: (*k).clone(), text: q.question.trim().to_string(), answer });
        }
        let mut items: Vec<(&String, &RawItem)> = raw.triples.iter().chain(raw.rules.iter()).collect();
        items.sort_by_key(|(k, _)| (!k.starts_with("triple"), key_number(k)));
        let reprs = items
            .iter()
            .map(|(_, i)| i.representation.as_str())
            .chain(keys.iter().map(|k| raw.questions[*k].representation.as_str()));
        let lexicon = lexicon_of(reprs);
        Ok(PwRecord { id: raw.id.clone(), sentences, questions, lexicon })
    }

    /// `e1, e2, ...` for the lexicon, in its order.
    pub fn entity_map(&self) -> BTreeMap<String, String> {
        self.lexicon.iter().enumerate().map(|(i, t)| (t.clone(), format!("e{}", i + 1))).collect()
    }

    /// The record as a dataset problem; Unknown questions are skipped.
    pub fn to_problem(&self) -> Problem {
        let questions = self
            .questions
            .iter()
            .filter(|q| q.answer != PwAnswer::Unknown)
            .map(|q| Question {
                id: q.id.clone(),
                query: Query::Text(q.text.clone()),
                answer: q.answer == PwAnswer::True,
                proofs: Vec::new(),
            })
            .collect();
        Problem { id: self.id.clone(), context: Context::Text { sentences: self.sentences.clone() }, questions }
    }
}

/// Drops Unknown questions and records left without questions.
pub fn filter_unknowns(records: Vec<PwRecord>) -> Vec<PwRecord> {
    records
        .into_iter()
        .filter_map(|mut r| {
            r.questions.retain(|q| q.answer != PwAnswer::Unknown);
            (!r.questions.is_empty()).then_some(r)
        })
        .collect()
}

/// Replaces every lexicon phrase (longest match first, whole words, with a
/// capitalized sentence-initial form also accepted) by its image.
fn replace_phrases(text: &str, map: &BTreeMap<String, String>) -> String {
    let mut phrases: Vec<(Vec<&str>, &str)> = map.iter().map(|(k, v)| (k.split(' ').collect(), v.as_str())).collect();
    phrases.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
    let tokens = tokenize(text);
    let mut out = String::new();
    let mut i = 0;
    'outer: while i < tokens.len() {
        if tokens[i].is_word {
            for (words, image) in &phrases {
                if let Some(end) = match_words(&tokens, i, words) {
                    out.push_str(image);
                    i = end;
                    continue 'outer;
                }
            }
        }
        out.push_str(tokens[i].text);
        i += 1;
    }
    out
}

struct Token<'a> {
    text: &'a str,
    is_word: bool,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut in_word = None;
    for (i, c) in text.char_indices() {
        let w = c.is_alphanumeric() || c == '_' || c == '-';
        match in_word {
            Some(prev) if prev == w => {}
            Some(prev) => {
                out.push(Token { text: &text[start..i], is_word: prev });
                start = i;
                in_word = Some(w);
            }
            None => in_word = Some(w),
        }
    }
    if let Some(w) = in_word {
        out.push(Token { text: &text[start..], is_word: w });
    }
    out
}

fn same_word(token: &str, word: &str, first: bool) -> bool {
    if token == word {
        return true;
    }
    // "Round people are kind." starts with a capitalized attribute.
    first && {
        let mut c = word.chars();
        c.next().is_some_and(|h| h.is_lowercase() && token.chars().next() == h.to_uppercase().next())
            && token.chars().skip(1).eq(c)
    }
}

fn match_words(tokens: &[Token<'_>], at: usize, words: &[&str]) -> Option<usize> {
    let mut i = at;
    for (n, w) in words.iter().enumerate() {
        if n > 0 {
            if tokens.get(i).is_none_or(|t| t.text != " ") {
                return None;
            }
            i += 1;
        }
        let t = tokens.get(i)?;
        if !t.is_word || !same_word(t.text, w, at == 0 && n == 0) {
            return None;
        }
        i += 1;
    }
    Some(i)
}

fn capitalize_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(h) => h.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Words allowed to stay capitalized after replacement.
fn is_sentence_word(w: &str) -> bool {
    matches!(w, "If" | "The" | "All" | "Does" | "It" | "They" | "Someone" | "Something" | "Is")
}

fn check_unmapped(record: &str, text: &str) -> Result<(), PwError> {
    for (n, t) in tokenize(text).iter().filter(|t| t.is_word).enumerate() {
        let upper = t.text.chars().next().is_some_and(char::is_uppercase);
        if upper && !(n == 0 || is_sentence_word(t.text)) {
            return Err(PwError::UnmappedName { record: record.to_string(), name: t.text.to_string() });
        }
    }
    Ok(())
}

/// Applies `map` to every sentence and question. The lexicon is rewritten
/// to the images. Fails with `UnmappedName` if a lexicon term has no image
/// or a capitalized name survives.
pub fn depersonalize(record: &PwRecord, map: &BTreeMap<String, String>) -> Result<PwRecord, PwError> {
    for term in &record.lexicon {
        if !map.contains_key(term) {
            return Err(PwError::UnmappedName { record: record.id.clone(), name: term.clone() });
        }
    }
    let conv = |s: &str| -> Result<String, PwError> {
        let out = replace_phrases(s, map);
        check_unmapped(&record.id, &out)?;
        Ok(out)
    };
    let sentences = record.sentences.iter().map(|s| conv(s)).collect::<Result<Vec<_>, _>>()?;
    let questions = record
        .questions
        .iter()
        .map(|q| Ok(PwQuestion { text: conv(&q.text)?, ..q.clone() }))
        .collect::<Result<Vec<_>, PwError>>()?;
    let lexicon = record.lexicon.iter().map(|t| map[t].clone()).collect();
    Ok(PwRecord { id: record.id.clone(), sentences, questions, lexicon })
}

/// Undoes [`depersonalize`] given the same map.
pub fn restore(record: &PwRecord, map: &BTreeMap<String, String>) -> PwRecord {
    let inverse: BTreeMap<String, String> = map.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
    let conv = |s: &str| capitalize_first(&replace_phrases(s, &inverse));
    PwRecord {
        id: record.id.clone(),
        sentences: record.sentences.iter().map(|s| conv(s)).collect(),
        questions: record.questions.iter().map(|q| PwQuestion { text: conv(&q.text), ..q.clone() }).collect(),
        lexicon: record.lexicon.iter().map(|t| inverse.get(t).cloned().unwrap_or_else(|| t.clone())).collect(),
    }
}

/// Records to the shared dataset document (`source: proofwriter`).
pub fn to_dataset(records: &[PwRecord]) -> Dataset {
    Dataset {
        version: DATASET_FORMAT_VERSION,
        source: "proofwriter".into(),
        seed: None,
        problems: records.iter().map(PwRecord::to_problem).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bear_record() -> PwRecord {
        let json = r#"{
          "id": "RelNeg-OWA-D1-0001",
          "theory": "The bear likes the dog. The cow is round. The cow likes the bear. The cow needs the bear. The dog needs the squirrel. The dog sees the cow. The squirrel needs the dog. If someone is round then they like the squirrel. If the bear is round and the bear likes the squirrel then the squirrel needs the bear. If the cow needs the dog then the cow is cold.",
          "triples": {
            "triple1": {"text": "The bear likes the dog.", "representation": "(\"bear\" \"likes\" \"dog\" \"+\")"},
            "triple2": {"text": "The cow is round.", "representation": "(\"cow\" \"is\" \"round\" \"+\")"}
          },
          "rules": {
            "rule1": {"text": "If someone is round then they like the squirrel.", "representation": "(((\"someone\" \"is\" \"round\" \"+\")) -> (\"someone\" \"likes\" \"squirrel\" \"+\"))"},
            "rule3": {"text": "If the cow needs the dog then the cow is cold.", "representation": "(((\"cow\" \"needs\" \"dog\" \"+\")) -> (\"cow\" \"is\" \"cold\" \"+\"))"}
          },
          "questions": {
            "Q1": {"question": "The cow likes the squirrel.", "answer": true, "representation": "(\"cow\" \"likes\" \"squirrel\" \"+\")"},
            "Q2": {"question": "The cow does not like the squirrel.", "answer": false, "representation": "(\"cow\" \"likes\" \"squirrel\" \"-\")"},
            "Q10": {"question": "The squirrel is cold.", "answer": "Unknown", "representation": "(\"squirrel\" \"is\" \"cold\" \"+\")"}
          }
        }"#;
        let raw: RawRecord = serde_json::from_str(json).unwrap();
        PwRecord::from_raw(&raw).unwrap()
    }

    #[test]
    fn parses_record() {
        let r = bear_record();
        assert_eq!(r.sentences.len(), 10);
        assert_eq!(r.sentences[0], "The bear likes the dog.");
        assert_eq!(r.questions.iter().map(|q| q.id.as_str()).collect::<Vec<_>>(), ["Q1", "Q2", "Q10"]);
        assert_eq!(r.lexicon, ["bear", "dog", "cow", "round", "squirrel", "cold"]);
    }

    #[test]
    fn unknowns_removed_and_idempotent() {
        let r = bear_record();
        let mut all_unknown = r.clone();
        all_unknown.id = "x".into();
        for q in &mut all_unknown.questions {
            q.answer = PwAnswer::Unknown;
        }
        let once = filter_unknowns(vec![r, all_unknown]);
        assert_eq!(once.len(), 1);
        assert_eq!(once[0].questions.len(), 2);
        assert_eq!(filter_unknowns(once.clone()), once);
    }

    #[test]
    fn depersonalize_round_trip() {
        let r = bear_record();
        let map = r.entity_map();
        let d = depersonalize(&r, &map).unwrap();
        assert_eq!(d.sentences[0], "The e1 likes the e2.");
        assert_eq!(d.sentences[1], "The e3 is e4.");
        assert_eq!(d.sentences[7], "If someone is e4 then they like the e5.");
        assert_eq!(d.questions[1].text, "The e3 does not like the e5.");
        assert_eq!(d.questions.iter().map(|q| q.answer).collect::<Vec<_>>(), r.questions.iter().map(|q| q.answer).collect::<Vec<_>>());
        assert_eq!(restore(&d, &map), r);
    }

    #[test]
    fn capitalized_attribute_and_names() {
        let raw = RawRecord {
            id: "r".into(),
            theory: "Anne is kind. Kind people are big.".into(),
            triples: [("triple1".to_string(), RawItem { text: "Anne is kind.".into(), representation: "(\"Anne\" \"is\" \"kind\" \"+\")".into() })].into(),
            rules: [("rule1".to_string(), RawItem { text: "Kind people are big.".into(), representation: "(((\"someone\" \"is\" \"kind\" \"+\")) -> (\"someone\" \"is\" \"big\" \"+\"))".into() })].into(),
            questions: BTreeMap::new(),
        };
        let r = PwRecord::from_raw(&raw).unwrap();
        let d = depersonalize(&r, &r.entity_map()).unwrap();
        assert_eq!(d.sentences, ["e1 is e2.", "e2 people are e3."]);
        assert_eq!(restore(&d, &r.entity_map()), r);
        let mut partial = r.entity_map();
        partial.remove("Anne");
        assert_eq!(
            depersonalize(&r, &partial),
            Err(PwError::UnmappedName { record: "r".into(), name: "Anne".into() })
        );
    }

    #[test]
    fn leftover_proper_noun() {
        let mut r = bear_record();
        r.sentences.push("The bear likes Harry.".into());
        let err = depersonalize(&r, &r.entity_map()).unwrap_err();
        assert!(matches!(err, PwError::UnmappedName { name, .. } if name == "Harry"));
    }

    #[test]
    fn empty_theory_is_malformed() {
        let raw = RawRecord { id: "z".into(), theory: " ".into(), triples: BTreeMap::new(), rules: BTreeMap::new(), questions: BTreeMap::new() };
        assert!(matches!(PwRecord::from_raw(&raw), Err(PwError::Malformed { .. })));
    }
}

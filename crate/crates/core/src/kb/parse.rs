//! Reader for the logic notation used in prompts and answers:
//! `∀A,B: parentOf(A, B) ∧ female(A) → motherOf(A,B)`.
//!
//! ASCII spellings (`forall`, `&`, `^`, `and`, `->`, `=>`, LaTeX `\land` and
//! `\rightarrow`) are accepted as well as the Prolog form `head :- body`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::{Atom, Rule, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

fn err(input: &str, reason: &str) -> ParseError {
    ParseError { input: input.to_string(), reason: reason.to_string() }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\''
}

/// Splits `rel(a, b)` into its relation name and raw argument strings.
fn split_atom(text: &str) -> Result<(String, Vec<String>), ParseError> {
    let s = text.trim().trim_matches('$');
    let open = s.find('(').ok_or_else(|| err(text, "missing `(`"))?;
    if !s.ends_with(')') {
        return Err(err(text, "missing `)`"));
    }
    let name = s[..open].trim().trim_matches('$');
    if name.is_empty() || !name.chars().all(is_ident_char) {
        return Err(err(text, "bad relation name"));
    }
    let inner = &s[open + 1..s.len() - 1];
    let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
    if args.iter().any(|a| a.is_empty() || !a.chars().all(is_ident_char)) {
        return Err(err(text, "bad argument list"));
    }
    Ok((name.to_string(), args))
}

/// Parses an atom, treating every argument as a variable.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let (rel, args) = split_atom(text)?;
    Ok(Atom::new(rel, args.into_iter().map(Term::Var).collect()))
}

/// Parses a ground atom, treating every argument as an entity name.
pub fn parse_fact_atom(text: &str) -> Result<Atom, ParseError> {
    let (rel, args) = split_atom(text)?;
    Ok(Atom::new(rel, args.into_iter().map(Term::Entity).collect()))
}

const ARROWS: [&str; 5] = ["\\rightarrow", "→", "->", "=>", "⇒"];
const CONJ: [&str; 5] = ["\\land", "∧", "&", "^", " and "];

/// Parses a rule; the returned rule has an empty label.
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let s = text.trim().trim_end_matches('.').trim().trim_matches('$').trim();
    let (body_text, head_text) = if let Some(i) = s.find(":-") {
        (&s[i + 2..], &s[..i])
    } else {
        let (i, arrow) = ARROWS
            .iter()
            .filter_map(|a| s.find(a).map(|i| (i, *a)))
            .min_by_key(|(i, _)| *i)
            .ok_or_else(|| err(text, "missing implication arrow"))?;
        (&s[..i], &s[i + arrow.len()..])
    };
    let body_text = strip_quantifier(body_text);
    let head = parse_atom(head_text)?;

    let mut normalized = String::from(body_text);
    for c in CONJ {
        normalized = normalized.replace(c, "\u{1}");
    }
    // A bare comma only separates atoms when it sits outside parentheses.
    let mut depth = 0usize;
    let normalized: String = normalized
        .chars()
        .map(|c| match c {
            '(' => {
                depth += 1;
                c
            }
            ')' => {
                depth = depth.saturating_sub(1);
                c
            }
            ',' if depth == 0 => '\u{1}',
            _ => c,
        })
        .collect();
    let body = normalized
        .split('\u{1}')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_atom)
        .collect::<Result<Vec<_>, _>>()?;
    if body.is_empty() {
        return Err(err(text, "empty rule body"));
    }
    Ok(Rule::new("", body, head))
}

fn strip_quantifier(s: &str) -> &str {
    let t = s.trim_start();
    let rest = if let Some(r) = t.strip_prefix('∀') {
        r
    } else if let Some(r) = t.strip_prefix("\\forall") {
        r
    } else if let Some(r) = t.strip_prefix("forall ") {
        r
    } else {
        return s;
    };
    match rest.find(':') {
        Some(i) => &rest[i + 1..],
        None => rest,
    }
}

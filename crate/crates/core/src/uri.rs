//! Syntactic checks for absolute URIs.
//!
//! Only the shape is checked: a scheme (`ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )`),
//! a colon, and a non-empty remainder free of characters that may not appear
//! inside an N-Triples `IRIREF`. Nothing is ever dereferenced.

/// Characters that may not appear unescaped inside `<...>` in N-Triples.
const FORBIDDEN: &[char] = &['<', '>', '"', '{', '}', '|', '^', '`', '\\'];

pub fn is_absolute_uri(candidate: &str) -> bool {
    let Some((scheme, rest)) = candidate.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return false;
    }
    !rest.is_empty()
        && rest
            .chars()
            .all(|c| !c.is_whitespace() && !c.is_control() && !FORBIDDEN.contains(&c))
}

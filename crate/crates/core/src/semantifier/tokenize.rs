/// Lowercased alphanumeric runs of two or more characters, followed by the
/// bigrams of adjacent kept tokens joined with `_`.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let unigrams: Vec<&str> = lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() > 1)
        .collect();
    let bigrams = unigrams.windows(2).map(|w| format!("{}_{}", w[0], w[1]));
    unigrams
        .iter()
        .map(|t| t.to_string())
        .chain(bigrams)
        .collect()
}

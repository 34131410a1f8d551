/// Lowercased runs of alphanumeric characters. Punctuation, apostrophes and
/// hyphens all separate tokens, so `l'école` gives `["l", "école"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_punctuation() {
        assert_eq!(tokenize("Bonjour, Monsieur!"), vec!["bonjour", "monsieur"]);
    }

    #[test]
    fn empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ... !").is_empty());
    }

    #[test]
    fn apostrophes_split() {
        assert_eq!(tokenize("l'école"), vec!["l", "école"]);
        assert_eq!(tokenize("L’ÉCOLE d’été"), vec!["l", "école", "d", "été"]);
    }
}

//! Post cleansing: handle and hashtag markers, URLs, punctuation and emoji are
//! removed, encoding damage is repaired, and the result is tokenized.

mod mojibake;

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory as Gc};

pub use mojibake::repair as repair_mojibake;

/// One raw social message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    #[serde(rename = "user")]
    pub user_id: String,
    #[serde(rename = "text")]
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    /// Byte offset into [`CleanText::text`].
    pub offset: usize,
}

impl Token {
    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CleanText {
    pub text: String,
    pub tokens: Vec<Token>,
}

impl CleanText {
    /// Tokenizes already-clean text without cleansing it again.
    pub fn from_clean(text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        CleanText { text, tokens }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleanOptions {
    pub repair_mojibake: bool,
}

impl Default for CleanOptions {
    fn default() -> Self {
        CleanOptions { repair_mojibake: true }
    }
}

/// Scheme-prefixed (`https://…`, `ftp://…`) and `www.`-prefixed links.
pub static URL_PATTERN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:[a-z][a-z0-9+.\-]*://|www\.)\S*").expect("valid URL regex"));

pub fn clean_text(raw: &str) -> CleanText {
    clean_text_with(raw, CleanOptions::default())
}

/// Cleanses raw bytes; invalid UTF-8 becomes U+FFFD first.
pub fn clean_bytes(raw: &[u8]) -> CleanText {
    clean_text(&String::from_utf8_lossy(raw))
}

pub fn clean_text_with(raw: &str, options: CleanOptions) -> CleanText {
    let repaired = if options.repair_mojibake {
        mojibake::repair(raw)
    } else {
        raw.to_string()
    };
    let without_urls = URL_PATTERN.replace_all(&repaired, " ");
    let chars: Vec<char> = without_urls.chars().collect();

    let mut text = String::with_capacity(without_urls.len());
    let mut pending_space = false;
    for (i, &c) in chars.iter().enumerate() {
        let intra_word = || {
            i > 0 && i + 1 < chars.len() && is_word_char(chars[i - 1]) && is_word_char(chars[i + 1])
        };
        let kept = match c {
            '@' | '#' => None,
            c if c.is_whitespace() => None,
            '\'' | '\u{2018}' | '\u{2019}' | '\u{02BC}' => intra_word().then_some('\''),
            '-' | '\u{2010}' | '\u{2011}' => intra_word().then_some('-'),
            c if is_punctuation(c) || is_emoji(c) || c.is_control() || is_format(c) => None,
            c => Some(c),
        };
        match kept {
            Some(k) => {
                if pending_space && !text.is_empty() {
                    text.push(' ');
                }
                pending_space = false;
                text.push(k);
            }
            None => pending_space = true,
        }
    }
    CleanText::from_clean(text)
}

/// True iff `text` is a fixed point of [`clean_text`].
pub fn is_clean(text: &str) -> bool {
    clean_text(text).text == text
}

/// Whitespace tokenization with byte offsets.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push(Token { text: text[s..i].to_string(), offset: s });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(Token { text: text[s..].to_string(), offset: s });
    }
    tokens
}

/// Letters, digits and marks that survive cleansing; variation selectors are
/// marks but go with the emoji they modify.
fn is_word_char(c: char) -> bool {
    (c.is_alphanumeric() || matches!(get_general_category(c), Gc::NonspacingMark | Gc::SpacingMark)) && !is_emoji(c)
}

fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::ConnectorPunctuation
            | Gc::DashPunctuation
            | Gc::OpenPunctuation
            | Gc::ClosePunctuation
            | Gc::InitialPunctuation
            | Gc::FinalPunctuation
            | Gc::OtherPunctuation
    )
}

fn is_format(c: char) -> bool {
    get_general_category(c) == Gc::Format
}

/// Symbol categories So/Sk plus the code blocks emoji are drawn from,
/// including the joiners and selectors that glue emoji sequences together.
pub fn is_emoji(c: char) -> bool {
    if matches!(get_general_category(c), Gc::OtherSymbol | Gc::ModifierSymbol) {
        return true;
    }
    matches!(
        c as u32,
        0x2190..=0x21FF
            | 0x2300..=0x23FF
            | 0x2600..=0x27BF
            | 0x2900..=0x297F
            | 0x2B00..=0x2BFF
            | 0x3030
            | 0x303D
            | 0x3297
            | 0x3299
            | 0x200D
            | 0x20E3
            | 0xFE00..=0xFE0F
            | 0x1F000..=0x1FAFF
            | 0xE0020..=0xE007F
    )
}

//! Repair of UTF-8 text that was decoded as Windows-1252 somewhere upstream
//! ("â€™" instead of "’", "Ã©" instead of "é").

use std::collections::HashMap;
use std::sync::LazyLock;

/// Windows-1252 bytes 0x80..=0x9F. The five unassigned bytes map to the C1
/// control with the same value, as most lenient decoders do.
const CP1252_HIGH: [char; 32] = [
    '\u{20AC}', '\u{0081}', '\u{201A}', '\u{0192}', '\u{201E}', '\u{2026}', '\u{2020}', '\u{2021}',
    '\u{02C6}', '\u{2030}', '\u{0160}', '\u{2039}', '\u{0152}', '\u{008D}', '\u{017D}', '\u{008F}',
    '\u{0090}', '\u{2018}', '\u{2019}', '\u{201C}', '\u{201D}', '\u{2022}', '\u{2013}', '\u{2014}',
    '\u{02DC}', '\u{2122}', '\u{0161}', '\u{203A}', '\u{0153}', '\u{009D}', '\u{017E}', '\u{0178}',
];

fn cp1252_char(byte: u8) -> char {
    match byte {
        0x80..=0x9F => CP1252_HIGH[(byte - 0x80) as usize],
        b => b as char,
    }
}

/// Characters whose mis-decoded form we recognise: Latin-1 supplement,
/// Latin Extended-A, and the cp1252 typographic punctuation.
fn repairable_targets() -> impl Iterator<Item = char> {
    let latin = (0xA0u32..=0x17F).filter_map(char::from_u32);
    let extra = [
        '\u{0192}', '\u{02C6}', '\u{02DC}', '\u{2013}', '\u{2014}', '\u{2018}', '\u{2019}', '\u{201A}',
        '\u{201C}', '\u{201D}', '\u{201E}', '\u{2020}', '\u{2021}', '\u{2022}', '\u{2026}', '\u{2030}',
        '\u{2039}', '\u{203A}', '\u{20AC}', '\u{2122}',
    ];
    latin.chain(extra)
}

static TABLE: LazyLock<HashMap<String, char>> = LazyLock::new(|| {
    let mut table = HashMap::new();
    let mut buf = [0u8; 4];
    for target in repairable_targets() {
        let garbled: String = target.encode_utf8(&mut buf).bytes().map(cp1252_char).collect();
        table.insert(garbled, target);
    }
    // Right double quote is E2 80 9D; 0x9D is unassigned in cp1252 and is
    // usually dropped, leaving a bare "â€".
    table.insert("\u{E2}\u{20AC}".to_string(), '\u{201D}');
    table
});

/// Replaces every known mojibake sequence with the character it encodes,
/// repeating until no sequence remains (double-encoded text needs two rounds).
pub fn repair(text: &str) -> String {
    let mut current = repair_once(text);
    loop {
        let next = repair_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn repair_once(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut key = String::with_capacity(12);
    let mut i = 0;
    'outer: while i < chars.len() {
        // Sequences are two or three characters; prefer the longer one.
        for width in [3, 2] {
            if i + width <= chars.len() {
                key.clear();
                key.extend(&chars[i..i + width]);
                if let Some(&fixed) = TABLE.get(&key) {
                    out.push(fixed);
                    i += width;
                    continue 'outer;
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

//! Adversarial parser inputs, 64 KiB each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FUZZ_LEN: usize = 64 * 1024;

const SOUP: &[&str] = &[
    "create",
    "object",
    "instance",
    "of",
    "select",
    "any",
    "many",
    "one",
    "from",
    "instances",
    "where",
    "related",
    "by",
    "->",
    "[",
    "]",
    "R1",
    "relate",
    "unrelate",
    "to",
    "across",
    "if",
    "elif",
    "else",
    "end",
    "while",
    "for",
    "each",
    "in",
    "return",
    "self",
    "selected",
    "(",
    ")",
    ";",
    ".",
    ",",
    "=",
    "==",
    "!=",
    "<",
    "<=",
    "+",
    "-",
    "*",
    "/",
    "and",
    "or",
    "not",
    "cardinality",
    "empty",
    "not_empty",
    "\"s\"",
    "\"",
    "1",
    "2.5",
    "9999999999999999999999",
    "x",
    "Dog",
    "//",
    "\n",
    " ",
    "\t",
    "\\",
];

/// (input class, text) pairs: raw bytes, printable ASCII, token soup and
/// three deep-nesting shapes.
pub fn fuzz_inputs(seed: u64) -> Vec<(&'static str, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bytes: Vec<u8> = (0..FUZZ_LEN).map(|_| rng.gen()).collect();
    let ascii: String = (0..FUZZ_LEN).map(|_| rng.gen_range(0x20u8..0x7f) as char).collect();
    let mut soup = String::new();
    while soup.len() < FUZZ_LEN {
        soup.push_str(SOUP[rng.gen_range(0..SOUP.len())]);
        soup.push(' ');
    }
    let half = FUZZ_LEN / 2 - 8;
    vec![
        ("bytes", String::from_utf8_lossy(&bytes).into_owned()),
        ("ascii", ascii),
        ("soup", soup),
        ("parens", format!("x = {}1{};", "(".repeat(half), ")".repeat(half))),
        ("ifs", "if (true)\n".repeat(FUZZ_LEN / 10)),
        ("unary", format!("x = {}1;", "not -".repeat(FUZZ_LEN / 5))),
    ]
}

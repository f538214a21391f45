//! Scenes shipped with the binary.

use crate::config::{parse, LoadError, Loaded};

pub const SCENES: [(&str, &str); 5] = [
    ("arch-a", include_str!("../scenes/arch-a.json")),
    ("arch-b", include_str!("../scenes/arch-b.json")),
    ("turn-helpers", include_str!("../scenes/turn-helpers.json")),
    ("turn-double", include_str!("../scenes/turn-double.json")),
    ("lone-pair", include_str!("../scenes/lone-pair.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SCENES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    SCENES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// `None` for an unknown name.
pub fn load(name: &str) -> Option<Result<Loaded, LoadError>> {
    source(name).map(parse)
}

use std::cmp::Ordering;
use std::fmt;

/// A finite word over `{1, 2, ...}`; the empty word is the root.
///
/// Words are ordered by length first, then lexicographically, so the least
/// active word is always the oldest generation's leftmost node.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl Into<Vec<u32>>) -> Self {
        let letters = letters.into();
        assert!(letters.iter().all(|&l| l >= 1), "letters are positive");
        Word(letters)
    }

    pub fn child(&self, letter: u32) -> Self {
        debug_assert!(letter >= 1);
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.extend_from_slice(&self.0);
        letters.push(letter);
        Word(letters)
    }

    pub fn parent(&self) -> Option<Word> {
        (!self.0.is_empty()).then(|| Word(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last_letter(&self) -> Option<u32> {
        self.0.last().copied()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ø");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

pub fn word_compare(a: &Word, b: &Word) -> Ordering {
    a.cmp(b)
}

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A letter of the free group alphabet, packed into one byte.
/// Generator `i` is `2*i`, its inverse is `2*i + 1`.
pub type Letter = u8;

/// Inverse of a packed letter.
#[inline]
pub fn invert(letter: Letter) -> Letter {
    letter ^ 1
}

/// A reduced word in the free group of rank `r`.
///
/// The letter sequence never contains an adjacent mutually inverse pair;
/// construction reduces eagerly, so the representation is canonical.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl std::fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.letters {
            let gen = (b'a' + (l / 2)) as char;
            if l & 1 == 0 {
                write!(f, "{gen}")?;
            } else {
                write!(f, "{}", gen.to_ascii_uppercase())?;
            }
        }
        Ok(())
    }
}

impl ReducedWord {
    /// The empty word.
    pub fn identity(rank: usize) -> Self {
        ReducedWord { rank, letters: Vec::new() }
    }

    /// Single generator `i` (0-based).
    pub fn generator(rank: usize, i: usize) -> Self {
        assert!(i < rank, "generator index out of range");
        ReducedWord { rank, letters: vec![(2 * i) as Letter] }
    }

    /// Build from a letter sequence, cancelling adjacent inverse pairs.
    pub fn from_letters(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Result<Self> {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if (l as usize) >= 2 * rank {
                return Err(Error::Config(format!(
                    "letter {l} out of range for rank {rank}"
                )));
            }
            if out.last() == Some(&invert(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(ReducedWord { rank, letters: out })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length `l(w)`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Group inverse: reversed letters, each inverted. A reduced word
    /// stays reduced under this map.
    pub fn inverse(&self) -> Self {
        ReducedWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&l| invert(l)).collect(),
        }
    }

    /// Product with cancellation at the seam.
    pub fn mul(&self, other: &ReducedWord) -> Self {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&invert(l)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        ReducedWord { rank: self.rank, letters }
    }

    /// True if no adjacent pair of letters is mutually inverse. Holds by
    /// construction; exposed for tests.
    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[1] != invert(w[0]))
    }
}

/// The sign character: `+1` on words of even length, `-1` on words of
/// odd length. Multiplicative because cancellation removes letters in
/// pairs.
pub fn sign_character(w: &ReducedWord) -> i8 {
    if w.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

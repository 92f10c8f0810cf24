//! Input tapes with endmarkers, head moves, and symbol aliases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEFT_END: char = '▷';
pub const RIGHT_END: char = '◁';
pub const STAR: char = '⋆';
pub const BLANK: char = '_';

/// Maps ASCII stand-ins to the canonical symbols: `^` → ▷, `$` → ◁, `*` → ⋆.
pub fn canonical(c: char) -> char {
    match c {
        '^' => LEFT_END,
        '$' => RIGHT_END,
        '*' => STAR,
        other => other,
    }
}

pub fn canonical_str(s: &str) -> String {
    s.chars().map(canonical).collect()
}

pub fn is_endmarker(c: char) -> bool {
    c == LEFT_END || c == RIGHT_END
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    #[inline]
    pub fn delta(self) -> isize {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }
    pub fn reverse(self) -> Move {
        match self {
            Move::Left => Move::Right,
            Move::Stay => Move::Stay,
            Move::Right => Move::Left,
        }
    }
    #[inline]
    pub fn apply(self, pos: usize) -> usize {
        (pos as isize + self.delta()) as usize
    }
}

impl From<Move> for i8 {
    fn from(m: Move) -> i8 {
        m.delta() as i8
    }
}

impl TryFrom<i8> for Move {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Move, String> {
        match v {
            -1 => Ok(Move::Left),
            0 => Ok(Move::Stay),
            1 => Ok(Move::Right),
            _ => Err(format!("head move must be -1, 0 or 1, got {v}")),
        }
    }
}

/// `▷ w ◁`; position 0 is the left endmarker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    cells: Vec<char>,
}

impl Tape {
    pub fn new(w: &str) -> Tape {
        let mut cells = Vec::with_capacity(w.len() + 2);
        cells.push(LEFT_END);
        cells.extend(w.chars().map(canonical));
        cells.push(RIGHT_END);
        Tape { cells }
    }

    /// Builds a tape after checking every symbol of `w` against `sigma`.
    pub fn checked(w: &str, sigma: &[char], context: &str) -> Result<Tape> {
        let tape = Tape::new(w);
        for &c in tape.input() {
            if !sigma.contains(&c) {
                return Err(Error::Alphabet { symbol: c, context: context.to_string() });
            }
        }
        Ok(tape)
    }

    #[inline]
    pub fn get(&self, pos: usize) -> char {
        self.cells[pos]
    }
    pub fn cells(&self) -> &[char] {
        &self.cells
    }
    pub fn input(&self) -> &[char] {
        &self.cells[1..self.cells.len() - 1]
    }
    pub fn input_len(&self) -> usize {
        self.cells.len() - 2
    }
    /// Position of ◁.
    pub fn right_end(&self) -> usize {
        self.cells.len() - 1
    }
    /// Position of the first ⋆, or of ◁ when there is none.
    pub fn core_end(&self) -> usize {
        self.cells.iter().position(|&c| c == STAR).unwrap_or(self.right_end())
    }
}

/// Reads a cell as seen by a machine scoped to the core: ⋆ acts as ◁.
#[inline]
pub fn scoped(c: char) -> char {
    if c == STAR {
        RIGHT_END
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tape_layout() {
        let t = Tape::new("ab**");
        assert_eq!(t.cells(), &['▷', 'a', 'b', '⋆', '⋆', '◁']);
        assert_eq!(t.core_end(), 3);
        assert_eq!(Tape::new("ab").core_end(), 3);
        assert_eq!(Tape::new("").right_end(), 1);
    }

    #[test]
    fn move_serde() {
        assert_eq!(serde_json::to_string(&Move::Left).unwrap(), "-1");
        assert_eq!(serde_json::from_str::<Move>("1").unwrap(), Move::Right);
        assert!(serde_json::from_str::<Move>("2").is_err());
    }
}

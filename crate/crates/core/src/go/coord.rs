use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const BOARD_SIZE: usize = 19;
pub const POINTS: usize = BOARD_SIZE * BOARD_SIZE;

/// GTP column letters; `I` is skipped.
const GTP_COLUMNS: &[u8; 19] = b"ABCDEFGHJKLMNOPQRST";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    /// `B` or `W`, as used by SGF and the commentary text.
    pub fn letter(self) -> char {
        match self {
            Color::Black => 'B',
            Color::White => 'W',
        }
    }

    pub fn gtp_name(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::White => "white",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.gtp_name())
    }
}

impl FromStr for Color {
    type Err = CoordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "b" | "black" => Ok(Color::Black),
            "w" | "white" => Ok(Color::White),
            _ => Err(CoordError::BadColor(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordError {
    #[error("empty vertex")]
    Empty,
    #[error("GTP vertices skip the letter I: `{0}`")]
    LetterI(String),
    #[error("invalid column in vertex `{0}`")]
    BadColumn(String),
    #[error("invalid row in vertex `{0}`")]
    BadRow(String),
    #[error("invalid SGF point `{0}`")]
    BadSgfPoint(String),
    #[error("invalid color `{0}`")]
    BadColor(String),
}

/// An intersection; `row` 0 is the bottom edge, so GTP `A1` is `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    col: u8,
    row: u8,
}

impl Point {
    pub fn new(col: usize, row: usize) -> Option<Point> {
        (col < BOARD_SIZE && row < BOARD_SIZE).then_some(Point {
            col: col as u8,
            row: row as u8,
        })
    }

    pub fn col(self) -> usize {
        self.col as usize
    }

    pub fn row(self) -> usize {
        self.row as usize
    }

    pub fn index(self) -> usize {
        self.row() * BOARD_SIZE + self.col()
    }

    pub fn from_index(index: usize) -> Point {
        debug_assert!(index < POINTS);
        Point {
            col: (index % BOARD_SIZE) as u8,
            row: (index / BOARD_SIZE) as u8,
        }
    }

    pub fn all() -> impl Iterator<Item = Point> {
        (0..POINTS).map(Point::from_index)
    }

    pub fn neighbors(self) -> impl Iterator<Item = Point> {
        let (c, r) = (self.col as i32, self.row as i32);
        [(c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)]
            .into_iter()
            .filter_map(|(c, r)| {
                if c < 0 || r < 0 {
                    None
                } else {
                    Point::new(c as usize, r as usize)
                }
            })
    }

    /// Two-letter SGF point; SGF rows count from the top edge.
    pub fn to_sgf(self) -> String {
        let col = (b'a' + self.col) as char;
        let row = (b'a' + (BOARD_SIZE as u8 - 1 - self.row)) as char;
        format!("{col}{row}")
    }

    pub fn from_sgf(text: &str) -> Result<Point, CoordError> {
        let bytes = text.as_bytes();
        let bad = || CoordError::BadSgfPoint(text.to_string());
        if bytes.len() != 2 {
            return Err(bad());
        }
        let col = bytes[0].wrapping_sub(b'a') as usize;
        let top_row = bytes[1].wrapping_sub(b'a') as usize;
        if top_row >= BOARD_SIZE {
            return Err(bad());
        }
        Point::new(col, BOARD_SIZE - 1 - top_row).ok_or_else(bad)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", GTP_COLUMNS[self.col()] as char, self.row() + 1)
    }
}

impl FromStr for Point {
    type Err = CoordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<Coord>()? {
            Coord::Point(p) => Ok(p),
            Coord::Pass => Err(CoordError::BadColumn(s.to_string())),
        }
    }
}

/// A board point or a pass. Text form is the GTP vertex (`F7`, `pass`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Point(Point),
    Pass,
}

impl Coord {
    pub fn point(self) -> Option<Point> {
        match self {
            Coord::Point(p) => Some(p),
            Coord::Pass => None,
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Coord::Pass)
    }

    pub fn at(col: usize, row: usize) -> Option<Coord> {
        Point::new(col, row).map(Coord::Point)
    }

    /// Every point followed by `Pass`.
    pub fn all() -> impl Iterator<Item = Coord> {
        Point::all().map(Coord::Point).chain(std::iter::once(Coord::Pass))
    }
}

impl From<Point> for Coord {
    fn from(p: Point) -> Self {
        Coord::Point(p)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Point(p) => p.fmt(f),
            Coord::Pass => f.write_str("pass"),
        }
    }
}

impl FromStr for Coord {
    type Err = CoordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(CoordError::Empty);
        }
        if t.eq_ignore_ascii_case("pass") {
            return Ok(Coord::Pass);
        }
        let mut chars = t.chars();
        let letter = chars.next().unwrap().to_ascii_uppercase();
        if letter == 'I' {
            return Err(CoordError::LetterI(s.to_string()));
        }
        let col = GTP_COLUMNS
            .iter()
            .position(|&c| c as char == letter)
            .ok_or_else(|| CoordError::BadColumn(s.to_string()))?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CoordError::BadRow(s.to_string()));
        }
        let row: usize = digits
            .parse()
            .map_err(|_| CoordError::BadRow(s.to_string()))?;
        if !(1..=BOARD_SIZE).contains(&row) {
            return Err(CoordError::BadRow(s.to_string()));
        }
        Ok(Coord::Point(Point::new(col, row - 1).expect("bounds checked")))
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub color: Color,
    #[serde(rename = "vertex")]
    pub coord: Coord,
    /// 1-based ply number within the game.
    pub number: u32,
}

impl Move {
    pub fn new(color: Color, coord: Coord, number: u32) -> Self {
        Self {
            color,
            coord,
            number,
        }
    }
}

use std::collections::BTreeMap;

use thiserror::Error;

use super::board::{BoardState, MoveError};
use super::coord::{Color, Coord, Move, Point, BOARD_SIZE};

/// Root properties handled explicitly; everything else lands in metadata.
const RESERVED: &[&str] = &["FF", "SZ", "KM", "HA", "RE", "AB", "B", "W"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SgfError {
    #[error("unbalanced parentheses or brackets at byte {0}")]
    Unbalanced(usize),
    #[error("unexpected character `{ch}` at byte {pos}")]
    Unexpected { ch: char, pos: usize },
    #[error("no game tree found")]
    Empty,
    #[error("unsupported board size {0}; only 19 is supported")]
    BoardSize(String),
    #[error("invalid value `{value}` for property {property}")]
    BadValue { property: String, value: String },
    #[error("illegal move at ply {ply}: {source}")]
    IllegalMove { ply: u32, source: MoveError },
}

/// Main line of a 19x19 game record.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub komi: f64,
    pub handicap: u32,
    /// Handicap/setup stones (`AB`), placed before move 1.
    pub setup_black: Vec<Point>,
    pub moves: Vec<Move>,
    pub result: Option<String>,
    /// Other root properties, values in document order.
    pub metadata: BTreeMap<String, Vec<String>>,
}

impl Default for GameRecord {
    fn default() -> Self {
        Self {
            komi: 0.0,
            handicap: 0,
            setup_black: Vec::new(),
            moves: Vec::new(),
            result: None,
            metadata: BTreeMap::new(),
        }
    }
}

impl GameRecord {
    pub fn board_size(&self) -> usize {
        BOARD_SIZE
    }

    pub fn first_color(&self) -> Color {
        match self.moves.first() {
            Some(m) => m.color,
            None if self.handicap > 0 => Color::White,
            None => Color::Black,
        }
    }

    pub fn initial_state(&self) -> BoardState {
        BoardState::with_setup(&self.setup_black, &[], self.first_color())
    }

    /// Board after every move, validating legality along the way.
    pub fn final_state(&self) -> Result<BoardState, SgfError> {
        let mut state = self.initial_state();
        for (i, mv) in self.moves.iter().enumerate() {
            state = state.apply_move(mv).map_err(|source| SgfError::IllegalMove {
                ply: i as u32 + 1,
                source,
            })?;
        }
        Ok(state)
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .get(key)
            .and_then(|v| v.first())
            .map(String::as_str)
    }

    /// Pushes a move, numbering it after the last one.
    pub fn push(&mut self, color: Color, coord: Coord) {
        let number = self.moves.len() as u32 + 1;
        self.moves.push(Move::new(color, coord, number));
    }
}

type Properties = Vec<(String, Vec<String>)>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self) -> SgfError {
        match self.peek() {
            Some(b) => SgfError::Unexpected {
                ch: b as char,
                pos: self.pos,
            },
            None => SgfError::Unbalanced(self.pos),
        }
    }

    /// Collects the main line of the game tree starting at `(`.
    fn game_tree(&mut self, nodes: &mut Vec<Properties>) -> Result<(), SgfError> {
        debug_assert_eq!(self.peek(), Some(b'('));
        self.pos += 1;
        let mut took_variation = false;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b';') if !took_variation => {
                    self.pos += 1;
                    nodes.push(self.node()?);
                }
                Some(b'(') if !took_variation => {
                    self.game_tree(nodes)?;
                    took_variation = true;
                }
                Some(b'(') => self.skip_tree()?,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(());
                }
                _ => return Err(self.unexpected()),
            }
        }
    }

    fn skip_tree(&mut self) -> Result<(), SgfError> {
        let mut depth = 0usize;
        while let Some(b) = self.peek() {
            match b {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += 1;
                        return Ok(());
                    }
                }
                b'[' => {
                    self.value()?;
                    continue;
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(SgfError::Unbalanced(self.pos))
    }

    fn node(&mut self) -> Result<Properties, SgfError> {
        let mut props = Properties::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b) if b.is_ascii_alphabetic() => {
                    let mut ident = String::new();
                    while let Some(b) = self.peek() {
                        if !b.is_ascii_alphabetic() {
                            break;
                        }
                        // FF[3] permits lower-case letters, which carry no meaning
                        if b.is_ascii_uppercase() {
                            ident.push(b as char);
                        }
                        self.pos += 1;
                    }
                    let mut values = Vec::new();
                    self.skip_ws();
                    while self.peek() == Some(b'[') {
                        values.push(self.value()?);
                        self.skip_ws();
                    }
                    if values.is_empty() {
                        return Err(self.unexpected());
                    }
                    props.push((ident, values));
                }
                _ => return Ok(props),
            }
        }
    }

    fn value(&mut self) -> Result<String, SgfError> {
        debug_assert_eq!(self.peek(), Some(b'['));
        let start = self.pos;
        self.pos += 1;
        let mut out = Vec::new();
        while let Some(b) = self.peek() {
            self.pos += 1;
            match b {
                b'\\' => {
                    if let Some(next) = self.peek() {
                        self.pos += 1;
                        // soft line break
                        if next != b'\n' {
                            out.push(next);
                        }
                    }
                }
                b']' => return Ok(String::from_utf8_lossy(&out).into_owned()),
                _ => out.push(b),
            }
        }
        Err(SgfError::Unbalanced(start))
    }
}

fn bad_value(property: &str, value: &str) -> SgfError {
    SgfError::BadValue {
        property: property.to_string(),
        value: value.to_string(),
    }
}

fn parse_move_coord(property: &str, value: &str) -> Result<Coord, SgfError> {
    let v = value.trim();
    if v.is_empty() || v == "tt" {
        return Ok(Coord::Pass);
    }
    Point::from_sgf(v)
        .map(Coord::Point)
        .map_err(|_| bad_value(property, value))
}

/// Parses the main line of a single-game FF[3]/FF[4] SGF document.
pub fn parse_sgf(text: &str) -> Result<GameRecord, SgfError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    parser.skip_ws();
    if parser.peek() != Some(b'(') {
        return Err(if parser.peek().is_none() {
            SgfError::Empty
        } else {
            parser.unexpected()
        });
    }
    let mut nodes = Vec::new();
    parser.game_tree(&mut nodes)?;
    let Some((root, rest)) = nodes.split_first() else {
        return Err(SgfError::Empty);
    };

    let mut record = GameRecord::default();
    let mut pending_moves = Vec::new();
    for (ident, values) in root {
        let first = values[0].trim();
        match ident.as_str() {
            "FF" => {}
            "SZ" => {
                if first.parse::<usize>().ok() != Some(BOARD_SIZE) {
                    return Err(SgfError::BoardSize(first.to_string()));
                }
            }
            "KM" => {
                record.komi = first
                    .parse::<f64>()
                    .ok()
                    .filter(|k| k.is_finite())
                    .ok_or_else(|| bad_value("KM", first))?
            }
            "HA" => record.handicap = first.parse().map_err(|_| bad_value("HA", first))?,
            "RE" => record.result = Some(values[0].clone()),
            "AB" => {
                for v in values {
                    record
                        .setup_black
                        .push(Point::from_sgf(v.trim()).map_err(|_| bad_value("AB", v))?);
                }
            }
            "B" | "W" => pending_moves.push((ident.clone(), first.to_string())),
            _ => {
                record
                    .metadata
                    .entry(ident.clone())
                    .or_default()
                    .extend(values.iter().cloned());
            }
        }
    }
    for node in rest {
        for (ident, values) in node {
            if ident == "B" || ident == "W" {
                pending_moves.push((ident.clone(), values[0].trim().to_string()));
            }
        }
    }
    for (ident, value) in pending_moves {
        let color = if ident == "B" { Color::Black } else { Color::White };
        let coord = parse_move_coord(&ident, &value)?;
        record.push(color, coord);
    }
    record.final_state()?;
    Ok(record)
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for ch in value.chars() {
        if ch == ']' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

/// Canonical FF[4] main-line document.
pub fn serialize_sgf(record: &GameRecord) -> String {
    let mut out = format!("(;FF[4]SZ[{}]KM[{}]", BOARD_SIZE, record.komi);
    if record.handicap > 0 {
        out.push_str(&format!("HA[{}]", record.handicap));
    }
    if let Some(result) = &record.result {
        out.push_str(&format!("RE[{}]", escape(result)));
    }
    if !record.setup_black.is_empty() {
        out.push_str("AB");
        for p in &record.setup_black {
            out.push_str(&format!("[{}]", p.to_sgf()));
        }
    }
    for (key, values) in &record.metadata {
        if RESERVED.contains(&key.as_str()) || values.is_empty() {
            continue;
        }
        out.push_str(key);
        for v in values {
            out.push_str(&format!("[{}]", escape(v)));
        }
    }
    for (i, mv) in record.moves.iter().enumerate() {
        if i % 10 == 0 {
            out.push('\n');
        }
        let coord = match mv.coord {
            Coord::Point(p) => p.to_sgf(),
            Coord::Pass => String::new(),
        };
        out.push_str(&format!(";{}[{}]", mv.color.letter(), coord));
    }
    out.push_str(")\n");
    out
}

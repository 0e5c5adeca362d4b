use std::sync::LazyLock;

use thiserror::Error;

use super::coord::{Color, Coord, Move, Point, POINTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("it is {expected}'s turn, not {got}'s")]
    WrongColor { expected: Color, got: Color },
    #[error("{0} is occupied")]
    Occupied(Point),
    #[error("{0} is suicide")]
    Suicide(Point),
    #[error("{0} retakes a ko")]
    Ko(Point),
}

struct Zobrist {
    stones: [[u64; 2]; POINTS],
    white_to_move: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

static ZOBRIST: LazyLock<Zobrist> = LazyLock::new(|| {
    let mut state = 0x5eed_0f_90_u64;
    let mut stones = [[0u64; 2]; POINTS];
    for entry in stones.iter_mut() {
        entry[0] = splitmix64(&mut state);
        entry[1] = splitmix64(&mut state);
    }
    Zobrist {
        stones,
        white_to_move: splitmix64(&mut state),
    }
});

fn stone_key(p: Point, color: Color) -> u64 {
    ZOBRIST.stones[p.index()][color as usize]
}

/// Immutable board snapshot. [`BoardState::apply_move`] returns a new state.
#[derive(Clone, PartialEq, Eq)]
pub struct BoardState {
    grid: [Option<Color>; POINTS],
    to_move: Color,
    ko_point: Option<Point>,
    captures_black: u32,
    captures_white: u32,
    hash: u64,
    ply: u32,
}

impl Default for BoardState {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for BoardState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "BoardState {{ to_move: {}, ko: {:?}, ply: {}, captures: {}/{} }}",
            self.to_move, self.ko_point, self.ply, self.captures_black, self.captures_white
        )?;
        for row in (0..19).rev() {
            let line: String = (0..19)
                .map(|col| match self.grid[row * 19 + col] {
                    None => '.',
                    Some(Color::Black) => 'X',
                    Some(Color::White) => 'O',
                })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl BoardState {
    pub fn new() -> Self {
        Self {
            grid: [None; POINTS],
            to_move: Color::Black,
            ko_point: None,
            captures_black: 0,
            captures_white: 0,
            hash: 0,
            ply: 0,
        }
    }

    /// Board with setup stones (handicap) placed and `to_move` to play.
    pub fn with_setup(black: &[Point], white: &[Point], to_move: Color) -> Self {
        let mut state = Self::new();
        for &p in black {
            state.put(p, Color::Black);
        }
        for &p in white {
            state.put(p, Color::White);
        }
        state.set_to_move(to_move);
        state
    }

    fn put(&mut self, p: Point, color: Color) {
        if let Some(old) = self.grid[p.index()] {
            self.hash ^= stone_key(p, old);
        }
        self.grid[p.index()] = Some(color);
        self.hash ^= stone_key(p, color);
    }

    fn remove(&mut self, p: Point) {
        if let Some(old) = self.grid[p.index()].take() {
            self.hash ^= stone_key(p, old);
        }
    }

    fn set_to_move(&mut self, color: Color) {
        if self.to_move != color {
            self.hash ^= ZOBRIST.white_to_move;
            self.to_move = color;
        }
    }

    pub fn get(&self, p: Point) -> Option<Color> {
        self.grid[p.index()]
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn ko_point(&self) -> Option<Point> {
        self.ko_point
    }

    /// Stones captured by Black (White prisoners).
    pub fn captures_black(&self) -> u32 {
        self.captures_black
    }

    /// Stones captured by White (Black prisoners).
    pub fn captures_white(&self) -> u32 {
        self.captures_white
    }

    /// Zobrist hash of the grid and the side to move.
    pub fn position_hash(&self) -> u64 {
        self.hash
    }

    /// Number of moves (passes included) applied since setup.
    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn stone_count(&self) -> usize {
        self.grid.iter().filter(|c| c.is_some()).count()
    }

    /// Stones of the chain through `p` and its liberty count.
    pub fn chain(&self, p: Point) -> (Vec<Point>, usize) {
        let Some(color) = self.get(p) else {
            return (Vec::new(), 0);
        };
        let mut seen = [false; POINTS];
        let mut liberty = [false; POINTS];
        let mut liberties = 0;
        let mut stones = vec![p];
        let mut stack = vec![p];
        seen[p.index()] = true;
        while let Some(q) = stack.pop() {
            for n in q.neighbors() {
                match self.get(n) {
                    None => {
                        if !liberty[n.index()] {
                            liberty[n.index()] = true;
                            liberties += 1;
                        }
                    }
                    Some(c) if c == color && !seen[n.index()] => {
                        seen[n.index()] = true;
                        stones.push(n);
                        stack.push(n);
                    }
                    _ => {}
                }
            }
        }
        (stones, liberties)
    }

    /// Whether `color` may play `coord`. The ko point only binds the side
    /// to move.
    pub fn is_legal(&self, color: Color, coord: Coord) -> bool {
        let Coord::Point(p) = coord else {
            return true;
        };
        if self.get(p).is_some() {
            return false;
        }
        if color == self.to_move && self.ko_point == Some(p) {
            return false;
        }
        for n in p.neighbors() {
            match self.get(n) {
                None => return true,
                Some(c) => {
                    let (_, libs) = self.chain(n);
                    if c == color && libs > 1 {
                        return true;
                    }
                    if c != color && libs == 1 {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn apply_move(&self, mv: &Move) -> Result<BoardState, MoveError> {
        self.play(mv.color, mv.coord)
    }

    pub fn play(&self, color: Color, coord: Coord) -> Result<BoardState, MoveError> {
        if color != self.to_move {
            return Err(MoveError::WrongColor {
                expected: self.to_move,
                got: color,
            });
        }
        let mut next = self.clone();
        next.ply += 1;
        next.ko_point = None;
        next.set_to_move(color.opposite());
        let Coord::Point(p) = coord else {
            return Ok(next);
        };
        if self.get(p).is_some() {
            return Err(MoveError::Occupied(p));
        }
        if self.ko_point == Some(p) {
            return Err(MoveError::Ko(p));
        }
        next.put(p, color);
        let mut captured = Vec::new();
        for n in p.neighbors() {
            if next.get(n) == Some(color.opposite()) {
                let (stones, libs) = next.chain(n);
                if libs == 0 {
                    for s in stones {
                        next.remove(s);
                        captured.push(s);
                    }
                }
            }
        }
        let (own, own_libs) = next.chain(p);
        if own_libs == 0 {
            return Err(MoveError::Suicide(p));
        }
        match color {
            Color::Black => next.captures_black += captured.len() as u32,
            Color::White => next.captures_white += captured.len() as u32,
        }
        if captured.len() == 1 && own.len() == 1 && own_libs == 1 {
            next.ko_point = Some(captured[0]);
        }
        Ok(next)
    }
}

/// Every coordinate (pass last) that `color` may legally play.
pub fn legal_moves(state: &BoardState, color: Color) -> Vec<Coord> {
    Coord::all().filter(|&c| state.is_legal(color, c)).collect()
}

//! Go board rules, GTP vertex codec and SGF main-line records.

mod board;
mod coord;
mod sgf;

pub use board::{legal_moves, BoardState, MoveError};
pub use coord::{Color, Coord, CoordError, Move, Point, BOARD_SIZE, POINTS};
pub use sgf::{parse_sgf, serialize_sgf, GameRecord, SgfError};

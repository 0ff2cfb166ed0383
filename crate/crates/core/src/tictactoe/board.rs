use std::fmt;

use crate::{Error, Result};

/// The 8 winning lines: rows, columns, diagonals.
pub const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    /// Black, encoded `-1`.
    X,
    /// White, encoded `+1`.
    O,
}

impl Player {
    pub fn sign(self) -> i8 {
        match self {
            Player::X => -1,
            Player::O => 1,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            -1 => Ok(Player::X),
            1 => Ok(Player::O),
            other => Err(Error::input(format!("player must be -1 or 1, got {other}"))),
        }
    }

    pub fn opponent(self) -> Self {
        match self {
            Player::X => Player::O,
            Player::O => Player::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameOutcome {
    XWins,
    OWins,
    Draw,
    Ongoing,
}

impl GameOutcome {
    pub fn is_over(self) -> bool {
        self != GameOutcome::Ongoing
    }

    pub fn winner(self) -> Option<Player> {
        match self {
            GameOutcome::XWins => Some(Player::X),
            GameOutcome::OWins => Some(Player::O),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GameOutcome::XWins => "x_wins",
            GameOutcome::OWins => "o_wins",
            GameOutcome::Draw => "draw",
            GameOutcome::Ongoing => "ongoing",
        }
    }
}

/// A reachable 3x3 position: mark counts differ by at most one and at most
/// one player has a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Board {
    cells: [i8; 9],
}

impl Board {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(cells: [i8; 9]) -> Result<Self> {
        if cells.iter().any(|c| !(-1..=1).contains(c)) {
            return Err(Error::input("cells must be -1, 0 or 1"));
        }
        let board = Self { cells };
        let (x, o) = (board.count(Player::X), board.count(Player::O));
        if x.abs_diff(o) > 1 {
            return Err(Error::input(format!("{x} X marks against {o} O marks")));
        }
        if board.has_line(Player::X) && board.has_line(Player::O) {
            return Err(Error::input("both players have a line"));
        }
        Ok(board)
    }

    pub fn from_slice(values: &[i64]) -> Result<Self> {
        let cells: [i64; 9] = values
            .try_into()
            .map_err(|_| Error::input(format!("a board has 9 cells, got {}", values.len())))?;
        let mut out = [0i8; 9];
        for (o, v) in out.iter_mut().zip(cells) {
            *o = i8::try_from(v).map_err(|_| Error::input(format!("bad cell value {v}")))?;
        }
        Self::new(out)
    }

    pub fn cells(&self) -> &[i8; 9] {
        &self.cells
    }

    pub fn get(&self, cell: usize) -> i8 {
        self.cells[cell]
    }

    pub fn count(&self, player: Player) -> usize {
        self.cells.iter().filter(|c| **c == player.sign()).count()
    }

    pub fn empty_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..9).filter(|&i| self.cells[i] == 0)
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|c| *c != 0)
    }

    pub(crate) fn has_line(&self, player: Player) -> bool {
        let s = player.sign();
        LINES.iter().any(|l| l.iter().all(|&i| self.cells[i] == s))
    }

    /// Whether `player` may move next. Either side may open, so with equal
    /// counts both can.
    pub fn is_turn_of(&self, player: Player) -> bool {
        self.count(player) <= self.count(player.opponent())
    }

    /// Board with `player`'s mark at `cell`.
    pub fn play(&self, cell: usize, player: Player) -> Result<Board> {
        if cell >= 9 {
            return Err(Error::input(format!("cell {cell} out of range")));
        }
        if self.cells[cell] != 0 {
            return Err(Error::input(format!("cell {cell} is occupied")));
        }
        if winner(self)?.is_over() {
            return Err(Error::input("the game is already decided"));
        }
        if !self.is_turn_of(player) {
            return Err(Error::input(format!("it is not {player:?}'s turn")));
        }
        let mut cells = self.cells;
        cells[cell] = player.sign();
        Ok(Board { cells })
    }

    /// Every cell multiplied by `sign`; an involution for `sign = ±1`.
    pub fn scaled(&self, sign: i8) -> Board {
        let mut cells = self.cells;
        for c in &mut cells {
            *c *= sign;
        }
        Board { cells }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.cells.iter().map(|&c| f64::from(c)).collect()
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in 0..3 {
            for col in 0..3 {
                let ch = match self.cells[3 * row + col] {
                    -1 => 'X',
                    1 => 'O',
                    _ => '.',
                };
                write!(f, "{ch}")?;
            }
            if row < 2 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

pub fn winner(board: &Board) -> Result<GameOutcome> {
    let (x, o) = (board.has_line(Player::X), board.has_line(Player::O));
    Ok(match (x, o) {
        (true, true) => return Err(Error::input("both players have a line")),
        (true, false) => GameOutcome::XWins,
        (false, true) => GameOutcome::OWins,
        _ if board.is_full() => GameOutcome::Draw,
        _ => GameOutcome::Ongoing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcomes() {
        assert_eq!(winner(&Board::empty()).unwrap(), GameOutcome::Ongoing);
        let top = Board::new([-1, -1, -1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(winner(&top).unwrap(), GameOutcome::XWins);
        let full = Board::new([-1, 1, -1, -1, 1, 1, 1, -1, -1]).unwrap();
        assert_eq!(winner(&full).unwrap(), GameOutcome::Draw);
        let diag = Board::new([1, -1, -1, 0, 1, 0, -1, 0, 1]).unwrap();
        assert_eq!(winner(&diag).unwrap(), GameOutcome::OWins);
    }

    #[test]
    fn invalid_boards() {
        assert!(Board::new([-1, -1, 0, 0, 0, 0, 0, 0, 0]).is_err());
        assert!(Board::new([2, 0, 0, 0, 0, 0, 0, 0, 0]).is_err());
        assert!(Board::new([-1, -1, -1, 1, 1, 1, 0, 0, 0]).is_err());
        assert!(Board::from_slice(&[0; 8]).is_err());
    }

    #[test]
    fn play_enforces_rules() {
        let b = Board::empty().play(4, Player::X).unwrap();
        assert!(b.play(4, Player::O).is_err());
        assert!(b.play(0, Player::X).is_err());
        assert!(b.play(9, Player::O).is_err());
        assert_eq!(b.play(0, Player::O).unwrap().get(0), 1);
        let won = Board::new([-1, -1, -1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert!(won.play(5, Player::O).is_err());
    }

    #[test]
    fn scaling_is_an_involution() {
        let b = Board::new([-1, 1, 0, 0, -1, 0, 1, 0, 0]).unwrap();
        assert_eq!(b.scaled(-1).scaled(-1), b);
        assert_eq!(b.scaled(1), b);
        assert_eq!(b.scaled(-1).get(0), 1);
    }

    #[test]
    fn display() {
        let b = Board::new([-1, 1, 0, 0, -1, 0, 1, 0, 0]).unwrap();
        assert_eq!(b.to_string(), "XO.\n.X.\nO..");
    }
}

//! The rule-based player: win, else block, else fork, else random.

use rand::Rng;

use super::board::{winner, Board, Player, LINES};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleApplied {
    Win,
    Block,
    Fork,
    Random,
}

/// Empty cells that would complete a line of `player`.
pub fn completing_cells(board: &Board, player: Player) -> Vec<usize> {
    board
        .empty_cells()
        .filter(|&c| {
            LINES.iter().any(|line| {
                line.contains(&c)
                    && line.iter().filter(|&&i| i != c).all(|&i| board.get(i) == player.sign())
            })
        })
        .collect()
}

/// Lines holding two of `player`'s marks and one empty cell.
fn open_threats(board: &Board, player: Player) -> usize {
    LINES
        .iter()
        .filter(|line| {
            let own = line.iter().filter(|&&i| board.get(i) == player.sign()).count();
            let empty = line.iter().filter(|&&i| board.get(i) == 0).count();
            own == 2 && empty == 1
        })
        .count()
}

/// Empty cells after which `player` has at least two open threats.
pub fn fork_cells(board: &Board, player: Player) -> Vec<usize> {
    board
        .empty_cells()
        .filter(|&c| {
            let mut cells = *board.cells();
            cells[c] = player.sign();
            let after = Board::new(cells).expect("placing on an empty cell keeps counts valid");
            open_threats(&after, player) >= 2
        })
        .collect()
}

/// The first applicable rule picks the move; rules 1-3 take the smallest
/// qualifying cell, rule 4 a uniformly random empty cell.
pub fn rule_based_move<R: Rng + ?Sized>(board: &Board, player: Player, rng: &mut R) -> Result<(usize, RuleApplied)> {
    if winner(board)?.is_over() {
        return Err(Error::input("the game is already over"));
    }
    if !board.is_turn_of(player) {
        return Err(Error::input(format!("it is not {player:?}'s turn")));
    }
    if let Some(&c) = completing_cells(board, player).first() {
        return Ok((c, RuleApplied::Win));
    }
    if let Some(&c) = completing_cells(board, player.opponent()).first() {
        return Ok((c, RuleApplied::Block));
    }
    if let Some(&c) = fork_cells(board, player).first() {
        return Ok((c, RuleApplied::Fork));
    }
    let empty: Vec<usize> = board.empty_cells().collect();
    Ok((empty[rng.random_range(0..empty.len())], RuleApplied::Random))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn board(cells: [i8; 9]) -> Board {
        Board::new(cells).unwrap()
    }

    #[test]
    fn takes_the_win() {
        // O at 0,1; X at 3,4 and 8 (X also threatens 5)
        let b = board([1, 1, 0, -1, -1, 0, 0, 0, -1]);
        let (cell, rule) = rule_based_move(&b, Player::O, &mut rng::seeded(0)).unwrap();
        assert_eq!((cell, rule), (2, RuleApplied::Win));
    }

    #[test]
    fn blocks_the_diagonal() {
        let b = board([-1, 1, 0, 0, -1, 0, 0, 0, 0]);
        let (cell, rule) = rule_based_move(&b, Player::O, &mut rng::seeded(0)).unwrap();
        assert_eq!((cell, rule), (8, RuleApplied::Block));
    }

    #[test]
    fn builds_a_fork() {
        // X at 0 and 5, O at 1 and 3, X to move: only 8 opens both 0-4-8 and 2-5-8
        let b = board([-1, 1, 0, 1, 0, -1, 0, 0, 0]);
        assert_eq!(fork_cells(&b, Player::X), vec![8]);
        let (cell, rule) = rule_based_move(&b, Player::X, &mut rng::seeded(0)).unwrap();
        assert_eq!((cell, rule), (8, RuleApplied::Fork));
        let (cell, rule) = rule_based_move(&b.scaled(-1), Player::O, &mut rng::seeded(0)).unwrap();
        assert_eq!((cell, rule), (8, RuleApplied::Fork));
    }

    #[test]
    fn random_on_empty_board() {
        let mut seen = [false; 9];
        let mut rng = rng::seeded(5);
        for _ in 0..500 {
            let (cell, rule) = rule_based_move(&Board::empty(), Player::X, &mut rng).unwrap();
            assert_eq!(rule, RuleApplied::Random);
            seen[cell] = true;
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn rejects_finished_games() {
        let won = board([-1, -1, -1, 1, 1, 0, 0, 0, 0]);
        assert!(rule_based_move(&won, Player::O, &mut rng::seeded(0)).is_err());
        let full = board([-1, 1, -1, -1, 1, 1, 1, -1, -1]);
        assert!(rule_based_move(&full, Player::X, &mut rng::seeded(0)).is_err());
    }
}

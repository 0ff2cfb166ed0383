use std::io::Write;

use super::board::{winner, Board, GameOutcome, Player};
use super::rules::rule_based_move;
use crate::rng::{self, StdRng};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub board_before: Board,
    pub mover: Player,
    pub cell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRecord {
    pub moves: Vec<Move>,
    pub outcome: GameOutcome,
}

impl GameRecord {
    pub fn final_board(&self) -> Board {
        self.moves.last().map_or(Board::empty(), |m| {
            m.board_before.play(m.cell, m.mover).expect("recorded moves are legal")
        })
    }

    pub fn first_mover(&self) -> Option<Player> {
        self.moves.first().map(|m| m.mover)
    }
}

/// A winner's reaction in the mover's perspective: the mover is always `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReactionPair {
    pub before: Board,
    pub after: Board,
}

impl ReactionPair {
    pub fn cell(&self) -> usize {
        (0..9).find(|&i| self.before.get(i) != self.after.get(i)).expect("pair changes one cell")
    }
}

/// Multiplies both boards by the mover's sign.
pub fn canonicalize(before: &Board, after: &Board, mover: Player) -> ReactionPair {
    ReactionPair { before: before.scaled(mover.sign()), after: after.scaled(mover.sign()) }
}

/// Plays until the board is decided, asking `choose` for each move.
pub(crate) fn play_out<F>(first: Player, rng: &mut StdRng, mut choose: F) -> Result<GameRecord>
where
    F: FnMut(&Board, Player, &mut StdRng) -> Result<usize>,
{
    let mut board = Board::empty();
    let mut mover = first;
    let mut moves = Vec::with_capacity(9);
    loop {
        let outcome = winner(&board)?;
        if outcome.is_over() {
            return Ok(GameRecord { moves, outcome });
        }
        let cell = choose(&board, mover, rng)?;
        let next = board.play(cell, mover)?;
        moves.push(Move { board_before: board, mover, cell });
        board = next;
        mover = mover.opponent();
    }
}

/// The winner's canonicalized reactions; empty for draws.
pub fn winner_pairs(game: &GameRecord) -> Result<Vec<ReactionPair>> {
    let Some(w) = game.outcome.winner() else {
        return Ok(Vec::new());
    };
    game.moves
        .iter()
        .filter(|m| m.mover == w)
        .map(|m| Ok(canonicalize(&m.board_before, &m.board_before.play(m.cell, m.mover)?, m.mover)))
        .collect()
}

/// Rule-based self-play. Game `i` uses stream `i` of `seed`; X opens even
/// games and O odd ones. Returns every game and the canonicalized reactions
/// of each game's winner; draws contribute nothing.
pub fn simulate_training_games(n_games: usize, seed: u64) -> Result<(Vec<GameRecord>, Vec<ReactionPair>)> {
    let mut games = Vec::with_capacity(n_games);
    let mut pairs = Vec::new();
    for i in 0..n_games {
        let first = if i % 2 == 0 { Player::X } else { Player::O };
        let mut rng = rng::substream(seed, i as u64);
        let game = play_out(first, &mut rng, |b, p, r| rule_based_move(b, p, r).map(|m| m.0))?;
        pairs.extend(winner_pairs(&game)?);
        games.push(game);
    }
    Ok((games, pairs))
}

/// Wins, draws and losses from one side's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
}

impl Tally {
    pub fn games(&self) -> usize {
        self.wins + self.draws + self.losses
    }

    pub fn record(&mut self, outcome: GameOutcome, side: Player) {
        match outcome.winner() {
            Some(w) if w == side => self.wins += 1,
            Some(_) => self.losses += 1,
            None => self.draws += 1,
        }
    }

    pub fn loss_rate(&self) -> f64 {
        self.losses as f64 / self.games().max(1) as f64
    }

    pub fn win_rate(&self) -> f64 {
        self.wins as f64 / self.games().max(1) as f64
    }
}

/// Rules against rules on the evaluation schedule: the tallied side plays O
/// and opens the even games, game `i` uses stream `i` of `seed`.
pub fn rules_vs_rules(n_games: usize, seed: u64) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n_games {
        let first = if i % 2 == 0 { Player::O } else { Player::X };
        let mut rng = rng::substream(seed, i as u64);
        let game = play_out(first, &mut rng, |b, p, r| rule_based_move(b, p, r).map(|m| m.0))?;
        tally.record(game.outcome, Player::O);
    }
    Ok(tally)
}

/// One `mover,cell` line per move followed by `outcome,<name>`.
pub fn write_game_log<W: Write>(game: &GameRecord, mut out: W) -> Result<()> {
    for m in &game.moves {
        writeln!(out, "{},{}", m.mover.sign(), m.cell)?;
    }
    writeln!(out, "outcome,{}", game.outcome.as_str())?;
    Ok(())
}

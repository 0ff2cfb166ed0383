use std::io::Write;
use std::ops::ControlFlow;

use super::board::{winner, Board, Player};
use super::games::{play_out, GameRecord, ReactionPair, Tally};
use super::rules::rule_based_move;
use crate::markov::{
    augment, estimate_empirical, generate_pairs, pairs_to_dataset, DiscreteDistribution,
    EmpiricalConditional,
};
use crate::nn::{init_network, train_observed, Dataset, LayerSpec, Network, TrainConfig};
use crate::rng::{self, StdRng};
use crate::{Error, Result};

/// Hidden widths of the `[10:80:30:9]` player network.
pub const TTT_HIDDEN: [usize; 2] = [80, 30];

/// `[r | player * cells]`: the board as seen by the mover.
pub fn network_input(board: &Board, player: Player, r: f64) -> Result<Vec<f64>> {
    augment(&board.scaled(player.sign()).as_f64(), r)
}

/// Highest-scoring empty cell of the network's 9 outputs; occupied cells are
/// never chosen and ties go to the smallest index.
pub fn network_move(net: &Network, board: &Board, player: Player, r: f64) -> Result<usize> {
    if winner(board)?.is_over() {
        return Err(Error::input("the game is already over"));
    }
    if net.output_dim() != 9 {
        return Err(Error::shape(format!("player network has {} outputs, expected 9", net.output_dim())));
    }
    let out = net.forward(&network_input(board, player, r)?)?;
    let mut best: Option<usize> = None;
    for cell in board.empty_cells() {
        if best.is_none_or(|b| out[cell] > out[b]) {
            best = Some(cell);
        }
    }
    best.ok_or_else(|| Error::input("no empty cell left"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstMover {
    Network,
    Rules,
}

/// The network plays O against the rule-based X.
fn play_with(net: &Network, first: FirstMover, rng: &mut StdRng) -> Result<GameRecord> {
    let opener = match first {
        FirstMover::Network => Player::O,
        FirstMover::Rules => Player::X,
    };
    play_out(opener, rng, |board, mover, rng| match mover {
        Player::O => network_move(net, board, mover, rng::unit(rng)),
        Player::X => rule_based_move(board, mover, rng).map(|m| m.0),
    })
}

/// One game of the network (O, fresh `r` per move) against the rule-based
/// player (X).
pub fn play_game(net: &Network, first: FirstMover, seed: u64) -> Result<GameRecord> {
    play_with(net, first, &mut rng::seeded(seed))
}

/// Tally from the network's side over `n_games`; the network opens the even
/// games and game `i` uses stream `i` of `seed`.
pub fn evaluate(net: &Network, n_games: usize, seed: u64) -> Result<Tally> {
    if n_games == 0 {
        return Err(Error::input("evaluation needs at least one game"));
    }
    let mut tally = Tally::default();
    for i in 0..n_games {
        let first = if i % 2 == 0 { FirstMover::Network } else { FirstMover::Rules };
        let game = play_with(net, first, &mut rng::substream(seed, i as u64))?;
        tally.record(game.outcome, Player::O);
    }
    Ok(tally)
}

/// Frequencies of [`network_move`] over `trials` fresh draws of `r`.
pub fn reaction_distribution(
    net: &Network,
    board: &Board,
    player: Player,
    trials: usize,
    seed: u64,
) -> Result<DiscreteDistribution> {
    if trials == 0 {
        return Err(Error::input("trials must be positive"));
    }
    let mut rng = rng::seeded(seed);
    let mut counts = [0u64; 9];
    for _ in 0..trials {
        counts[network_move(net, board, player, rng::unit(&mut rng))?] += 1;
    }
    DiscreteDistribution::from_counts(&counts)
}

/// Cell distribution of the reactions recorded for a mover-perspective board.
pub fn empirical_reaction_distribution(
    table: &EmpiricalConditional,
    canonical_before: &Board,
) -> Option<DiscreteDistribution> {
    let entry = table.get(&canonical_before.as_f64())?;
    let mut probs = vec![0.0; 9];
    for (outcome, p) in entry.outcomes.iter().zip(entry.distribution.probs()) {
        let cell = (0..9).find(|&i| outcome[i] != canonical_before.as_f64()[i])?;
        probs[cell] += p;
    }
    DiscreteDistribution::new(probs).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TttTraining {
    pub pairs_per_input: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for TttTraining {
    fn default() -> Self {
        Self {
            pairs_per_input: 64,
            train: TrainConfig {
                learning_rate: 1.0,
                epochs: 60,
                batch_size: 16,
                rng_seed: 1,
                shuffle: true,
            },
            seed: 1,
        }
    }
}

/// Empirical reaction table of the winner pairs and the augmented dataset
/// generated from it.
pub fn mc_dataset(
    pairs: &[ReactionPair],
    pairs_per_input: usize,
    seed: u64,
) -> Result<(EmpiricalConditional, Dataset)> {
    let table = estimate_empirical(pairs.iter().map(|p| (p.before.as_f64(), p.after.as_f64())))?;
    let data = pairs_to_dataset(generate_pairs(&table, pairs_per_input, seed)?)?;
    Ok((table, data))
}

/// The raw winner pairs without a random input, for a classical network.
pub fn classical_dataset(pairs: &[ReactionPair]) -> Result<Dataset> {
    Dataset::new(pairs.iter().map(|p| (p.before.as_f64(), p.after.as_f64())).collect())
}

/// Trains the `[10:80:30:9]` network, calling `on_epoch` after every epoch.
pub fn train_ttt_net<F>(
    pairs: &[ReactionPair],
    cfg: &TttTraining,
    on_epoch: F,
) -> Result<(Network, Vec<f64>, EmpiricalConditional)>
where
    F: FnMut(usize, &Network, f64) -> ControlFlow<()>,
{
    let (table, data) = mc_dataset(pairs, cfg.pairs_per_input, cfg.seed)?;
    let widths = [10, TTT_HIDDEN[0], TTT_HIDDEN[1], 9];
    let net = init_network(&LayerSpec::chain(&widths), cfg.seed.wrapping_add(1))?;
    let (net, history) = train_observed(net, &data, &cfg.train, on_epoch)?;
    Ok((net, history, table))
}

/// CSV `cell,frequency`.
pub fn write_reaction_csv<W: Write>(dist: &DiscreteDistribution, mut out: W) -> Result<()> {
    writeln!(out, "cell,frequency")?;
    for (cell, p) in dist.probs().iter().enumerate() {
        writeln!(out, "{cell},{p}")?;
    }
    Ok(())
}

/// CSV `epoch,wins,draws,losses`.
pub fn write_evaluation_csv<W: Write>(rows: &[(usize, Tally)], mut out: W) -> Result<()> {
    writeln!(out, "epoch,wins,draws,losses")?;
    for (epoch, t) in rows {
        writeln!(out, "{epoch},{},{},{}", t.wins, t.draws, t.losses)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Layer};

    /// 10 -> 9 linear network whose outputs are constant `bias`.
    fn constant_net(bias: [f64; 9]) -> Network {
        let layer = Layer::from_parts(10, 9, Activation::Linear, vec![0.0; 90], bias.to_vec()).unwrap();
        Network::from_layers(vec![layer]).unwrap()
    }

    #[test]
    fn single_empty_cell_is_forced() {
        let b = Board::new([-1, 1, -1, -1, 1, 1, 1, -1, 0]).unwrap();
        let net = constant_net([5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, -9.0]);
        for k in 0..=10 {
            assert_eq!(network_move(&net, &b, Player::X, k as f64 / 10.0).unwrap(), 8);
        }
        let d = reaction_distribution(&net, &b, Player::X, 50, 0).unwrap();
        assert_eq!(d.probs()[8], 1.0);
    }

    #[test]
    fn ties_go_to_the_smallest_empty_cell() {
        let b = Board::new([1, -1, 1, 0, -1, -1, -1, 0, 1]).unwrap();
        let net = constant_net([-1.0; 9]);
        assert_eq!(network_move(&net, &b, Player::O, 0.3).unwrap(), 3);
    }

    #[test]
    fn occupied_cells_are_masked() {
        let b = Board::new([0, 0, 0, 0, -1, 0, 0, 0, 0]).unwrap();
        let mut bias = [0.0; 9];
        bias[4] = 100.0;
        bias[6] = 1.0;
        let net = constant_net(bias);
        assert_eq!(network_move(&net, &b, Player::O, 0.5).unwrap(), 6);
        let d = reaction_distribution(&net, &b, Player::O, 1, 9).unwrap();
        assert_eq!(d.probs()[4], 0.0);
        assert_eq!(d.probs().iter().filter(|p| **p == 1.0).count(), 1);
    }

    #[test]
    fn finished_board_is_rejected() {
        let won = Board::new([-1, -1, -1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert!(network_move(&constant_net([0.0; 9]), &won, Player::O, 0.5).is_err());
    }

    #[test]
    fn input_is_mover_perspective() {
        let b = Board::new([-1, 0, 0, 0, 1, 0, 0, 0, 0]).unwrap();
        let x = network_input(&b, Player::X, 0.25).unwrap();
        assert_eq!(x, vec![0.25, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn games_are_seeded() {
        let net = init_network(&LayerSpec::chain(&[10, 80, 30, 9]), 3).unwrap();
        let a = play_game(&net, FirstMover::Network, 17).unwrap();
        assert_eq!(a, play_game(&net, FirstMover::Network, 17).unwrap());
        assert_eq!(a.first_mover(), Some(Player::O));
        let t = evaluate(&net, 1, 0).unwrap();
        assert_eq!(t.games(), 1);
        assert_eq!(evaluate(&net, 101, 5).unwrap().games(), 101);
    }

    #[test]
    fn rules_take_an_open_win_against_the_network() {
        // a network that always prefers cell 0, then 1, ...: X completes a line
        let mut bias = [0.0; 9];
        for (i, b) in bias.iter_mut().enumerate() {
            *b = -(i as f64);
        }
        let net = constant_net(bias);
        let game = play_game(&net, FirstMover::Rules, 4).unwrap();
        assert_eq!(game.outcome, crate::tictactoe::GameOutcome::XWins);
        let last = game.moves.last().unwrap();
        assert_eq!(last.mover, Player::X);
    }
}

//! Tic-Tac-Toe: board rules, the rule-based player used to generate data,
//! winner-reaction datasets and the network player.
//!
//! Cells hold `-1` (X), `0` (empty) or `+1` (O), row-major. Training pairs
//! are canonicalized to the mover's perspective by multiplying every cell by
//! the mover's sign, so the learner always plays `+1`.

mod board;
mod dataset;
mod games;
mod player;
mod rules;

pub use board::{winner, Board, GameOutcome, Player, LINES};
pub use dataset::{read_pairs, write_pairs, DATASET_MAGIC, DATASET_VERSION};
pub use games::{
    canonicalize, rules_vs_rules, simulate_training_games, winner_pairs, write_game_log, GameRecord, Move,
    ReactionPair, Tally,
};
pub use player::{
    classical_dataset, empirical_reaction_distribution, evaluate, mc_dataset, network_input,
    network_move, play_game, reaction_distribution, train_ttt_net, write_evaluation_csv,
    write_reaction_csv, FirstMover, TttTraining, TTT_HIDDEN,
};
pub use rules::{completing_cells, fork_cells, rule_based_move, RuleApplied};

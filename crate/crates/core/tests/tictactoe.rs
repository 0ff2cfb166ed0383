use mcnn::tictactoe::*;
use proptest::prelude::*;
use rand::seq::IndexedRandom;

/// Plays `plies` random legal moves from the empty board, stopping early if
/// the game ends.
fn random_position(plies: usize, seed: u64) -> (Board, Player) {
    let mut rng = mcnn::rng::seeded(seed);
    let mut board = Board::empty();
    let mut mover = Player::X;
    for _ in 0..plies {
        let empties: Vec<usize> = board.empty_cells().collect();
        let next = board.play(*empties.choose(&mut rng).unwrap(), mover).unwrap();
        if winner(&next).unwrap().is_over() {
            break;
        }
        board = next;
        mover = mover.opponent();
    }
    (board, mover)
}

fn wins_immediately(board: &Board, player: Player) -> bool {
    board
        .empty_cells()
        .any(|c| winner(&board.play(c, player).unwrap()).unwrap().winner() == Some(player))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn rule_player_never_misses_a_win(plies in 0usize..8, seed in any::<u64>()) {
        let (board, mover) = random_position(plies, seed);
        let mut rng = mcnn::rng::seeded(seed ^ 1);
        let (cell, _) = rule_based_move(&board, mover, &mut rng).unwrap();
        prop_assert_eq!(board.get(cell), 0);
        if wins_immediately(&board, mover) {
            let after = board.play(cell, mover).unwrap();
            prop_assert_eq!(winner(&after).unwrap().winner(), Some(mover));
        }
    }
}

#[test]
fn winner_pairs_add_exactly_one_own_mark() {
    let (games, pairs) = simulate_training_games(10_000, 8).unwrap();
    assert_eq!(games.len(), 10_000);
    assert!(!pairs.is_empty());
    for p in &pairs {
        let diff: Vec<usize> = (0..9).filter(|&i| p.before.get(i) != p.after.get(i)).collect();
        assert_eq!(diff.len(), 1);
        assert_eq!((p.before.get(diff[0]), p.after.get(diff[0])), (0, 1));
    }
    let decided = games.iter().filter(|g| g.outcome != GameOutcome::Draw).count();
    assert!(decided > 0 && decided < games.len());
}

#[test]
fn games_are_seeded_and_legal() {
    let net = mcnn::nn::init_network(&mcnn::nn::LayerSpec::chain(&[10, 12, 9]), 1).unwrap();
    for seed in 0..50 {
        for first in [FirstMover::Network, FirstMover::Rules] {
            let g = play_game(&net, first, seed).unwrap();
            assert_eq!(g, play_game(&net, first, seed).unwrap());
            let mut board = Board::empty();
            for m in &g.moves {
                assert_eq!(m.board_before, board);
                board = board.play(m.cell, m.mover).unwrap();
            }
            assert_eq!(winner(&board).unwrap(), g.outcome);
        }
    }
}

#[test]
fn tallies_conserve_games() {
    let net = mcnn::nn::init_network(&mcnn::nn::LayerSpec::chain(&[10, 12, 9]), 1).unwrap();
    for n in [1, 7, 100] {
        assert_eq!(evaluate(&net, n, 3).unwrap().games(), n);
        assert_eq!(rules_vs_rules(n, 3).unwrap().games(), n);
    }
}

#[test]
fn reaction_distribution_has_no_mass_on_occupied_cells() {
    let net = mcnn::nn::init_network(&mcnn::nn::LayerSpec::chain(&[10, 12, 9]), 5).unwrap();
    let board = Board::new([0, 0, 0, 0, -1, 0, 0, 0, 0]).unwrap();
    let d = reaction_distribution(&net, &board, Player::O, 500, 1).unwrap();
    assert_eq!(d.probs()[4], 0.0);
    assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

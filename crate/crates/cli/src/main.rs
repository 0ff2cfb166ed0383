mod meta;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mcnn::nn::{load_model, save_model, Network};
use mcnn::text::{self, CharDatasetSpec, TextTraining, WordDictionary};
use mcnn::tictactoe::{self as ttt, Board, Player, TttTraining};
use mcnn::walker::{self, TableSource, WalkerModel, WalkerTraining};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mcnn", version, about = "Markov chain networks: training, simulation, evaluation and serving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random walkers driven by a trained network.
    #[command(subcommand)]
    Walker(WalkerCmd),
    /// Tic-Tac-Toe data, training and evaluation.
    #[command(subcommand)]
    Ttt(TttCmd),
    /// Character- and word-level text synthesis.
    #[command(subcommand)]
    Text(TextCmd),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum WalkerCmd {
    Train(WalkerTrainArgs),
    Run(WalkerRunArgs),
}

#[derive(Subcommand)]
enum TttCmd {
    Simulate(TttSimulateArgs),
    Train(TttTrainArgs),
    Eval(TttEvalArgs),
    Probe(TttProbeArgs),
}

#[derive(Subcommand)]
enum TextCmd {
    Train(TextTrainArgs),
    Synth(TextSynthArgs),
}

#[derive(Args, Serialize)]
struct WalkerTrainArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Comma-separated hidden widths.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    pairs_per_state: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Estimate the transition table from this many simulated steps instead
    /// of reading it off the chain.
    #[arg(long)]
    from_simulation: Option<usize>,
}

#[derive(Args, Serialize)]
struct WalkerRunArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory CSV `step,x,y[,z]`.
    #[arg(long)]
    traj: Option<PathBuf>,
    /// Visit statistics CSV `state,label,visits,frequency`.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TttSimulateArgs {
    #[arg(long)]
    games: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct TttTrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    pairs_per_input: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Play evaluation games every N epochs and write them to `--eval-csv`.
    #[arg(long, requires = "eval_csv")]
    eval_every: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    eval_games: usize,
    #[arg(long)]
    eval_csv: Option<PathBuf>,
    /// Per-epoch loss CSV `epoch,loss`.
    #[arg(long)]
    loss_csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TttEvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1000)]
    games: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the log of one network-first game played with `--seed`.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TttProbeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Nine comma-separated cells in {-1, 0, 1}.
    #[arg(long, allow_hyphen_values = true)]
    board: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Mover sign; inferred from the mark counts when omitted.
    #[arg(long, allow_hyphen_values = true)]
    player: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reaction CSV `cell,frequency`; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TextMode {
    Char,
    Word,
}

#[derive(Args, Serialize)]
struct TextTrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = TextMode::Char)]
    mode: TextMode,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    pairs_per_input: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    /// Character context length (char mode).
    #[arg(long, default_value_t = text::CONTEXT_LEN)]
    context: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize)]
struct TextSynthArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    seed_text: String,
    #[arg(long, default_value_t = 500)]
    length: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ServeArgs {
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Walker(WalkerCmd::Train(a)) => walker_train(a),
        Command::Walker(WalkerCmd::Run(a)) => walker_run(a),
        Command::Ttt(TttCmd::Simulate(a)) => ttt_simulate(a),
        Command::Ttt(TttCmd::Train(a)) => ttt_train(a),
        Command::Ttt(TttCmd::Eval(a)) => ttt_eval(a),
        Command::Ttt(TttCmd::Probe(a)) => ttt_probe(a),
        Command::Text(TextCmd::Train(a)) => text_train(a),
        Command::Text(TextCmd::Synth(a)) => text_synth(a),
        Command::Serve(a) => serve(a),
    }
}

/// Fills in an entropy seed when none was given, so the sidecar records it.
fn resolve(seed: &mut Option<u64>) -> u64 {
    *seed.get_or_insert_with(rand::random)
}

fn read_model(path: &Path) -> Result<Network> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    load_model(&bytes).with_context(|| format!("loading {}", path.display()))
}

fn write_model(path: &Path, net: &Network) -> Result<()> {
    std::fs::write(path, save_model(net)).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> mcnn::Result<()>,
{
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn walker_train(mut a: WalkerTrainArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    let model = WalkerModel::new(a.dim as usize)?;
    let mut cfg = WalkerTraining::for_dimension(a.dim as usize);
    cfg.seed = seed;
    cfg.train.rng_seed = seed;
    if let Some(v) = a.epochs {
        cfg.train.epochs = v;
    }
    if let Some(v) = a.lr {
        cfg.train.learning_rate = v;
    }
    if let Some(v) = a.batch_size {
        cfg.train.batch_size = v;
    }
    if let Some(v) = &a.hidden {
        cfg.hidden = v.clone();
    }
    if let Some(v) = a.pairs_per_state {
        cfg.pairs_per_state = v;
    }
    if let Some(steps) = a.from_simulation {
        cfg.source = TableSource::Simulated { steps };
    }
    let net = walker::train_walker_net(&model, &cfg)?;
    write_model(&a.out, &net)?;
    let agreement = walker::grid_agreement(&net, model.chain())?;
    let worst = agreement.iter().cloned().fold(1.0, f64::min);
    println!("trained {}-state walker; worst r-grid agreement {:.3}", model.states(), worst);
    meta::write_sidecar("walker train", &a, &[("seed", seed)], &[&a.out])
}

fn walker_run(mut a: WalkerRunArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    let net = read_model(&a.model)?;
    let n = net.output_dim();
    if n % 2 != 0 || net.input_dim() != n + 1 || !(4..=6).contains(&n) {
        bail!("{} is not a walker model", a.model.display());
    }
    let model = WalkerModel::new(n / 2)?;
    if a.start >= n {
        bail!("start state {} out of range 0..{n}", a.start);
    }
    let states = walker::run_net_walk(&net, a.start, a.steps, seed)?;
    let steps = &states[1..];

    let mut written: Vec<&Path> = Vec::new();
    if let Some(path) = &a.traj {
        let traj = walker::states_to_trajectory(steps, &model)?;
        write_with(path, |w| walker::write_trajectory_csv(&traj, w))?;
        written.push(path);
    }
    if let Some(path) = &a.stats {
        write_with(path, |w| walker::write_frequency_csv(&states, &model, w))?;
        written.push(path);
    }

    let freq = walker::visit_frequencies(&states, n)?;
    let repeats = states.windows(2).filter(|w| w[0] == w[1]).count();
    let est = walker::empirical_transition(&states, n)?;
    let worst_l1 = (0..n)
        .filter(|&j| !est.unvisited[j])
        .map(|j| est.column_l1(model.chain(), j))
        .fold(0.0, f64::max);
    let freqs: Vec<String> = freq.probs().iter().map(|p| format!("{p:.4}")).collect();
    println!("frequencies {}", freqs.join(" "));
    println!("immediate repeats {repeats}; worst column L1 {worst_l1:.4}");
    meta::write_sidecar("walker run", &a, &[("seed", seed)], &written)
}

fn ttt_simulate(mut a: TttSimulateArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    if a.games == 0 {
        bail!("--games must be positive");
    }
    let (games, pairs) = ttt::simulate_training_games(a.games, seed)?;
    write_with(&a.out, |w| ttt::write_pairs(&pairs, w))?;
    let draws = games.iter().filter(|g| g.outcome == ttt::GameOutcome::Draw).count();
    println!("{} games, {} draws, {} winner pairs", games.len(), draws, pairs.len());
    meta::write_sidecar("ttt simulate", &a, &[("seed", seed)], &[&a.out])
}

fn ttt_train(mut a: TttTrainArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    let file = File::open(&a.data).with_context(|| format!("opening {}", a.data.display()))?;
    let pairs = ttt::read_pairs(std::io::BufReader::new(file))?;
    let mut cfg = TttTraining { seed, ..TttTraining::default() };
    cfg.train.rng_seed = seed;
    if let Some(v) = a.epochs {
        cfg.train.epochs = v;
    }
    if let Some(v) = a.lr {
        cfg.train.learning_rate = v;
    }
    if let Some(v) = a.batch_size {
        cfg.train.batch_size = v;
    }
    if let Some(v) = a.pairs_per_input {
        cfg.pairs_per_input = v;
    }
    if a.eval_every == Some(0) {
        bail!("--eval-every must be positive");
    }

    let mut evals = Vec::new();
    let mut eval_err = None;
    let (net, history, _) = ttt::train_ttt_net(&pairs, &cfg, |epoch, net, _| {
        if let Some(k) = a.eval_every {
            if (epoch + 1) % k == 0 {
                match ttt::evaluate(net, a.eval_games, seed) {
                    Ok(t) => evals.push((epoch + 1, t)),
                    Err(e) => {
                        eval_err = Some(e);
                        return std::ops::ControlFlow::Break(());
                    }
                }
            }
        }
        std::ops::ControlFlow::Continue(())
    })?;
    if let Some(e) = eval_err {
        return Err(e.into());
    }
    write_model(&a.out, &net)?;
    let mut written: Vec<&Path> = vec![&a.out];
    if let Some(path) = &a.eval_csv {
        write_with(path, |w| ttt::write_evaluation_csv(&evals, w))?;
        written.push(path);
    }
    if let Some(path) = &a.loss_csv {
        let mut w = create(path)?;
        writeln!(w, "epoch,loss")?;
        for (i, l) in history.iter().enumerate() {
            writeln!(w, "{},{l}", i + 1)?;
        }
        w.flush()?;
        written.push(path);
    }
    println!("{} pairs, final loss {:.6}", pairs.len(), history.last().copied().unwrap_or(f64::NAN));
    meta::write_sidecar("ttt train", &a, &[("seed", seed)], &written)
}

fn ttt_eval(mut a: TttEvalArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    if a.games == 0 {
        bail!("--games must be positive");
    }
    let net = read_model(&a.model)?;
    let tally = ttt::evaluate(&net, a.games, seed)?;
    let baseline = ttt::rules_vs_rules(a.games, seed)?;
    println!("wins {} draws {} losses {}", tally.wins, tally.draws, tally.losses);
    println!("baseline wins {} draws {} losses {}", baseline.wins, baseline.draws, baseline.losses);
    let mut written: Vec<&Path> = Vec::new();
    if let Some(path) = &a.log {
        let game = ttt::play_game(&net, ttt::FirstMover::Network, seed)?;
        write_with(path, |w| ttt::write_game_log(&game, w))?;
        written.push(path);
    }
    meta::write_sidecar("ttt eval", &a, &[("seed", seed)], &written)
}

fn parse_board(s: &str) -> Result<Board> {
    let cells = s
        .split(',')
        .map(|c| c.trim().parse::<i64>().with_context(|| format!("bad cell {c:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Board::from_slice(&cells)?)
}

fn ttt_probe(mut a: TttProbeArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    let net = read_model(&a.model)?;
    let board = parse_board(&a.board)?;
    let player = match a.player {
        Some(s) => Player::from_sign(s)?,
        None if board.is_turn_of(Player::X) => Player::X,
        None => Player::O,
    };
    let dist = ttt::reaction_distribution(&net, &board, player, a.trials, seed)?;
    match &a.out {
        Some(path) => {
            write_with(path, |w| ttt::write_reaction_csv(&dist, w))?;
            meta::write_sidecar("ttt probe", &a, &[("seed", seed)], &[path])
        }
        None => Ok(ttt::write_reaction_csv(&dist, std::io::stdout().lock())?),
    }
}

/// Dictionary file stored next to a word model.
fn dictionary_path(model: &Path) -> PathBuf {
    let mut name = model.file_name().unwrap_or_default().to_os_string();
    name.push(".words");
    model.with_file_name(name)
}

fn text_train(mut a: TextTrainArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    let corpus = std::fs::read_to_string(&a.corpus).with_context(|| format!("reading {}", a.corpus.display()))?;
    let mut cfg = match a.mode {
        TextMode::Char => TextTraining::chars(),
        TextMode::Word => TextTraining::words(),
    };
    cfg.seed = seed;
    cfg.train.rng_seed = seed;
    if let Some(v) = a.epochs {
        cfg.train.epochs = v;
    }
    if let Some(v) = a.lr {
        cfg.train.learning_rate = v;
    }
    if let Some(v) = a.batch_size {
        cfg.train.batch_size = v;
    }
    if let Some(v) = a.pairs_per_input {
        cfg.pairs_per_input = v;
    }
    if let Some(v) = &a.hidden {
        cfg.hidden = v.clone();
    }
    let dict_path = dictionary_path(&a.out);
    let mut written: Vec<&Path> = vec![&a.out];
    match a.mode {
        TextMode::Char => {
            let spec = CharDatasetSpec { corpus, context_len: a.context };
            let (net, table) = text::train_char_net(&spec, &cfg)?;
            write_model(&a.out, &net)?;
            println!("{} contexts", table.len());
        }
        TextMode::Word => {
            let (net, dict, table) = text::train_word_net(&corpus, &cfg)?;
            write_model(&a.out, &net)?;
            std::fs::write(&dict_path, dict.to_text())?;
            written.push(&dict_path);
            println!("{} words, {} contexts", dict.len(), table.len());
        }
    }
    meta::write_sidecar("text train", &a, &[("seed", seed)], &written)
}

fn text_synth(mut a: TextSynthArgs) -> Result<()> {
    let seed = resolve(&mut a.seed);
    let net = read_model(&a.model)?;
    let dict_path = dictionary_path(&a.model);
    let out = if dict_path.exists() {
        let dict = WordDictionary::from_text(&std::fs::read_to_string(&dict_path)?)?;
        let tokens = text::tokenize(&a.seed_text);
        text::synthesize_words(&net, &dict, &tokens, a.length, seed)?.join(" ")
    } else {
        text::synthesize_chars(&net, &a.seed_text, a.length, seed)?
    };
    match &a.out {
        Some(path) => {
            std::fs::write(path, &out)?;
            meta::write_sidecar("text synth", &a, &[("seed", seed)], &[path])
        }
        None => {
            println!("{out}");
            Ok(())
        }
    }
}

fn serve(a: ServeArgs) -> Result<()> {
    let cfg = mcnn_service::ServiceConfig::load(&a.config)?;
    let rt = tokio::runtime::Runtime::new()?;
    eprintln!("listening on {}", cfg.bind_address);
    rt.block_on(mcnn_service::serve(&cfg))?;
    Ok(())
}

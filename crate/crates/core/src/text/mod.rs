//! Character- and word-level synthesis with the random-value input.
//!
//! Both models are ordinary n-gram samplers: the empirical next-symbol
//! distribution of every context is expanded into augmented pairs and the
//! network learns to pick an outcome from `r`.

use std::collections::HashMap;

use crate::markov::{augment, estimate_empirical, generate_pairs, pairs_to_dataset, EmpiricalConditional};
use crate::nn::{argmax_decode, init_network, one_hot, train, Dataset, LayerSpec, Network, TrainConfig};
use crate::{rng, Error, Result};

pub const CONTEXT_LEN: usize = 7;
pub const CHAR_CLASSES: usize = 256;
pub const WORD_WINDOW: usize = 6;

/// Traditional verses, about 7,000 characters.
pub const BUNDLED_CORPUS: &str = include_str!("../../data/verses.txt");

/// Code of `c`, with anything outside `0..256` replaced by `'?'`.
pub fn char_code(c: char) -> u8 {
    u8::try_from(u32::from(c)).unwrap_or(b'?')
}

pub fn encode_chars(text: &str) -> Vec<u8> {
    text.chars().map(char_code).collect()
}

/// Codes scaled into `[0, 1]`.
pub fn encode_context(codes: &[u8]) -> Vec<f64> {
    codes.iter().map(|&c| f64::from(c) / 255.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharDatasetSpec {
    pub corpus: String,
    pub context_len: usize,
}

impl CharDatasetSpec {
    pub fn new(corpus: impl Into<String>) -> Self {
        Self { corpus: corpus.into(), context_len: CONTEXT_LEN }
    }

    fn codes(&self) -> Result<Vec<u8>> {
        if self.context_len == 0 {
            return Err(Error::input("context length must be positive"));
        }
        let codes = encode_chars(&self.corpus);
        if codes.len() <= self.context_len {
            return Err(Error::input(format!(
                "corpus has {} characters, needs more than {}",
                codes.len(),
                self.context_len
            )));
        }
        Ok(codes)
    }
}

/// One `(context, next char)` pair per corpus position, without `r`.
pub fn build_char_dataset(spec: &CharDatasetSpec) -> Result<Dataset> {
    let codes = spec.codes()?;
    Dataset::new(
        codes
            .windows(spec.context_len + 1)
            .map(|w| (encode_context(&w[..spec.context_len]), one_hot(CHAR_CLASSES, w[spec.context_len] as usize)))
            .collect(),
    )
}

/// Next-character table of the corpus.
pub fn char_table(spec: &CharDatasetSpec) -> Result<EmpiricalConditional> {
    let data = build_char_dataset(spec)?;
    estimate_empirical(data.pairs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextTraining {
    pub hidden: Vec<usize>,
    pub pairs_per_input: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

impl TextTraining {
    /// `[8 : 128 : 256]`.
    pub fn chars() -> Self {
        Self {
            hidden: vec![128],
            pairs_per_input: 16,
            train: TrainConfig { learning_rate: 3.0, epochs: 40, batch_size: 4, rng_seed: 1, shuffle: true },
            seed: 1,
        }
    }

    /// `[|dict|+1 : 64 : 64 : 64 : |dict|]`.
    pub fn words() -> Self {
        Self {
            hidden: vec![64, 64, 64],
            pairs_per_input: 16,
            train: TrainConfig { learning_rate: 0.5, epochs: 60, batch_size: 4, rng_seed: 1, shuffle: true },
            seed: 1,
        }
    }
}

fn train_on_table(table: &EmpiricalConditional, cfg: &TextTraining) -> Result<Network> {
    let data = pairs_to_dataset(generate_pairs(table, cfg.pairs_per_input, cfg.seed)?)?;
    let mut widths = vec![data.input_dim()];
    widths.extend(&cfg.hidden);
    widths.push(data.target_dim());
    let net = init_network(&LayerSpec::chain(&widths), cfg.seed.wrapping_add(1))?;
    Ok(train(net, &data, &cfg.train)?.0)
}

/// Trains a character net and returns it with the corpus table.
pub fn train_char_net(spec: &CharDatasetSpec, cfg: &TextTraining) -> Result<(Network, EmpiricalConditional)> {
    let table = char_table(spec)?;
    Ok((train_on_table(&table, cfg)?, table))
}

/// Decoded next character code for `context` under switch value `r`.
pub fn next_char(net: &Network, context: &[u8], r: f64) -> Result<u8> {
    if context.len() + 1 != net.input_dim() {
        return Err(Error::shape(format!(
            "context has {} characters, network expects {}",
            context.len(),
            net.input_dim().saturating_sub(1)
        )));
    }
    if net.output_dim() != CHAR_CLASSES {
        return Err(Error::shape(format!("character network must have {CHAR_CLASSES} outputs")));
    }
    Ok(argmax_decode(&net.forward(&augment(&encode_context(context), r)?)?)? as u8)
}

/// Appends `length` sampled characters to `seed_text`.
pub fn synthesize_chars(net: &Network, seed_text: &str, length: usize, rng_seed: u64) -> Result<String> {
    let context_len = net.input_dim().saturating_sub(1);
    let mut codes = encode_chars(seed_text);
    if codes.len() < context_len {
        return Err(Error::input(format!(
            "seed text has {} characters, needs at least {context_len}",
            codes.len()
        )));
    }
    let mut rng = rng::seeded(rng_seed);
    let mut out = String::from(seed_text);
    for _ in 0..length {
        let next = next_char(net, &codes[codes.len() - context_len..], rng::unit(&mut rng))?;
        codes.push(next);
        out.push(char::from(next));
    }
    Ok(out)
}

/// Whitespace tokenization; punctuation stays attached.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

/// Distinct tokens in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordDictionary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl WordDictionary {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let mut dict = Self { words: Vec::new(), index: HashMap::new() };
        for t in tokens {
            let t = t.as_ref();
            if !dict.index.contains_key(t) {
                dict.index.insert(t.to_owned(), dict.words.len());
                dict.words.push(t.to_owned());
            }
        }
        dict
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, i: usize) -> Option<&str> {
        self.words.get(i).map(String::as_str)
    }

    /// One word per line.
    pub fn to_text(&self) -> String {
        self.words.iter().map(|w| format!("{w}\n")).collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let words: Vec<&str> = text.lines().collect();
        if let Some(w) = words.iter().find(|w| w.is_empty() || w.contains(char::is_whitespace)) {
            return Err(Error::parse(format!("invalid dictionary entry {w:?}")));
        }
        let dict = Self::from_tokens(&words);
        if dict.len() != words.len() {
            return Err(Error::parse("dictionary has duplicate entries"));
        }
        Ok(dict)
    }
}

/// Position `i` (1 = oldest) of the window gets weight `1/(window+1-i)`, so
/// the most recent word weighs 1. Repeated tokens keep the larger weight.
pub fn word_context_vector<S: AsRef<str>>(context: &[S], dict: &WordDictionary) -> Result<Vec<f64>> {
    let window = context.len();
    let mut v = vec![0.0_f64; dict.len()];
    for (pos, token) in context.iter().enumerate() {
        let token = token.as_ref();
        let idx = dict
            .index_of(token)
            .ok_or_else(|| Error::input(format!("unknown token {token:?}")))?;
        let w = 1.0 / (window - pos) as f64;
        v[idx] = v[idx].max(w);
    }
    Ok(v)
}

/// One `(context vector, next word)` pair per position after the first
/// `window` tokens, without `r`.
pub fn build_word_dataset<S: AsRef<str>>(tokens: &[S], dict: &WordDictionary, window: usize) -> Result<Dataset> {
    if window == 0 || tokens.len() <= window {
        return Err(Error::input(format!(
            "need more than {window} tokens, got {}",
            tokens.len()
        )));
    }
    let mut pairs = Vec::with_capacity(tokens.len() - window);
    for w in tokens.windows(window + 1) {
        let next = w[window].as_ref();
        let idx = dict
            .index_of(next)
            .ok_or_else(|| Error::input(format!("unknown token {next:?}")))?;
        pairs.push((word_context_vector(&w[..window], dict)?, one_hot(dict.len(), idx)));
    }
    Dataset::new(pairs)
}

/// Trains a word net on `text`, returning it with its dictionary and table.
pub fn train_word_net(text: &str, cfg: &TextTraining) -> Result<(Network, WordDictionary, EmpiricalConditional)> {
    let tokens = tokenize(text);
    let dict = WordDictionary::from_tokens(&tokens);
    let table = estimate_empirical(build_word_dataset(&tokens, &dict, WORD_WINDOW)?.pairs())?;
    Ok((train_on_table(&table, cfg)?, dict, table))
}

/// Appends `length` sampled words to `seed` (at least `WORD_WINDOW` tokens).
pub fn synthesize_words<S: AsRef<str>>(
    net: &Network,
    dict: &WordDictionary,
    seed: &[S],
    length: usize,
    rng_seed: u64,
) -> Result<Vec<String>> {
    if net.input_dim() != dict.len() + 1 || net.output_dim() != dict.len() {
        return Err(Error::shape("network does not match the dictionary"));
    }
    if seed.len() < WORD_WINDOW {
        return Err(Error::input(format!("seed needs at least {WORD_WINDOW} words")));
    }
    let mut words: Vec<String> = seed.iter().map(|s| s.as_ref().to_owned()).collect();
    let mut rng = rng::seeded(rng_seed);
    for _ in 0..length {
        let x = word_context_vector(&words[words.len() - WORD_WINDOW..], dict)?;
        let idx = argmax_decode(&net.forward(&augment(&x, rng::unit(&mut rng))?)?)?;
        words.push(dict.words[idx].clone());
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Layer};

    #[test]
    fn single_window_gives_one_pair() {
        let data = build_char_dataset(&CharDatasetSpec::new("abcdefgh")).unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(argmax_decode(&data.targets()[0]).unwrap(), 104);
        assert_eq!(data.inputs()[0][0], 97.0 / 255.0);
    }

    #[test]
    fn repeated_char_corpus() {
        let data = build_char_dataset(&CharDatasetSpec::new("z".repeat(100))).unwrap();
        assert_eq!(data.len(), 93);
        assert!(data.pairs().all(|(x, t)| x == data.inputs()[0].as_slice() && t == data.targets()[0].as_slice()));
    }

    #[test]
    fn ambiguous_context_counts() {
        let table = char_table(&CharDatasetSpec::new("aaaaaaab aaaaaaac aaaaaaab")).unwrap();
        let e = table.get(&encode_context(b"aaaaaaa")).unwrap();
        assert_eq!(e.total(), 3);
        assert!((e.probability_of(&one_hot(256, 98)) - 2.0 / 3.0).abs() < 1e-12);
        assert!((e.probability_of(&one_hot(256, 99)) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn corpus_too_short() {
        assert!(build_char_dataset(&CharDatasetSpec::new("abcdefg")).is_err());
    }

    #[test]
    fn wide_chars_become_question_marks() {
        assert_eq!(char_code('é'), 0xe9);
        assert_eq!(char_code('€'), b'?');
        assert_eq!(encode_chars("a–b"), vec![b'a', b'?', b'b']);
    }

    #[test]
    fn one_hot_targets_decode_to_their_code() {
        let text = "Hello, world! 0123";
        let data = build_char_dataset(&CharDatasetSpec::new(text)).unwrap();
        for (t, c) in data.targets().iter().zip(text.bytes().skip(7)) {
            assert_eq!(argmax_decode(t).unwrap(), c as usize);
        }
    }

    #[test]
    fn context_weights() {
        let toks = ["a", "b", "c", "d", "e", "f"];
        let dict = WordDictionary::from_tokens(&toks);
        let v = word_context_vector(&toks, &dict).unwrap();
        assert_eq!(v, vec![1.0 / 6.0, 1.0 / 5.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0, 1.0]);

        let same = ["x"; 6];
        let v = word_context_vector(&same, &WordDictionary::from_tokens(&same)).unwrap();
        assert_eq!(v, vec![1.0]);

        let toks = ["p", "q", "r", "s", "q", "t"];
        let dict = WordDictionary::from_tokens(&toks);
        assert_eq!(word_context_vector(&toks, &dict).unwrap()[dict.index_of("q").unwrap()], 0.5);

        assert!(word_context_vector(&["zz"; 6], &dict).is_err());
    }

    #[test]
    fn word_dataset_shapes() {
        let toks = tokenize("one two three four five six seven eight");
        let dict = WordDictionary::from_tokens(&toks);
        let data = build_word_dataset(&toks, &dict, WORD_WINDOW).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.input_dim(), 8);
        assert_eq!(data.target_dim(), 8);
        assert!(build_word_dataset(&toks[..6], &dict, WORD_WINDOW).is_err());
    }

    #[test]
    fn dictionary_of_950_words() {
        let toks: Vec<String> = (0..950).map(|i| format!("w{i}")).collect();
        let dict = WordDictionary::from_tokens(&toks);
        let data = build_word_dataset(&toks, &dict, WORD_WINDOW).unwrap();
        let table = estimate_empirical(data.pairs()).unwrap();
        let pairs = generate_pairs(&table, 1, 0).unwrap();
        assert_eq!(pairs[0].input.len(), 951);
        assert_eq!(pairs[0].target.len(), 950);
    }

    #[test]
    fn tokenization_keeps_punctuation() {
        assert_eq!(tokenize("  Hi, there.\nBye!\t"), vec!["Hi,", "there.", "Bye!"]);
    }

    #[test]
    fn dictionary_text_round_trip() {
        let dict = WordDictionary::from_tokens(&tokenize("a b a c, d."));
        assert_eq!(WordDictionary::from_text(&dict.to_text()).unwrap(), dict);
        assert!(WordDictionary::from_text("a\na\n").is_err());
        assert!(WordDictionary::from_text("a b\n").is_err());
    }

    #[test]
    fn zero_length_synthesis_returns_seed() {
        let net = init_network(&LayerSpec::chain(&[8, 4, 256]), 0).unwrap();
        assert_eq!(synthesize_chars(&net, "seed text", 0, 1).unwrap(), "seed text");
        assert!(synthesize_chars(&net, "short", 3, 1).is_err());
    }

    #[test]
    fn synthesis_is_seeded() {
        let net = init_network(&LayerSpec::chain(&[8, 16, 256]), 3).unwrap();
        let a = synthesize_chars(&net, "abcdefg", 20, 9).unwrap();
        assert_eq!(a, synthesize_chars(&net, "abcdefg", 20, 9).unwrap());
        assert_eq!(a.chars().count(), 27);
    }

    #[test]
    fn constant_net_emits_its_argmax() {
        let mut bias = vec![0.0; 256];
        bias[b' ' as usize] = 1.0;
        let layer = Layer::from_parts(8, 256, Activation::Linear, vec![0.0; 8 * 256], bias).unwrap();
        let net = Network::from_layers(vec![layer]).unwrap();
        assert_eq!(synthesize_chars(&net, "the cat", 3, 0).unwrap(), "the cat   ");
    }

    #[test]
    fn unique_continuation_is_learned() {
        let spec = CharDatasetSpec::new("the cat sat. the cat ran. the cat hid.");
        let table = char_table(&spec).unwrap();
        let cfg = TextTraining {
            hidden: vec![32],
            pairs_per_input: 16,
            train: TrainConfig { learning_rate: 0.5, epochs: 300, batch_size: 4, rng_seed: 1, shuffle: true },
            seed: 2,
        };
        let net = train_on_table(&table, &cfg).unwrap();
        let ctx = table.get(&encode_context(b"the cat")).unwrap();
        assert_eq!(ctx.outcomes.len(), 1);
        for k in 0..100 {
            let r = 0.005 + 0.01 * k as f64;
            assert_eq!(next_char(&net, b"the cat", r).unwrap(), b' ', "r = {r}");
        }
    }

    #[test]
    fn bundled_corpus_size() {
        let n = BUNDLED_CORPUS.chars().count();
        assert!((6000..8000).contains(&n), "{n}");
        assert!(BUNDLED_CORPUS.is_ascii());
    }
}

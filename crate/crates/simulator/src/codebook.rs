use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Code;

pub type Symbol = u8;

/// Data-phase codewords and the accept/reject pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n1: usize,
    words: Vec<Symbol>,
    /// Sent in the control phase when the tentative decision is right.
    pub accept: Vec<Symbol>,
    /// Sent otherwise.
    pub reject: Vec<Symbol>,
}

impl Codebook {
    /// Codebook with the given words, for controlled experiments. Every word
    /// must have the same length.
    pub fn from_words(words: Vec<Vec<Symbol>>, accept: Vec<Symbol>, reject: Vec<Symbol>) -> Self {
        let n1 = words.first().map_or(0, Vec::len);
        assert!(words.iter().all(|w| w.len() == n1), "codewords of unequal length");
        assert_eq!(accept.len(), reject.len(), "accept and reject codewords differ in length");
        Self { n1, words: words.concat(), accept, reject }
    }

    pub fn len(&self) -> usize {
        self.words.len().checked_div(self.n1).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn word(&self, m: usize) -> &[Symbol] {
        &self.words[m * self.n1..(m + 1) * self.n1]
    }
}

/// The RNG stream behind the codebook; trial `i` uses stream `i + 1`.
pub(crate) fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Each codeword is an independent uniform permutation of the composition.
/// The accept/reject pair lists the control pairs in row-major order; on a
/// memoryless channel only their joint type matters.
pub fn build_codebook(code: &Code) -> Codebook {
    let mut rng = stream(code.seed, 0);
    let base: Vec<Symbol> = code.composition.iter().enumerate().flat_map(|(a, &c)| std::iter::repeat_n(a as Symbol, c)).collect();
    let mut words = Vec::with_capacity(code.messages * code.n1);
    let mut word = base.clone();
    for _ in 0..code.messages {
        word.shuffle(&mut rng);
        words.extend_from_slice(&word);
    }
    let nx = code.w.nx();
    let (mut accept, mut reject) = (Vec::with_capacity(code.n2()), Vec::with_capacity(code.n2()));
    for (i, &c) in code.control.iter().enumerate() {
        accept.extend(std::iter::repeat_n((i / nx) as Symbol, c));
        reject.extend(std::iter::repeat_n((i % nx) as Symbol, c));
    }
    Codebook { n1: code.n1, words, accept, reject }
}

//! Lossless typical-set codec and the announced-outcome bijection.
//!
//! The codec maps the lexicographically ranked typical set onto fixed-length
//! base-|A| codewords. Ranks at or beyond the set size have no preimage; they
//! are carried as explicit overflow words so the announced-outcome bijection
//! stays total on the full codeword group.

use super::TypicalSet;
use crate::error::{Error, Result};

/// Element of the codec's extended domain: a typical sequence or an overflow
/// rank without a typical preimage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypicalWord {
    Member(Vec<u8>),
    Overflow(usize),
}

impl TypicalWord {
    pub fn as_member(&self) -> Option<&Vec<u8>> {
        match self {
            TypicalWord::Member(s) => Some(s),
            TypicalWord::Overflow(_) => None,
        }
    }
}

/// Fixed-length lossless compressor for the typical set.
#[derive(Debug, Clone)]
pub struct Codec {
    typical: TypicalSet,
    code_len: usize,
    eta: f64,
}

impl Codec {
    /// Build a codec with code length `ceil(n (H + eta))` digits; `eta = None`
    /// picks the smallest lossless length.
    pub fn new(typical: TypicalSet, eta: Option<f64>) -> Result<Self> {
        let k = typical.spec().alphabet_size();
        let n = typical.spec().n();
        let h = typical.spec().entropy_bits();
        let needed = min_lossless_len(k, typical.len());
        let (code_len, eta_eff) = match eta {
            None => (needed, (needed as f64 / n as f64 - h).max(0.0)),
            Some(e) => {
                if e < 0.0 {
                    return Err(Error::Config("eta must be non-negative".into()));
                }
                let len = (n as f64 * (h + e)).ceil() as usize;
                (len, e)
            }
        };
        if code_len < needed {
            return Err(Error::LossyCodec(format!(
                "code length {code_len} cannot address {} typical sequences",
                typical.len()
            )));
        }
        if (k as u128).checked_pow(code_len as u32).is_none() || code_len > 96 {
            return Err(Error::CapacityExceeded(format!("code length {code_len} too large")));
        }
        Ok(Self { typical, code_len, eta: eta_eff })
    }

    pub fn typical(&self) -> &TypicalSet {
        &self.typical
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alphabet_size(&self) -> usize {
        self.typical.spec().alphabet_size()
    }

    /// Number of codewords `|A|^L`, the key dimension of the resource state.
    pub fn codeword_count(&self) -> u128 {
        (self.alphabet_size() as u128).pow(self.code_len as u32)
    }

    /// Encode a typical sequence; atypical input yields the empty sentinel.
    pub fn encode(&self, seq: &[u8]) -> Option<Vec<u8>> {
        let rank = self.typical.rank(seq)?;
        Some(self.digits_of_rank(rank))
    }

    /// Decode a codeword; out-of-range ranks yield the empty sentinel.
    pub fn decode(&self, codeword: &[u8]) -> Option<Vec<u8>> {
        let rank = self.rank_of_digits(codeword)?;
        self.typical.member(rank).cloned()
    }

    /// Base-|A| expansion of a rank, most significant digit first.
    pub fn digits_of_rank(&self, rank: usize) -> Vec<u8> {
        let k = self.alphabet_size();
        let mut digits = vec![0u8; self.code_len];
        let mut rem = rank;
        for slot in digits.iter_mut().rev() {
            *slot = (rem % k) as u8;
            rem /= k;
        }
        debug_assert_eq!(rem, 0, "rank exceeds the codeword space");
        digits
    }

    /// Value of a codeword as a rank; `None` when digits are out of range.
    pub fn rank_of_digits(&self, digits: &[u8]) -> Option<usize> {
        if digits.len() != self.code_len {
            return None;
        }
        let k = self.alphabet_size();
        let mut value = 0usize;
        for &d in digits {
            if d as usize >= k {
                return None;
            }
            value = value * k + d as usize;
        }
        Some(value)
    }

    /// Total bijection between the extended domain and codeword digits.
    pub fn word_to_digits(&self, word: &TypicalWord) -> Result<Vec<u8>> {
        match word {
            TypicalWord::Member(s) => self
                .encode(s)
                .ok_or_else(|| Error::Atypical(format!("{s:?}"))),
            TypicalWord::Overflow(rank) => {
                if *rank < self.typical.len() || (*rank as u128) >= self.codeword_count() {
                    return Err(Error::Domain(format!("overflow rank {rank} out of range")));
                }
                Ok(self.digits_of_rank(*rank))
            }
        }
    }

    pub fn digits_to_word(&self, digits: &[u8]) -> Result<TypicalWord> {
        let rank = self
            .rank_of_digits(digits)
            .ok_or_else(|| Error::Domain(format!("bad codeword {digits:?}")))?;
        Ok(match self.typical.member(rank) {
            Some(s) => TypicalWord::Member(s.clone()),
            None => TypicalWord::Overflow(rank),
        })
    }
}

fn min_lossless_len(k: usize, set_size: usize) -> usize {
    let mut len = 0usize;
    let mut cap: u128 = 1;
    while cap < set_size as u128 {
        cap *= k as u128;
        len += 1;
    }
    len
}

/// The announced-outcome bijection: digit-wise subtract the codeword of the
/// input from the announced word `x` and decode.
#[derive(Debug, Clone)]
pub struct BetaMap<'a> {
    codec: &'a Codec,
    x: Vec<u8>,
}

impl<'a> BetaMap<'a> {
    pub fn new(codec: &'a Codec, x: Vec<u8>) -> Result<Self> {
        if codec.rank_of_digits(&x).is_none() {
            return Err(Error::Domain(format!("announced word {x:?} is not a codeword")));
        }
        Ok(Self { codec, x })
    }

    pub fn announced(&self) -> &[u8] {
        &self.x
    }

    fn subtract_x(&self, digits: &[u8]) -> Vec<u8> {
        let k = self.codec.alphabet_size() as i32;
        digits
            .iter()
            .zip(&self.x)
            .map(|(&c, &x)| ((c as i32 - x as i32).rem_euclid(k)) as u8)
            .collect()
    }

    fn add_x(&self, digits: &[u8]) -> Vec<u8> {
        let k = self.codec.alphabet_size() as i32;
        digits
            .iter()
            .zip(&self.x)
            .map(|(&c, &x)| ((c as i32 + x as i32).rem_euclid(k)) as u8)
            .collect()
    }

    fn negate(&self, digits: &[u8]) -> Vec<u8> {
        let k = self.codec.alphabet_size() as i32;
        digits.iter().map(|&c| ((-(c as i32)).rem_euclid(k)) as u8).collect()
    }

    /// Forward map on the extended domain: decode(x digit-minus encode(w)).
    pub fn apply_word(&self, word: &TypicalWord) -> Result<TypicalWord> {
        let digits = self.codec.word_to_digits(word)?;
        let shifted = self.negate(&self.subtract_x(&digits));
        self.codec.digits_to_word(&shifted)
    }

    /// Forward map on a typical sequence.
    pub fn apply(&self, seq: &[u8]) -> Result<TypicalWord> {
        if self.codec.typical().rank(seq).is_none() {
            return Err(Error::Atypical(format!("{seq:?}")));
        }
        self.apply_word(&TypicalWord::Member(seq.to_vec()))
    }

    /// Inverse map, composed as the reverse chain (negate, then add x).
    pub fn invert_word(&self, word: &TypicalWord) -> Result<TypicalWord> {
        let digits = self.codec.word_to_digits(word)?;
        let shifted = self.add_x(&self.negate(&digits));
        self.codec.digits_to_word(&shifted)
    }
}

//! Strongly typical sets and the classical combinatorics behind dilution.
//!
//! Membership is decided by exact rational arithmetic (integer count windows
//! cleared of denominators), never by floating comparisons. Set masses are
//! exact big rationals accumulated per type class.

mod codec;
mod plan;

pub use codec::{BetaMap, Codec, TypicalWord};
pub use plan::{build_permutation_plan, f_mismatch, PermutationPlan};

use crate::error::{Error, Result};
use crate::report::BoundReport;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational used for source parameters.
pub type Rational = Ratio<i64>;

/// A cell content drawn from the alphabet or the blank filler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Sym(u8),
    Blank,
}

impl std::fmt::Display for Mark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mark::Sym(a) => write!(f, "{a}"),
            Mark::Blank => write!(f, "_"),
        }
    }
}

/// Parse "p/q" or a decimal string into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad_rational(t))?;
        let d: i64 = den.trim().parse().map_err(|_| bad_rational(t))?;
        if d == 0 {
            return Err(bad_rational(t));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let digits = frac_part.len() as u32;
        if digits > 15 {
            return Err(bad_rational(t));
        }
        let scale = 10i64.pow(digits);
        let whole: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad_rational(t))? };
        let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad_rational(t))? };
        let sign = if t.starts_with('-') { -1 } else { 1 };
        return Ok(Rational::new(whole.abs() * scale + frac, scale) * Rational::from_integer(sign));
    }
    let n: i64 = t.parse().map_err(|_| bad_rational(t))?;
    Ok(Rational::from_integer(n))
}

fn bad_rational(t: &str) -> Error {
    Error::Config(format!("cannot parse {t:?} as a rational"))
}

/// Source description: alphabet, exact symbol probabilities, block length and
/// the typicality width delta.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    alphabet: Vec<String>,
    probs: Vec<Rational>,
    n: usize,
    delta: Rational,
}

impl SourceSpec {
    pub fn new(alphabet: Vec<String>, probs: Vec<Rational>, n: usize, delta: Rational) -> Result<Self> {
        if alphabet.len() < 2 || alphabet.len() > 64 {
            return Err(Error::Config(format!(
                "alphabet size must be in 2..=64, got {}",
                alphabet.len()
            )));
        }
        if probs.len() != alphabet.len() {
            return Err(Error::Config("one probability per symbol required".into()));
        }
        if probs.iter().any(|p| *p <= Rational::zero()) {
            return Err(Error::Config("probabilities must be positive".into()));
        }
        let total: Rational = probs.iter().sum();
        if total != Rational::one() {
            return Err(Error::Config(format!("probabilities sum to {total}, not 1")));
        }
        if n == 0 {
            return Err(Error::Config("need n >= 1".into()));
        }
        if delta <= Rational::zero() {
            return Err(Error::Config("need delta > 0".into()));
        }
        Ok(Self { alphabet, probs, n, delta })
    }

    /// Uniform source over `k` symbols named "0".."k-1".
    pub fn uniform(k: usize, n: usize, delta: Rational) -> Result<Self> {
        let alphabet = (0..k).map(|i| i.to_string()).collect();
        let probs = vec![Rational::new(1, k as i64); k];
        Self::new(alphabet, probs, n, delta)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }

    /// Shannon entropy of the source in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.probs
            .iter()
            .map(|p| {
                let x = p.to_f64().expect("rational fits f64");
                -x * x.log2()
            })
            .sum()
    }

    pub fn symbol_index(&self, name: &str) -> Result<u8> {
        self.alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| i as u8)
            .ok_or_else(|| Error::ForeignSymbol(name.to_string()))
    }

    /// Inclusive integer window `[lo_a, hi_a]` for the count of each symbol:
    /// `|c/n - p| <= delta p` cleared of denominators.
    pub fn count_windows(&self) -> Vec<(i64, i64)> {
        let n = BigRational::from_integer(BigInt::from(self.n));
        let delta = big(self.delta);
        self.probs
            .iter()
            .map(|p| {
                let p = big(*p);
                let lo = &n * &p * (BigRational::one() - &delta);
                let hi = &n * &p * (BigRational::one() + &delta);
                let lo_i = lo.ceil().to_integer().to_i64().expect("window fits i64").max(0);
                let hi_i = hi.floor().to_integer().to_i64().expect("window fits i64").min(self.n as i64);
                (lo_i, hi_i)
            })
            .collect()
    }

    /// Exact strong-typicality membership of a sequence of symbol indices.
    pub fn is_typical(&self, seq: &[u8]) -> Result<bool> {
        if seq.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: seq.len() });
        }
        let counts = self.counts(seq)?;
        let windows = self.count_windows();
        Ok(counts.iter().zip(windows).all(|(&c, (lo, hi))| lo <= c as i64 && c as i64 <= hi))
    }

    pub fn counts(&self, seq: &[u8]) -> Result<Vec<usize>> {
        let mut counts = vec![0usize; self.alphabet_size()];
        for &a in seq {
            if a as usize >= self.alphabet_size() {
                return Err(Error::ForeignSymbol(format!("symbol index {a}")));
            }
            counts[a as usize] += 1;
        }
        Ok(counts)
    }

    /// Exact probability of one sequence drawn i.i.d. from the source.
    pub fn sequence_probability(&self, seq: &[u8]) -> Result<BigRational> {
        let counts = self.counts(seq)?;
        Ok(self.type_probability(&counts))
    }

    fn type_probability(&self, counts: &[usize]) -> BigRational {
        let mut acc = BigRational::one();
        for (p, &c) in self.probs.iter().zip(counts) {
            let bp = big(*p);
            for _ in 0..c {
                acc *= &bp;
            }
        }
        acc
    }

    /// True when the window covers every count vector, i.e. `T = A^n`.
    pub fn is_exact_regime(&self) -> bool {
        self.count_windows().iter().all(|&(lo, hi)| lo <= 0 && hi >= self.n as i64)
    }

    /// Largest mismatch budget `ceil(2 delta n)` of the permutation lemma.
    pub fn l_max(&self) -> usize {
        let v = big(self.delta) * BigRational::from_integer(BigInt::from(2 * self.n));
        v.ceil().to_integer().to_usize().expect("l_max fits usize")
    }
}

fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Empirical distribution (type) of a sequence, exact.
pub fn sequence_type(seq: &[u8], spec: &SourceSpec) -> Result<Vec<Rational>> {
    if seq.len() != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), got: seq.len() });
    }
    let counts = spec.counts(seq)?;
    Ok(counts
        .into_iter()
        .map(|c| Rational::new(c as i64, spec.n() as i64))
        .collect())
}

/// Enumerated strongly typical set with its exact mass.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    spec: SourceSpec,
    members: Vec<Vec<u8>>,
    mass: BigRational,
}

/// Enumerate the strongly delta-typical set; guarded at `|A|^n <= 2^24`.
pub fn enumerate_typical_set(spec: &SourceSpec) -> Result<TypicalSet> {
    let k = spec.alphabet_size() as u128;
    let size = k.checked_pow(spec.n() as u32).unwrap_or(u128::MAX);
    if size > 1 << 24 {
        return Err(Error::EnumerationGuard { size });
    }
    let windows = spec.count_windows();
    let mut members = Vec::new();
    let mut seq = vec![0u8; spec.n()];
    let mut counts = vec![0i64; spec.alphabet_size()];
    enumerate_rec(spec, &windows, &mut seq, &mut counts, 0, &mut members);

    // mass accumulated per type class: multinomial(n; c) * prod p^c
    let mut mass = BigRational::zero();
    let mut type_counts = vec![0i64; spec.alphabet_size()];
    accumulate_mass(spec, &windows, &mut type_counts, 0, spec.n() as i64, &mut mass);
    Ok(TypicalSet { spec: spec.clone(), members, mass })
}

fn enumerate_rec(
    spec: &SourceSpec,
    windows: &[(i64, i64)],
    seq: &mut [u8],
    counts: &mut [i64],
    pos: usize,
    out: &mut Vec<Vec<u8>>,
) {
    let n = spec.n();
    if pos == n {
        out.push(seq.to_vec());
        return;
    }
    let remaining = (n - pos - 1) as i64;
    for a in 0..spec.alphabet_size() {
        counts[a] += 1;
        // prune: no count may exceed its window, and every deficit must
        // still be coverable by the remaining positions
        let feasible = counts[a] <= windows[a].1 && {
            let deficit: i64 = windows
                .iter()
                .zip(counts.iter())
                .map(|(&(lo, _), &c)| (lo - c).max(0))
                .sum();
            deficit <= remaining
        };
        if feasible {
            seq[pos] = a as u8;
            enumerate_rec(spec, windows, seq, counts, pos + 1, out);
        }
        counts[a] -= 1;
    }
}

fn accumulate_mass(
    spec: &SourceSpec,
    windows: &[(i64, i64)],
    type_counts: &mut [i64],
    sym: usize,
    left: i64,
    mass: &mut BigRational,
) {
    if sym == windows.len() {
        if left == 0 {
            let counts: Vec<usize> = type_counts.iter().map(|&c| c as usize).collect();
            *mass += multinomial(spec.n(), &counts) * spec.type_probability(&counts);
        }
        return;
    }
    let (lo, hi) = windows[sym];
    let lo = lo.max(0);
    let hi = hi.min(left);
    for c in lo..=hi {
        type_counts[sym] = c;
        accumulate_mass(spec, windows, type_counts, sym + 1, left - c, mass);
    }
    type_counts[sym] = 0;
}

fn multinomial(n: usize, counts: &[usize]) -> BigRational {
    let mut num = BigInt::one();
    for i in 2..=n {
        num *= BigInt::from(i);
    }
    let mut den = BigInt::one();
    for &c in counts {
        for i in 2..=c {
            den *= BigInt::from(i);
        }
    }
    BigRational::new(num, den)
}

impl TypicalSet {
    pub fn spec(&self) -> &SourceSpec {
        &self.spec
    }

    pub fn members(&self) -> &[Vec<u8>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Exact total probability mass of the set.
    pub fn mass(&self) -> &BigRational {
        &self.mass
    }

    pub fn mass_f64(&self) -> f64 {
        self.mass.to_f64().expect("mass in [0,1]")
    }

    /// Lexicographic rank of a member.
    pub fn rank(&self, seq: &[u8]) -> Option<usize> {
        self.members.binary_search_by(|m| m.as_slice().cmp(seq)).ok()
    }

    pub fn member(&self, rank: usize) -> Option<&Vec<u8>> {
        self.members.get(rank)
    }
}

/// Size bounds `(1-delta) 2^{n(H - eta)} <= |T| <= 2^{n(H + eta)}` with
/// `eta = delta H`. The upper bound holds for every n; the lower bound only
/// for sufficiently large n, and the report records whichever way it lands.
pub fn check_size_bounds(t: &TypicalSet) -> Vec<BoundReport> {
    let spec = t.spec();
    let h = spec.entropy_bits();
    let delta = spec.delta().to_f64().expect("delta fits f64");
    let eta = delta * h;
    let n = spec.n() as f64;
    let size = t.len() as f64;
    let upper = BoundReport::new("typical_size_upper", size.log2(), n * (h + eta), 1e-9)
        .with_param("n", serde_json::json!(spec.n()))
        .with_param("delta", serde_json::json!(delta))
        .with_param("set_size", serde_json::json!(t.len()));
    let lower_value = (1.0 - delta).max(0.0) * (n * (h - eta)).exp2();
    let lower = BoundReport::new("typical_size_lower", lower_value.log2(), size.log2(), 1e-9)
        .with_param("n", serde_json::json!(spec.n()))
        .with_param("delta", serde_json::json!(delta))
        .with_param("set_size", serde_json::json!(t.len()))
        .with_param(
            "note",
            serde_json::json!("lower bound is asymptotic; may fail for small n"),
        );
    vec![upper, lower]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/4").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2));
        assert_eq!(parse_rational("7/9").unwrap(), Rational::new(7, 9));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn paper_example_type() {
        // s = (b,c,c,b,d,b,a,a,c) over {a,b,c,d}
        let spec = SourceSpec::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![Rational::new(1, 4); 4],
            9,
            Rational::new(7, 9),
        )
        .unwrap();
        let s = [1u8, 2, 2, 1, 3, 1, 0, 0, 2];
        let t = sequence_type(&s, &spec).unwrap();
        assert_eq!(t[0], Rational::new(2, 9));
        assert_eq!(t[1], Rational::new(3, 9));
        assert_eq!(t[2], Rational::new(3, 9));
        assert_eq!(t[3], Rational::new(1, 9));
    }

    #[test]
    fn paper_example_strings_are_typical() {
        let spec = SourceSpec::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![Rational::new(1, 4); 4],
            9,
            Rational::new(7, 9),
        )
        .unwrap();
        let s = [1u8, 2, 2, 1, 3, 1, 0, 0, 2];
        let s_hat = [2u8, 1, 1, 2, 2, 3, 0, 3, 2];
        assert!(spec.is_typical(&s).unwrap());
        assert!(spec.is_typical(&s_hat).unwrap());
        assert_eq!(spec.l_max(), 14);
    }

    #[test]
    fn binary_n2_half_delta() {
        let spec = SourceSpec::new(
            vec!["a".into(), "b".into()],
            vec![half(), half()],
            2,
            half(),
        )
        .unwrap();
        let t = enumerate_typical_set(&spec).unwrap();
        // only ab and ba satisfy |c/2 - 1/2| <= 1/4
        assert_eq!(t.members(), &[vec![0u8, 1], vec![1u8, 0]]);
        assert_eq!(*t.mass(), BigRational::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn large_delta_gives_full_set() {
        // delta >= max (1-p)/p makes every count window trivial
        let spec = SourceSpec::uniform(2, 3, Rational::from_integer(1)).unwrap();
        assert!(spec.is_exact_regime());
        let t = enumerate_typical_set(&spec).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(*t.mass(), BigRational::one());
    }

    #[test]
    fn membership_uses_exact_boundaries() {
        // n = 4, p = 1/2, delta = 1/2: window is exactly [1, 3]
        let spec = SourceSpec::uniform(2, 4, half()).unwrap();
        assert!(!spec.is_typical(&[0, 0, 0, 0]).unwrap());
        assert!(spec.is_typical(&[0, 0, 0, 1]).unwrap());
        assert!(spec.is_typical(&[0, 1, 1, 1]).unwrap());
        assert!(!spec.is_typical(&[1, 1, 1, 1]).unwrap());
    }

    #[test]
    fn mass_matches_member_sum() {
        let spec = SourceSpec::new(
            vec!["a".into(), "b".into()],
            vec![Rational::new(1, 4), Rational::new(3, 4)],
            6,
            Rational::new(2, 5),
        )
        .unwrap();
        let t = enumerate_typical_set(&spec).unwrap();
        let mut sum = BigRational::zero();
        for m in t.members() {
            sum += spec.sequence_probability(m).unwrap();
        }
        assert_eq!(sum, *t.mass());
    }

    #[test]
    fn guard_rejects_oversized_enumeration() {
        let spec = SourceSpec::uniform(4, 14, half()).unwrap();
        assert!(matches!(
            enumerate_typical_set(&spec),
            Err(Error::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn size_bounds_upper_always_holds() {
        for n in [4usize, 8, 12] {
            let spec = SourceSpec::uniform(2, n, half()).unwrap();
            let t = enumerate_typical_set(&spec).unwrap();
            let reports = check_size_bounds(&t);
            assert!(reports[0].satisfied, "upper bound must hold at n = {n}");
        }
    }

    #[test]
    fn members_are_lex_sorted_and_rankable() {
        let spec = SourceSpec::uniform(3, 4, Rational::new(9, 10)).unwrap();
        let t = enumerate_typical_set(&spec).unwrap();
        for w in t.members().windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, m) in t.members().iter().enumerate() {
            assert_eq!(t.rank(m), Some(i));
        }
    }
}

//! Mismatch counting and the block/permutation plan used by the dilution
//! permutation step.
//!
//! For typical `s` and `s_hat`, the plan blanks a small set of positions of
//! `s` (the slots) and singles out matching leftover cells of `s_hat`, so
//! that one register permutation rearranges the `s_hat`-ordered cells into
//! the `s`-ordered layout with the problem cells parked in a side register.

use super::{Mark, SourceSpec};
use crate::error::{Error, Result};

/// `f(s, s_hat) = sum_a | |a(s)| - |a(s_hat)| |`.
pub fn f_mismatch(s: &[u8], s_hat: &[u8], alphabet_size: usize) -> Result<usize> {
    if s.len() != s_hat.len() {
        return Err(Error::LengthMismatch { expected: s.len(), got: s_hat.len() });
    }
    let mut counts = vec![0i64; alphabet_size];
    for &a in s {
        if a as usize >= alphabet_size {
            return Err(Error::ForeignSymbol(format!("symbol index {a}")));
        }
        counts[a as usize] += 1;
    }
    for &a in s_hat {
        if a as usize >= alphabet_size {
            return Err(Error::ForeignSymbol(format!("symbol index {a}")));
        }
        counts[a as usize] -= 1;
    }
    Ok(counts.iter().map(|c| c.unsigned_abs() as usize).sum())
}

/// The deterministic rearrangement plan for a typical pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationPlan {
    pub source: Vec<u8>,
    pub shadow: Vec<u8>,
    /// Count mismatch `f(s, s_hat)`.
    pub mismatch: usize,
    /// Blanked positions of `s`, ascending; `min(f, n)` of them.
    pub slots: Vec<usize>,
    /// Positions of `s_hat` parked in the side register, ascending.
    pub leftover_idx: Vec<usize>,
    /// `s` with blanks at the slots.
    pub corrected: Vec<Mark>,
    /// Parked symbols `s_hat[j_k]`, blank-padded to `l_max`.
    pub errors: Vec<Mark>,
    pub l_max: usize,
    /// Cell permutation over `[s_hat cells | blank pool]` of length
    /// `2n + l_max`: `permutation[src] = dst` with destination layout
    /// `[blank^n | corrected | errors]`.
    pub permutation: Vec<usize>,
}

/// Greedy left-to-right plan construction; earlier occurrences of each
/// symbol are kept, trailing ones become slots/leftovers.
pub fn build_permutation_plan(
    s: &[u8],
    s_hat: &[u8],
    spec: &SourceSpec,
) -> Result<PermutationPlan> {
    if !spec.is_typical(s)? {
        return Err(Error::Atypical(format!("{s:?}")));
    }
    if !spec.is_typical(s_hat)? {
        return Err(Error::Atypical(format!("{s_hat:?}")));
    }
    let n = spec.n();
    let k = spec.alphabet_size();
    let l_max = spec.l_max();

    let count = |seq: &[u8]| -> Vec<i64> {
        let mut c = vec![0i64; k];
        for &a in seq {
            c[a as usize] += 1;
        }
        c
    };
    let counts_s = count(s);
    let counts_h = count(s_hat);
    let mismatch: usize = counts_s
        .iter()
        .zip(&counts_h)
        .map(|(a, b)| (a - b).unsigned_abs() as usize)
        .sum();
    debug_assert!(mismatch <= l_max, "typicality bounds the mismatch by l_max");
    let m = mismatch.min(n);

    // quotas: surplus occurrences must be extracted; matched pairs pad the
    // remaining slots, assigned in alphabet order
    let mut extract = vec![0i64; k];
    let mut leftover = vec![0i64; k];
    for a in 0..k {
        let d = counts_s[a] - counts_h[a];
        extract[a] = d.max(0);
        leftover[a] = (-d).max(0);
    }
    let mut deficit = m as i64 - extract.iter().sum::<i64>();
    for a in 0..k {
        if deficit <= 0 {
            break;
        }
        let pair_avail = counts_s[a].min(counts_h[a]);
        let take = deficit.min(pair_avail);
        extract[a] += take;
        leftover[a] += take;
        deficit -= take;
    }
    debug_assert_eq!(deficit.max(0), 0);

    // slots: keep the first (count - extract) occurrences of each symbol
    let mut kept = vec![0i64; k];
    let mut slots = Vec::with_capacity(m);
    for (i, &a) in s.iter().enumerate() {
        let a = a as usize;
        if kept[a] < counts_s[a] - extract[a] {
            kept[a] += 1;
        } else {
            slots.push(i);
        }
    }
    let mut kept_h = vec![0i64; k];
    let mut leftover_idx = Vec::with_capacity(m);
    for (j, &a) in s_hat.iter().enumerate() {
        let a = a as usize;
        if kept_h[a] < counts_h[a] - leftover[a] {
            kept_h[a] += 1;
        } else {
            leftover_idx.push(j);
        }
    }
    debug_assert_eq!(slots.len(), m);
    debug_assert_eq!(leftover_idx.len(), m);

    let mut corrected: Vec<Mark> = s.iter().map(|&a| Mark::Sym(a)).collect();
    for &i in &slots {
        corrected[i] = Mark::Blank;
    }
    let mut errors: Vec<Mark> = leftover_idx.iter().map(|&j| Mark::Sym(s_hat[j])).collect();
    errors.resize(l_max, Mark::Blank);

    // cell permutation: kept s_hat cells go to their matched kept s position,
    // leftovers to the error register, blanks fill whatever remains
    let total = 2 * n + l_max;
    let mut permutation = vec![usize::MAX; total];
    let mut kept_positions: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &a) in s.iter().enumerate() {
        if !slots.contains(&i) {
            kept_positions[a as usize].push(i);
        }
    }
    let mut next_kept = vec![0usize; k];
    let leftover_set: std::collections::BTreeSet<usize> = leftover_idx.iter().copied().collect();
    for (j, &a) in s_hat.iter().enumerate() {
        if leftover_set.contains(&j) {
            continue;
        }
        let a = a as usize;
        let dst = kept_positions[a][next_kept[a]];
        next_kept[a] += 1;
        permutation[j] = n + dst;
    }
    for (rank, &j) in leftover_idx.iter().enumerate() {
        permutation[j] = 2 * n + rank;
    }
    let mut used: Vec<bool> = vec![false; total];
    for &dst in permutation.iter().filter(|&&d| d != usize::MAX) {
        used[dst] = true;
    }
    let mut free_dst = (0..total).filter(|&d| !used[d]);
    for slot in permutation.iter_mut().filter(|d| **d == usize::MAX) {
        *slot = free_dst.next().expect("destination counts match");
    }

    Ok(PermutationPlan {
        source: s.to_vec(),
        shadow: s_hat.to_vec(),
        mismatch,
        slots,
        leftover_idx,
        corrected,
        errors,
        l_max,
        permutation,
    })
}

impl PermutationPlan {
    /// Apply the cell permutation to `s_hat || blank^{n + l_max}` and return
    /// the destination string; must equal `blank^n || corrected || errors`.
    pub fn apply_to_marks(&self) -> Vec<Mark> {
        let n = self.source.len();
        let total = 2 * n + self.l_max;
        let mut src: Vec<Mark> = self.shadow.iter().map(|&a| Mark::Sym(a)).collect();
        src.resize(total, Mark::Blank);
        let mut dst = vec![Mark::Blank; total];
        for (from, &to) in self.permutation.iter().enumerate() {
            dst[to] = src[from];
        }
        dst
    }

    /// Expected destination layout of the lemma.
    pub fn expected_layout(&self) -> Vec<Mark> {
        let n = self.source.len();
        let mut out = vec![Mark::Blank; n];
        out.extend(self.corrected.iter().copied());
        out.extend(self.errors.iter().copied());
        out
    }

    /// Reassemble `s` from the corrected string by restoring the slots.
    pub fn reassemble(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.source.len());
        for (i, mark) in self.corrected.iter().enumerate() {
            match mark {
                Mark::Sym(a) => out.push(*a),
                Mark::Blank => out.push(self.source[i]),
            }
        }
        out
    }
}

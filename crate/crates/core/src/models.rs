//! Exact maxima of correlation polynomials under the local, grouping,
//! broadcasting and restrained-subset communication models, plus the
//! constructive strategies that reach the model bound.
//!
//! All maxima are computed and compared in exact arithmetic ([`Radical2`]);
//! floating point never enters a comparison. Parties are 1-based in every
//! public type; strategy tables are indexed little-endian in the listed
//! party order.

use crate::error::{Error, Result};
use crate::exact::Radical2;
use crate::poly::{restrict, CorrelationTable, MsPolynomial};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Caps on the doubly-exponential enumeration spaces.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    /// Maximum number of candidate strategy tuples visited by one call.
    pub max_candidates: u128,
    /// Maximum party count for exhaustive local-strategy enumeration.
    pub max_local_parties: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_candidates: 1 << 26, max_local_parties: 8 }
    }
}

/// Disjoint nonempty groups covering {1..n}; group order is preserved and
/// determines witness ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartyCount(0));
        }
        let mut seen = vec![false; n + 1];
        let mut sorted_groups = Vec::with_capacity(groups.len());
        for g in groups {
            if g.is_empty() {
                return Err(Error::InvalidPartition("empty group".to_string()));
            }
            let mut g = g;
            g.sort_unstable();
            for &j in &g {
                if j == 0 || j > n {
                    return Err(Error::InvalidPartition(format!("party {j} out of range")));
                }
                if seen[j] {
                    return Err(Error::InvalidPartition(format!("party {j} appears twice")));
                }
                seen[j] = true;
            }
            sorted_groups.push(g);
        }
        if let Some(j) = (1..=n).find(|&j| !seen[j]) {
            return Err(Error::InvalidPartition(format!("party {j} not covered")));
        }
        Ok(Partition { n, groups: sorted_groups })
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Partition::new(n, (1..=n).map(|j| vec![j]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// The set of parties that announce their input to everyone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastSet {
    n: usize,
    members: BTreeSet<usize>,
}

impl BroadcastSet {
    pub fn new(n: usize, members: BTreeSet<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartyCount(0));
        }
        for &j in &members {
            if j == 0 || j > n {
                return Err(Error::InvalidSubset(format!("party {j} out of range")));
            }
        }
        Ok(BroadcastSet { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Restrained-subset topology: a distinguished subset such that no party
/// learns more than one subset member's input; `targets` says which subset
/// member (if any) each outside party hears from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrainedConfig {
    n: usize,
    subset: BTreeSet<usize>,
    targets: BTreeMap<usize, usize>,
}

impl RestrainedConfig {
    pub fn new(n: usize, subset: BTreeSet<usize>, targets: BTreeMap<usize, usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartyCount(0));
        }
        if subset.is_empty() {
            return Err(Error::InvalidSubset("restrained subset must be nonempty".to_string()));
        }
        for &j in &subset {
            if j == 0 || j > n {
                return Err(Error::InvalidSubset(format!("party {j} out of range")));
            }
        }
        for (&outside, &source) in &targets {
            if outside == 0 || outside > n || subset.contains(&outside) {
                return Err(Error::InvalidSubset(format!(
                    "target key {outside} must be a party outside the subset"
                )));
            }
            if !subset.contains(&source) {
                return Err(Error::InvalidSubset(format!(
                    "assignment target {source} is not a subset member"
                )));
            }
        }
        Ok(RestrainedConfig { n, subset, targets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subset(&self) -> &BTreeSet<usize> {
        &self.subset
    }

    pub fn targets(&self) -> &BTreeMap<usize, usize> {
        &self.targets
    }
}

/// Deterministic ±1-valued output function of one group's joint inputs.
///
/// `outputs[k]` is the product of the group's outcomes when the group's
/// joint input is `k` (little-endian over `parties` in listed order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStrategy {
    pub parties: Vec<usize>,
    pub outputs: Vec<i8>,
}

impl GroupStrategy {
    fn local_index(&self, s: u32) -> usize {
        let mut idx = 0usize;
        for (pos, &j) in self.parties.iter().enumerate() {
            if s & (1 << (j - 1)) != 0 {
                idx |= 1 << pos;
            }
        }
        idx
    }
}

/// Correlation table generated by a product of group strategies.
pub fn strategy_correlation_table(
    n: usize,
    strategies: &[GroupStrategy],
) -> Result<CorrelationTable> {
    let values: Vec<f64> = (0..(1u32 << n))
        .map(|s| {
            strategies
                .iter()
                .map(|g| f64::from(g.outputs[g.local_index(s)]))
                .product()
        })
        .collect();
    CorrelationTable::new(n, values)
}

/// Exact evaluation of a polynomial against a product of group strategies.
pub fn evaluate_strategies_exact(p: &MsPolynomial, strategies: &[GroupStrategy]) -> Radical2 {
    p.evaluate_signs(|s| {
        let mut sign = 1i8;
        for g in strategies {
            sign *= g.outputs[g.local_index(s)];
        }
        sign
    })
}

/// Maximum over all deterministic strategies of a grouped model.
///
/// All groups but the last are enumerated exhaustively; the last group's
/// table is then optimal pointwise (entry = sign of its conditional weight),
/// which also absorbs the global sign freedom. Among maximizers the
/// lexicographically smallest strategy wins, reading the concatenated group
/// tables in partition order with +1 before -1.
fn partition_max(
    p: &MsPolynomial,
    partition: &Partition,
    limits: &EnumerationLimits,
) -> Result<(Radical2, Vec<GroupStrategy>)> {
    if partition.n() != p.n() {
        return Err(Error::DimensionMismatch { poly: p.n(), table: partition.n() });
    }
    let groups = partition.groups();
    let m = groups.len();
    let (enumerated, solved) = groups.split_at(m - 1);

    let overflow =
        || Error::BudgetExceeded { candidates: u128::MAX, limit: limits.max_candidates };
    let mut candidates: u128 = 1;
    for g in enumerated {
        let table_entries = 1u32.checked_shl(g.len() as u32).ok_or_else(overflow)?;
        let funcs = 1u128.checked_shl(table_entries).ok_or_else(overflow)?;
        candidates = candidates.checked_mul(funcs).ok_or_else(overflow)?;
    }
    if candidates > limits.max_candidates {
        return Err(Error::BudgetExceeded { candidates, limit: limits.max_candidates });
    }

    let solved_group = &solved[0];
    let solved_size = 1usize << solved_group.len();

    // Per term: exact coefficient, local index in each enumerated group,
    // local index in the solved group.
    struct Term {
        coeff: Radical2,
        enum_idx: Vec<u32>,
        solved_idx: usize,
    }
    let local_index = |parties: &[usize], s: u32| -> u32 {
        let mut idx = 0u32;
        for (pos, &j) in parties.iter().enumerate() {
            if s & (1 << (j - 1)) != 0 {
                idx |= 1 << pos;
            }
        }
        idx
    };
    let terms: Vec<Term> = p
        .terms()
        .map(|(s, c)| Term {
            coeff: c.to_radical2(),
            enum_idx: enumerated.iter().map(|g| local_index(g, s)).collect(),
            solved_idx: local_index(solved_group, s) as usize,
        })
        .collect();

    let mut masks = vec![0u64; enumerated.len()];
    let mut best_value: Option<Radical2> = None;
    let mut best_masks = masks.clone();
    let mut best_solved: Vec<i8> = vec![1; solved_size];
    let mut conditional = vec![Radical2::ZERO; solved_size];

    'outer: loop {
        for slot in conditional.iter_mut() {
            *slot = Radical2::ZERO;
        }
        for t in &terms {
            let mut parity = 0u32;
            for (g, &idx) in masks.iter().zip(&t.enum_idx) {
                parity ^= (g >> idx) as u32 & 1;
            }
            let signed = if parity == 1 { t.coeff.neg() } else { t.coeff };
            conditional[t.solved_idx] = conditional[t.solved_idx].add(signed);
        }
        let value = conditional.iter().fold(Radical2::ZERO, |acc, v| acc.add(v.abs()));
        if best_value.map_or(true, |best| value > best) {
            best_value = Some(value);
            best_masks.copy_from_slice(&masks);
            for (out, v) in best_solved.iter_mut().zip(&conditional) {
                *out = if v.signum() < 0 { -1 } else { 1 };
            }
        }

        // odometer: the last enumerated group varies fastest so that the
        // iteration order equals lexicographic order on the strategy tuple
        let mut pos = enumerated.len();
        while pos > 0 {
            pos -= 1;
            let width = 1u32 << enumerated[pos].len();
            masks[pos] += 1;
            if masks[pos] < (1u64 << width) {
                continue 'outer;
            }
            masks[pos] = 0;
        }
        break;
    }

    let mut witness: Vec<GroupStrategy> = enumerated
        .iter()
        .zip(&best_masks)
        .map(|(g, &mask)| GroupStrategy {
            parties: g.clone(),
            outputs: (0..(1usize << g.len()))
                .map(|k| if mask >> k & 1 == 1 { -1 } else { 1 })
                .collect(),
        })
        .collect();
    witness.push(GroupStrategy { parties: solved_group.clone(), outputs: best_solved });
    Ok((best_value.unwrap_or(Radical2::ZERO), witness))
}

/// Result of a local-model maximization: the exact value and one output
/// pair `(a_j, a'_j)` per party.
#[derive(Debug, Clone, Serialize)]
pub struct LocalMax {
    #[serde(skip)]
    pub value: Radical2,
    pub value_f64: f64,
    pub witness: Vec<(i8, i8)>,
}

/// Exact maximum of |evaluate| over deterministic local strategies.
pub fn local_max_with_limits(p: &MsPolynomial, limits: &EnumerationLimits) -> Result<LocalMax> {
    if p.n() > limits.max_local_parties {
        return Err(Error::PartyCountTooLarge {
            n: p.n(),
            limit: limits.max_local_parties,
            what: "local enumeration",
        });
    }
    let partition = Partition::singletons(p.n())?;
    let (value, strategies) = partition_max(p, &partition, limits)?;
    let witness = strategies.iter().map(|g| (g.outputs[0], g.outputs[1])).collect();
    Ok(LocalMax { value, value_f64: value.to_f64(), witness })
}

pub fn local_max(p: &MsPolynomial) -> Result<LocalMax> {
    local_max_with_limits(p, &EnumerationLimits::default())
}

/// Result of a grouping-model maximization.
#[derive(Debug, Clone, Serialize)]
pub struct GroupingMax {
    #[serde(skip)]
    pub value: Radical2,
    pub value_f64: f64,
    pub witness: Vec<GroupStrategy>,
}

/// Exact maximum of |evaluate| when correlations factor over the partition's
/// groups, with unrestricted collaboration inside each group.
pub fn grouping_max_with_limits(
    p: &MsPolynomial,
    partition: &Partition,
    limits: &EnumerationLimits,
) -> Result<GroupingMax> {
    let (value, witness) = partition_max(p, partition, limits)?;
    Ok(GroupingMax { value, value_f64: value.to_f64(), witness })
}

pub fn grouping_max(p: &MsPolynomial, partition: &Partition) -> Result<GroupingMax> {
    grouping_max_with_limits(p, partition, &EnumerationLimits::default())
}

/// One fixed assignment of the broadcast set, with the sign applied by the
/// broadcasters and the optimal local strategy of the remaining parties.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalBranch {
    pub assignment: String,
    pub sign: i8,
    pub local_witness: Vec<(i8, i8)>,
}

/// Broadcasting-model maximum computed through the conditional
/// decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalMax {
    #[serde(skip)]
    pub value: Radical2,
    pub value_f64: f64,
    pub branches: Vec<ConditionalBranch>,
}

/// Exact broadcasting-model maximum: the sum over all assignments of the
/// broadcast set of the local maximum of the restricted polynomial.
///
/// Strategy choices for distinct broadcast assignments are independent, and
/// the broadcasters' own outputs fold into a per-assignment sign, so this
/// sum is the model's exact maximum.
pub fn conditional_max_with_limits(
    p: &MsPolynomial,
    broadcast: &BroadcastSet,
    limits: &EnumerationLimits,
) -> Result<ConditionalMax> {
    if broadcast.n() != p.n() {
        return Err(Error::DimensionMismatch { poly: p.n(), table: broadcast.n() });
    }
    let members: Vec<usize> = broadcast.members().collect();
    let k = members.len();
    let remaining = p.n() - k;
    if remaining > limits.max_local_parties {
        return Err(Error::PartyCountTooLarge {
            n: remaining,
            limit: limits.max_local_parties,
            what: "local enumeration under broadcasting",
        });
    }
    let mut total = Radical2::ZERO;
    let mut branches = Vec::with_capacity(1 << k);
    for bits in 0..(1u32 << k) {
        let fixed: BTreeMap<usize, bool> = members
            .iter()
            .enumerate()
            .map(|(pos, &j)| (j, bits & (1 << pos) != 0))
            .collect();
        let restricted = restrict(p, &fixed)?;
        if restricted.n() == 0 {
            // all parties broadcast: each branch contributes its |constant|
            let c = restricted.coeff(0).to_radical2();
            total = total.add(c.abs());
            branches.push(ConditionalBranch {
                assignment: bits_string(bits, k),
                sign: if c.signum() < 0 { -1 } else { 1 },
                local_witness: Vec::new(),
            });
            continue;
        }
        let lm = local_max_with_limits(&restricted, limits)?;
        // sign the broadcasters apply so this branch contributes +|value|
        let achieved = restricted.evaluate_signs(|s| {
            let mut sign = 1i8;
            for (j, &(a, ap)) in lm.witness.iter().enumerate() {
                sign *= if s & (1 << j) != 0 { ap } else { a };
            }
            sign
        });
        total = total.add(lm.value);
        branches.push(ConditionalBranch {
            assignment: bits_string(bits, k),
            sign: if achieved.signum() < 0 { -1 } else { 1 },
            local_witness: lm.witness,
        });
    }
    Ok(ConditionalMax { value: total, value_f64: total.to_f64(), branches })
}

pub fn conditional_max(p: &MsPolynomial, broadcast: &BroadcastSet) -> Result<ConditionalMax> {
    conditional_max_with_limits(p, broadcast, &EnumerationLimits::default())
}

fn bits_string(bits: u32, len: usize) -> String {
    (0..len).map(|i| if bits & (1 << i) != 0 { '1' } else { '0' }).collect()
}

/// Integer pair (a, b) meaning a + b*sqrt(2) at a fixed power-of-two
/// denominator; accumulator for the naive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RawValue {
    a: i64,
    b: i64,
}

impl RawValue {
    const ZERO: RawValue = RawValue { a: 0, b: 0 };

    /// Folds onto the nonnegative branch for exact |.| comparison.
    fn abs_key(self) -> (i128, i128) {
        let a = i128::from(self.a);
        let b = i128::from(self.b);
        let positive = match (a.signum(), b.signum()) {
            (sa, sb) if sa >= 0 && sb >= 0 => true,
            (sa, sb) if sa <= 0 && sb <= 0 => false,
            (sa, _) => (a * a > 2 * b * b) == (sa > 0),
        };
        if positive {
            (a, b)
        } else {
            (-a, -b)
        }
    }
}

/// Exact |x| > |y| on common-denominator values.
fn abs_greater(x: RawValue, y: RawValue) -> bool {
    let (xa, xb) = x.abs_key();
    let (ya, yb) = y.abs_key();
    let da = xa - ya;
    let db = xb - yb;
    match (da.signum(), db.signum()) {
        (0, 0) => false,
        (sa, sb) if sa >= 0 && sb >= 0 => true,
        (sa, sb) if sa <= 0 && sb <= 0 => false,
        (sa, _) => (da * da > 2 * db * db) == (sa > 0),
    }
}

/// All terms as integer (a, b) pairs at one common denominator exponent.
fn raw_terms(p: &MsPolynomial) -> (Vec<(u32, RawValue)>, u32) {
    let rads: Vec<(u32, Radical2)> = p.terms().map(|(s, c)| (s, c.to_radical2())).collect();
    let den = rads.iter().map(|(_, r)| r.den_pow2()).max().unwrap_or(0);
    let terms = rads
        .into_iter()
        .map(|(s, r)| {
            let (a, b) = r.parts_at_den(den);
            (s, RawValue { a, b })
        })
        .collect();
    (terms, den)
}

/// Generic parallel scan over sign-function candidates. Each candidate is a
/// bit pattern; each term flips sign according to the parity of the
/// candidate bits listed in its position set.
fn scan_candidates(prepared: &[(RawValue, Vec<u32>)], total_bits: u64) -> RawValue {
    (0..(1u64 << total_bits))
        .into_par_iter()
        .fold(
            || RawValue::ZERO,
            |best, cand| {
                let mut acc = RawValue::ZERO;
                for (c, positions) in prepared {
                    let mut parity = 0u64;
                    for &pos in positions {
                        parity ^= (cand >> pos) & 1;
                    }
                    if parity == 1 {
                        acc.a -= c.a;
                        acc.b -= c.b;
                    } else {
                        acc.a += c.a;
                        acc.b += c.b;
                    }
                }
                if abs_greater(acc, best) {
                    acc
                } else {
                    best
                }
            },
        )
        .reduce(|| RawValue::ZERO, |x, y| if abs_greater(x, y) { x } else { y })
}

/// Exact broadcasting-model maximum by direct enumeration of deterministic
/// output functions; a small-n validation oracle for [`conditional_max`].
///
/// The broadcasters enter only through the product of their outputs, which
/// ranges over all sign functions of the broadcast assignment; that product
/// is enumerated explicitly, as is every non-broadcaster's full table over
/// (own input, broadcast assignment). No per-assignment decomposition is
/// used: every candidate is evaluated globally.
pub fn broadcast_max_naive(
    p: &MsPolynomial,
    broadcast: &BroadcastSet,
    limits: &EnumerationLimits,
) -> Result<Radical2> {
    if broadcast.n() != p.n() {
        return Err(Error::DimensionMismatch { poly: p.n(), table: broadcast.n() });
    }
    let n = p.n();
    let members: Vec<usize> = broadcast.members().collect();
    let k = members.len();
    let outside: Vec<usize> = (1..=n).filter(|j| !members.contains(j)).collect();

    let sigma_bits = 1u64 << k;
    let table_bits = 1u64 << (k + 1);
    let total_bits = sigma_bits + table_bits * outside.len() as u64;
    if total_bits >= 60
        || 1u128 << total_bits > limits.max_candidates
    {
        return Err(Error::BudgetExceeded {
            candidates: if total_bits >= 128 { u128::MAX } else { 1u128 << total_bits },
            limit: limits.max_candidates,
        });
    }

    let (terms, den) = raw_terms(p);
    let prepared: Vec<(RawValue, Vec<u32>)> = terms
        .iter()
        .map(|&(s, c)| {
            let b_idx: u32 = members
                .iter()
                .enumerate()
                .map(|(pos, &j)| ((s >> (j - 1)) & 1) << pos)
                .sum();
            let mut positions = vec![b_idx];
            for (t, &j) in outside.iter().enumerate() {
                let own = (s >> (j - 1)) & 1;
                let idx = own | (b_idx << 1);
                positions.push(sigma_bits as u32 + t as u32 * table_bits as u32 + idx);
            }
            (c, positions)
        })
        .collect();

    let best = scan_candidates(&prepared, total_bits);
    let (a, b) = best.abs_key();
    Ok(Radical2::new(a, b, den))
}

/// Exact restrained-subset-model maximum by direct enumeration; the second
/// small-n validation oracle.
///
/// Outside parties sharing a target collapse to one free ±1 function of
/// (target input, outside inputs); untargeted outside parties collapse to a
/// free sign function of the outside inputs; each subset member keeps a free
/// table over (own input, outside inputs). Every candidate is evaluated
/// globally.
pub fn restrained_max_naive(
    p: &MsPolynomial,
    cfg: &RestrainedConfig,
    limits: &EnumerationLimits,
) -> Result<Radical2> {
    if cfg.n() != p.n() {
        return Err(Error::DimensionMismatch { poly: p.n(), table: cfg.n() });
    }
    let n = p.n();
    let subset: Vec<usize> = cfg.subset().iter().copied().collect();
    let m = subset.len();
    let outside: Vec<usize> = (1..=n).filter(|j| !cfg.subset().contains(j)).collect();
    let n_out = outside.len();
    let has_untargeted = outside.iter().any(|j| !cfg.targets().contains_key(j));

    let table_bits = 1u64 << (1 + n_out);
    let g_bits = if has_untargeted && n_out > 0 { 1u64 << n_out } else { 0 };
    let total_bits = table_bits * m as u64 + g_bits;
    if total_bits >= 60 || 1u128 << total_bits > limits.max_candidates {
        return Err(Error::BudgetExceeded {
            candidates: if total_bits >= 128 { u128::MAX } else { 1u128 << total_bits },
            limit: limits.max_candidates,
        });
    }

    let (terms, den) = raw_terms(p);
    let prepared: Vec<(RawValue, Vec<u32>)> = terms
        .iter()
        .map(|&(s, c)| {
            let out_idx: u32 = outside
                .iter()
                .enumerate()
                .map(|(pos, &j)| ((s >> (j - 1)) & 1) << pos)
                .sum();
            let mut positions = Vec::with_capacity(m + 1);
            for (t, &i) in subset.iter().enumerate() {
                let own = (s >> (i - 1)) & 1;
                let idx = own | (out_idx << 1);
                positions.push(t as u32 * table_bits as u32 + idx);
            }
            if g_bits > 0 {
                positions.push(table_bits as u32 * m as u32 + out_idx);
            }
            (c, positions)
        })
        .collect();

    let best = scan_candidates(&prepared, total_bits);
    let (a, b) = best.abs_key();
    Ok(Radical2::new(a, b, den))
}

/// Constructs per-group strategies whose product reaches |S_n^m| =
/// 2^((n-m)/2) exactly.
///
/// Each group plays the pointwise sign pattern of its own family member:
/// M+_g for odd group sizes (reaching |M_g| = |M'_g| = 2^((g-1)/2)
/// simultaneously) and M_g for even sizes (reaching |M+_g| = |M-_g| =
/// 2^((g-1)/2)). Sizes 1 and 2 reduce to the constant +1 strategy and the
/// (+,+,+,-) pattern; larger groups generalize them. Joining groups
/// pairwise multiplies the reached values, so the product strategy lands
/// exactly on the bound for every partition.
pub fn tight_strategy(n: usize, partition: &Partition) -> Result<Vec<GroupStrategy>> {
    if partition.n() != n {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} parties, expected {n}",
            partition.n()
        )));
    }
    partition
        .groups()
        .iter()
        .map(|group| {
            let g = group.len();
            let base = if g % 2 == 1 {
                crate::poly::build_m_pm(g, crate::poly::Sign::Plus)?
            } else {
                crate::poly::build_m(g)?
            };
            let outputs: Vec<i8> = (0..(1u32 << g))
                .map(|s| {
                    let sig = base.coeff(s).signum();
                    debug_assert!(sig != 0, "tight base polynomial has a zero coefficient");
                    if sig < 0 {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            Ok(GroupStrategy { parties: group.clone(), outputs })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Coefficient;
    use crate::poly::{build_m, build_m_pm, build_s, evaluate, MsPolynomial, PolyKind, PolyLabel, Sign};

    fn sqrt2() -> Radical2 {
        Radical2::SQRT2
    }

    #[test]
    fn local_max_of_m_is_one() {
        for n in 1..=6 {
            let lm = local_max(&build_m(n).unwrap()).unwrap();
            assert_eq!(lm.value, Radical2::ONE, "n={n}");
        }
    }

    #[test]
    fn local_max_of_m_pm_is_sqrt2() {
        for n in 1..=6 {
            for sign in [Sign::Plus, Sign::Minus] {
                let lm = local_max(&build_m_pm(n, sign).unwrap()).unwrap();
                assert_eq!(lm.value, sqrt2(), "n={n}");
            }
        }
    }

    #[test]
    fn local_max_m1_witness() {
        let lm = local_max(&build_m(1).unwrap()).unwrap();
        assert_eq!(lm.value, Radical2::ONE);
        assert_eq!(lm.witness, vec![(1, 1)]);
    }

    #[test]
    fn local_max_rejects_large_n() {
        let p = build_m(9).unwrap();
        assert!(matches!(local_max(&p), Err(Error::PartyCountTooLarge { .. })));
    }

    #[test]
    fn local_witness_reproduces_value() {
        for n in 1..=5 {
            for kind in [PolyKind::M, PolyKind::MPlus] {
                let p = crate::poly::build_kind(n, kind).unwrap();
                let lm = local_max(&p).unwrap();
                let achieved = p.evaluate_signs(|s| {
                    let mut sign = 1i8;
                    for (j, &(a, ap)) in lm.witness.iter().enumerate() {
                        sign *= if s & (1 << j) != 0 { ap } else { a };
                    }
                    sign
                });
                assert_eq!(achieved.abs(), lm.value);
            }
        }
    }

    #[test]
    fn grouping_max_s42_is_two_for_both_shapes() {
        let p = build_s(4, 2).unwrap();
        let two = Radical2::from_int(2);
        for groups in [vec![vec![1, 2], vec![3, 4]], vec![vec![1], vec![2, 3, 4]]] {
            let part = Partition::new(4, groups).unwrap();
            let gm = grouping_max(&p, &part).unwrap();
            assert_eq!(gm.value, two);
            assert_eq!(evaluate_strategies_exact(&p, &gm.witness).abs(), two);
        }
    }

    #[test]
    fn grouping_with_singletons_equals_local_max() {
        for n in 1..=5 {
            for m in 1..=n {
                let p = build_s(n, m).unwrap();
                let gm = grouping_max(&p, &Partition::singletons(n).unwrap()).unwrap();
                let lm = local_max(&p).unwrap();
                assert_eq!(gm.value, lm.value);
            }
        }
    }

    #[test]
    fn single_group_reaches_algebraic_bound() {
        let p = build_m(3).unwrap();
        let part = Partition::new(3, vec![vec![1, 2, 3]]).unwrap();
        let gm = grouping_max(&p, &part).unwrap();
        assert_eq!(gm.value, p.sum_abs_coeffs());
    }

    #[test]
    fn conditional_max_edge_cases() {
        let p = build_m_pm(3, Sign::Plus).unwrap();
        // empty broadcast set reduces to the local maximum
        let empty = BroadcastSet::new(3, BTreeSet::new()).unwrap();
        assert_eq!(conditional_max(&p, &empty).unwrap().value, local_max(&p).unwrap().value);
        // everyone broadcasting reaches the algebraic bound
        let all = BroadcastSet::new(3, BTreeSet::from([1, 2, 3])).unwrap();
        assert_eq!(conditional_max(&p, &all).unwrap().value, p.sum_abs_coeffs());
    }

    #[test]
    fn conditional_max_hits_model_bound() {
        for n in 1..=6usize {
            for k in 0..n {
                let m = n - k;
                let p = build_s(n, m).unwrap();
                let b = BroadcastSet::new(n, (1..=k).collect()).unwrap();
                let cm = conditional_max(&p, &b).unwrap();
                assert_eq!(cm.value, Radical2::pow2_half(k as i32), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn naive_broadcast_matches_conditional_on_small_ms() {
        // n=3, B={3}: S_3^2 = M+_3, bound sqrt(2)
        let p = build_s(3, 2).unwrap();
        let b = BroadcastSet::new(3, BTreeSet::from([3])).unwrap();
        let limits = EnumerationLimits::default();
        let naive = broadcast_max_naive(&p, &b, &limits).unwrap();
        let cond = conditional_max(&p, &b).unwrap();
        assert_eq!(naive, cond.value);
        assert_eq!(naive, sqrt2());
    }

    #[test]
    fn naive_restrained_matches_broadcast_complement() {
        // n=3, subset {1,2}: same value as broadcasting {3}
        let p = build_s(3, 2).unwrap();
        let limits = EnumerationLimits::default();
        let b = BroadcastSet::new(3, BTreeSet::from([3])).unwrap();
        let broadcast = broadcast_max_naive(&p, &b, &limits).unwrap();
        for targets in [BTreeMap::new(), BTreeMap::from([(3, 1)]), BTreeMap::from([(3, 2)])] {
            let cfg = RestrainedConfig::new(3, BTreeSet::from([1, 2]), targets).unwrap();
            let restrained = restrained_max_naive(&p, &cfg, &limits).unwrap();
            assert_eq!(restrained, broadcast);
        }
    }

    #[test]
    fn naive_oracles_on_random_polynomials() {
        let limits = EnumerationLimits::default();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in 2..=3usize {
            for _ in 0..8 {
                let terms: Vec<(u32, Coefficient)> = (0..(1u32 << n))
                    .map(|s| {
                        let num = (next() % 9) as i64 - 4;
                        let half = (next() % 5) as i32 - 3;
                        (s, Coefficient::new(num, half))
                    })
                    .collect();
                let p = MsPolynomial::from_terms(n, terms, PolyLabel::Custom).unwrap();
                for k in 0..=n {
                    let b = BroadcastSet::new(n, (1..=k).collect()).unwrap();
                    let cond = conditional_max(&p, &b).unwrap().value;
                    let naive = broadcast_max_naive(&p, &b, &limits).unwrap();
                    assert_eq!(naive, cond, "broadcast n={n} k={k}");
                    if k < n {
                        let subset: BTreeSet<usize> = (k + 1..=n).collect();
                        let cfg = RestrainedConfig::new(n, subset, BTreeMap::new()).unwrap();
                        let restrained = restrained_max_naive(&p, &cfg, &limits).unwrap();
                        assert_eq!(restrained, cond, "restrained n={n} m={}", n - k);
                    }
                }
            }
        }
    }

    #[test]
    fn refining_partitions_never_increases_grouping_max() {
        let p = build_s(4, 2).unwrap();
        let coarse = Partition::new(4, vec![vec![1, 2, 3], vec![4]]).unwrap();
        let fine = Partition::new(4, vec![vec![1, 2], vec![3], vec![4]]).unwrap();
        let finest = Partition::singletons(4).unwrap();
        let vc = grouping_max(&p, &coarse).unwrap().value;
        let vf = grouping_max(&p, &fine).unwrap().value;
        let vs = grouping_max(&p, &finest).unwrap().value;
        assert!(vc >= vf && vf >= vs);
    }

    #[test]
    fn enlarging_broadcast_set_never_decreases_conditional_max() {
        let p = build_m(4).unwrap();
        let mut prev = Radical2::ZERO;
        for k in 0..=4usize {
            let b = BroadcastSet::new(4, (1..=k).collect()).unwrap();
            let v = conditional_max(&p, &b).unwrap().value;
            assert!(v >= prev, "k={k}");
            prev = v;
        }
    }

    #[test]
    fn grouping_is_weaker_than_broadcasting() {
        // B = all but one party per group dominates the grouping value
        let p = build_s(5, 2).unwrap();
        let part = Partition::new(5, vec![vec![1, 2, 3], vec![4, 5]]).unwrap();
        let gm = grouping_max(&p, &part).unwrap().value;
        let b = BroadcastSet::new(5, BTreeSet::from([2, 3, 5])).unwrap();
        let cm = conditional_max(&p, &b).unwrap().value;
        assert!(gm <= cm);
    }

    #[test]
    fn tight_strategy_reaches_bound_for_all_small_partitions() {
        for n in 1..=6usize {
            for partition in all_partitions(n) {
                let m = partition.num_groups();
                let p = build_s(n, m).unwrap();
                let strategies = tight_strategy(n, &partition).unwrap();
                let value = evaluate_strategies_exact(&p, &strategies).abs();
                assert_eq!(
                    value,
                    Radical2::pow2_half((n - m) as i32),
                    "n={n} partition={:?}",
                    partition.groups()
                );
            }
        }
    }

    #[test]
    fn tight_strategy_singletons_give_local_value_one() {
        let part = Partition::singletons(4).unwrap();
        let strategies = tight_strategy(4, &part).unwrap();
        let p = build_s(4, 4).unwrap();
        assert_eq!(evaluate_strategies_exact(&p, &strategies), Radical2::ONE);
        for s in &strategies {
            assert_eq!(s.outputs, vec![1, 1]);
        }
    }

    #[test]
    fn tight_strategy_single_group_reaches_algebraic_bound() {
        let part = Partition::new(3, vec![vec![1, 2, 3]]).unwrap();
        let strategies = tight_strategy(3, &part).unwrap();
        let m3 = build_m(3).unwrap();
        assert_eq!(evaluate_strategies_exact(&m3, &strategies).abs(), Radical2::from_int(2));
    }

    /// The size-2 building block is the unique function reaching M_2 = 2.
    #[test]
    fn size_two_block_rederived_by_exhaustive_search() {
        let m2 = build_m(2).unwrap();
        let mut reaching: Vec<Vec<i8>> = Vec::new();
        for mask in 0..16u32 {
            let table: Vec<i8> =
                (0..4).map(|k| if mask & (1 << k) != 0 { -1 } else { 1 }).collect();
            let value = m2.evaluate_signs(|s| table[s as usize]);
            if value == Radical2::from_int(2) {
                reaching.push(table);
            }
        }
        assert_eq!(reaching, vec![vec![1, 1, 1, -1]]);
        let part = Partition::new(2, vec![vec![1, 2]]).unwrap();
        let strategies = tight_strategy(2, &part).unwrap();
        assert_eq!(strategies[0].outputs, vec![1, 1, 1, -1]);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![1, 2]]).is_err()); // missing 3
        assert!(Partition::new(3, vec![vec![1, 2], vec![2, 3]]).is_err()); // overlap
        assert!(Partition::new(3, vec![vec![1, 2, 3], vec![]]).is_err()); // empty group
        assert!(Partition::new(3, vec![vec![1, 2, 4]]).is_err()); // out of range
    }

    #[test]
    fn restrained_config_validation() {
        let subset = BTreeSet::from([1, 2]);
        assert!(RestrainedConfig::new(3, subset.clone(), BTreeMap::from([(3, 1)])).is_ok());
        assert!(RestrainedConfig::new(3, subset.clone(), BTreeMap::from([(3, 3)])).is_err());
        assert!(RestrainedConfig::new(3, subset.clone(), BTreeMap::from([(1, 2)])).is_err());
        assert!(RestrainedConfig::new(3, BTreeSet::new(), BTreeMap::new()).is_err());
    }

    #[test]
    fn budget_guards_fire() {
        let p = build_m(8).unwrap();
        let part = Partition::new(8, vec![vec![1, 2, 3, 4, 5], vec![6, 7, 8]]).unwrap();
        let tiny = EnumerationLimits { max_candidates: 1 << 10, max_local_parties: 8 };
        assert!(matches!(
            grouping_max_with_limits(&p, &part, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
        let b = BroadcastSet::new(8, BTreeSet::from([1])).unwrap();
        assert!(matches!(
            broadcast_max_naive(&p, &b, &EnumerationLimits::default()),
            Err(Error::BudgetExceeded { .. })
        ));
        // too many non-broadcasting parties for the local enumeration
        let p10 = build_m(10).unwrap();
        let empty = BroadcastSet::new(10, BTreeSet::new()).unwrap();
        assert!(matches!(
            conditional_max(&p10, &empty),
            Err(Error::PartyCountTooLarge { .. })
        ));
    }

    #[test]
    fn witness_tables_convert_to_correlation_table() {
        let p = build_s(4, 2).unwrap();
        let part = Partition::new(4, vec![vec![1, 2], vec![3, 4]]).unwrap();
        let gm = grouping_max(&p, &part).unwrap();
        let table = strategy_correlation_table(4, &gm.witness).unwrap();
        let v = evaluate(&p, &table).unwrap();
        assert!((v.abs() - 2.0).abs() < 1e-12);
    }

    /// Enumerates all set partitions of {1..n} (restricted growth strings).
    fn all_partitions(n: usize) -> Vec<Partition> {
        fn rec(
            labels: &mut Vec<usize>,
            pos: usize,
            max_used: usize,
            n: usize,
            out: &mut Vec<Partition>,
        ) {
            if pos == n {
                let m = max_used + 1;
                let mut groups = vec![Vec::new(); m];
                for (i, &l) in labels.iter().enumerate() {
                    groups[l].push(i + 1);
                }
                out.push(Partition::new(n, groups).unwrap());
                return;
            }
            for l in 0..=max_used + 1 {
                labels[pos] = l;
                rec(labels, pos + 1, max_used.max(l), n, out);
            }
        }
        let mut result = Vec::new();
        if n == 0 {
            return result;
        }
        let mut labels = vec![0usize; n];
        rec(&mut labels, 1, 0, n, &mut result);
        result
    }
}

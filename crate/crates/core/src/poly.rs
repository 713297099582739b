//! Construction, transformation and evaluation of Mermin-Svetlichny
//! polynomials, plus their local, algebraic and communication-model bounds.
//!
//! # Assignment encoding
//!
//! A joint setting choice for `n` parties is a bitmask `s`: bit `j`
//! (0-based, little-endian) is party `j+1`'s setting, `0` for the first
//! (unprimed) observable and `1` for the second (primed) one. The same
//! encoding indexes [`CorrelationTable`] entries and strategy tables.

use crate::error::{Error, Result};
use crate::exact::{Coefficient, Radical2};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Hard cap on party count for dense polynomial construction.
pub const MAX_POLY_PARTIES: usize = 20;

/// Which member of the Mermin-Svetlichny family a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyKind {
    M,
    MPrime,
    MPlus,
    MMinus,
}

impl PolyKind {
    pub fn is_plus_family(self) -> bool {
        matches!(self, PolyKind::MPlus | PolyKind::MMinus)
    }
}

impl fmt::Display for PolyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PolyKind::M => "M",
            PolyKind::MPrime => "M'",
            PolyKind::MPlus => "M+",
            PolyKind::MMinus => "M-",
        };
        write!(f, "{s}")
    }
}

/// Label carried by a polynomial; `Custom` marks anything derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyLabel {
    M,
    MPrime,
    MPlus,
    MMinus,
    Custom,
}

impl From<PolyKind> for PolyLabel {
    fn from(kind: PolyKind) -> Self {
        match kind {
            PolyKind::M => PolyLabel::M,
            PolyKind::MPrime => PolyLabel::MPrime,
            PolyKind::MPlus => PolyLabel::MPlus,
            PolyKind::MMinus => PolyLabel::MMinus,
        }
    }
}

/// A correlation polynomial: an exact coefficient per input assignment.
///
/// Zero coefficients are omitted from the map. Immutable after
/// construction; all operations return new values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsPolynomial {
    n: usize,
    coeffs: BTreeMap<u32, Coefficient>,
    label: PolyLabel,
}

impl MsPolynomial {
    /// Builds a polynomial from explicit terms; zero coefficients are dropped.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (u32, Coefficient)>,
        label: PolyLabel,
    ) -> Result<Self> {
        if n > MAX_POLY_PARTIES {
            return Err(Error::PartyCountTooLarge { n, limit: MAX_POLY_PARTIES, what: "polynomials" });
        }
        let mut coeffs = BTreeMap::new();
        let mask_limit = 1u64 << n;
        for (s, c) in terms {
            if u64::from(s) >= mask_limit {
                return Err(Error::InvalidArgument(format!(
                    "assignment {s:#b} out of range for n={n}"
                )));
            }
            if !c.is_zero() {
                let entry = coeffs.entry(s).or_insert(Coefficient::ZERO);
                *entry = entry.add(c);
                if entry.is_zero() {
                    coeffs.remove(&s);
                }
            }
        }
        Ok(MsPolynomial { n, coeffs, label })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> PolyLabel {
        self.label
    }

    /// Coefficient at assignment `s` (zero if absent).
    pub fn coeff(&self, s: u32) -> Coefficient {
        self.coeffs.get(&s).copied().unwrap_or(Coefficient::ZERO)
    }

    /// Iterate nonzero terms in ascending assignment order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, Coefficient)> + '_ {
        self.coeffs.iter().map(|(&s, &c)| (s, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of |c(s)| over all assignments; equals the algebraic bound for
    /// the M_n and M±_n family members.
    pub fn sum_abs_coeffs(&self) -> Radical2 {
        self.coeffs
            .values()
            .fold(Radical2::ZERO, |acc, c| acc.add(c.abs().to_radical2()))
    }

    #[cfg(test)]
    fn with_label(mut self, label: PolyLabel) -> Self {
        self.label = label;
        self
    }

    /// Scales every coefficient by 2^(half/2), exactly.
    pub fn scale_pow2_half(&self, half: i32) -> Self {
        let factor = Coefficient::new(1, half);
        let coeffs = self.coeffs.iter().map(|(&s, &c)| (s, c.mul(factor))).collect();
        MsPolynomial { n: self.n, coeffs, label: PolyLabel::Custom }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&s, &c)| (s, c.neg())).collect();
        MsPolynomial { n: self.n, coeffs, label: PolyLabel::Custom }
    }

    /// Exact evaluation against a table of signs (deterministic strategies).
    pub(crate) fn evaluate_signs(&self, sign_of: impl Fn(u32) -> i8) -> Radical2 {
        self.coeffs.iter().fold(Radical2::ZERO, |acc, (&s, &c)| {
            acc.add(c.to_radical2().mul_sign(sign_of(s)))
        })
    }
}

/// Recursive construction of M_n: M_1 = a_1 and
/// M_n = (a_n + a'_n)/2 * M_{n-1} + (a_n - a'_n)/2 * M'_{n-1}.
pub fn build_m(n: usize) -> Result<MsPolynomial> {
    if n == 0 {
        return Err(Error::InvalidPartyCount(0));
    }
    if n > MAX_POLY_PARTIES {
        return Err(Error::PartyCountTooLarge { n, limit: MAX_POLY_PARTIES, what: "build_m" });
    }
    let mut coeffs: BTreeMap<u32, Coefficient> = BTreeMap::new();
    coeffs.insert(0, Coefficient::ONE);
    for k in 2..=n {
        let full = (1u32 << (k - 1)) - 1;
        let prev = coeffs;
        let get = |s: u32| prev.get(&s).copied().unwrap_or(Coefficient::ZERO);
        let mut next = BTreeMap::new();
        for s in 0..=full {
            let c = get(s);
            let cp = get(full ^ s); // coefficient of M'_{k-1} at s
            let unprimed = c.add(cp).mul(Coefficient::new(1, -2));
            let primed = c.sub(cp).mul(Coefficient::new(1, -2));
            if !unprimed.is_zero() {
                next.insert(s, unprimed);
            }
            if !primed.is_zero() {
                next.insert(s | (1 << (k - 1)), primed);
            }
        }
        coeffs = next;
    }
    Ok(MsPolynomial { n, coeffs, label: PolyLabel::M })
}

/// Sign selector for the symmetrized family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// M±_n = (M_n ± M'_n) / sqrt(2), all coefficients exact.
pub fn build_m_pm(n: usize, sign: Sign) -> Result<MsPolynomial> {
    let m = build_m(n)?;
    let mp = prime(&m);
    let full = (1u32 << n) - 1;
    let mut coeffs = BTreeMap::new();
    for s in 0..=full {
        let c = m.coeff(s);
        let cp = mp.coeff(s);
        let combined = match sign {
            Sign::Plus => c.add(cp),
            Sign::Minus => c.sub(cp),
        };
        let scaled = combined.div_sqrt2();
        if !scaled.is_zero() {
            coeffs.insert(s, scaled);
        }
    }
    let label = match sign {
        Sign::Plus => PolyLabel::MPlus,
        Sign::Minus => PolyLabel::MMinus,
    };
    Ok(MsPolynomial { n, coeffs, label })
}

/// Builds the family member by kind.
pub fn build_kind(n: usize, kind: PolyKind) -> Result<MsPolynomial> {
    match kind {
        PolyKind::M => build_m(n),
        PolyKind::MPrime => Ok(prime(&build_m(n)?)),
        PolyKind::MPlus => build_m_pm(n, Sign::Plus),
        PolyKind::MMinus => build_m_pm(n, Sign::Minus),
    }
}

/// Exchanges all primed and non-primed observables: every assignment maps
/// to its bitwise complement, coefficients unchanged.
pub fn prime(p: &MsPolynomial) -> MsPolynomial {
    let full = if p.n == 0 { 0 } else { (1u32 << p.n) - 1 };
    let coeffs = p.coeffs.iter().map(|(&s, &c)| (full ^ s, c)).collect();
    let label = match p.label {
        PolyLabel::M => PolyLabel::MPrime,
        PolyLabel::MPrime => PolyLabel::M,
        _ => PolyLabel::Custom,
    };
    MsPolynomial { n: p.n, coeffs, label }
}

/// The hybrid family: S_n^m is M_n when n-m is even and M+_n when odd.
pub fn build_s(n: usize, m: usize) -> Result<MsPolynomial> {
    if n == 0 {
        return Err(Error::InvalidPartyCount(0));
    }
    if m == 0 || m > n {
        return Err(Error::GroupCountOutOfRange { n, m });
    }
    if (n - m) % 2 == 0 {
        build_m(n)
    } else {
        build_m_pm(n, Sign::Plus)
    }
}

/// Relabels party `j` (1-based): {a_j, a'_j} -> {-a'_j, a_j}.
///
/// Terms using a_j move to the primed slot with a sign flip; terms using
/// a'_j move to the unprimed slot unchanged. Applying it twice negates the
/// polynomial; four applications are the identity.
pub fn relabel_party(p: &MsPolynomial, j: usize) -> Result<MsPolynomial> {
    if j == 0 || j > p.n {
        return Err(Error::PartyIndexOutOfRange { index: j, n: p.n });
    }
    let bit = 1u32 << (j - 1);
    let mut coeffs: BTreeMap<u32, Coefficient> = BTreeMap::new();
    for (&s, &c) in &p.coeffs {
        let (target, coeff) = if s & bit == 0 {
            (s | bit, c.neg())
        } else {
            (s & !bit, c)
        };
        coeffs.insert(target, coeff);
    }
    Ok(MsPolynomial { n: p.n, coeffs, label: PolyLabel::Custom })
}

/// Reorders parties by a permutation: party `j+1` of the result is party
/// `perm[j]+1` of the input (0-based positions in the mask).
pub fn permute_parties(p: &MsPolynomial, perm: &[usize]) -> Result<MsPolynomial> {
    if perm.len() != p.n {
        return Err(Error::InvalidArgument(format!(
            "permutation length {} does not match n={}",
            perm.len(),
            p.n
        )));
    }
    let mut seen = vec![false; p.n];
    for &q in perm {
        if q >= p.n || seen[q] {
            return Err(Error::InvalidArgument("not a permutation".to_string()));
        }
        seen[q] = true;
    }
    let mut coeffs = BTreeMap::new();
    for (&s, &c) in &p.coeffs {
        let mut t = 0u32;
        for (new_pos, &old_pos) in perm.iter().enumerate() {
            if s & (1 << old_pos) != 0 {
                t |= 1 << new_pos;
            }
        }
        coeffs.insert(t, c);
    }
    Ok(MsPolynomial { n: p.n, coeffs, label: PolyLabel::Custom })
}

/// Fixes the settings of a subset of parties, producing a polynomial on the
/// remaining parties (original relative order kept).
///
/// `fixed` maps 1-based party indices to their pinned setting bit. The
/// coefficient at a reduced assignment `s'` is the coefficient of the merged
/// assignment in the input polynomial. Restricting over all parties yields a
/// 0-party polynomial holding a single constant.
pub fn restrict(p: &MsPolynomial, fixed: &BTreeMap<usize, bool>) -> Result<MsPolynomial> {
    for &j in fixed.keys() {
        if j == 0 || j > p.n {
            return Err(Error::PartyIndexOutOfRange { index: j, n: p.n });
        }
    }
    let kept: Vec<usize> = (1..=p.n).filter(|j| !fixed.contains_key(j)).collect();
    let mut base = 0u32;
    for (&j, &bit) in fixed {
        if bit {
            base |= 1 << (j - 1);
        }
    }
    let mut coeffs = BTreeMap::new();
    let reduced_n = kept.len();
    for sp in 0..(1u32 << reduced_n) {
        let mut s = base;
        for (pos, &j) in kept.iter().enumerate() {
            if sp & (1 << pos) != 0 {
                s |= 1 << (j - 1);
            }
        }
        let c = p.coeff(s);
        if !c.is_zero() {
            coeffs.insert(sp, c);
        }
    }
    Ok(MsPolynomial { n: reduced_n, coeffs, label: PolyLabel::Custom })
}

/// A table of correlators E(s) in [-1, 1], one per joint assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    n: usize,
    values: Vec<f64>,
}

impl CorrelationTable {
    /// Validates length and range exactly.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for n={n}, got {}",
                1usize << n,
                values.len()
            )));
        }
        for &v in &values {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::CorrelationOutOfRange(v));
            }
        }
        Ok(CorrelationTable { n, values })
    }

    /// Accepts numerically noisy entries up to `slack` beyond [-1, 1] and
    /// clamps them into range.
    pub fn new_clamped(n: usize, mut values: Vec<f64>, slack: f64) -> Result<Self> {
        if values.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for n={n}, got {}",
                1usize << n,
                values.len()
            )));
        }
        for v in &mut values {
            if !v.is_finite() || v.abs() > 1.0 + slack {
                return Err(Error::CorrelationOutOfRange(*v));
            }
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(CorrelationTable { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: u32) -> f64 {
        self.values[s as usize]
    }

    /// CSV export: one `assignment,correlator` row per joint assignment,
    /// party 1 leftmost in the bitstring.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("assignment,correlator\n");
        for s in 0..(1u32 << self.n) {
            out.push_str(&assignment_to_string(s, self.n));
            out.push(',');
            out.push_str(&self.values[s as usize].to_string());
            out.push('\n');
        }
        out
    }
}

/// Sum over assignments of c(s) * E(s); exact coefficients are converted to
/// floating point only here.
pub fn evaluate(p: &MsPolynomial, t: &CorrelationTable) -> Result<f64> {
    if p.n != t.n {
        return Err(Error::DimensionMismatch { poly: p.n, table: t.n });
    }
    Ok(p.coeffs
        .iter()
        .map(|(&s, &c)| c.to_f64() * t.values[s as usize])
        .sum())
}

/// Local (separated-parties) bound: 1 for M and M', sqrt(2) for M±.
pub fn local_bound(kind: PolyKind) -> Radical2 {
    if kind.is_plus_family() {
        Radical2::SQRT2
    } else {
        Radical2::ONE
    }
}

/// Algebraic bound, the maximum over arbitrary sign assignments:
/// 2^floor(n/2) for M_n, 2^(floor((n-1)/2) + 1/2) for M±_n.
pub fn algebraic_bound(kind: PolyKind, n: usize) -> Result<Radical2> {
    if n == 0 {
        return Err(Error::InvalidPartyCount(0));
    }
    let half = if kind.is_plus_family() {
        2 * ((n as i32 - 1) / 2) + 1
    } else {
        2 * (n as i32 / 2)
    };
    Ok(Radical2::pow2_half(half))
}

/// Communication-model bound for S_n^m: 2^((n-m)/2).
pub fn model_bound(n: usize, m: usize) -> Result<Radical2> {
    if n == 0 {
        return Err(Error::InvalidPartyCount(0));
    }
    if m == 0 || m > n {
        return Err(Error::GroupCountOutOfRange { n, m });
    }
    Ok(Radical2::pow2_half((n - m) as i32))
}

/// Stable serialized form: party count, label, and one `(assignment,
/// numerator, half_exponent)` record per nonzero term. The assignment
/// string lists party 1 leftmost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub n: usize,
    pub label: PolyLabel,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub assignment: String,
    pub numerator: i64,
    pub half_exponent: i32,
}

fn assignment_to_string(s: u32, n: usize) -> String {
    (0..n).map(|j| if s & (1 << j) != 0 { '1' } else { '0' }).collect()
}

fn assignment_from_string(text: &str, n: usize) -> Result<u32> {
    if text.len() != n {
        return Err(Error::InvalidArgument(format!(
            "assignment '{text}' does not have {n} bits"
        )));
    }
    let mut s = 0u32;
    for (j, ch) in text.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => s |= 1 << j,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "assignment '{text}' contains invalid character '{ch}'"
                )))
            }
        }
    }
    Ok(s)
}

impl From<&MsPolynomial> for PolynomialRecord {
    fn from(p: &MsPolynomial) -> Self {
        PolynomialRecord {
            n: p.n,
            label: p.label,
            terms: p
                .terms()
                .map(|(s, c)| TermRecord {
                    assignment: assignment_to_string(s, p.n),
                    numerator: c.numerator(),
                    half_exponent: c.half_exponent(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialRecord> for MsPolynomial {
    type Error = Error;

    fn try_from(rec: PolynomialRecord) -> Result<Self> {
        let terms: Result<Vec<(u32, Coefficient)>> = rec
            .terms
            .iter()
            .map(|t| {
                let s = assignment_from_string(&t.assignment, rec.n)?;
                Ok((s, Coefficient::new(t.numerator, t.half_exponent)))
            })
            .collect();
        MsPolynomial::from_terms(rec.n, terms?, rec.label)
    }
}

//! Correlation tables for GHZ and W states under two dichotomic projective
//! measurements per party: a dense statevector engine for n <= 14 and
//! closed-form evaluators that scale to very large n.
//!
//! Observables are traceless ±1-eigenvalue qubit operators given by Bloch
//! angles: A = sin(theta)cos(phi) X + sin(theta)sin(phi) Y + cos(theta) Z,
//! i.e. the matrix [[cos t, sin t e^{-i p}], [sin t e^{i p}, -cos t]].
//!
//! The closed forms rest on the product identity
//! M_n + i M'_n = 2^(-(n-1)/2) e^{-i(n-1)pi/4} prod_j (A0_j + i A1_j),
//! which turns every family expectation into one tensor contraction of the
//! non-Hermitian single-qubit operator B = A0 + i A1.

use crate::error::{Error, Result};
use crate::poly::{CorrelationTable, PolyKind};
pub use num_complex::Complex64;
use rayon::join;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

/// Dense statevector limit: 2^14 amplitudes.
pub const MAX_STATEVECTOR_PARTIES: usize = 14;
/// Dense correlation-table limit (2^n entries).
pub const MAX_TABLE_PARTIES: usize = 20;
/// General (non-identical settings) W contraction is O(n^2).
pub const MAX_W_GENERAL_PARTIES: usize = 4096;

const CLAMP_SLACK: f64 = 1e-9;

/// One ±1-valued measurement: either projective along a Bloch direction or
/// the degenerate measurement with a fixed outcome.
///
/// The degenerate variant is the extreme point of the set of ±1-valued
/// qubit measurements that Bloch directions cannot express; it is what
/// realizes deterministic local strategies inside a quantum experiment and
/// carries the flat branch of the optimized violation curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observable {
    Bloch { theta: f64, phi: f64 },
    Trivial { sign: i8 },
}

impl Observable {
    pub fn new(theta: f64, phi: f64) -> Self {
        Observable::Bloch { theta, phi }
    }

    pub fn z() -> Self {
        Observable::Bloch { theta: 0.0, phi: 0.0 }
    }

    /// Fixed-outcome measurement; `sign` must be ±1.
    pub fn trivial(sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "trivial outcome must be ±1");
        Observable::Trivial { sign }
    }

    /// Bloch angles when projective, `None` for fixed-outcome measurements.
    pub fn bloch_angles(&self) -> Option<(f64, f64)> {
        match *self {
            Observable::Bloch { theta, phi } => Some((theta, phi)),
            Observable::Trivial { .. } => None,
        }
    }

    /// 2x2 matrix entries: (m00, m01, m10, m11).
    fn matrix(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        match *self {
            Observable::Bloch { theta, phi } => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                let m00 = Complex64::new(ct, 0.0);
                let m01 = Complex64::new(st * cp, -st * sp);
                let m10 = Complex64::new(st * cp, st * sp);
                let m11 = Complex64::new(-ct, 0.0);
                (m00, m01, m10, m11)
            }
            Observable::Trivial { sign } => {
                let s = Complex64::new(f64::from(sign), 0.0);
                let zero = Complex64::new(0.0, 0.0);
                (s, zero, zero, s)
            }
        }
    }

    /// Real diagonal entries (m00, m11); both variants are Hermitian.
    fn diag(&self) -> (f64, f64) {
        let (m00, _, _, m11) = self.matrix();
        (m00.re, m11.re)
    }

    fn off_diag(&self) -> Complex64 {
        let (_, m01, _, _) = self.matrix();
        m01
    }
}

/// The two observables one party can measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartySettings {
    pub setting0: Observable,
    pub setting1: Observable,
}

impl PartySettings {
    pub fn new(setting0: Observable, setting1: Observable) -> Self {
        PartySettings { setting0, setting1 }
    }

    fn observable(&self, bit: bool) -> &Observable {
        if bit {
            &self.setting1
        } else {
            &self.setting0
        }
    }

    /// Entries of B = A0 + i A1 scaled by 1/sqrt(2):
    /// (alpha, beta, gamma_minus, gamma_plus) =
    /// (<0|B|0>, <1|B|1>, <0|B|1>, <1|B|0>) / sqrt(2).
    fn b_entries_scaled(&self) -> BEntries {
        let i = Complex64::new(0.0, 1.0);
        let (a00, a01, a10, a11) = self.setting0.matrix();
        let (b00, b01, b10, b11) = self.setting1.matrix();
        BEntries {
            alpha: (a00 + i * b00) * FRAC_1_SQRT_2,
            beta: (a11 + i * b11) * FRAC_1_SQRT_2,
            gamma_minus: (a01 + i * b01) * FRAC_1_SQRT_2,
            gamma_plus: (a10 + i * b10) * FRAC_1_SQRT_2,
        }
    }
}

#[derive(Clone, Copy)]
struct BEntries {
    alpha: Complex64,
    beta: Complex64,
    gamma_minus: Complex64,
    gamma_plus: Complex64,
}

/// Measurement settings for all parties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings(pub Vec<PartySettings>);

impl Settings {
    pub fn identical(n: usize, shared: PartySettings) -> Self {
        Settings(vec![shared; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    pub fn party(&self, j: usize) -> &PartySettings {
        &self.0[j]
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::SettingsLengthMismatch { expected: n, got: self.0.len() });
        }
        Ok(())
    }
}

/// Which state family to analyze.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    Ghz { theta: f64 },
    W,
}

/// A state family member with its party count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub kind: StateKind,
    pub n: usize,
}

impl StateSpec {
    /// cos(theta)|0..0> + sin(theta)|1..1>, theta in [0, pi/4].
    pub fn ghz(n: usize, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartyCount(0));
        }
        if !theta.is_finite() || !(0.0..=FRAC_PI_4 + 1e-12).contains(&theta) {
            return Err(Error::GhzAngleOutOfRange(theta));
        }
        Ok(StateSpec { kind: StateKind::Ghz { theta }, n })
    }

    /// Equal superposition of all single-excitation basis states.
    pub fn w(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartyCount(0));
        }
        Ok(StateSpec { kind: StateKind::W, n })
    }
}

/// Dense amplitudes of the state, little-endian: bit j of the basis index is
/// the computational state of party j+1.
pub fn statevector(spec: &StateSpec) -> Result<Vec<Complex64>> {
    if spec.n > MAX_STATEVECTOR_PARTIES {
        return Err(Error::PartyCountTooLarge {
            n: spec.n,
            limit: MAX_STATEVECTOR_PARTIES,
            what: "dense statevector",
        });
    }
    let dim = 1usize << spec.n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    match spec.kind {
        StateKind::Ghz { theta } => {
            amps[0] = Complex64::new(theta.cos(), 0.0);
            amps[dim - 1] = Complex64::new(theta.sin(), 0.0);
        }
        StateKind::W => {
            let w = Complex64::new(1.0 / (spec.n as f64).sqrt(), 0.0);
            for j in 0..spec.n {
                amps[1 << j] = w;
            }
        }
    }
    Ok(amps)
}

fn apply_observable(state: &[Complex64], qubit: usize, obs: &Observable) -> Vec<Complex64> {
    let (m00, m01, m10, m11) = obs.matrix();
    let bit = 1usize << qubit;
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for i in 0..state.len() {
        if i & bit == 0 {
            let lo = state[i];
            let hi = state[i | bit];
            out[i] = m00 * lo + m01 * hi;
            out[i | bit] = m10 * lo + m11 * hi;
        }
    }
    out
}

fn inner_re(psi: &[Complex64], v: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in psi.iter().zip(v) {
        acc += a.conj() * b;
    }
    debug_assert!(acc.im.abs() < 1e-9, "expectation should be real, got {acc}");
    acc.re
}

/// Correlation table of an arbitrary normalized state: one expectation value
/// of the product observable per joint assignment.
pub fn correlation_table_from_amplitudes(
    amps: &[Complex64],
    settings: &Settings,
) -> Result<CorrelationTable> {
    let n = settings.len();
    if amps.len() != 1usize << n {
        return Err(Error::InvalidArgument(format!(
            "state has {} amplitudes, expected {} for n={n}",
            amps.len(),
            1usize << n
        )));
    }
    if n > MAX_STATEVECTOR_PARTIES {
        return Err(Error::PartyCountTooLarge {
            n,
            limit: MAX_STATEVECTOR_PARTIES,
            what: "dense statevector",
        });
    }
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm2));
    }

    // Descend party by party from the highest bit, applying one of the two
    // observables per branch; leaves land in index order automatically.
    fn recurse(
        remaining: usize,
        state: &[Complex64],
        psi0: &[Complex64],
        settings: &Settings,
        out: &mut [f64],
    ) {
        if remaining == 0 {
            out[0] = inner_re(psi0, state);
            return;
        }
        let qubit = remaining - 1;
        let half = out.len() / 2;
        let party = settings.party(qubit);
        let (lo, hi) = out.split_at_mut(half);
        if remaining >= 10 {
            let s0 = apply_observable(state, qubit, party.observable(false));
            let s1 = apply_observable(state, qubit, party.observable(true));
            join(
                || recurse(remaining - 1, &s0, psi0, settings, lo),
                || recurse(remaining - 1, &s1, psi0, settings, hi),
            );
        } else {
            let s0 = apply_observable(state, qubit, party.observable(false));
            recurse(remaining - 1, &s0, psi0, settings, lo);
            let s1 = apply_observable(state, qubit, party.observable(true));
            recurse(remaining - 1, &s1, psi0, settings, hi);
        }
    }

    let mut values = vec![0.0; 1usize << n];
    recurse(n, amps, amps, settings, &mut values);
    CorrelationTable::new_clamped(n, values, CLAMP_SLACK)
}

/// Correlation table of a GHZ or W state through the dense engine.
pub fn correlation_table_statevector(
    spec: &StateSpec,
    settings: &Settings,
) -> Result<CorrelationTable> {
    settings.check_len(spec.n)?;
    let amps = statevector(spec)?;
    correlation_table_from_amplitudes(&amps, settings)
}

/// Closed-form GHZ correlation table for arbitrary per-party settings.
///
/// E(s) = cos^2 t prod_j <0|A_j|0> + sin^2 t prod_j <1|A_j|1>
///        + sin(2t) Re prod_j <0|A_j|1>,
/// one product per party over the chosen observable's matrix entries.
pub fn correlation_ghz_closed(
    n: usize,
    theta: f64,
    settings: &Settings,
) -> Result<CorrelationTable> {
    let spec = StateSpec::ghz(n, theta)?;
    settings.check_len(spec.n)?;
    if n > MAX_TABLE_PARTIES {
        return Err(Error::PartyCountTooLarge { n, limit: MAX_TABLE_PARTIES, what: "dense table" });
    }
    let (s, c) = theta.sin_cos();
    let coeffs = (c * c, s * s, 2.0 * s * c);

    fn recurse(
        remaining: usize,
        prod_m00: f64,
        prod_m11: f64,
        prod_m01: Complex64,
        settings: &Settings,
        coeffs: (f64, f64, f64),
        out: &mut [f64],
    ) {
        if remaining == 0 {
            out[0] = coeffs.0 * prod_m00 + coeffs.1 * prod_m11 + coeffs.2 * prod_m01.re;
            return;
        }
        let j = remaining - 1;
        let half = out.len() / 2;
        let (lo, hi) = out.split_at_mut(half);
        for (bit, slice) in [(false, lo), (true, hi)] {
            let obs = settings.party(j).observable(bit);
            let (m00, m11) = obs.diag();
            recurse(
                remaining - 1,
                prod_m00 * m00,
                prod_m11 * m11,
                prod_m01 * obs.off_diag(),
                settings,
                coeffs,
                slice,
            );
        }
    }

    let mut values = vec![0.0; 1usize << n];
    recurse(n, 1.0, 1.0, Complex64::new(1.0, 0.0), settings, coeffs, &mut values);
    CorrelationTable::new_clamped(n, values, CLAMP_SLACK)
}

/// W-state correlators resolved by assignment weight, for identical
/// settings: entry w is E(s) for any s with w parties measuring setting 1.
///
/// Works in the (n+1)-dimensional single-excitation sector, so n can be
/// very large.
pub fn w_weight_correlations(n: usize, shared: &PartySettings) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidPartyCount(0));
    }
    let (d00_0, d11_0) = shared.setting0.diag();
    let (d00_1, d11_1) = shared.setting1.diag();
    let off0 = shared.setting0.off_diag();
    let off1 = shared.setting1.off_diag();
    let cross00 = off0.norm_sqr();
    let cross11 = off1.norm_sqr();
    // m10_0 m01_1 + m10_1 m01_0 for one unordered pair on distinct settings
    let cross01 = 2.0 * (off0.conj() * off1).re;
    let nf = n as f64;
    let pow = |base: f64, e: i64| -> f64 { base.powi(e as i32) };
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=(n as i64) {
        let q = n as i64 - w; // parties on setting 0
        let mut e = 0.0;
        if q >= 1 {
            e += q as f64 * d11_0 * pow(d00_0, q - 1) * pow(d00_1, w);
        }
        if w >= 1 {
            e += w as f64 * d11_1 * pow(d00_0, q) * pow(d00_1, w - 1);
        }
        if q >= 2 {
            e += (q * (q - 1)) as f64 * cross00 * pow(d00_0, q - 2) * pow(d00_1, w);
        }
        if w >= 2 {
            e += (w * (w - 1)) as f64 * cross11 * pow(d00_0, q) * pow(d00_1, w - 2);
        }
        if w >= 1 && q >= 1 {
            e += (w * q) as f64 * cross01 * pow(d00_0, q - 1) * pow(d00_1, w - 1);
        }
        out.push((e / nf).clamp(-1.0, 1.0));
    }
    Ok(out)
}

/// Closed-form W correlation table; requires identical settings across all
/// parties (the table is then permutation symmetric).
pub fn correlation_w_closed(n: usize, settings: &Settings) -> Result<CorrelationTable> {
    settings.check_len(n)?;
    if !settings.is_identical() {
        return Err(Error::SettingsNotIdentical);
    }
    if n > MAX_TABLE_PARTIES {
        return Err(Error::PartyCountTooLarge { n, limit: MAX_TABLE_PARTIES, what: "dense table" });
    }
    let by_weight = w_weight_correlations(n, settings.party(0))?;
    let values = (0..(1u32 << n)).map(|s| by_weight[s.count_ones() as usize]).collect();
    CorrelationTable::new_clamped(n, values, CLAMP_SLACK)
}

/// e^{-i k pi / 4} with k reduced exactly modulo 8.
fn eighth_root_phase(k: usize) -> Complex64 {
    const H: f64 = FRAC_1_SQRT_2;
    match k % 8 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(H, -H),
        2 => Complex64::new(0.0, -1.0),
        3 => Complex64::new(-H, -H),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-H, H),
        6 => Complex64::new(0.0, 1.0),
        _ => Complex64::new(H, H),
    }
}

/// Square-and-multiply power; avoids trig argument reduction at large n and
/// is bit-deterministic.
fn complex_pow(base: Complex64, exp: usize) -> Complex64 {
    let mut result = Complex64::new(1.0, 0.0);
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        b *= b;
        e >>= 1;
    }
    result
}

/// Scaled contraction T / 2^(n/2) of the product operator over all parties.
fn scaled_contraction(spec: &StateSpec, settings: &Settings) -> Result<Complex64> {
    let n = spec.n;
    match spec.kind {
        StateKind::Ghz { theta } => {
            let (s, c) = theta.sin_cos();
            let mut prod_alpha = Complex64::new(1.0, 0.0);
            let mut prod_beta = Complex64::new(1.0, 0.0);
            let mut prod_gm = Complex64::new(1.0, 0.0);
            let mut prod_gp = Complex64::new(1.0, 0.0);
            for j in 0..n {
                let e = settings.party(j).b_entries_scaled();
                prod_alpha *= e.alpha;
                prod_beta *= e.beta;
                prod_gm *= e.gamma_minus;
                prod_gp *= e.gamma_plus;
            }
            Ok(c * c * prod_alpha + s * s * prod_beta + s * c * (prod_gm + prod_gp))
        }
        StateKind::W => {
            if settings.is_identical() {
                let e = settings.party(0).b_entries_scaled();
                let head = e.beta * complex_pow(e.alpha, n - 1);
                let tail = if n >= 2 {
                    (n as f64 - 1.0)
                        * e.gamma_plus
                        * e.gamma_minus
                        * complex_pow(e.alpha, n - 2)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                return Ok(head + tail);
            }
            if n > MAX_W_GENERAL_PARTIES {
                return Err(Error::PartyCountTooLarge {
                    n,
                    limit: MAX_W_GENERAL_PARTIES,
                    what: "general-settings W contraction",
                });
            }
            let entries: Vec<BEntries> =
                (0..n).map(|j| settings.party(j).b_entries_scaled()).collect();
            // prefix[i] = prod of alpha over parties < i, suffix[i] = over >= i
            let mut prefix = vec![Complex64::new(1.0, 0.0); n + 1];
            for i in 0..n {
                prefix[i + 1] = prefix[i] * entries[i].alpha;
            }
            let mut suffix = vec![Complex64::new(1.0, 0.0); n + 1];
            for i in (0..n).rev() {
                suffix[i] = suffix[i + 1] * entries[i].alpha;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += entries[j].beta * prefix[j] * suffix[j + 1];
                // ordered pairs (j, k), j < k, both gamma orders
                let mut seg = Complex64::new(1.0, 0.0);
                for k in j + 1..n {
                    let outer = prefix[j] * seg * suffix[k + 1];
                    acc += entries[j].gamma_plus * entries[k].gamma_minus * outer;
                    acc += entries[k].gamma_plus * entries[j].gamma_minus * outer;
                    seg *= entries[k].alpha;
                }
            }
            Ok(acc / n as f64)
        }
    }
}

/// Closed-form expectation of a family polynomial on the state. Agrees with
/// evaluating the dense polynomial against the statevector table.
pub fn ms_expectation(spec: &StateSpec, settings: &Settings, kind: PolyKind) -> Result<f64> {
    let (m, mp) = ms_expectation_pair(spec, settings)?;
    Ok(match kind {
        PolyKind::M => m,
        PolyKind::MPrime => mp,
        PolyKind::MPlus => (m + mp) * FRAC_1_SQRT_2,
        PolyKind::MMinus => (m - mp) * FRAC_1_SQRT_2,
    })
}

/// (M_n, M'_n) expectations from one contraction.
pub fn ms_expectation_pair(spec: &StateSpec, settings: &Settings) -> Result<(f64, f64)> {
    settings.check_len(spec.n)?;
    let t = scaled_contraction(spec, settings)?;
    let z = SQRT_2 * eighth_root_phase(spec.n - 1) * t;
    Ok((z.re, z.im))
}

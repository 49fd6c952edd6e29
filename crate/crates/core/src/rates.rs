//! Information, leakage and secrecy rates.
//!
//! All rates are in bits per channel use. Internally everything is a natural
//! log and gets divided by `ln 2` once at the end.
//!
//! Two evaluation routes share one code path: a [`GainTable`] holds the
//! effective power gains of every link, either `|omega† H|²` for a phase
//! vector or `tr(H H† W)` for a relaxed matrix `W`. With `W = omega omega†`
//! both routes agree.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::EffectiveChannels;
use crate::error::{Error, Result};
use crate::geometry::NodeId;
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::params::SystemParams;

/// Transmit powers `[P_A1, P_B1, ..., P_AN, P_BN]` in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector(Vec<f64>);

impl PowerVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "power vector of length {}",
                p.len()
            )));
        }
        if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParams(
                "powers must be finite and nonnegative".into(),
            ));
        }
        Ok(Self(p))
    }

    pub fn uniform(users: usize, value: f64) -> Self {
        Self(alloc::vec![value; users])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn within(&self, lo: f64, hi: f64, tol: f64) -> bool {
        self.0.iter().all(|&v| v >= lo - tol && v <= hi + tol)
    }
}

/// IRS reflection vector `[e^{j phi_1}, ..., e^{j phi_L}, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<Complex64>);

impl PhaseVector {
    pub fn from_angles(angles: &[f64]) -> Self {
        Self(
            angles
                .iter()
                .map(|&a| Complex64::from_polar(1.0, a))
                .chain(core::iter::once(Complex64::new(1.0, 0.0)))
                .collect(),
        )
    }

    /// Checks unit modulus (within `1e-9`) and an exact unit last entry.
    pub fn new(omega: Vec<Complex64>) -> Result<Self> {
        match omega.last() {
            Some(z) if *z == Complex64::new(1.0, 0.0) => {}
            _ => {
                return Err(Error::InvalidParams(
                    "last phase entry must be exactly 1".into(),
                ))
            }
        }
        if omega.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidParams(
                "phase entries must have unit modulus".into(),
            ));
        }
        Ok(Self(omega))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// Number of IRS elements `L`.
    pub fn elements(&self) -> usize {
        self.0.len() - 1
    }

    /// Phase angles of the IRS elements, in `(-pi, pi]`.
    pub fn angles(&self) -> Vec<f64> {
        self.0[..self.0.len() - 1].iter().map(|z| z.arg()).collect()
    }

    /// `omega omega†`.
    pub fn outer(&self) -> CMatrix {
        CMatrix::outer(&self.0)
    }
}

/// Hermitian positive semidefinite matrix of size `L + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix(CMatrix);

impl PsdMatrix {
    /// Validates Hermitian symmetry (`1e-12`, relative to the largest entry)
    /// and eigenvalues `>= -1e-9 tr(W)`.
    pub fn new(w: CMatrix) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::NotPsd("non-finite entry".into()));
        }
        let scale = w.as_slice().iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let defect = w.hermitian_defect();
        if defect > 1e-12 * scale {
            return Err(Error::NotPsd(format!("Hermitian defect {defect:e}")));
        }
        let eig = hermitian_eigen(&w)?;
        let tr = w.trace().re.abs().max(f64::MIN_POSITIVE);
        if eig.min_value() < -1e-9 * tr {
            return Err(Error::NotPsd(format!("eigenvalue {:e}", eig.min_value())));
        }
        Ok(Self(w))
    }

    pub fn rank_one(omega: &PhaseVector) -> Self {
        Self(omega.outer())
    }

    /// Wraps a matrix produced by the optimizer without re-checking it.
    pub(crate) fn trusted(w: CMatrix) -> Self {
        Self(w)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Effective power gain of every (transmitter, receiver) link.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    users: usize,
    gains: Vec<f64>,
}

impl GainTable {
    fn build(eff: &EffectiveChannels, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let users = eff.users();
        let mut gains = alloc::vec![0.0; users * (users + 1)];
        for x in 0..users {
            for y in 0..=users {
                if x != y {
                    gains[x * (users + 1) + y] = f(x, y);
                }
            }
        }
        Self { users, gains }
    }

    /// `|omega† H_{X,Y}|²`.
    pub fn from_phases(eff: &EffectiveChannels, omega: &PhaseVector) -> Self {
        Self::build(eff, |x, y| eff.gain(x, y, omega.as_slice()))
    }

    /// `tr(H̃_{X,Y} W)`.
    pub fn from_relaxed(eff: &EffectiveChannels, w: &CMatrix) -> Self {
        Self::build(eff, |x, y| eff.relaxed_gain(x, y, w))
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn pairs(&self) -> usize {
        self.users / 2
    }

    /// Receiver index of the eavesdropper.
    pub fn eve(&self) -> usize {
        self.users
    }

    #[inline]
    pub fn gain(&self, x: usize, y: usize) -> f64 {
        if x == y {
            0.0
        } else {
            self.gains[x * (self.users + 1) + y]
        }
    }

    /// `(signal, interference + sigma² + sigma_l²)` at legitimate receiver
    /// `rx`.
    pub fn legit_terms(&self, p: &[f64], rx: usize, params: &SystemParams) -> (f64, f64) {
        let partner = rx ^ 1;
        let signal = p[partner] * self.gain(partner, rx);
        let mut den = params.sigma2 + params.sigma_l2;
        for x in 0..self.users {
            if x / 2 != rx / 2 {
                den += p[x] * self.gain(x, rx);
            }
        }
        (signal, den)
    }

    /// `(own-pair power at E, other-pair interference at E + sigma²)` for
    /// pair `j` (0-based).
    pub fn eve_terms(&self, p: &[f64], pair: usize, params: &SystemParams) -> (f64, f64) {
        let e = self.eve();
        let mut num = 0.0;
        let mut den = params.sigma2;
        for x in 0..self.users {
            if x / 2 == pair {
                num += p[x] * self.gain(x, e);
            } else {
                den += p[x] * self.gain(x, e);
            }
        }
        (num, den)
    }

    /// Natural-log rates `(ln(1+SINR_A), ln(1+SINR_B), ln(1+SINR_E))` of
    /// pair `j` (0-based).
    pub fn pair_nats(&self, p: &[f64], pair: usize, params: &SystemParams) -> (f64, f64, f64) {
        let (sa, da) = self.legit_terms(p, 2 * pair, params);
        let (sb, db) = self.legit_terms(p, 2 * pair + 1, params);
        let (ne, de) = self.eve_terms(p, pair, params);
        ((sa / da).ln_1p(), (sb / db).ln_1p(), (ne / de).ln_1p())
    }

    /// Unclamped secrecy value of pair `j` in bits.
    pub fn unclamped(&self, p: &[f64], pair: usize, params: &SystemParams) -> f64 {
        let (a, b, e) = self.pair_nats(p, pair, params);
        (a + b - e) / LN_2
    }

    /// `min_j` of the unclamped secrecy values.
    pub fn min_unclamped(&self, p: &[f64], params: &SystemParams) -> f64 {
        (0..self.pairs())
            .map(|j| self.unclamped(p, j, params))
            .fold(f64::INFINITY, f64::min)
    }

    /// `min_j C_j` (clamped at zero).
    pub fn min_secrecy(&self, p: &[f64], params: &SystemParams) -> f64 {
        self.min_unclamped(p, params).max(0.0)
    }

    pub fn breakdown(&self, p: &[f64], params: &SystemParams) -> RateBreakdown {
        let pairs: Vec<PairRates> = (0..self.pairs())
            .map(|j| {
                let (a, b, e) = self.pair_nats(p, j, params);
                let unclamped = (a + b - e) / LN_2;
                PairRates {
                    rate_a: a / LN_2,
                    rate_b: b / LN_2,
                    leakage: e / LN_2,
                    unclamped,
                    secrecy: unclamped.max(0.0),
                }
            })
            .collect();
        let min_unclamped = pairs
            .iter()
            .map(|r| r.unclamped)
            .fold(f64::INFINITY, f64::min);
        RateBreakdown {
            pairs,
            min_secrecy: min_unclamped.max(0.0),
            min_unclamped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRates {
    /// Rate at `A_j` decoding `B_j`.
    pub rate_a: f64,
    /// Rate at `B_j` decoding `A_j`.
    pub rate_b: f64,
    /// Worst-case leakage of the pair to the eavesdropper.
    pub leakage: f64,
    /// `rate_a + rate_b - leakage`.
    pub unclamped: f64,
    /// `max(0, unclamped)`.
    pub secrecy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    pub pairs: Vec<PairRates>,
    pub min_secrecy: f64,
    pub min_unclamped: f64,
}

fn check_power(eff: &EffectiveChannels, p: &PowerVector) -> Result<()> {
    if p.len() != eff.users() {
        return Err(Error::Dimension(format!(
            "{} powers for {} users",
            p.len(),
            eff.users()
        )));
    }
    Ok(())
}

/// Information rate at a legitimate receiver, in bits.
pub fn rate_legit(
    eff: &EffectiveChannels,
    p: &PowerVector,
    omega: &PhaseVector,
    receiver: NodeId,
    params: &SystemParams,
) -> Result<f64> {
    check_power(eff, p)?;
    let rx = receiver
        .user_index()
        .filter(|&u| u < eff.users())
        .ok_or(Error::UnplacedNode(receiver))?;
    let (s, d) = GainTable::from_phases(eff, omega).legit_terms(p.as_slice(), rx, params);
    Ok((s / d).ln_1p() / LN_2)
}

/// Leakage of pair `pair` (1-based) to the eavesdropper, in bits.
pub fn rate_eve(
    eff: &EffectiveChannels,
    p: &PowerVector,
    omega: &PhaseVector,
    pair: usize,
    params: &SystemParams,
) -> Result<f64> {
    check_power(eff, p)?;
    if pair == 0 || pair > eff.pairs() {
        return Err(Error::UnplacedNode(NodeId::LegitA(pair)));
    }
    let (n, d) = GainTable::from_phases(eff, omega).eve_terms(p.as_slice(), pair - 1, params);
    Ok((n / d).ln_1p() / LN_2)
}

pub fn secrecy_breakdown(
    eff: &EffectiveChannels,
    p: &PowerVector,
    omega: &PhaseVector,
    params: &SystemParams,
) -> Result<RateBreakdown> {
    check_power(eff, p)?;
    Ok(GainTable::from_phases(eff, omega).breakdown(p.as_slice(), params))
}

/// The two concave parts of the relaxed secrecy value, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceTerms {
    pub q: f64,
    pub s: f64,
}

impl TraceTerms {
    pub fn g(&self) -> f64 {
        self.q - self.s
    }
}

/// `Q_j` and `S_j` from a gain table (pair 0-based).
pub(crate) fn trace_terms_from_gains(
    g: &GainTable,
    p: &[f64],
    pair: usize,
    params: &SystemParams,
) -> TraceTerms {
    let (sa, da) = g.legit_terms(p, 2 * pair, params);
    let (sb, db) = g.legit_terms(p, 2 * pair + 1, params);
    let (ne, de) = g.eve_terms(p, pair, params);
    TraceTerms {
        q: ((sa + da).ln() + (sb + db).ln() + de.ln()) / LN_2,
        s: (da.ln() + db.ln() + (ne + de).ln()) / LN_2,
    }
}

/// `Q_j(P, W)` and `S_j(P, W)` for pair `pair` (1-based).
pub fn trace_form_terms(
    eff: &EffectiveChannels,
    p: &PowerVector,
    w: &PsdMatrix,
    pair: usize,
    params: &SystemParams,
) -> Result<TraceTerms> {
    check_power(eff, p)?;
    if pair == 0 || pair > eff.pairs() {
        return Err(Error::UnplacedNode(NodeId::LegitA(pair)));
    }
    if w.matrix().dim() != eff.dim() {
        return Err(Error::Dimension(format!(
            "W is {0}x{0}, expected {1}x{1}",
            w.matrix().dim(),
            eff.dim()
        )));
    }
    let g = GainTable::from_relaxed(eff, w.matrix());
    Ok(trace_terms_from_gains(&g, p.as_slice(), pair - 1, params))
}

/// `G_j(P, W) = Q_j - S_j`, the relaxed unclamped secrecy value of pair
/// `pair` (1-based).
pub fn trace_form_g(
    eff: &EffectiveChannels,
    p: &PowerVector,
    w: &PsdMatrix,
    pair: usize,
    params: &SystemParams,
) -> Result<f64> {
    Ok(trace_form_terms(eff, p, w, pair, params)?.g())
}

/// `sum_X P_X H̃_{X,rx}` over transmitters `X` accepted by `include`.
pub fn weighted_gram(
    eff: &EffectiveChannels,
    p: &[f64],
    rx: usize,
    mut include: impl FnMut(usize) -> bool,
) -> CMatrix {
    let mut out = CMatrix::zeros(eff.dim());
    for x in 0..eff.users() {
        if x != rx && include(x) && p[x] != 0.0 {
            out.add_outer(p[x], eff.vector(x, rx));
        }
    }
    out
}

#[cfg(test)]
pub(crate) use tests::instance as test_instance;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_effective, sample_channels};
    use crate::geometry::{place_nodes, ConfigLabel, ScenarioConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn instance(
        l: usize,
        label: ConfigLabel,
        seed: u64,
    ) -> (EffectiveChannels, SystemParams) {
        let p = SystemParams::reference(l, 2);
        let g = place_nodes(&ScenarioConfig::named(label, p.clone()).unwrap()).unwrap();
        let chs = sample_channels(&g, &p, seed).unwrap();
        (build_effective(&chs), p)
    }

    fn random_phases(l: usize, rng: &mut ChaCha8Rng) -> PhaseVector {
        let a: Vec<f64> = (0..l)
            .map(|_| rng.random::<f64>() * core::f64::consts::TAU)
            .collect();
        PhaseVector::from_angles(&a)
    }

    fn random_power(users: usize, params: &SystemParams, rng: &mut ChaCha8Rng) -> PowerVector {
        PowerVector::new(
            (0..users)
                .map(|_| params.p_min + rng.random::<f64>() * (params.p_max - params.p_min))
                .collect(),
        )
        .unwrap()
    }

    /// Scalar evaluation straight from the cascaded vectors, no gain table.
    fn scalar_gain(eff: &EffectiveChannels, x: usize, y: usize, omega: &[Complex64]) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (w, h) in omega.iter().zip(eff.vector(x, y)) {
            s += w.conj() * h;
        }
        s.re * s.re + s.im * s.im
    }

    #[test]
    fn zero_power_gives_zero_rates() {
        let (eff, params) = instance(4, ConfigLabel::C1, 1);
        let omega = PhaseVector::from_angles(&[0.1, 0.2, 0.3, 0.4]);
        let p = PowerVector::uniform(4, 0.0);
        assert_eq!(
            rate_legit(&eff, &p, &omega, NodeId::LegitA(1), &params).unwrap(),
            0.0
        );
        assert_eq!(rate_eve(&eff, &p, &omega, 2, &params).unwrap(), 0.0);
        let w = PsdMatrix::rank_one(&omega);
        assert_eq!(trace_form_g(&eff, &p, &w, 1, &params).unwrap(), 0.0);
    }

    #[test]
    fn unit_sinr_gives_one_bit() {
        // single pair, gain chosen so that P * gain equals the noise floor
        use crate::channel::ChannelSet;
        let params = SystemParams::reference(0, 1);
        let noise = params.sigma2 + params.sigma_l2;
        let h = Complex64::new(noise.sqrt(), 0.0);
        let z = Complex64::new(0.0, 0.0);
        let chs = ChannelSet::from_parts(
            2,
            alloc::vec![z, h, h, z],
            alloc::vec![alloc::vec![]; 2],
            alloc::vec![z; 2],
            alloc::vec![],
        )
        .unwrap();
        let eff = build_effective(&chs);
        let p = PowerVector::uniform(2, 1.0);
        let omega = PhaseVector::from_angles(&[]);
        let r = rate_legit(&eff, &p, &omega, NodeId::LegitB(1), &params).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        // no interference at E for a single pair: denominator is sigma² only
        let b = secrecy_breakdown(&eff, &p, &omega, &params).unwrap();
        assert_eq!(b.pairs[0].leakage, 0.0);
        assert!((b.pairs[0].secrecy - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rates_match_scalar_reimplementation() {
        let (eff, params) = instance(6, ConfigLabel::C1, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let omega = random_phases(6, &mut rng);
            let p = random_power(4, &params, &mut rng);
            let pv = p.as_slice();
            let w = omega.as_slice();
            let n_legit = params.sigma2 + params.sigma_l2;
            let mut min_c = f64::INFINITY;
            for j in 0..2 {
                let (a, b) = (2 * j, 2 * j + 1);
                let others: Vec<usize> = (0..4).filter(|&x| x / 2 != j).collect();
                let ia: f64 = others
                    .iter()
                    .map(|&x| pv[x] * scalar_gain(&eff, x, a, w))
                    .sum();
                let ib: f64 = others
                    .iter()
                    .map(|&x| pv[x] * scalar_gain(&eff, x, b, w))
                    .sum();
                let ie: f64 = others
                    .iter()
                    .map(|&x| pv[x] * scalar_gain(&eff, x, 4, w))
                    .sum();
                let ra = (1.0 + pv[b] * scalar_gain(&eff, b, a, w) / (ia + n_legit)).log2();
                let rb = (1.0 + pv[a] * scalar_gain(&eff, a, b, w) / (ib + n_legit)).log2();
                let re = (1.0
                    + (pv[a] * scalar_gain(&eff, a, 4, w) + pv[b] * scalar_gain(&eff, b, 4, w))
                        / (ie + params.sigma2))
                    .log2();
                let got_a = rate_legit(&eff, &p, &omega, NodeId::LegitA(j + 1), &params).unwrap();
                let got_b = rate_legit(&eff, &p, &omega, NodeId::LegitB(j + 1), &params).unwrap();
                let got_e = rate_eve(&eff, &p, &omega, j + 1, &params).unwrap();
                assert!((got_a - ra).abs() < 1e-12);
                assert!((got_b - rb).abs() < 1e-12);
                assert!((got_e - re).abs() < 1e-12);
                min_c = min_c.min((ra + rb - re).max(0.0));
            }
            let bd = secrecy_breakdown(&eff, &p, &omega, &params).unwrap();
            assert!((bd.min_secrecy - min_c).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_form_equals_unclamped_secrecy() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (l, label) in [
            (4, ConfigLabel::C1),
            (8, ConfigLabel::C3),
            (8, ConfigLabel::C4),
        ] {
            let (eff, params) = instance(l, label, rng.random());
            for _ in 0..10 {
                let omega = random_phases(l, &mut rng);
                let p = random_power(4, &params, &mut rng);
                let bd = secrecy_breakdown(&eff, &p, &omega, &params).unwrap();
                let w = PsdMatrix::rank_one(&omega);
                for j in 0..2 {
                    let g = trace_form_g(&eff, &p, &w, j + 1, &params).unwrap();
                    assert!((g - bd.pairs[j].unclamped).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn trace_terms_match_scalar_sums() {
        let (eff, params) = instance(5, ConfigLabel::C2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_power(4, &params, &mut rng);
        let pv = p.as_slice();
        // random PSD W with unit diagonal
        let g = CMatrix::from_fn(6, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let raw = g.matmul(&g.adjoint());
        let d = raw.diag_re();
        let w = CMatrix::from_fn(6, |i, j| raw[(i, j)] / (d[i] * d[j]).sqrt());
        let tr = |x: usize, y: usize| eff.gram(x, y).matmul(&w).trace().re;
        let nl = params.sigma2 + params.sigma_l2;
        let j = 1;
        let (a, b) = (2, 3);
        let q = ((0..4)
            .filter(|&x| x != a)
            .map(|x| pv[x] * tr(x, a))
            .sum::<f64>()
            + nl)
            .log2()
            + ((0..4)
                .filter(|&x| x != b)
                .map(|x| pv[x] * tr(x, b))
                .sum::<f64>()
                + nl)
                .log2()
            + ((0..4)
                .filter(|&x| x / 2 != j)
                .map(|x| pv[x] * tr(x, 4))
                .sum::<f64>()
                + params.sigma2)
                .log2();
        let s = ((0..4)
            .filter(|&x| x / 2 != j)
            .map(|x| pv[x] * tr(x, a))
            .sum::<f64>()
            + nl)
            .log2()
            + ((0..4)
                .filter(|&x| x / 2 != j)
                .map(|x| pv[x] * tr(x, b))
                .sum::<f64>()
                + nl)
                .log2()
            + ((0..4).map(|x| pv[x] * tr(x, 4)).sum::<f64>() + params.sigma2).log2();
        let terms = trace_form_terms(&eff, &p, &PsdMatrix::new(w).unwrap(), 2, &params).unwrap();
        assert!((terms.q - q).abs() < 1e-10);
        assert!((terms.s - s).abs() < 1e-10);
    }

    #[test]
    fn clamp_and_zero_leakage() {
        use crate::channel::ChannelSet;
        let (eff, params) = instance(3, ConfigLabel::C4, 2);
        let omega = PhaseVector::from_angles(&[0.0, 1.0, 2.0]);
        let p = PowerVector::uniform(4, params.p_max);
        // C4 puts E next to B1: leakage dominates pair 1
        let bd = secrecy_breakdown(&eff, &p, &omega, &params).unwrap();
        assert!(bd.pairs[0].unclamped < 0.0);
        assert_eq!(bd.pairs[0].secrecy, 0.0);

        let g =
            place_nodes(&ScenarioConfig::named(ConfigLabel::C1, params.clone()).unwrap()).unwrap();
        let chs = sample_channels(&g, &params, 9).unwrap();
        let z = Complex64::new(0.0, 0.0);
        let users = chs.users();
        let mut direct = alloc::vec![z; users * users];
        for a in 0..users {
            for b in 0..users {
                direct[a * users + b] = chs.direct(a, b);
            }
        }
        let silent = ChannelSet::from_parts(
            users,
            direct,
            (0..users).map(|u| chs.user_irs(u).to_vec()).collect(),
            alloc::vec![z; users],
            alloc::vec![z; chs.irs_elements()],
        )
        .unwrap();
        let eff = build_effective(&silent);
        let bd = secrecy_breakdown(&eff, &p, &omega, &params).unwrap();
        for r in &bd.pairs {
            assert_eq!(r.leakage, 0.0);
            assert!((r.secrecy - (r.rate_a + r.rate_b)).abs() < 1e-12);
        }
    }

    #[test]
    fn global_phase_invariance() {
        let (eff, params) = instance(6, ConfigLabel::C1, 21);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let omega = random_phases(6, &mut rng);
        let p = random_power(4, &params, &mut rng);
        let nu = Complex64::from_polar(1.0, 0.77);
        let rotated: Vec<Complex64> = omega.as_slice().iter().map(|z| z * nu).collect();
        let g1 = GainTable::from_phases(&eff, &omega);
        let g2 = GainTable::build(&eff, |x, y| eff.gain(x, y, &rotated));
        let b1 = g1.breakdown(p.as_slice(), &params);
        let b2 = g2.breakdown(p.as_slice(), &params);
        for (r1, r2) in b1.pairs.iter().zip(&b2.pairs) {
            assert!((r1.rate_a - r2.rate_a).abs() < 1e-12);
            assert!((r1.leakage - r2.leakage).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pair_monotonicity() {
        use crate::geometry::{Geometry, Point};
        let params = SystemParams::reference(4, 1);
        let g = Geometry::new(
            alloc::vec![(Point::new(0.0, 0.0), Point::new(40.0, 0.0))],
            Point::new(20.0, 30.0),
            Point::new(38.0, 2.0),
        );
        let eff = build_effective(&sample_channels(&g, &params, 4).unwrap());
        let omega = PhaseVector::from_angles(&[0.3, -1.0, 2.0, 0.5]);
        let mut last_a = -1.0;
        let mut last_e = -1.0;
        for k in 0..20 {
            let pb = params.p_min + k as f64 * (params.p_max - params.p_min) / 19.0;
            let p = PowerVector::new(alloc::vec![params.p_min, pb]).unwrap();
            let ra = rate_legit(&eff, &p, &omega, NodeId::LegitA(1), &params).unwrap();
            let re = rate_eve(&eff, &p, &omega, 1, &params).unwrap();
            assert!(ra >= last_a && re >= last_e);
            last_a = ra;
            last_e = re;
        }
    }

    #[test]
    fn psd_validation() {
        let bad = CMatrix::from_diag(&[1.0, -0.5]);
        assert!(matches!(PsdMatrix::new(bad), Err(Error::NotPsd(_))));
        let mut skew = CMatrix::identity(2);
        skew[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(PsdMatrix::new(skew), Err(Error::NotPsd(_))));
        assert!(PhaseVector::new(alloc::vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0)
        ])
        .is_ok());
        assert!(PhaseVector::new(alloc::vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 1.0)
        ])
        .is_err());
    }
}

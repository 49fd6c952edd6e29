//! Channel sampling and cascaded effective channels.
//!
//! Every link is drawn as
//!
//! ```text
//!   h = sqrt(L0 d^-alpha) * ( sqrt(beta/(beta+1)) * LoS + sqrt(1/(beta+1)) * NLoS )
//! ```
//!
//! with `NLoS ~ CN(0, 1)` per entry. Links that end at the IRS (user-IRS and
//! E-IRS) use `alpha_irs`/`beta_irs`; every other link uses
//! `alpha_direct`/`beta_direct`. The IRS LoS term is a uniform linear array
//! steering vector `exp(j pi i sin(phi))`, with `phi` the angle of the node
//! seen from the IRS, measured from the array normal (the array lies along
//! the x axis). Direct links use a unit LoS scalar.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, NodeId};
use crate::linalg::CMatrix;
use crate::params::SystemParams;
use crate::seed::{link_stream, stream_rng, EVE_CODE, IRS_CODE};

/// All channel coefficients of one realization.
///
/// Users are indexed `0..2N` in the order `[A1, B1, A2, B2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    users: usize,
    irs_elements: usize,
    /// Symmetric `users x users`, zero diagonal.
    direct: Vec<Complex64>,
    user_irs: Vec<Vec<Complex64>>,
    eve_direct: Vec<Complex64>,
    eve_irs: Vec<Complex64>,
}

impl ChannelSet {
    /// Assembles a channel set from raw coefficients. `direct` is the full
    /// row-major `users x users` matrix and must be symmetric.
    pub fn from_parts(
        users: usize,
        direct: Vec<Complex64>,
        user_irs: Vec<Vec<Complex64>>,
        eve_direct: Vec<Complex64>,
        eve_irs: Vec<Complex64>,
    ) -> Result<Self> {
        let l = eve_irs.len();
        if users == 0 || users % 2 != 0 {
            return Err(Error::Dimension(format!(
                "user count {users} is not a positive even number"
            )));
        }
        if direct.len() != users * users || user_irs.len() != users || eve_direct.len() != users {
            return Err(Error::Dimension(
                "channel arrays do not match the user count".into(),
            ));
        }
        if user_irs.iter().any(|v| v.len() != l) {
            return Err(Error::Dimension(format!(
                "user-IRS vectors must all have length {l}"
            )));
        }
        for a in 0..users {
            for b in 0..users {
                if direct[a * users + b] != direct[b * users + a] {
                    return Err(Error::Dimension(
                        "direct channel matrix is not symmetric".into(),
                    ));
                }
            }
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !(direct.iter().all(finite)
            && user_irs.iter().flatten().all(finite)
            && eve_direct.iter().all(finite)
            && eve_irs.iter().all(finite))
        {
            return Err(Error::NumericalTrouble(
                "non-finite channel coefficient".into(),
            ));
        }
        Ok(Self {
            users,
            irs_elements: l,
            direct,
            user_irs,
            eve_direct,
            eve_irs,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn pairs(&self) -> usize {
        self.users / 2
    }

    pub fn irs_elements(&self) -> usize {
        self.irs_elements
    }

    /// Direct coefficient between users `a` and `b` (reciprocal).
    pub fn direct(&self, a: usize, b: usize) -> Complex64 {
        self.direct[a * self.users + b]
    }

    pub fn user_irs(&self, u: usize) -> &[Complex64] {
        &self.user_irs[u]
    }

    pub fn eve_direct(&self, u: usize) -> Complex64 {
        self.eve_direct[u]
    }

    pub fn eve_irs(&self) -> &[Complex64] {
        &self.eve_irs
    }

    /// Same realization with every user-IRS and E-IRS coefficient set to
    /// zero: only direct links remain.
    pub fn without_irs(&self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            user_irs: vec![vec![zero; self.irs_elements]; self.users],
            eve_irs: vec![zero; self.irs_elements],
            ..self.clone()
        }
    }
}

fn node_code(node: NodeId) -> u64 {
    match node {
        NodeId::Eve => EVE_CODE,
        NodeId::Irs => IRS_CODE,
        n => n.user_index().map(|u| u as u64).unwrap_or(u64::MAX),
    }
}

/// Weights `(sqrt(beta/(beta+1)), sqrt(1/(beta+1)))`; `beta = inf` is pure LoS.
fn rician_weights(beta: f64) -> (f64, f64) {
    if beta.is_infinite() {
        (1.0, 0.0)
    } else {
        ((beta / (beta + 1.0)).sqrt(), (1.0 / (beta + 1.0)).sqrt())
    }
}

fn cn01<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

struct LinkSampler<'a> {
    geom: &'a Geometry,
    params: &'a SystemParams,
    seed: u64,
}

impl LinkSampler<'_> {
    fn distance(&self, a: NodeId, b: NodeId) -> Result<f64> {
        let d = self.geom.distance(a, b)?;
        if !(d > 0.0) {
            return Err(Error::ZeroDistance(a, b));
        }
        Ok(d)
    }

    fn direct(&self, a: NodeId, b: NodeId) -> Result<Complex64> {
        let d = self.distance(a, b)?;
        let amp = (self.params.l0 * d.powf(-self.params.alpha_direct)).sqrt();
        let (w_los, w_nlos) = rician_weights(self.params.beta_direct);
        let mut rng = stream_rng(self.seed, link_stream(node_code(a), node_code(b)));
        let nlos = cn01(&mut rng);
        Ok((Complex64::new(w_los, 0.0) + nlos * w_nlos) * amp)
    }

    fn to_irs(&self, a: NodeId) -> Result<Vec<Complex64>> {
        let d = self.distance(a, NodeId::Irs)?;
        let amp = (self.params.l0 * d.powf(-self.params.alpha_irs)).sqrt();
        let (w_los, w_nlos) = rician_weights(self.params.beta_irs);
        let pa = self.geom.position(a)?;
        let pi = self.geom.position(NodeId::Irs)?;
        let sin_phi = (pa.x - pi.x) / d;
        let mut rng = stream_rng(self.seed, link_stream(node_code(a), IRS_CODE));
        Ok((0..self.params.irs_elements)
            .map(|i| {
                let los = Complex64::from_polar(1.0, core::f64::consts::PI * i as f64 * sin_phi);
                let nlos = cn01(&mut rng);
                (los * w_los + nlos * w_nlos) * amp
            })
            .collect())
    }
}

/// Draws every channel of one realization. Deterministic in
/// `(geom, params, seed)`.
pub fn sample_channels(geom: &Geometry, params: &SystemParams, seed: u64) -> Result<ChannelSet> {
    let users = 2 * geom.pairs();
    if params.pairs != geom.pairs() {
        return Err(Error::Dimension(format!(
            "parameters describe {} pairs, geometry has {}",
            params.pairs,
            geom.pairs()
        )));
    }
    let s = LinkSampler { geom, params, seed };
    let mut direct = vec![Complex64::new(0.0, 0.0); users * users];
    for a in 0..users {
        for b in a + 1..users {
            let h = s.direct(NodeId::from_user_index(a), NodeId::from_user_index(b))?;
            direct[a * users + b] = h;
            direct[b * users + a] = h;
        }
    }
    let user_irs = (0..users)
        .map(|u| s.to_irs(NodeId::from_user_index(u)))
        .collect::<Result<Vec<_>>>()?;
    let eve_direct = (0..users)
        .map(|u| s.direct(NodeId::from_user_index(u), NodeId::Eve))
        .collect::<Result<Vec<_>>>()?;
    let eve_irs = s.to_irs(NodeId::Eve)?;
    ChannelSet::from_parts(users, direct, user_irs, eve_direct, eve_irs)
}

/// Cascaded channel vectors `H_{X,Y}` (length `L + 1`) and their Gram
/// matrices for every transmitter `X` (a user) and receiver `Y` (a user or
/// the eavesdropper), `X != Y`.
///
/// Receivers are indexed `0..2N` for users and [`EffectiveChannels::eve`]
/// (`= 2N`) for the eavesdropper.
#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    users: usize,
    irs_elements: usize,
    vectors: Vec<Vec<Complex64>>,
    grams: Vec<CMatrix>,
}

impl EffectiveChannels {
    pub fn users(&self) -> usize {
        self.users
    }

    pub fn pairs(&self) -> usize {
        self.users / 2
    }

    pub fn irs_elements(&self) -> usize {
        self.irs_elements
    }

    /// `L + 1`.
    pub fn dim(&self) -> usize {
        self.irs_elements + 1
    }

    /// Receiver index of the eavesdropper.
    pub fn eve(&self) -> usize {
        self.users
    }

    fn slot(&self, x: usize, y: usize) -> usize {
        assert!(
            x < self.users && y <= self.users && x != y,
            "no channel {x} -> {y}"
        );
        x * (self.users + 1) + y
    }

    pub fn vector(&self, x: usize, y: usize) -> &[Complex64] {
        &self.vectors[self.slot(x, y)]
    }

    /// `H H†`.
    pub fn gram(&self, x: usize, y: usize) -> &CMatrix {
        &self.grams[self.slot(x, y)]
    }

    /// `|omega† H_{X,Y}|²`.
    pub fn gain(&self, x: usize, y: usize, omega: &[Complex64]) -> f64 {
        omega
            .iter()
            .zip(self.vector(x, y))
            .map(|(w, h)| w.conj() * h)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// `H_{X,Y}† W H_{X,Y} = tr(H H† W)`.
    pub fn relaxed_gain(&self, x: usize, y: usize, w: &CMatrix) -> f64 {
        w.quad_form(self.vector(x, y))
    }
}

/// Builds every cascaded vector `[f_X ⊙ g_Y ; h_XY]` and its Gram matrix.
pub fn build_effective(chs: &ChannelSet) -> EffectiveChannels {
    let users = chs.users();
    let l = chs.irs_elements();
    let rx = users + 1;
    let mut vectors = Vec::with_capacity(users * rx);
    let mut grams = Vec::with_capacity(users * rx);
    for x in 0..users {
        for y in 0..rx {
            let v: Vec<Complex64> = if x == y {
                Vec::new()
            } else if y == users {
                chs.user_irs(x)
                    .iter()
                    .zip(chs.eve_irs())
                    .map(|(a, b)| a * b)
                    .chain(core::iter::once(chs.eve_direct(x)))
                    .collect()
            } else {
                chs.user_irs(x)
                    .iter()
                    .zip(chs.user_irs(y))
                    .map(|(a, b)| a * b)
                    .chain(core::iter::once(chs.direct(x, y)))
                    .collect()
            };
            let g = if v.is_empty() {
                CMatrix::zeros(0)
            } else {
                CMatrix::outer(&v)
            };
            vectors.push(v);
            grams.push(g);
        }
    }
    EffectiveChannels {
        users,
        irs_elements: l,
        vectors,
        grams,
    }
}

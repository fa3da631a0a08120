//! Network geometry, link variances and Rayleigh block fading.
//!
//! Link variances follow the path-loss law `γ = d^(−α)`. Fading coefficients
//! are circularly-symmetric complex Gaussians with variance `γ`, so `|h|²` is
//! exponential with mean `γ`. A fresh, independent coefficient exists for every
//! link in every time slot; [`ChannelStream`] makes each of them addressable by
//! `(trial, slot, link)` so that schemes can be replayed over identical draws.

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::stream::{keyed_rng, open_unit_f64, unit_f64, Domain};
use crate::{Error, Result};

/// Destination location used by every sampled layout.
pub const DESTINATION: Point = Point { x: 1.0, y: 1.0 };

/// Nodes closer than this are resampled.
pub const MIN_SEPARATION: f64 = 1e-3;

/// Side length of the square each clustered group is drawn from.
pub const CLUSTER_SPREAD: f64 = 0.1;

/// Centre of the relay cluster in the clustered layout.
pub const RELAY_CLUSTER_CENTRE: Point = Point { x: 0.5, y: 0.5 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// How node positions are drawn by [`sample_topology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Users and relays i.i.d. uniform on the unit square.
    UniformSquare,
    /// Users in a small square at the origin corner, relays around (0.5, 0.5).
    Clustered,
}

impl Layout {
    pub fn name(&self) -> &'static str {
        match self {
            Layout::UniformSquare => "uniform-square",
            Layout::Clustered => "clustered",
        }
    }
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-square" => Ok(Layout::UniformSquare),
            "clustered" => Ok(Layout::Clustered),
            other => Err(Error::config("network.layout", format!("unknown layout `{other}`"))),
        }
    }
}

/// Node positions and the path-loss exponent the variances were derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub users: Vec<Point>,
    pub relays: Vec<Point>,
    pub destination: Point,
    pub pathloss_exponent: f64,
}

/// Per-link channel variances of an `N`-user, `M`-relay network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkFile", into = "NetworkFile")]
pub struct NetworkModel {
    geometry: Option<Geometry>,
    var_sd: Vec<f64>,
    var_sr: Vec<Vec<f64>>,
    var_rd: Vec<f64>,
}

/// On-disk form of a [`NetworkModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkFile {
    users: usize,
    relays: usize,
    var_sd: Vec<f64>,
    var_sr: Vec<Vec<f64>>,
    var_rd: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<Geometry>,
}

impl TryFrom<NetworkFile> for NetworkModel {
    type Error = Error;

    fn try_from(f: NetworkFile) -> Result<Self> {
        if f.users != f.var_sd.len() || f.relays != f.var_rd.len() {
            return Err(Error::InvalidNetwork(format!(
                "declared {} users / {} relays but variances describe {} / {}",
                f.users,
                f.relays,
                f.var_sd.len(),
                f.var_rd.len()
            )));
        }
        let mut model = NetworkModel::new(f.var_sd, f.var_sr, f.var_rd)?;
        if let Some(g) = f.geometry {
            if g.users.len() != model.n_users() || g.relays.len() != model.n_relays() {
                return Err(Error::InvalidNetwork("geometry does not match dimensions".into()));
            }
            model.geometry = Some(g);
        }
        Ok(model)
    }
}

impl From<NetworkModel> for NetworkFile {
    fn from(m: NetworkModel) -> Self {
        NetworkFile {
            users: m.var_sd.len(),
            relays: m.var_rd.len(),
            var_sd: m.var_sd,
            var_sr: m.var_sr,
            var_rd: m.var_rd,
            geometry: m.geometry,
        }
    }
}

fn check_variance(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidNetwork(format!("{what} variance {v} must be positive and finite")))
    }
}

impl NetworkModel {
    /// Builds a model from explicit variances. `var_sr[n][m]` is the
    /// user-`n` to relay-`m` variance. Zero relays is allowed.
    pub fn new(var_sd: Vec<f64>, var_sr: Vec<Vec<f64>>, var_rd: Vec<f64>) -> Result<Self> {
        if var_sd.is_empty() {
            return Err(Error::InvalidNetwork("at least one user is required".into()));
        }
        if var_sr.len() != var_sd.len() {
            return Err(Error::InvalidNetwork(format!(
                "source-relay table has {} rows, expected {}",
                var_sr.len(),
                var_sd.len()
            )));
        }
        for (n, row) in var_sr.iter().enumerate() {
            if row.len() != var_rd.len() {
                return Err(Error::InvalidNetwork(format!(
                    "source-relay row {n} has {} entries, expected {}",
                    row.len(),
                    var_rd.len()
                )));
            }
            for &v in row {
                check_variance(v, "source-relay")?;
            }
        }
        for &v in &var_sd {
            check_variance(v, "source-destination")?;
        }
        for &v in &var_rd {
            check_variance(v, "relay-destination")?;
        }
        Ok(NetworkModel {
            geometry: None,
            var_sd,
            var_sr,
            var_rd,
        })
    }

    /// Derives every variance as `distance^(−α)`.
    pub fn from_geometry(
        users: Vec<Point>,
        relays: Vec<Point>,
        destination: Point,
        pathloss_exponent: f64,
    ) -> Result<Self> {
        if !(pathloss_exponent.is_finite() && pathloss_exponent > 0.0) {
            return Err(Error::InvalidNetwork(format!(
                "path-loss exponent {pathloss_exponent} must be positive"
            )));
        }
        let gain = |a: &Point, b: &Point| {
            let d = a.distance(b);
            if d > 0.0 {
                Ok(d.powf(-pathloss_exponent))
            } else {
                Err(Error::InvalidNetwork("colocated nodes have unbounded variance".into()))
            }
        };
        let var_sd = users.iter().map(|u| gain(u, &destination)).collect::<Result<Vec<_>>>()?;
        let var_sr = users
            .iter()
            .map(|u| relays.iter().map(|r| gain(u, r)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let var_rd = relays.iter().map(|r| gain(r, &destination)).collect::<Result<Vec<_>>>()?;
        let mut model = NetworkModel::new(var_sd, var_sr, var_rd)?;
        model.geometry = Some(Geometry {
            users,
            relays,
            destination,
            pathloss_exponent,
        });
        Ok(model)
    }

    /// Every link with the same variance (unit by default in tests).
    pub fn homogeneous(n_users: usize, n_relays: usize, variance: f64) -> Result<Self> {
        NetworkModel::new(
            vec![variance; n_users],
            vec![vec![variance; n_relays]; n_users],
            vec![variance; n_relays],
        )
    }

    pub fn n_users(&self) -> usize {
        self.var_sd.len()
    }

    pub fn n_relays(&self) -> usize {
        self.var_rd.len()
    }

    pub fn var_sd(&self) -> &[f64] {
        &self.var_sd
    }

    pub fn var_sr(&self) -> &[Vec<f64>] {
        &self.var_sr
    }

    pub fn var_rd(&self) -> &[f64] {
        &self.var_rd
    }

    pub fn geometry(&self) -> Option<&Geometry> {
        self.geometry.as_ref()
    }

    /// Number of links addressed per time slot: `N + N·M + M`.
    pub fn links_per_slot(&self) -> usize {
        let (n, m) = (self.n_users(), self.n_relays());
        n + n * m + m
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }
}

/// Draws a network with the destination at (1, 1).
pub fn sample_topology<R: Rng + ?Sized>(
    rng: &mut R,
    n_users: usize,
    n_relays: usize,
    layout: Layout,
    pathloss_exponent: f64,
) -> Result<NetworkModel> {
    if n_users == 0 || n_relays == 0 {
        return Err(Error::InvalidNetwork("sampled topologies need N ≥ 1 and M ≥ 1".into()));
    }
    if !(pathloss_exponent.is_finite() && pathloss_exponent > 0.0) {
        return Err(Error::InvalidNetwork(format!(
            "path-loss exponent {pathloss_exponent} must be positive"
        )));
    }
    let (user_origin, relay_origin, side) = match layout {
        Layout::UniformSquare => (Point::new(0.0, 0.0), Point::new(0.0, 0.0), 1.0),
        Layout::Clustered => (
            Point::new(0.0, 0.0),
            Point::new(
                RELAY_CLUSTER_CENTRE.x - CLUSTER_SPREAD / 2.0,
                RELAY_CLUSTER_CENTRE.y - CLUSTER_SPREAD / 2.0,
            ),
            CLUSTER_SPREAD,
        ),
    };
    let mut draw = |origin: Point, avoid: &[Point]| loop {
        let p = Point::new(
            origin.x + side * rng.random::<f64>(),
            origin.y + side * rng.random::<f64>(),
        );
        if p.distance(&DESTINATION) >= MIN_SEPARATION
            && avoid.iter().all(|q| p.distance(q) >= MIN_SEPARATION)
        {
            break p;
        }
    };
    let users: Vec<Point> = (0..n_users).map(|_| draw(user_origin, &[])).collect();
    let relays: Vec<Point> = (0..n_relays).map(|_| draw(relay_origin, &users)).collect();
    NetworkModel::from_geometry(users, relays, DESTINATION, pathloss_exponent)
}

/// Transmit energy per symbol and noise power, both linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    es: f64,
    n0: f64,
}

impl PowerProfile {
    pub fn new(es: f64, n0: f64) -> Result<Self> {
        if es.is_finite() && n0.is_finite() && es > 0.0 && n0 > 0.0 {
            Ok(PowerProfile { es, n0 })
        } else {
            Err(Error::InvalidProtocol(format!("E_s={es} and N_0={n0} must be positive")))
        }
    }

    /// Unit noise power with the given linear `E_s/N_0`.
    pub fn from_es_n0(ratio: f64) -> Result<Self> {
        PowerProfile::new(ratio, 1.0)
    }

    pub fn es(&self) -> f64 {
        self.es
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn es_over_n0(&self) -> f64 {
        self.es / self.n0
    }
}

/// Instantaneous SNR `E_s |h|² / N_0`.
#[inline]
pub fn link_snr(h: Complex64, power: &PowerProfile) -> f64 {
    power.es * h.norm_sqr() / power.n0
}

/// One coefficient with `E|h|² = variance`. Consumes exactly two `u64`s.
#[inline]
pub(crate) fn rayleigh_coefficient<R: RngCore + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let u = open_unit_f64(rng);
    let phase = std::f64::consts::TAU * unit_f64(rng);
    let amplitude = (-variance * u.ln()).sqrt();
    Complex64::from_polar(amplitude, phase)
}

/// `|h|²` of the coefficient [`rayleigh_coefficient`] would return from the
/// same two words, computed without the phase.
#[inline]
pub(crate) fn rayleigh_gain<R: RngCore + ?Sized>(rng: &mut R, variance: f64) -> f64 {
    let u = open_unit_f64(rng);
    rng.next_u64();
    -variance * u.ln()
}

/// Instantaneous SNR `E_s g / N_0` of a link with power gain `g = |h|²`.
#[inline]
pub fn gain_snr(gain: f64, power: &PowerProfile) -> f64 {
    power.es * gain / power.n0
}

/// Fading coefficients of every link for a single time slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBlock {
    pub h_sd: Vec<Complex64>,
    pub h_sr: Vec<Vec<Complex64>>,
    pub h_rd: Vec<Complex64>,
}

impl ChannelBlock {
    /// Draws all links in the order source-destination, source-relay
    /// (user-major), relay-destination.
    pub fn draw<R: RngCore + ?Sized>(rng: &mut R, model: &NetworkModel) -> Self {
        let h_sd = model.var_sd.iter().map(|&v| rayleigh_coefficient(rng, v)).collect();
        let h_sr = model
            .var_sr
            .iter()
            .map(|row| row.iter().map(|&v| rayleigh_coefficient(rng, v)).collect())
            .collect();
        let h_rd = model.var_rd.iter().map(|&v| rayleigh_coefficient(rng, v)).collect();
        ChannelBlock { h_sd, h_sr, h_rd }
    }
}

/// `draw_block` in free-function form.
pub fn draw_block<R: RngCore + ?Sized>(rng: &mut R, model: &NetworkModel) -> ChannelBlock {
    ChannelBlock::draw(rng, model)
}

/// Random-access fading for one trial.
///
/// Slot `ts` uses ChaCha stream `ts`; link `k` of that slot occupies words
/// `4k..4k+4`, with links numbered as in [`ChannelBlock::draw`]. Reading a
/// subset of links therefore returns exactly the values a full block draw
/// would contain.
#[derive(Debug, Clone)]
pub struct ChannelStream {
    /// Untouched generator for this trial; cloning it is cheaper than
    /// re-seeking a used one.
    origin: ChaCha8Rng,
    rng: ChaCha8Rng,
    slot: Option<usize>,
}

const WORDS_PER_LINK: u128 = 4;
/// Forward gaps up to this many words are skipped by reading, not seeking.
const MAX_SKIP_WORDS: u128 = 48;

impl ChannelStream {
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let origin = keyed_rng(seed, Domain::Trial, trial, 0);
        ChannelStream { rng: origin.clone(), origin, slot: None }
    }

    fn seek(&mut self, ts: usize, link: usize) {
        let target = link as u128 * WORDS_PER_LINK;
        if self.slot == Some(ts) {
            let pos = self.rng.get_word_pos();
            if pos <= target && target - pos <= MAX_SKIP_WORDS {
                for _ in 0..(target - pos) / 2 {
                    self.rng.next_u64();
                }
                return;
            }
        }
        self.rng = self.origin.clone();
        self.rng.set_stream(ts as u64);
        self.rng.set_word_pos(target);
        self.slot = Some(ts);
    }

    /// Power gains `|h|²` of every source-destination link in slot `ts`.
    pub fn direct_gains(&mut self, model: &NetworkModel, ts: usize, out: &mut Vec<f64>) {
        self.seek(ts, 0);
        out.clear();
        out.extend(model.var_sd.iter().map(|&v| rayleigh_gain(&mut self.rng, v)));
    }

    /// Power gains from `user` to every relay in slot `ts`.
    pub fn source_relay_gains(
        &mut self,
        model: &NetworkModel,
        ts: usize,
        user: usize,
        out: &mut Vec<f64>,
    ) {
        self.seek(ts, model.n_users() + user * model.n_relays());
        out.clear();
        out.extend(model.var_sr[user].iter().map(|&v| rayleigh_gain(&mut self.rng, v)));
    }

    /// Power gain from `relay` to the destination in slot `ts`.
    pub fn relay_dest_gain(&mut self, model: &NetworkModel, ts: usize, relay: usize) -> f64 {
        let n = model.n_users();
        self.seek(ts, n + n * model.n_relays() + relay);
        rayleigh_gain(&mut self.rng, model.var_rd[relay])
    }

    /// All source-destination coefficients of slot `ts`.
    pub fn direct_links(&mut self, model: &NetworkModel, ts: usize, out: &mut Vec<Complex64>) {
        self.seek(ts, 0);
        out.clear();
        out.extend(model.var_sd.iter().map(|&v| rayleigh_coefficient(&mut self.rng, v)));
    }

    /// Coefficients from `user` to every relay in slot `ts`.
    pub fn source_relay_links(
        &mut self,
        model: &NetworkModel,
        ts: usize,
        user: usize,
        out: &mut Vec<Complex64>,
    ) {
        let m = model.n_relays();
        self.seek(ts, model.n_users() + user * m);
        out.clear();
        out.extend(model.var_sr[user].iter().map(|&v| rayleigh_coefficient(&mut self.rng, v)));
    }

    /// Coefficient from `relay` to the destination in slot `ts`.
    pub fn relay_dest_link(&mut self, model: &NetworkModel, ts: usize, relay: usize) -> Complex64 {
        let n = model.n_users();
        self.seek(ts, n + n * model.n_relays() + relay);
        rayleigh_coefficient(&mut self.rng, model.var_rd[relay])
    }

    /// The full block of slot `ts`.
    pub fn block(&mut self, model: &NetworkModel, ts: usize) -> ChannelBlock {
        self.seek(ts, 0);
        ChannelBlock::draw(&mut self.rng, model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_rng(i: u64) -> ChaCha8Rng {
        keyed_rng(99, Domain::Auxiliary, i, 0)
    }

    #[test]
    fn link_snr_substitution() {
        let p = PowerProfile::new(10.0, 1.0).unwrap();
        assert_eq!(link_snr(Complex64::new(0.0, 0.0), &p), 0.0);
        assert!((link_snr(Complex64::new(1.0, 0.0), &p) - 10.0).abs() < 1e-12);
        let p = PowerProfile::new(4.0, 2.0).unwrap();
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        assert!((link_snr(h, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_profile_rejects_nonpositive() {
        assert!(PowerProfile::new(0.0, 1.0).is_err());
        assert!(PowerProfile::new(1.0, -1.0).is_err());
        assert!(PowerProfile::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sampled_topology_has_pathloss_variances() {
        let mut rng = unit_rng(0);
        let model = sample_topology(&mut rng, 5, 3, Layout::UniformSquare, 2.0).unwrap();
        let g = model.geometry().unwrap();
        assert_eq!(g.destination, DESTINATION);
        for (n, u) in g.users.iter().enumerate() {
            assert!((0.0..=1.0).contains(&u.x) && (0.0..=1.0).contains(&u.y));
            let want = u.distance(&DESTINATION).powi(-2);
            assert!((model.var_sd()[n] - want).abs() <= 1e-12 * want);
            for (m, r) in g.relays.iter().enumerate() {
                let want = u.distance(r).powi(-2);
                assert!((model.var_sr()[n][m] - want).abs() <= 1e-12 * want);
            }
        }
        for (m, r) in g.relays.iter().enumerate() {
            let want = r.distance(&DESTINATION).powi(-2);
            assert!((model.var_rd()[m] - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn clustered_layout_places_groups() {
        let mut rng = unit_rng(1);
        let model = sample_topology(&mut rng, 5, 3, Layout::Clustered, 3.5).unwrap();
        let g = model.geometry().unwrap();
        assert_eq!(g.pathloss_exponent, 3.5);
        for u in &g.users {
            assert!(u.distance(&Point::new(0.0, 0.0)) <= CLUSTER_SPREAD * 2f64.sqrt());
        }
        for r in &g.relays {
            assert!(r.distance(&RELAY_CLUSTER_CENTRE) <= CLUSTER_SPREAD);
        }
    }

    #[test]
    fn topology_rejects_bad_arguments() {
        let mut rng = unit_rng(2);
        assert!(sample_topology(&mut rng, 0, 3, Layout::UniformSquare, 2.0).is_err());
        assert!(sample_topology(&mut rng, 3, 0, Layout::UniformSquare, 2.0).is_err());
        assert!(sample_topology(&mut rng, 3, 3, Layout::UniformSquare, 0.0).is_err());
        assert!(sample_topology(&mut rng, 3, 3, Layout::UniformSquare, -1.0).is_err());
    }

    #[test]
    fn unit_distance_gives_unit_variance() {
        let model = NetworkModel::from_geometry(
            vec![Point::new(0.0, 1.0)],
            vec![Point::new(1.0, 0.0)],
            DESTINATION,
            3.7,
        )
        .unwrap();
        assert_eq!(model.var_sd()[0], 1.0);
        assert_eq!(model.var_rd()[0], 1.0);
    }

    #[test]
    fn doubling_distances_quarters_variances() {
        let users = vec![Point::new(0.1, 0.2), Point::new(0.4, 0.3)];
        let relays = vec![Point::new(0.6, 0.5)];
        let dest = Point::new(1.0, 1.0);
        let scale = |p: &Point| Point::new(2.0 * p.x, 2.0 * p.y);
        let a = NetworkModel::from_geometry(users.clone(), relays.clone(), dest, 2.0).unwrap();
        let b = NetworkModel::from_geometry(
            users.iter().map(scale).collect(),
            relays.iter().map(scale).collect(),
            scale(&dest),
            2.0,
        )
        .unwrap();
        for (x, y) in a.var_sd().iter().zip(b.var_sd()) {
            assert!((x / 4.0 - y).abs() <= 1e-12 * y);
        }
        for (x, y) in a.var_sr().iter().flatten().zip(b.var_sr().iter().flatten()) {
            assert!((x / 4.0 - y).abs() <= 1e-12 * y);
        }
        for (x, y) in a.var_rd().iter().zip(b.var_rd()) {
            assert!((x / 4.0 - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn explicit_model_validation() {
        assert!(NetworkModel::new(vec![], vec![], vec![]).is_err());
        assert!(NetworkModel::new(vec![1.0], vec![vec![1.0, 1.0]], vec![1.0]).is_err());
        assert!(NetworkModel::new(vec![1.0], vec![vec![0.0]], vec![1.0]).is_err());
        assert!(NetworkModel::new(vec![f64::INFINITY], vec![vec![1.0]], vec![1.0]).is_err());
        let degenerate = NetworkModel::new(vec![1.0], vec![vec![]], vec![]).unwrap();
        assert_eq!(degenerate.n_relays(), 0);
    }

    #[test]
    fn toml_round_trip() {
        let mut rng = unit_rng(3);
        let model = sample_topology(&mut rng, 3, 2, Layout::UniformSquare, 2.0).unwrap();
        let text = model.to_toml().unwrap();
        assert_eq!(NetworkModel::from_toml(&text).unwrap(), model);

        let bare = NetworkModel::homogeneous(2, 1, 0.5).unwrap();
        assert_eq!(NetworkModel::from_toml(&bare.to_toml().unwrap()).unwrap(), bare);
    }

    #[test]
    fn toml_rejects_dimension_mismatch() {
        let text = "users = 2\nrelays = 1\nvar_sd = [1.0]\nvar_sr = [[1.0]]\nvar_rd = [1.0]\n";
        assert!(NetworkModel::from_toml(text).is_err());
    }

    #[test]
    fn gains_match_coefficient_norms() {
        let model = NetworkModel::homogeneous(3, 2, 0.7).unwrap();
        let mut s = ChannelStream::for_trial(5, 1);
        let mut gains = Vec::new();
        for ts in [4, 0, 4, 7] {
            let block = s.block(&model, ts);
            s.source_relay_gains(&model, ts, 1, &mut gains);
            for (g, h) in gains.iter().zip(&block.h_sr[1]) {
                assert!((g / h.norm_sqr() - 1.0).abs() < 1e-12);
            }
            let g = s.relay_dest_gain(&model, ts, 1);
            assert!((g / block.h_rd[1].norm_sqr() - 1.0).abs() < 1e-12);
            s.direct_gains(&model, ts, &mut gains);
            for (g, h) in gains.iter().zip(&block.h_sd) {
                assert!((g / h.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stream_subsets_match_full_block() {
        let model = NetworkModel::homogeneous(4, 3, 1.0).unwrap();
        let mut s = ChannelStream::for_trial(5, 17);
        let block = s.block(&model, 2);
        let mut buf = Vec::new();
        s.direct_links(&model, 2, &mut buf);
        assert_eq!(buf, block.h_sd);
        s.source_relay_links(&model, 2, 2, &mut buf);
        assert_eq!(buf, block.h_sr[2]);
        assert_eq!(s.relay_dest_link(&model, 2, 1), block.h_rd[1]);
        // seeking backwards reproduces the same draws
        assert_eq!(s.block(&model, 2), block);
        assert_ne!(s.block(&model, 3), block);
    }

    #[test]
    fn same_key_same_blocks() {
        let model = NetworkModel::homogeneous(5, 3, 0.7).unwrap();
        let a: Vec<_> = (0..9).map(|ts| ChannelStream::for_trial(1, 4).block(&model, ts)).collect();
        let mut s = ChannelStream::for_trial(1, 4);
        let b: Vec<_> = (0..9).map(|ts| s.block(&model, ts)).collect();
        assert_eq!(a, b);
        assert_ne!(ChannelStream::for_trial(1, 5).block(&model, 0), a[0]);
    }
}

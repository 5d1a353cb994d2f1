//! Interference network topologies: parsing, classification into the named
//! families, three-user canonical forms, and hop-distance local views.
//!
//! Users are 0-based inside the library. Topology documents and all rendered
//! output use 1-based indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported user count (adjacency is stored in `u64` masks).
pub const MAX_USERS: usize = 64;

/// Channel model carried by a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Deterministic,
    Gaussian,
    Connectivity,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Deterministic => "deterministic",
            Model::Gaussian => "gaussian",
            Model::Connectivity => "connectivity",
        }
    }
}

/// Optional channel gains. Deterministic gains are the integer levels
/// `n_kj`; Gaussian gains are the squared magnitudes `|h_kj|^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gains {
    None,
    Deterministic { direct: Vec<u32>, cross: BTreeMap<(usize, usize), u32> },
    Gaussian { direct: Vec<f64>, cross: BTreeMap<(usize, usize), f64> },
}

/// A single-hop interference network: `users` transmitter/receiver pairs, an
/// implicit direct link `T_i -> D_i` for every user, and a set of directed
/// cross links `T_i -> D_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    users: usize,
    cross: BTreeSet<(usize, usize)>,
    gains: Gains,
    out_mask: Vec<u64>,
    in_mask: Vec<u64>,
}

impl Network {
    /// Connectivity-only network.
    pub fn new(users: usize, cross: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if users == 0 {
            return Err(Error::InvalidNetwork("a network needs at least one user".into()));
        }
        if users > MAX_USERS {
            return Err(Error::CapExceeded { what: "user count", size: users, cap: MAX_USERS });
        }
        let mut set = BTreeSet::new();
        for (i, j) in cross {
            if i >= users || j >= users {
                return Err(Error::InvalidNetwork(format!(
                    "cross link T{} -> D{} references a missing user",
                    i + 1,
                    j + 1
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!(
                    "cross link T{} -> D{} duplicates the direct link",
                    i + 1,
                    j + 1
                )));
            }
            set.insert((i, j));
        }
        let mut out_mask = vec![0u64; users];
        let mut in_mask = vec![0u64; users];
        for &(i, j) in &set {
            out_mask[i] |= 1 << j;
            in_mask[j] |= 1 << i;
        }
        Ok(Network { users, cross: set, gains: Gains::None, out_mask, in_mask })
    }

    /// Attach gains. The gain maps must cover exactly the direct links and
    /// the declared cross links.
    pub fn with_gains(mut self, gains: Gains) -> Result<Self> {
        match &gains {
            Gains::None => {}
            Gains::Deterministic { direct, cross } => {
                self.check_gain_cover(direct.len(), cross.keys())?;
            }
            Gains::Gaussian { direct, cross } => {
                self.check_gain_cover(direct.len(), cross.keys())?;
                for g in direct.iter().chain(cross.values()) {
                    if !g.is_finite() || *g < 0.0 {
                        return Err(Error::InvalidNetwork(format!("Gaussian gain {g} must be finite and nonnegative")));
                    }
                }
            }
        }
        self.gains = gains;
        Ok(self)
    }

    fn check_gain_cover<'a>(&self, direct_len: usize, cross: impl Iterator<Item = &'a (usize, usize)>) -> Result<()> {
        if direct_len != self.users {
            return Err(Error::InvalidNetwork(format!("expected {} direct gains, got {direct_len}", self.users)));
        }
        let keys: BTreeSet<_> = cross.copied().collect();
        if keys != self.cross {
            return Err(Error::InvalidNetwork("cross gains must cover exactly the declared cross links".into()));
        }
        Ok(())
    }

    /// Deterministic network with the given integer gains.
    pub fn deterministic(
        users: usize,
        direct: Vec<u32>,
        cross: impl IntoIterator<Item = ((usize, usize), u32)>,
    ) -> Result<Self> {
        let cross: BTreeMap<_, _> = cross.into_iter().collect();
        Network::new(users, cross.keys().copied())?.with_gains(Gains::Deterministic { direct, cross })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn model(&self) -> Model {
        match self.gains {
            Gains::None => Model::Connectivity,
            Gains::Deterministic { .. } => Model::Deterministic,
            Gains::Gaussian { .. } => Model::Gaussian,
        }
    }

    pub fn gains(&self) -> &Gains {
        &self.gains
    }

    pub fn cross(&self) -> &BTreeSet<(usize, usize)> {
        &self.cross
    }

    pub fn has_cross(&self, tx: usize, rx: usize) -> bool {
        tx != rx && self.out_mask[tx] >> rx & 1 == 1
    }

    /// Receivers reached by `T_tx` through cross links, as a bitmask.
    pub fn out_mask(&self, tx: usize) -> u64 {
        self.out_mask[tx]
    }

    /// Transmitters interfering at `D_rx`, as a bitmask.
    pub fn in_mask(&self, rx: usize) -> u64 {
        self.in_mask[rx]
    }

    /// Transmitters interfering at `D_rx` in ascending order.
    pub fn interferers(&self, rx: usize) -> Vec<usize> {
        bits(self.in_mask[rx]).collect()
    }

    /// Bitmask of all users.
    pub fn all_users_mask(&self) -> u64 {
        full_mask(self.users)
    }

    /// All links including direct ones, in (tx, rx) order.
    pub fn links(&self) -> Vec<Link> {
        let mut links: Vec<Link> = (0..self.users).map(|i| Link { tx: i, rx: i }).collect();
        links.extend(self.cross.iter().map(|&(tx, rx)| Link { tx, rx }));
        links.sort();
        links
    }

    /// Deterministic gain on a link (0 for absent links).
    pub fn det_gain(&self, tx: usize, rx: usize) -> Result<u32> {
        match &self.gains {
            Gains::Deterministic { direct, cross } => {
                Ok(if tx == rx { direct[tx] } else { cross.get(&(tx, rx)).copied().unwrap_or(0) })
            }
            _ => Err(Error::WrongModel { expected: "deterministic", found: self.model().name() }),
        }
    }

    /// Largest deterministic gain `q`.
    pub fn det_levels(&self) -> Result<u32> {
        match &self.gains {
            Gains::Deterministic { direct, cross } => {
                Ok(direct.iter().chain(cross.values()).copied().max().unwrap_or(0))
            }
            _ => Err(Error::WrongModel { expected: "deterministic", found: self.model().name() }),
        }
    }

    /// The binary model: every declared link gets deterministic gain 1.
    pub fn binary_model(&self) -> Network {
        self.with_uniform_gain(1)
    }

    /// Deterministic copy with gain `n` on every declared link.
    pub fn with_uniform_gain(&self, n: u32) -> Network {
        let cross = self.cross.iter().map(|&e| (e, n)).collect();
        self.connectivity()
            .with_gains(Gains::Deterministic { direct: vec![n; self.users], cross })
            .expect("uniform gains cover every link")
    }

    /// Copy without gains.
    pub fn connectivity(&self) -> Network {
        let mut net = self.clone();
        net.gains = Gains::None;
        net
    }

    /// Relabel users: user `i` becomes `perm[i]`. Gains follow their links.
    pub fn relabel(&self, perm: &[usize]) -> Result<Network> {
        if perm.len() != self.users || {
            let s: BTreeSet<_> = perm.iter().collect();
            s.len() != self.users || perm.iter().any(|&p| p >= self.users)
        } {
            return Err(Error::InvalidNetwork("relabeling must be a permutation".into()));
        }
        let net = Network::new(self.users, self.cross.iter().map(|&(i, j)| (perm[i], perm[j])))?;
        let gains = match &self.gains {
            Gains::None => Gains::None,
            Gains::Deterministic { direct, cross } => {
                let mut d = vec![0; self.users];
                for (i, g) in direct.iter().enumerate() {
                    d[perm[i]] = *g;
                }
                Gains::Deterministic {
                    direct: d,
                    cross: cross.iter().map(|(&(i, j), &g)| ((perm[i], perm[j]), g)).collect(),
                }
            }
            Gains::Gaussian { direct, cross } => {
                let mut d = vec![0.0; self.users];
                for (i, g) in direct.iter().enumerate() {
                    d[perm[i]] = *g;
                }
                Gains::Gaussian {
                    direct: d,
                    cross: cross.iter().map(|(&(i, j), &g)| ((perm[i], perm[j]), g)).collect(),
                }
            }
        };
        net.with_gains(gains)
    }

    /// Sub-network induced by `users` (ascending), renumbered `0..len`.
    /// Links touching other users are dropped.
    pub fn induced(&self, users: &[usize]) -> Network {
        let index: BTreeMap<usize, usize> = users.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        let cross = self.cross.iter().filter_map(|(i, j)| Some((*index.get(i)?, *index.get(j)?)));
        let net = Network::new(users.len(), cross).expect("induced subnetwork is valid");
        let gains = match &self.gains {
            Gains::None => Gains::None,
            Gains::Deterministic { direct, cross } => Gains::Deterministic {
                direct: users.iter().map(|&u| direct[u]).collect(),
                cross: cross.iter().filter_map(|((i, j), g)| Some(((*index.get(i)?, *index.get(j)?), *g))).collect(),
            },
            Gains::Gaussian { direct, cross } => Gains::Gaussian {
                direct: users.iter().map(|&u| direct[u]).collect(),
                cross: cross.iter().filter_map(|((i, j), g)| Some(((*index.get(i)?, *index.get(j)?), *g))).collect(),
            },
        };
        net.with_gains(gains).expect("induced gains cover induced links")
    }

    /// Connected components (users joined by a cross link in either
    /// direction), each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(self, self.all_users_mask()).into_iter().map(|m| bits(m).collect()).collect()
    }
}

/// Directed link `T_tx -> D_rx`; `tx == rx` is a direct link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub tx: usize,
    pub rx: usize,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}->D{}", self.tx + 1, self.rx + 1)
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterate the set bits of a mask in ascending order.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// Connected components of the sub-network induced by `subset`.
pub(crate) fn components_of(net: &Network, subset: u64) -> Vec<u64> {
    let mut remaining = subset;
    let mut out = Vec::new();
    while remaining != 0 {
        let start = remaining & remaining.wrapping_neg();
        let mut comp = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0;
            for u in bits(frontier) {
                next |= (net.out_mask[u] | net.in_mask[u]) & subset;
            }
            frontier = next & !comp;
            comp |= next;
        }
        out.push(comp);
        remaining &= !comp;
    }
    out
}

// ---------------------------------------------------------------------------
// Topology documents

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDocument {
    pub users: usize,
    pub model: Model,
    #[serde(default)]
    pub cross: Vec<CrossEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct: Option<Vec<DirectEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossEntry {
    pub tx: usize,
    pub rx: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<serde_json::Number>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectEntry {
    pub user: usize,
    pub gain: serde_json::Number,
}

fn det_gain_value(n: &serde_json::Number, what: &str) -> Result<u32> {
    if let Some(v) = n.as_u64() {
        return u32::try_from(v).map_err(|_| Error::Malformed(format!("{what}: gain {v} too large")));
    }
    match n.as_f64() {
        Some(v) if v < 0.0 => Err(Error::InvalidNetwork(format!("{what}: negative gain {n}"))),
        _ => Err(Error::Malformed(format!("{what}: deterministic gains must be integers, got {n}"))),
    }
}

fn gauss_gain_value(n: &serde_json::Number, what: &str) -> Result<f64> {
    let v = n.as_f64().ok_or_else(|| Error::Malformed(format!("{what}: unreadable gain {n}")))?;
    if v < 0.0 {
        return Err(Error::InvalidNetwork(format!("{what}: negative gain {n}")));
    }
    Ok(v)
}

/// Parse a JSON topology document.
pub fn parse_network(text: &str) -> Result<Network> {
    let doc: TopologyDocument = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    network_from_document(&doc)
}

pub fn network_from_document(doc: &TopologyDocument) -> Result<Network> {
    let k = doc.users;
    let mut cross = Vec::with_capacity(doc.cross.len());
    let mut seen = BTreeSet::new();
    for e in &doc.cross {
        if e.tx == 0 || e.rx == 0 || e.tx > k || e.rx > k {
            return Err(Error::InvalidNetwork(format!("cross link ({}, {}) outside users 1..{k}", e.tx, e.rx)));
        }
        if e.tx == e.rx {
            return Err(Error::InvalidNetwork(format!("cross list contains the direct link ({}, {})", e.tx, e.rx)));
        }
        if !seen.insert((e.tx - 1, e.rx - 1)) {
            return Err(Error::InvalidNetwork(format!("cross link ({}, {}) declared twice", e.tx, e.rx)));
        }
        cross.push((e.tx - 1, e.rx - 1));
    }
    let net = Network::new(k, cross)?;

    let direct = doc.direct.as_deref().unwrap_or(&[]);
    if doc.model == Model::Connectivity {
        if !direct.is_empty() || doc.cross.iter().any(|e| e.gain.is_some()) {
            return Err(Error::Malformed("connectivity documents carry no gains".into()));
        }
        return Ok(net);
    }

    let mut direct_by_user: BTreeMap<usize, &serde_json::Number> = BTreeMap::new();
    for d in direct {
        if d.user == 0 || d.user > k {
            return Err(Error::InvalidNetwork(format!("direct gain for undeclared user {}", d.user)));
        }
        if direct_by_user.insert(d.user - 1, &d.gain).is_some() {
            return Err(Error::InvalidNetwork(format!("direct gain for user {} given twice", d.user)));
        }
    }
    if direct_by_user.len() != k {
        return Err(Error::Malformed(format!(
            "model {} requires a direct gain for each of the {k} users",
            doc.model.name()
        )));
    }
    for e in &doc.cross {
        if e.gain.is_none() {
            return Err(Error::Malformed(format!("cross link ({}, {}) needs a gain", e.tx, e.rx)));
        }
    }

    let gains = match doc.model {
        Model::Deterministic => {
            let direct = (0..k)
                .map(|u| det_gain_value(direct_by_user[&u], &format!("direct {}", u + 1)))
                .collect::<Result<Vec<_>>>()?;
            let cross = doc
                .cross
                .iter()
                .map(|e| {
                    let g = det_gain_value(e.gain.as_ref().unwrap(), &format!("cross ({}, {})", e.tx, e.rx))?;
                    Ok(((e.tx - 1, e.rx - 1), g))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            Gains::Deterministic { direct, cross }
        }
        Model::Gaussian => {
            let direct = (0..k)
                .map(|u| gauss_gain_value(direct_by_user[&u], &format!("direct {}", u + 1)))
                .collect::<Result<Vec<_>>>()?;
            let cross = doc
                .cross
                .iter()
                .map(|e| {
                    let g = gauss_gain_value(e.gain.as_ref().unwrap(), &format!("cross ({}, {})", e.tx, e.rx))?;
                    Ok(((e.tx - 1, e.rx - 1), g))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            Gains::Gaussian { direct, cross }
        }
        Model::Connectivity => unreachable!(),
    };
    net.with_gains(gains)
}

/// Render a network back into a topology document.
pub fn to_document(net: &Network) -> TopologyDocument {
    let num_u = |g: u32| serde_json::Number::from(g);
    let num_f = |g: f64| serde_json::Number::from_f64(g).expect("finite gain");
    let (cross, direct) = match net.gains() {
        Gains::None => {
            (net.cross().iter().map(|&(i, j)| CrossEntry { tx: i + 1, rx: j + 1, gain: None }).collect(), None)
        }
        Gains::Deterministic { direct, cross } => (
            cross.iter().map(|(&(i, j), &g)| CrossEntry { tx: i + 1, rx: j + 1, gain: Some(num_u(g)) }).collect(),
            Some(direct.iter().enumerate().map(|(u, &g)| DirectEntry { user: u + 1, gain: num_u(g) }).collect()),
        ),
        Gains::Gaussian { direct, cross } => (
            cross.iter().map(|(&(i, j), &g)| CrossEntry { tx: i + 1, rx: j + 1, gain: Some(num_f(g)) }).collect(),
            Some(direct.iter().enumerate().map(|(u, &g)| DirectEntry { user: u + 1, gain: num_f(g) }).collect()),
        ),
    };
    TopologyDocument { users: net.users(), model: net.model(), cross, direct }
}

// ---------------------------------------------------------------------------
// Named families

/// Builders for the named topology families (users 0-based, `d` counts the
/// first `d` users).
pub mod families {
    use super::Network;

    pub fn isolated(k: usize) -> Network {
        Network::new(k, []).unwrap()
    }

    pub fn chain(k: usize) -> Network {
        Network::new(k, (0..k.saturating_sub(1)).map(|i| (i, i + 1))).unwrap()
    }

    pub fn cyclic_chain(k: usize) -> Network {
        let mut e: Vec<_> = (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if k >= 2 {
            e.push((k - 1, 0));
        }
        Network::new(k, e).unwrap()
    }

    pub fn d_to_many(d: usize, k: usize) -> Network {
        Network::new(k, (0..d).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))).unwrap()
    }

    pub fn many_to_d(d: usize, k: usize) -> Network {
        Network::new(k, (0..d).flat_map(|j| (0..k).filter(move |&i| i != j).map(move |i| (i, j)))).unwrap()
    }

    pub fn fully_connected(k: usize) -> Network {
        d_to_many(k, k)
    }
}

/// Family of one connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TopologyClass {
    Isolated,
    ZNetwork,
    Chain { users: usize },
    CyclicChain { users: usize },
    DToMany { d: usize, users: usize },
    ManyToD { d: usize, users: usize },
    FullyConnected { users: usize },
    ThreeUserClass { index: usize },
    Other { users: usize },
}

impl fmt::Display for TopologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TopologyClass::Isolated => write!(f, "isolated"),
            TopologyClass::ZNetwork => write!(f, "Z-network"),
            TopologyClass::Chain { users } => write!(f, "chain({users})"),
            TopologyClass::CyclicChain { users } => write!(f, "cyclic-chain({users})"),
            TopologyClass::DToMany { d, users } => write!(f, "{d}-to-many({users})"),
            TopologyClass::ManyToD { d, users } => write!(f, "many-to-{d}({users})"),
            TopologyClass::FullyConnected { users } => write!(f, "fully-connected({users})"),
            TopologyClass::ThreeUserClass { index } => {
                write!(f, "three-user class #{index} ({})", three_user_letter(index))
            }
            TopologyClass::Other { users } => write!(f, "other({users})"),
        }
    }
}

/// A classified connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentClass {
    /// 0-based users of the component.
    pub users: Vec<usize>,
    pub class: TopologyClass,
}

/// Classify every connected component of `net`.
pub fn classify(net: &Network) -> Vec<ComponentClass> {
    components_of(net, net.all_users_mask())
        .into_iter()
        .map(|m| ComponentClass { users: bits(m).collect(), class: classify_mask(net, m) })
        .collect()
}

/// Classify the sub-network induced by a connected user set `subset`.
pub(crate) fn classify_mask(net: &Network, subset: u64) -> TopologyClass {
    let n = subset.count_ones() as usize;
    let members: Vec<usize> = bits(subset).collect();
    let out: Vec<u64> = members.iter().map(|&u| net.out_mask[u] & subset).collect();
    let inn: Vec<u64> = members.iter().map(|&u| net.in_mask[u] & subset).collect();
    let edges: usize = out.iter().map(|m| m.count_ones() as usize).sum();

    if n == 1 {
        return TopologyClass::Isolated;
    }
    let others = |idx: usize| subset & !(1u64 << members[idx]);
    let full_tx = (0..n).filter(|&x| out[x] == others(x)).count();
    if full_tx == n {
        return TopologyClass::FullyConnected { users: n };
    }
    if n == 2 && edges == 1 {
        return TopologyClass::ZNetwork;
    }
    if full_tx >= 1 && edges == full_tx * (n - 1) {
        return TopologyClass::DToMany { d: full_tx, users: n };
    }
    let full_rx = (0..n).filter(|&x| inn[x] == others(x)).count();
    if full_rx >= 1 && edges == full_rx * (n - 1) {
        return TopologyClass::ManyToD { d: full_rx, users: n };
    }
    let max_out = out.iter().map(|m| m.count_ones()).max().unwrap_or(0);
    let max_in = inn.iter().map(|m| m.count_ones()).max().unwrap_or(0);
    // A connected digraph with all in/out degrees <= 1 is a simple path or cycle.
    if n >= 3 && max_out <= 1 && max_in <= 1 {
        if edges == n {
            return TopologyClass::CyclicChain { users: n };
        }
        if edges == n - 1 {
            return TopologyClass::Chain { users: n };
        }
    }
    if n == 3 {
        let pattern = three_user_pattern(net, &members);
        return TopologyClass::ThreeUserClass { index: canonical_three_user_pattern(pattern).index };
    }
    TopologyClass::Other { users: n }
}

// ---------------------------------------------------------------------------
// Three-user canonical forms

/// Cross-link order used for the 6-bit pattern: the first entry is the most
/// significant bit.
pub const THREE_USER_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn edge_bit(i: usize, j: usize) -> u8 {
    let pos = THREE_USER_EDGES.iter().position(|&e| e == (i, j)).expect("cross edge");
    1 << (5 - pos)
}

/// 6-bit pattern of the cross links among three users (`members` in order).
pub fn three_user_pattern(net: &Network, members: &[usize]) -> u8 {
    let mut p = 0;
    for (a, &u) in members.iter().enumerate() {
        for (b, &v) in members.iter().enumerate() {
            if a != b && net.has_cross(u, v) {
                p |= edge_bit(a, b);
            }
        }
    }
    p
}

pub fn pattern_edges(pattern: u8) -> Vec<(usize, usize)> {
    THREE_USER_EDGES.iter().enumerate().filter(|(pos, _)| pattern >> (5 - pos) & 1 == 1).map(|(_, &e)| e).collect()
}

fn permute_pattern(pattern: u8, perm: &[usize; 3]) -> u8 {
    pattern_edges(pattern).into_iter().fold(0, |acc, (i, j)| acc | edge_bit(perm[i], perm[j]))
}

/// Smallest pattern in the relabeling orbit of `pattern`.
pub fn canonical_pattern(pattern: u8) -> u8 {
    PERMS3.iter().map(|p| permute_pattern(pattern, p)).min().unwrap()
}

/// Sorted canonical representatives of all 16 orbits.
pub fn three_user_representatives() -> Vec<u8> {
    let set: BTreeSet<u8> = (0u8..64).map(canonical_pattern).collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeUserCanon {
    /// Orbit index in `0..16`, ordered by canonical pattern.
    pub index: usize,
    pub canonical_pattern: u8,
    /// Canonical cross links (0-based).
    pub canonical_edges: Vec<(usize, usize)>,
    pub orbit_size: usize,
}

fn canonical_three_user_pattern(pattern: u8) -> ThreeUserCanon {
    let canon = canonical_pattern(pattern);
    let reps = three_user_representatives();
    let orbit: BTreeSet<u8> = PERMS3.iter().map(|p| permute_pattern(pattern, p)).collect();
    ThreeUserCanon {
        index: reps.binary_search(&canon).expect("representative"),
        canonical_pattern: canon,
        canonical_edges: pattern_edges(canon),
        orbit_size: orbit.len(),
    }
}

/// Orbit index and canonical edge set of a 3-user network.
pub fn canonical_three_user(net: &Network) -> Result<ThreeUserCanon> {
    if net.users() != 3 {
        return Err(Error::InvalidNetwork(format!("three-user canonical form needs K = 3, got {}", net.users())));
    }
    Ok(canonical_three_user_pattern(three_user_pattern(net, &[0, 1, 2])))
}

/// Figure-letter representatives of the sixteen classes, as 0-based cross
/// links. Letters were matched to edge sets from the proof arguments; the
/// pair (c, d) is interchangeable since both carry identical values.
pub const THREE_USER_LETTERS: [(char, &[(usize, usize)]); 16] = [
    ('a', &[]),
    ('b', &[(0, 1)]),
    ('c', &[(0, 1), (1, 0)]),
    ('d', &[(0, 1), (0, 2)]),
    ('e', &[(0, 1), (2, 1)]),
    ('f', &[(0, 1), (1, 2)]),
    ('g', &[(0, 1), (1, 0), (1, 2)]),
    ('h', &[(0, 1), (0, 2), (1, 2)]),
    ('i', &[(0, 1), (1, 2), (2, 0)]),
    ('j', &[(0, 1), (1, 0), (2, 1)]),
    ('k', &[(0, 2), (2, 0), (1, 2), (2, 1)]),
    ('l', &[(1, 2), (2, 1), (0, 2), (0, 1)]),
    ('m', &[(0, 1), (1, 2), (2, 0), (1, 0)]),
    ('n', &[(1, 2), (2, 1), (1, 0), (2, 0)]),
    ('o', &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2)]),
    ('p', &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]),
];

fn letter_pattern(edges: &[(usize, usize)]) -> u8 {
    edges.iter().fold(0, |acc, &(i, j)| acc | edge_bit(i, j))
}

/// Orbit index of a figure letter.
pub fn three_user_index(letter: char) -> Option<usize> {
    let (_, edges) = THREE_USER_LETTERS.iter().find(|(l, _)| *l == letter)?;
    Some(canonical_three_user_pattern(letter_pattern(edges)).index)
}

/// Figure letter of an orbit index.
pub fn three_user_letter(index: usize) -> char {
    THREE_USER_LETTERS
        .iter()
        .find(|(_, edges)| canonical_three_user_pattern(letter_pattern(edges)).index == index)
        .map(|(l, _)| *l)
        .unwrap_or('?')
}

/// Three-user network for a figure letter.
pub fn three_user_network(letter: char) -> Option<Network> {
    let (_, edges) = THREE_USER_LETTERS.iter().find(|(l, _)| *l == letter)?;
    Some(Network::new(3, edges.iter().copied()).unwrap())
}

// ---------------------------------------------------------------------------
// Hop distances and local views

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Tx,
    Rx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Node {
    pub role: Role,
    pub index: usize,
}

impl Node {
    pub fn tx(index: usize) -> Self {
        Node { role: Role::Tx, index }
    }
    pub fn rx(index: usize) -> Self {
        Node { role: Role::Rx, index }
    }
}

fn node_distances(net: &Network, node: Node) -> Vec<Option<u32>> {
    let k = net.users();
    let id = |n: Node| match n.role {
        Role::Tx => n.index,
        Role::Rx => k + n.index,
    };
    let mut adj = vec![Vec::new(); 2 * k];
    for l in net.links() {
        adj[l.tx].push(k + l.rx);
        adj[k + l.rx].push(l.tx);
    }
    let mut dist = vec![None; 2 * k];
    let start = id(node);
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Hop distance of every reachable link from `node`: one plus the fewest
/// links traversed from `node` to either endpoint. Unreachable links are
/// absent from the map.
pub fn edge_hop_distances(net: &Network, node: Node) -> Result<BTreeMap<Link, u32>> {
    if node.index >= net.users() {
        return Err(Error::InvalidNetwork(format!("node index {} out of range", node.index + 1)));
    }
    let k = net.users();
    let dist = node_distances(net, node);
    Ok(net
        .links()
        .into_iter()
        .filter_map(|l| {
            let d = match (dist[l.tx], dist[k + l.rx]) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => return None,
            };
            Some((l, d + 1))
        })
        .collect())
}

/// Links known at a node under `h`-local view: transmitters see links within
/// `h` hops, receivers within `h + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalView {
    pub node: Node,
    pub h: u32,
    pub known_edges: BTreeSet<Link>,
}

pub fn local_view(net: &Network, node: Node, h: u32) -> Result<LocalView> {
    let radius = match node.role {
        Role::Tx => h,
        Role::Rx => h + 1,
    };
    let known_edges =
        edge_hop_distances(net, node)?.into_iter().filter(|&(_, d)| d <= radius).map(|(l, _)| l).collect();
    Ok(LocalView { node, h, known_edges })
}

/// Network diameter: the largest finite hop distance between any node and
/// any link. At `h >= diameter` every node knows its whole component.
pub fn diameter(net: &Network) -> u32 {
    let mut best = 0;
    for i in 0..net.users() {
        for node in [Node::tx(i), Node::rx(i)] {
            let d = edge_hop_distances(net, node).expect("valid node");
            best = best.max(d.values().copied().max().unwrap_or(0));
        }
    }
    best
}

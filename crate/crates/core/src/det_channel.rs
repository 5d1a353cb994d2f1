//! Linear deterministic channel: shift channels over GF(2)^q and end-to-end
//! decode checks for schedules.
//!
//! A transmit signal is a column of `q` bits, most significant first. A link
//! of gain `n` delivers the top `n` bits of the input to the bottom `n`
//! positions at the receiver, where all arrivals add modulo 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coded_sets::{certify, Certificate, CodedSchedule, Field};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::topology::{bits, components_of, Gains, Network, TopologyClass};

/// Largest per-link gain supported by the simulator.
pub const MAX_LEVELS: u32 = 63;

/// Payload bit totals up to this size are enumerated exhaustively.
pub const EXHAUSTIVE_PAYLOAD_BITS: u32 = 20;

/// Seeded payload draws per gain draw when enumeration is too large.
pub const SAMPLED_PAYLOADS: usize = 64;

/// Gains drawn for random verification lie in `0..=RANDOM_GAIN_MAX`.
pub const RANDOM_GAIN_MAX: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetSignal {
    /// `bits[0]` is the most significant level.
    pub bits: Vec<u8>,
}

impl DetSignal {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidSignal("signal entries must be 0 or 1".into()));
        }
        if bits.len() > MAX_LEVELS as usize {
            return Err(Error::CapExceeded { what: "signal length", size: bits.len(), cap: MAX_LEVELS as usize });
        }
        Ok(DetSignal { bits })
    }

    pub fn zeros(q: u32) -> Self {
        DetSignal { bits: vec![0; q as usize] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn to_mask(&self) -> u64 {
        self.bits.iter().enumerate().fold(0, |m, (i, &b)| m | (b as u64) << i)
    }

    fn from_mask(mask: u64, q: u32) -> Self {
        DetSignal { bits: (0..q).map(|i| (mask >> i & 1) as u8).collect() }
    }

    pub fn xor(&self, other: &DetSignal) -> Result<DetSignal> {
        if self.len() != other.len() {
            return Err(Error::InvalidSignal("length mismatch".into()));
        }
        Ok(DetSignal { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect() })
    }
}

/// Bit `i` of the mask is level `i` counted from the top.
fn shift_mask(x: u64, q: u32, n: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    (x & low_bits(n)) << (q - n)
}

fn low_bits(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Keep the top `n` bits of `x` and move them to the bottom `n` positions.
pub fn shift_down(x: &DetSignal, q: u32, n: u32) -> Result<DetSignal> {
    if x.len() != q as usize {
        return Err(Error::InvalidSignal(format!("signal has {} levels, expected {q}", x.len())));
    }
    if n > q {
        return Err(Error::InvalidSignal(format!("gain {n} exceeds q = {q}")));
    }
    Ok(DetSignal::from_mask(shift_mask(x.to_mask(), q, n), q))
}

fn check_det(net: &Network) -> Result<u32> {
    let q = net.det_levels()?;
    if q > MAX_LEVELS {
        return Err(Error::CapExceeded { what: "gain", size: q as usize, cap: MAX_LEVELS as usize });
    }
    Ok(q)
}

fn receive_masks(net: &Network, q: u32, x: &[u64]) -> Vec<u64> {
    (0..net.users())
        .map(|j| {
            let mut y = shift_mask(x[j], q, net.det_gain(j, j).unwrap());
            for k in bits(net.in_mask(j)) {
                y ^= shift_mask(x[k], q, net.det_gain(k, j).unwrap());
            }
            y
        })
        .collect()
}

/// Outputs `Y_j = XOR_k shift(X_k, q, n_kj)` for every receiver.
pub fn receive(inputs: &[DetSignal], net: &Network) -> Result<Vec<DetSignal>> {
    let q = check_det(net)?;
    if inputs.len() != net.users() {
        return Err(Error::InvalidSignal(format!("expected {} inputs, got {}", net.users(), inputs.len())));
    }
    if let Some(x) = inputs.iter().find(|x| x.len() != q as usize) {
        return Err(Error::InvalidSignal(format!("input has {} levels, expected {q}", x.len())));
    }
    let x: Vec<u64> = inputs.iter().map(DetSignal::to_mask).collect();
    Ok(receive_masks(net, q, &x).into_iter().map(|m| DetSignal::from_mask(m, q)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTranscript {
    pub inputs: Vec<DetSignal>,
    pub outputs: Vec<DetSignal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    /// `decoded[i][j]`: codeword `j` of user `i` was recovered exactly.
    pub decoded: Vec<Vec<bool>>,
    pub transcript: Vec<SlotTranscript>,
}

impl DecodeOutcome {
    pub fn all_decoded(&self) -> bool {
        self.decoded.iter().flatten().all(|&d| d)
    }
}

fn coeff_masks(cert: &Certificate, k: usize, t: usize) -> Result<Vec<u64>> {
    if cert.coeffs.len() != k || cert.coeffs.iter().any(|a| a.len() != t) {
        return Err(Error::InvalidSchedule(format!("coefficients for receiver {} must be {k} x {t}", cert.rx + 1)));
    }
    cert.coeffs
        .iter()
        .map(|a| {
            a.iter().enumerate().try_fold(0u64, |m, (l, c)| {
                if c.is_zero() {
                    Ok(m)
                } else if c.is_one() {
                    Ok(m | 1 << l)
                } else {
                    Err(Error::InvalidSchedule("GF(2) coefficients must be 0 or 1".into()))
                }
            })
        })
        .collect()
}

/// Payload of codeword `j` at user `i` is a mask over the top `n_ii` levels.
/// Per-slot transmit and receive masks.
type SlotTrace = Vec<(Vec<u64>, Vec<u64>)>;

fn run_masks(
    net: &Network,
    q: u32,
    sched: &CodedSchedule,
    payloads: &[Vec<u64>],
    coeffs: &[Vec<u64>],
) -> (Vec<Vec<bool>>, SlotTrace) {
    let k_users = net.users();
    let mut slots = Vec::with_capacity(sched.t());
    for l in 0..sched.t() {
        let x: Vec<u64> = (0..k_users)
            .map(|i| sched.assignment(i).iter().position(|s| s.contains(&l)).map_or(0, |j| payloads[i][j]))
            .collect();
        let y = receive_masks(net, q, &x);
        slots.push((x, y));
    }
    let decoded = (0..k_users)
        .map(|i| {
            let nii = net.det_gain(i, i).unwrap();
            (0..sched.assignment(i).len())
                .map(|j| {
                    let combo = bits(coeffs[i][j]).fold(0u64, |acc, l| acc ^ slots[l].1[i]);
                    let estimate = (combo >> (q - nii)) & low_bits(nii);
                    estimate == payloads[i][j]
                })
                .collect()
        })
        .collect();
    (decoded, slots)
}

/// `run_masks` specialised to one gain draw, for checking many payloads.
struct FastDecoder {
    q: u32,
    direct: Vec<u32>,
    incoming: Vec<Vec<(usize, u32)>>,
    slot_codeword: Vec<Vec<Option<usize>>>,
    coeffs: Vec<Vec<u64>>,
    offset: Vec<usize>,
}

impl FastDecoder {
    fn new(net: &Network, q: u32, sched: &CodedSchedule, coeffs: &[Vec<u64>]) -> Self {
        let n = net.users();
        let mut offset = Vec::with_capacity(n);
        let mut next = 0;
        for i in 0..n {
            offset.push(next);
            next += sched.assignment(i).len();
        }
        FastDecoder {
            q,
            direct: (0..n).map(|i| net.det_gain(i, i).unwrap()).collect(),
            incoming: (0..n)
                .map(|j| bits(net.in_mask(j)).map(|k| (k, net.det_gain(k, j).unwrap())).collect())
                .collect(),
            slot_codeword: (0..sched.t())
                .map(|l| (0..n).map(|i| sched.assignment(i).iter().position(|s| s.contains(&l))).collect())
                .collect(),
            coeffs: (0..n).map(|i| coeffs[i].iter().take(sched.assignment(i).len()).copied().collect()).collect(),
            offset,
        }
    }

    /// Whether every codeword decodes for the flattened payload `flat`;
    /// `x` and `y` are scratch buffers of length `users` and `t * users`.
    fn all_decode(&self, flat: &[u64], x: &mut [u64], y: &mut [u64]) -> bool {
        let n = self.direct.len();
        for (l, cw) in self.slot_codeword.iter().enumerate() {
            for i in 0..n {
                x[i] = cw[i].map_or(0, |j| flat[self.offset[i] + j]);
            }
            for j in 0..n {
                let mut acc = shift_mask(x[j], self.q, self.direct[j]);
                for &(k, g) in &self.incoming[j] {
                    acc ^= shift_mask(x[k], self.q, g);
                }
                y[l * n + j] = acc;
            }
        }
        (0..n).all(|i| {
            let nii = self.direct[i];
            self.coeffs[i].iter().enumerate().all(|(j, &c)| {
                let combo = bits(c).fold(0u64, |acc, l| acc ^ y[l * n + i]);
                (combo >> (self.q - nii)) & low_bits(nii) == flat[self.offset[i] + j]
            })
        })
    }
}

/// Transmit every codeword in the top `n_ii` levels of each of its slots and
/// decode at each receiver with the given GF(2) coefficients.
pub fn simulate_and_decode(
    net: &Network,
    sched: &CodedSchedule,
    payloads: &[Vec<Vec<u8>>],
    coeffs: &[Certificate],
) -> Result<DecodeOutcome> {
    let q = check_det(net)?;
    let k_users = net.users();
    if sched.users() != k_users || payloads.len() != k_users || coeffs.len() != k_users {
        return Err(Error::InvalidSchedule("schedule, payloads and coefficients must cover every user".into()));
    }
    let mut pay = Vec::with_capacity(k_users);
    let mut cm = Vec::with_capacity(k_users);
    for i in 0..k_users {
        let nii = net.det_gain(i, i)?;
        let cw = sched.assignment(i).len();
        if payloads[i].len() != cw {
            return Err(Error::InvalidSchedule(format!("user {} needs {cw} payloads", i + 1)));
        }
        let mut row = Vec::with_capacity(cw);
        for p in &payloads[i] {
            if p.len() > nii as usize || p.iter().any(|&b| b > 1) {
                return Err(Error::InvalidSignal(format!("payload of user {} must be at most {nii} bits", i + 1)));
            }
            row.push(p.iter().enumerate().fold(0u64, |m, (u, &b)| m | (b as u64) << u));
        }
        pay.push(row);
        cm.push(if cw == 0 { Vec::new() } else { coeff_masks(&coeffs[i], cw, sched.t())? });
    }
    let (decoded, slots) = run_masks(net, q, sched, &pay, &cm);
    let transcript = slots
        .into_iter()
        .map(|(x, y)| SlotTranscript {
            inputs: x.into_iter().map(|m| DetSignal::from_mask(m, q)).collect(),
            outputs: y.into_iter().map(|m| DetSignal::from_mask(m, q)).collect(),
        })
        .collect();
    Ok(DecodeOutcome { decoded, transcript })
}

/// Deterministic copy of `net` with every declared link drawn from
/// `0..=RANDOM_GAIN_MAX`.
pub fn random_gains<R: Rng>(net: &Network, rng: &mut R) -> Network {
    let direct = (0..net.users()).map(|_| rng.gen_range(0..=RANDOM_GAIN_MAX)).collect();
    let cross = net.cross().iter().map(|&e| (e, rng.gen_range(0..=RANDOM_GAIN_MAX))).collect();
    net.connectivity().with_gains(Gains::Deterministic { direct, cross }).expect("random gains cover every link")
}

/// Independent generator for trial `trial` under base `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadMode {
    Exhaustive,
    Sampled,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    /// Gain draws on which some simulated codeword failed to decode.
    pub failed_trials: Vec<usize>,
    pub payload_mode: PayloadMode,
    /// Decoding mechanism: "gf2-certificate" or "per-slot strategies".
    pub method: String,
    /// Parts of the schedule that the simulator cannot check.
    pub unverified: Vec<String>,
}

impl VerifyReport {
    pub fn all_decoded(&self) -> bool {
        self.failed_trials.is_empty()
    }
}

/// Enumerate or sample payload assignments and check that `ok` holds for all.
fn payload_sweep(widths: &[u32], rng: &mut ChaCha8Rng, mut ok: impl FnMut(&[u64]) -> bool) -> (bool, bool) {
    let total: u32 = widths.iter().sum();
    let split = |mut v: u64| -> Vec<u64> {
        widths
            .iter()
            .map(|&w| {
                let p = v & low_bits(w);
                v >>= w;
                p
            })
            .collect()
    };
    if total <= EXHAUSTIVE_PAYLOAD_BITS {
        for v in 0..(1u64 << total) {
            if !ok(&split(v)) {
                return (false, true);
            }
        }
        (true, true)
    } else {
        for _ in 0..SAMPLED_PAYLOADS {
            let p: Vec<u64> = widths.iter().map(|&w| rng.gen::<u64>() & low_bits(w)).collect();
            if !ok(&p) {
                return (false, false);
            }
        }
        (true, false)
    }
}

fn mode_of(flags: &[bool]) -> PayloadMode {
    if flags.iter().all(|&e| e) {
        PayloadMode::Exhaustive
    } else if flags.iter().all(|&e| !e) {
        PayloadMode::Sampled
    } else {
        PayloadMode::Mixed
    }
}

/// Verify a GF(2)-certified schedule on `trials` random gain draws.
pub fn verify_certified(
    net: &Network,
    sched: &CodedSchedule,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<VerifyReport> {
    let certs = certify(sched, &net.connectivity(), Field::Gf2)?;
    let k = sched.k();
    let coeffs: Vec<Vec<u64>> = (0..net.users())
        .map(|i| if sched.is_active(i) { coeff_masks(&certs[i], k, sched.t()) } else { Ok(Vec::new()) })
        .collect::<Result<_>>()?;
    let results = map_range(exec, trials, |trial| {
        let mut rng = trial_rng(seed, trial as u64);
        let g = random_gains(net, &mut rng);
        let q = g.det_levels().unwrap();
        let widths: Vec<u32> = (0..g.users())
            .flat_map(|i| std::iter::repeat_n(g.det_gain(i, i).unwrap(), sched.assignment(i).len()))
            .collect();
        let fast = FastDecoder::new(&g, q, sched, &coeffs);
        let mut x = vec![0u64; g.users()];
        let mut y = vec![0u64; g.users() * sched.t()];
        payload_sweep(&widths, &mut rng, |flat| fast.all_decode(flat, &mut x, &mut y))
    });
    Ok(VerifyReport {
        trials,
        seed,
        failed_trials: results.iter().enumerate().filter(|(_, r)| !r.0).map(|(i, _)| i).collect(),
        payload_mode: mode_of(&results.iter().map(|r| r.1).collect::<Vec<_>>()),
        method: "gf2-certificate".into(),
        unverified: Vec::new(),
    })
}

/// Levels (1-based from the top) that a one-to-many hub can use without
/// landing on any interfered receiver's own signal.
pub fn one_to_many_levels(net: &Network, hub: usize, within: u64) -> Result<Vec<u32>> {
    let n_hub = net.det_gain(hub, hub)?;
    let mut levels = Vec::new();
    'level: for k in 1..=n_hub {
        for j in bits(net.out_mask(hub) & within) {
            let n_cross = net.det_gain(hub, j)?;
            let n_own = net.det_gain(j, j)?;
            if n_cross.saturating_sub(n_own) < k && k <= n_cross {
                continue 'level;
            }
        }
        levels.push(k);
    }
    Ok(levels)
}

/// Per-slot strategy for one component of active users.
enum Strategy {
    /// Every user sends `n_ii` bits; no cross links among them.
    Clean,
    /// The hub sends on its safe levels; everyone else sends `n_ii` bits.
    Hub(usize),
    Unverified(String),
}

fn slot_strategies(net: &Network, active: u64) -> Vec<(u64, Strategy)> {
    components_of(net, active)
        .into_iter()
        .map(|c| {
            let class = crate::topology::classify_mask(net, c);
            let s = match class {
                TopologyClass::Isolated => Strategy::Clean,
                TopologyClass::ZNetwork | TopologyClass::DToMany { d: 1, .. } => {
                    let hub = bits(c).find(|&u| net.out_mask(u) & c != 0).unwrap();
                    Strategy::Hub(hub)
                }
                other => Strategy::Unverified(format!(
                    "{other} on users {:?}: literature construction, not simulator-verified",
                    bits(c).map(|u| u + 1).collect::<Vec<_>>()
                )),
            };
            (c, s)
        })
        .collect()
}

/// Verify a time-sharing schedule slot by slot: interference-free users send
/// at full rate and one-to-many hubs back off to levels that never collide.
/// Components without a simulated strategy are reported as unverified.
pub fn verify_slots(
    net: &Network,
    slots: &[Vec<usize>],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<VerifyReport> {
    let masks: Vec<u64> = slots
        .iter()
        .map(|s| {
            s.iter().try_fold(0u64, |m, &u| {
                if u < net.users() {
                    Ok(m | 1 << u)
                } else {
                    Err(Error::InvalidSchedule(format!("slot names missing user {}", u + 1)))
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut unverified = Vec::new();
    let plans: Vec<Vec<(u64, Strategy)>> = masks.iter().map(|&m| slot_strategies(net, m)).collect();
    for (l, plan) in plans.iter().enumerate() {
        for (_, s) in plan {
            if let Strategy::Unverified(msg) = s {
                unverified.push(format!("slot {}: {msg}", l + 1));
            }
        }
    }
    let results = map_range(exec, trials, |trial| {
        let mut rng = trial_rng(seed, trial as u64);
        let g = random_gains(net, &mut rng);
        let q = g.det_levels().unwrap();
        let mut ok = true;
        let mut exhaustive = true;
        for plan in &plans {
            // Bits carried by each user in this slot, as level lists.
            let mut users = Vec::new();
            for (c, s) in plan {
                match s {
                    Strategy::Unverified(_) => {}
                    Strategy::Clean => {
                        users.extend(bits(*c).map(|u| (u, (1..=g.det_gain(u, u).unwrap()).collect::<Vec<_>>())))
                    }
                    Strategy::Hub(h) => {
                        for u in bits(*c) {
                            let levels = if u == *h {
                                one_to_many_levels(&g, u, *c).unwrap()
                            } else {
                                (1..=g.det_gain(u, u).unwrap()).collect()
                            };
                            users.push((u, levels));
                        }
                    }
                }
            }
            let widths: Vec<u32> = users.iter().map(|(_, l)| l.len() as u32).collect();
            let (good, ex) = payload_sweep(&widths, &mut rng, |pay| {
                let mut x = vec![0u64; g.users()];
                for ((u, levels), &p) in users.iter().zip(pay) {
                    for (b, &lv) in levels.iter().enumerate() {
                        x[*u] |= (p >> b & 1) << (lv - 1);
                    }
                }
                let y = receive_masks(&g, q, &x);
                users.iter().zip(pay).all(|((u, levels), &p)| {
                    let nii = g.det_gain(*u, *u).unwrap();
                    levels.iter().enumerate().all(|(b, &lv)| {
                        let pos = q - nii + lv - 1;
                        (y[*u] >> pos & 1) == (p >> b & 1)
                    })
                })
            });
            ok &= good;
            exhaustive &= ex;
        }
        (ok, exhaustive)
    });
    Ok(VerifyReport {
        trials,
        seed,
        failed_trials: results.iter().enumerate().filter(|(_, r)| !r.0).map(|(i, _)| i).collect(),
        payload_mode: mode_of(&results.iter().map(|r| r.1).collect::<Vec<_>>()),
        method: "per-slot strategies".into(),
        unverified,
    })
}

/// Verify any schedule: GF(2)-certified coded schedules are decoded with
/// their certificates, everything else slot by slot.
pub fn verify_schedule(
    net: &Network,
    sched: &CodedSchedule,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<VerifyReport> {
    if certify(sched, &net.connectivity(), Field::Gf2).is_ok() {
        return verify_certified(net, sched, trials, seed, exec);
    }
    let single_slot = (0..sched.users()).all(|i| sched.assignment(i).iter().all(|s| s.len() == 1));
    if !single_slot {
        return Err(Error::Infeasible {
            receiver: (0..net.users())
                .find(|&rx| {
                    crate::coded_sets::certify_receiver(sched, &net.connectivity(), rx, Field::Gf2)
                        .ok()
                        .flatten()
                        .is_none()
                })
                .map_or(0, |rx| rx + 1),
        });
    }
    verify_slots(net, &sched.active_per_slot(), trials, seed, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coded_sets::cyclic_chain_schedule;
    use crate::topology::families::*;
    use std::collections::BTreeSet;

    fn sig(b: &[u8]) -> DetSignal {
        DetSignal::new(b.to_vec()).unwrap()
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_down(&sig(&[1, 0, 1]), 3, 2).unwrap(), sig(&[0, 1, 0]));
        assert_eq!(shift_down(&sig(&[1, 0, 1]), 3, 3).unwrap(), sig(&[1, 0, 1]));
        assert_eq!(shift_down(&sig(&[1, 0, 1]), 3, 0).unwrap(), sig(&[0, 0, 0]));
        assert!(shift_down(&sig(&[1, 0, 1]), 3, 4).is_err());
        assert!(shift_down(&sig(&[1, 0]), 3, 1).is_err());
    }

    #[test]
    fn receive_example() {
        let net = Network::deterministic(2, vec![2, 2], [((1, 0), 1)]).unwrap();
        let y = receive(&[sig(&[1, 0]), sig(&[1, 1])], &net).unwrap();
        assert_eq!(y[0], sig(&[1, 1]));
        let zero = receive(&[sig(&[0, 0]), sig(&[0, 0])], &net).unwrap();
        assert!(zero.iter().all(|s| s.bits == vec![0, 0]));
        assert!(receive(&[sig(&[1, 0])], &net).is_err());
        assert!(receive(&[sig(&[1, 0]), sig(&[1, 1])], &chain(2)).is_err());
    }

    #[test]
    fn cyclic_chain_decodes() {
        for k in [3, 5] {
            let net = cyclic_chain(k);
            let rep = verify_schedule(&net, &cyclic_chain_schedule(k).unwrap(), 20, 1, Execution::Sequential).unwrap();
            assert!(rep.all_decoded(), "K = {k}");
            assert_eq!(rep.method, "gf2-certificate");
        }
    }

    #[test]
    fn collision_is_detected() {
        let net = Network::deterministic(2, vec![1, 1], [((0, 1), 1)]).unwrap();
        let sched = CodedSchedule::new(1, 1, vec![vec![BTreeSet::from([0])], vec![BTreeSet::from([0])]]).unwrap();
        let cert = Certificate { rx: 0, field: Field::Gf2, coeffs: vec![vec![crate::Rational::one()]], penalty: None };
        let certs = vec![cert.clone(), Certificate { rx: 1, ..cert }];
        let out = simulate_and_decode(&net, &sched, &[vec![vec![0]], vec![vec![0]]], &certs).unwrap();
        assert!(out.all_decoded());
        let out = simulate_and_decode(&net, &sched, &[vec![vec![1]], vec![vec![0]]], &certs).unwrap();
        assert!(!out.decoded[1][0]);
    }

    #[test]
    fn one_to_many_slots_decode() {
        let net = d_to_many(1, 4);
        let rep = verify_slots(&net, &[vec![0, 1, 2, 3]], 50, 3, Execution::Parallel).unwrap();
        assert!(rep.all_decoded());
        assert!(rep.unverified.is_empty());
        let fc = verify_slots(&fully_connected(3), &[vec![0, 1, 2]], 5, 0, Execution::Sequential).unwrap();
        assert_eq!(fc.unverified.len(), 1);
    }

    #[test]
    fn hub_levels_avoid_collisions() {
        // n11 = 3, n12 = 2, n22 = 1: level 2 lands on D2's own bit.
        let net = Network::deterministic(2, vec![3, 1], [((0, 1), 2)]).unwrap();
        assert_eq!(one_to_many_levels(&net, 0, 0b11).unwrap(), vec![1, 3]);
    }
}

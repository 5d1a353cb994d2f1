//! Deterministic double-Z chain: three users with cross links T1->D2 and
//! T2->D3.
//!
//! The capacity region is a small polytope with integer right-hand sides.
//! The achievable strategy lets users 1 and 3 send at full rate while user 2,
//! which sees every gain with a three-hop view, backs off according to one of
//! eleven gain orderings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::par::{map_slice, Execution};
use crate::rational::Rational;
use crate::topology::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZChainDet {
    pub n11: u32,
    pub n22: u32,
    pub n33: u32,
    pub n12: u32,
    pub n23: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetRates {
    pub r1: i64,
    pub r2: i64,
    pub r3: i64,
}

impl DetRates {
    pub fn sum(&self) -> i64 {
        self.r1 + self.r2 + self.r3
    }
}

/// Constraint names, in the order `region_rows` lists them.
pub const CONSTRAINTS: [&str; 6] = ["R1", "R2", "R3", "R1+R2", "R2+R3", "R1+R2+R3"];

fn pos(x: i64) -> i64 {
    x.max(0)
}

impl ZChainDet {
    pub fn new(n11: u32, n22: u32, n33: u32, n12: u32, n23: u32) -> Self {
        ZChainDet { n11, n22, n33, n12, n23 }
    }

    /// Parses `a,b,c,d,e` in the order n11, n22, n33, n12, n23.
    pub fn from_gains(gains: &[u32]) -> Result<Self> {
        match gains {
            &[a, b, c, d, e] => Ok(ZChainDet::new(a, b, c, d, e)),
            _ => Err(Error::Malformed(format!("expected 5 gains n11,n22,n33,n12,n23, got {}", gains.len()))),
        }
    }

    pub fn gains(&self) -> [u32; 5] {
        [self.n11, self.n22, self.n33, self.n12, self.n23]
    }

    fn ints(&self) -> (i64, i64, i64, i64, i64) {
        (self.n11 as i64, self.n22 as i64, self.n33 as i64, self.n12 as i64, self.n23 as i64)
    }

    /// The corresponding network with the five gains attached.
    pub fn network(&self) -> Network {
        Network::deterministic(3, vec![self.n11, self.n22, self.n33], [((0, 1), self.n12), ((1, 2), self.n23)])
            .expect("double-Z chain is a valid network")
    }

    /// Right-hand sides of the six region constraints.
    pub fn region_rows(&self) -> [i64; 6] {
        let (n11, n22, n33, n12, n23) = self.ints();
        [
            n11,
            n22,
            n33,
            n11.max(n12).max(n22).max(n11 + n22 - n12),
            n22.max(n23).max(n33).max(n22 + n33 - n23),
            n33.max(n23) + pos(n11 - n12) + n12.max(n22 - n23),
        ]
    }

    /// Names of the region constraints violated by `r`.
    pub fn violations(&self, r: &DetRates) -> Vec<&'static str> {
        let lhs = [r.r1, r.r2, r.r3, r.r1 + r.r2, r.r2 + r.r3, r.sum()];
        let mut out: Vec<&'static str> = lhs
            .iter()
            .zip(self.region_rows())
            .zip(CONSTRAINTS)
            .filter(|((l, b), _)| **l > *b)
            .map(|(_, name)| name)
            .collect();
        if r.r1 < 0 || r.r2 < 0 || r.r3 < 0 {
            out.push("nonnegative");
        }
        out
    }

    /// Maximum sum rate over the region and an attaining triple.
    pub fn region_max(&self) -> (i64, DetRates) {
        let rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 1, 1]];
        let a: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect()).collect();
        let b: Vec<Rational> = self.region_rows().iter().map(|&v| Rational::from_integer(v)).collect();
        let c = vec![Rational::one(); 3];
        let sol = lp::maximize(&c, &a, &b).expect("bounded packing program");
        // Consecutive-ones rows make every vertex integral.
        let x: Vec<i64> = sol
            .primal
            .iter()
            .map(|v| {
                assert!(v.is_integer(), "fractional vertex {v}");
                v.numer_i64()
            })
            .collect();
        let w = DetRates { r1: x[0], r2: x[1], r3: x[2] };
        (w.sum(), w)
    }

    /// Case number (1 to 11) of the gain ordering; ties go to the lower case.
    pub fn case(&self) -> Result<u8> {
        let (n11, n22, n33, n12, n23) = self.ints();
        if n12 <= n11 {
            return Ok(1);
        }
        if n22 <= n12 - n11 {
            return Ok(2);
        }
        if n22 <= n12 {
            return Ok(if n23 <= n33 { 3 } else { 4 });
        }
        let low = n22 - n12;
        let high = n11 + n22 - n12;
        Ok(if n23 <= n33 {
            if n23 <= low {
                5
            } else if n23 <= high {
                6
            } else {
                7
            }
        } else if n23 <= low {
            8
        } else if n23 <= high {
            9
        } else if n23 <= n22 {
            10
        } else {
            11
        })
    }

    /// Achievable triple and its case.
    pub fn achievable(&self) -> Result<(DetRates, u8)> {
        let (n11, n22, n33, n12, n23) = self.ints();
        let case = self.case()?;
        // Cases 1 and 2 hand user 2 the sum rate of the lower Z network with
        // effective direct gain `a`.
        let lower_z = |a: i64| {
            let a = pos(a);
            let total = a.max(n33).max(n23.min(a + n33)).max(a + n33 - n23);
            let r3 = n33.min(total);
            let r2 = total - r3;
            if r2 > a {
                (a, total - a)
            } else {
                (r2, r3)
            }
        };
        let (r2, r3) = match case {
            1 => lower_z(n22 - n12),
            2 => lower_z(n22),
            3 => ((n12 - n11).min(pos(n22 - n23)), n33),
            4 => ((n12 - n11).min(pos(n22 - n23) + n22.min(n23 - n33)), n33),
            5 => (pos(n22 - n11 - n23), n33),
            6 => (pos(n12 - n11), n33),
            7 => (pos(n22 - n23), n33),
            8 => (pos(n22 - n11 - n33), n33),
            9 => (n12 - n11 + (n23 - n33).min(n22 - n12), n33),
            10 => (n22 - n11.max(n33), n33),
            _ => (n22 - n11.max(pos(n33 + n22 - n23)), n33),
        };
        Ok((DetRates { r1: n11, r2: pos(r2), r3 }, case))
    }
}

/// Cases whose achievable sum is claimed to meet the region maximum.
pub const ASSERTED_OPTIMAL: [u8; 4] = [1, 2, 3, 11];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetInstance {
    pub gains: ZChainDet,
    pub case: u8,
    pub rates: DetRates,
    pub achievable_sum: i64,
    pub region_max: i64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetSweep {
    pub instances: Vec<DetInstance>,
}

impl DetSweep {
    pub fn total(&self) -> usize {
        self.instances.len()
    }

    pub fn violating(&self) -> impl Iterator<Item = &DetInstance> {
        self.instances.iter().filter(|i| !i.violations.is_empty())
    }

    pub fn optimal_count(&self) -> usize {
        self.instances.iter().filter(|i| i.achievable_sum == i.region_max).count()
    }

    /// (matching, total) over the instances in the asserted-optimal cases.
    pub fn asserted_optimal(&self) -> (usize, usize) {
        let asserted: Vec<&DetInstance> =
            self.instances.iter().filter(|i| ASSERTED_OPTIMAL.contains(&i.case)).collect();
        (asserted.iter().filter(|i| i.achievable_sum == i.region_max).count(), asserted.len())
    }
}

pub fn evaluate(z: ZChainDet) -> Result<DetInstance> {
    let (rates, case) = z.achievable()?;
    let (region_max, _) = z.region_max();
    Ok(DetInstance {
        gains: z,
        case,
        achievable_sum: rates.sum(),
        region_max,
        violations: z.violations(&rates).into_iter().map(String::from).collect(),
        rates,
    })
}

/// Every gain tuple in `{0..=max_gain}^5`.
pub fn sweep(max_gain: u32, exec: Execution) -> Result<DetSweep> {
    let g = max_gain + 1;
    let tuples: Vec<ZChainDet> = (0..g.pow(5))
        .map(|mut i| {
            let mut v = [0u32; 5];
            for slot in v.iter_mut().rev() {
                *slot = i % g;
                i /= g;
            }
            ZChainDet::from_gains(&v).unwrap()
        })
        .collect();
    let instances = map_slice(exec, &tuples, |z| evaluate(*z)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DetSweep { instances })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer enumeration of the region, independent of the simplex.
    fn brute_max(z: &ZChainDet) -> i64 {
        let mut best = 0;
        for r1 in 0..=z.n11 as i64 {
            for r2 in 0..=z.n22 as i64 {
                for r3 in 0..=z.n33 as i64 {
                    let r = DetRates { r1, r2, r3 };
                    if z.violations(&r).is_empty() {
                        best = best.max(r.sum());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn region_examples() {
        assert_eq!(ZChainDet::new(2, 2, 2, 1, 1).region_max().0, 4);
        for n in 0..6 {
            assert_eq!(ZChainDet::new(n, n, n, n, n).region_max().0, 2 * n as i64);
        }
        assert_eq!(ZChainDet::new(3, 1, 4, 0, 0).region_max().0, 8);
    }

    #[test]
    fn region_max_matches_enumeration() {
        let s = sweep(3, Execution::Sequential).unwrap();
        for inst in &s.instances {
            assert_eq!(inst.region_max, brute_max(&inst.gains), "{:?}", inst.gains);
        }
    }

    #[test]
    fn achievable_examples() {
        let (r, c) = ZChainDet::new(2, 2, 2, 1, 1).achievable().unwrap();
        assert_eq!((c, r.sum()), (1, 4));
        for n in 1..5 {
            let (r, _) = ZChainDet::new(n, n, n, n, n).achievable().unwrap();
            assert_eq!(r.sum(), 2 * n as i64);
        }
        let (r, _) = ZChainDet::new(3, 1, 4, 0, 0).achievable().unwrap();
        assert_eq!(r, DetRates { r1: 3, r2: 1, r3: 4 });
    }

    #[test]
    fn network_shape() {
        let net = ZChainDet::new(1, 2, 3, 4, 5).network();
        assert_eq!(net.det_gain(0, 1).unwrap(), 4);
        assert_eq!(net.det_gain(1, 2).unwrap(), 5);
        assert_eq!(net.cross().len(), 2);
    }

    #[test]
    fn sweep_stays_in_region() {
        let s = sweep(4, Execution::Parallel).unwrap();
        assert_eq!(s.total(), 3125);
        assert_eq!(s.violating().count(), 0);
        let (hit, total) = s.asserted_optimal();
        assert_eq!(hit, total);
        let cases: std::collections::BTreeSet<u8> = s.instances.iter().map(|i| i.case).collect();
        assert_eq!(cases.len(), 11);
    }
}

//! Gaussian double-Z chain: outer regions and a constant-gap achievable
//! strategy.
//!
//! Gains are linear power ratios: `SNR_i = |h_ii|^2`, `INR_2` is the power
//! of T1 seen at D2 and `INR_3` the power of T2 seen at D3. All rates are in
//! bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_slice, Execution};

/// Absolute tolerance for rate comparisons.
pub const RATE_TOL: f64 = 1e-9;
/// Claimed gap between the outer bound and the achievable sum, in bits.
pub const GAP_BITS: f64 = 4.0;
/// Tolerance on the gap test.
pub const GAP_TOL: f64 = 1e-6;

fn lg(x: f64) -> f64 {
    x.log2()
}

fn l1(x: f64) -> f64 {
    (1.0 + x).log2()
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZChainGauss {
    pub snr1: f64,
    pub snr2: f64,
    pub snr3: f64,
    pub inr2: f64,
    pub inr3: f64,
}

/// Which transcription of the achievable formulas to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulas {
    /// Printed formulas with the documented repairs.
    #[default]
    Corrected,
    /// Formulas exactly as printed.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GaussCase {
    A1,
    A2,
    B1,
    B2,
    C,
    D1,
    D2,
    D3,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
}

impl GaussCase {
    pub fn label(self) -> &'static str {
        use GaussCase::*;
        match self {
            A1 => "A.1",
            A2 => "A.2",
            B1 => "B.1",
            B2 => "B.2",
            C => "C",
            D1 => "D.1",
            D2 => "D.2",
            D3 => "D.3",
            E => "E",
            F => "F",
            G => "G",
            H => "H",
            I => "I",
            J => "J",
            K => "K",
        }
    }
}

impl fmt::Display for GaussCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Triple-sum constraint of regimes 2 and 4. `Weak` applies when
/// `(1 + INR2) * INR3 <= SNR2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleBound {
    Weak,
    Strong,
}

impl fmt::Display for TripleBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TripleBound::Weak => "weak",
            TripleBound::Strong => "strong",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussOuter {
    pub sum: f64,
    pub regime: u8,
    /// Which triple-sum constraint is in force, if any.
    pub triple: Option<TripleBound>,
    /// Right-hand sides: R1, R2, R3, R1+R2, R2+R3 and the optional triple sum.
    pub rows: [f64; 5],
    pub triple_rhs: Option<f64>,
}

/// Where the rate of user 2 came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum R2Source {
    Formula,
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussAchievable {
    pub rates: [f64; 3],
    pub case: GaussCase,
    pub source: R2Source,
    pub sum: f64,
    pub outer: GaussOuter,
    pub gap: f64,
}

impl GaussAchievable {
    pub fn gap_ok(&self) -> bool {
        self.gap >= -GAP_TOL && self.gap <= GAP_BITS + GAP_TOL
    }
}

impl ZChainGauss {
    pub fn new(snr1: f64, snr2: f64, snr3: f64, inr2: f64, inr3: f64) -> Result<Self> {
        let z = ZChainGauss { snr1, snr2, snr3, inr2, inr3 };
        if z.gains().iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::Malformed(format!("gains must be finite and nonnegative: {:?}", z.gains())));
        }
        Ok(z)
    }

    /// Gains in the order SNR1, SNR2, SNR3, INR2, INR3.
    pub fn from_gains(g: &[f64]) -> Result<Self> {
        match g {
            &[a, b, c, d, e] => ZChainGauss::new(a, b, c, d, e),
            _ => Err(Error::Malformed(format!("expected 5 gains SNR1,SNR2,SNR3,INR2,INR3, got {}", g.len()))),
        }
    }

    /// Same order as [`ZChainGauss::from_gains`], in dB.
    pub fn from_db(g: &[f64]) -> Result<Self> {
        let lin: Vec<f64> = g.iter().map(|x| 10f64.powf(x / 10.0)).collect();
        ZChainGauss::from_gains(&lin)
    }

    pub fn gains(&self) -> [f64; 5] {
        [self.snr1, self.snr2, self.snr3, self.inr2, self.inr3]
    }

    pub fn regime(&self) -> u8 {
        match (self.inr2 >= self.snr1, self.inr3 >= self.snr2) {
            (true, true) => 1,
            (true, false) => 2,
            (false, true) => 3,
            (false, false) => 4,
        }
    }

    pub fn outer(&self) -> GaussOuter {
        let ZChainGauss { snr1, snr2, snr3, inr2, inr3 } = *self;
        let regime = self.regime();
        let weak_first = (inr2 + 1.0) * inr3 <= snr2;
        let r12 = if regime <= 2 { l1(snr2 + inr2) } else { l1(snr1) + l1(snr2 / (1.0 + inr2)) };
        let r23 = if regime % 2 == 1 { l1(snr3 + inr3) } else { l1(snr2) + l1(snr3 / (1.0 + inr3)) };
        let (triple, triple_rhs) = match (regime, weak_first) {
            (2, true) => (Some(TripleBound::Weak), Some(l1(snr3 / (1.0 + inr3)) + l1(inr2 + snr2))),
            (2, false) => (Some(TripleBound::Strong), Some(l1(inr3 + snr3) + l1(inr2))),
            (4, true) => (Some(TripleBound::Weak), Some(l1(snr1) + l1(snr2 / (1.0 + inr2)) + l1(snr3 / (1.0 + inr3)))),
            (4, false) => (Some(TripleBound::Strong), Some(l1(snr1) + l1(inr3 + snr3))),
            _ => (None, None),
        };
        let rows = [l1(snr1), l1(snr2), l1(snr3), r12, r23];
        GaussOuter { sum: region_sum(&rows, triple_rhs), regime, triple, rows, triple_rhs }
    }

    /// Case of the achievable strategy; boundary ties go to the earlier case.
    pub fn case(&self) -> GaussCase {
        use GaussCase::*;
        let ZChainGauss { snr1, snr2, snr3, inr2, inr3 } = *self;
        if inr2 <= snr1 {
            return if inr3 <= snr2 / (1.0 + inr2) { A1 } else { A2 };
        }
        if snr1 <= inr2 / (1.0 + snr2) {
            return if inr3 <= snr2 { B1 } else { B2 };
        }
        let first_load = snr1 * (1.0 + snr2 / (1.0 + inr3));
        let weak_first = (inr2 + 1.0) * inr3 <= snr2;
        if snr2 <= inr2 {
            if inr3 <= snr3 {
                return C;
            }
            return if inr3 >= snr2 {
                D1
            } else if first_load <= inr2 {
                D2
            } else {
                D3
            };
        }
        if inr3 <= snr3 {
            return if weak_first {
                E
            } else if first_load >= inr2 {
                F
            } else {
                G
            };
        }
        if weak_first {
            H
        } else if first_load >= inr2 {
            I
        } else if inr3 <= snr2 {
            J
        } else {
            K
        }
    }

    /// Rate of user 3 common to every case.
    pub fn r3(&self) -> f64 {
        l1(self.snr3 * (1.0 + self.inr3) / (1.0 + 2.0 * self.inr3))
    }

    /// Sum rate of the lower Z network (users 2 and 3) with effective direct
    /// SNR `snr2e`, as used by cases A and B.
    fn lower_z(&self, snr2e: f64, formulas: Formulas) -> (f64, bool) {
        let ZChainGauss { snr3, inr3, .. } = *self;
        if inr3 <= snr2e {
            (l1(snr2e) + l1(snr3 / (1.0 + inr3)) - 2.0, true)
        } else {
            let printed = l1(snr3 * inr3) - 2.0;
            match formulas {
                Formulas::Printed => (printed, false),
                Formulas::Corrected => ((l1(snr2e) + l1(snr3)).min(l1(snr3 + inr3)) - 2.0, false),
            }
        }
    }

    fn r2(&self, case: GaussCase, formulas: Formulas) -> f64 {
        use GaussCase::*;
        let ZChainGauss { snr1, snr2, snr3, inr2, inr3 } = *self;
        let r1 = l1(snr1);
        let r3 = self.r3();
        let cross = match formulas {
            Formulas::Printed => inr2,
            Formulas::Corrected => inr3,
        };
        let common = l1(cross * cross / (1.0 + 2.0 * inr3 + snr3 * (1.0 + inr3)));
        let r2 = match case {
            A1 | A2 => self.lower_z(snr2 / (1.0 + inr2), formulas).0 - r3,
            B1 | B2 => self.lower_z(snr2, formulas).0 - r3,
            C => (l1(inr2) - r1).min(l1(snr2 / (1.0 + inr3))),
            D1 => (l1(snr2 + inr2) - r1).min(l1(inr3 / (1.0 + snr3))),
            D2 => l1(snr2 / (1.0 + inr3)),
            D3 => pos(lg(inr2 / snr1)),
            E => l1(inr2 + snr2) - l1(inr3) - r1,
            F => {
                if inr3 >= snr2 {
                    0.0
                } else {
                    lg(inr2 / snr1)
                }
            }
            G => l1(snr2 / (1.0 + inr3)),
            H => common + l1(snr2 / (1.0 + inr3)) - r1,
            I => {
                let printed = pos(l1(snr2 / (1.0 + inr3)).min(common) - 1.0) + pos(lg(inr2 / snr1) - 1.0);
                match formulas {
                    Formulas::Printed => printed,
                    // D2 decodes all three codewords, so the MAC sum bound applies.
                    Formulas::Corrected => printed.min(l1(inr2 + snr2) - r1),
                }
            }
            J => pos((l1(inr3) - r1).min(common) - 1.0) + l1(snr2 / (1.0 + inr3)),
            K => l1(snr2.min(inr2 / (1.0 + snr2)).min((snr2 + inr2 - snr1) / (1.0 + snr1))),
        };
        pos(r2)
    }

    /// Best user-2 rate of an explicit superposition scheme, with users 1
    /// and 3 held at their fixed rates.
    ///
    /// T2 splits its unit power into a common part, decoded at D3 before its
    /// own message, and a private part D3 treats as noise. D2 either decodes
    /// all three codewords jointly or treats T1 as noise. The private power
    /// never exceeds `1/(1+INR_3)`, which keeps the fixed rate of user 3
    /// decodable.
    pub fn superposition_r2(&self) -> f64 {
        let ZChainGauss { snr1, snr2, snr3, inr2, inr3 } = *self;
        let r1 = l1(snr1);
        let r3 = self.r3();
        let cap = 1.0 / (1.0 + inr3);
        let mut best = 0.0f64;
        for step in 0..=16 {
            let pp = cap * step as f64 / 16.0;
            let pc = 1.0 - pp;
            let n3 = 1.0 + inr3 * pp;
            if r3 > l1(snr3 / n3) + RATE_TOL {
                continue;
            }
            let rc_d3 = l1(inr3 * pc / n3).min(l1((inr3 * pc + snr3) / n3) - r3);
            // D2 treats T1 as noise.
            let n2 = 1.0 + inr2;
            let tin = (rc_d3.min(l1(snr2 * pc / n2)).max(0.0) + l1(snr2 * pp / n2)).min(l1(snr2 / n2));
            best = best.max(tin);
            // D2 decodes T1 as well.
            if r1 <= l1(inr2) + RATE_TOL {
                let rc = rc_d3.min(l1(snr2 * pc)).min(l1(inr2 + snr2 * pc) - r1).max(0.0);
                let rp = l1(snr2 * pp).min(l1(inr2 + snr2 * pp) - r1).max(0.0);
                let joint = (rc + rp).min(l1(snr2)).min(l1(inr2 + snr2) - r1);
                best = best.max(joint);
            }
        }
        best.max(0.0)
    }

    pub fn achievable(&self, formulas: Formulas) -> GaussAchievable {
        let case = self.case();
        let formula = self.r2(case, formulas);
        let (r2, source) = match formulas {
            Formulas::Printed => (formula, R2Source::Formula),
            Formulas::Corrected => {
                let scheme = self.superposition_r2();
                if scheme > formula {
                    (scheme, R2Source::Superposition)
                } else {
                    (formula, R2Source::Formula)
                }
            }
        };
        let rates = [l1(self.snr1), r2, self.r3()];
        let sum = rates.iter().sum::<f64>();
        let outer = self.outer();
        GaussAchievable { rates, case, source, sum, gap: outer.sum - sum, outer }
    }
}

/// Maximum of `R1+R2+R3` over `R >= 0`, `R_i <= c_i`, `R1+R2 <= a`,
/// `R2+R3 <= b` and an optional `R1+R2+R3 <= t`. The constraint matrix has
/// consecutive ones, so the optimum equals the cheapest cover of the three
/// coordinates by constraint rows.
fn region_sum(rows: &[f64; 5], triple: Option<f64>) -> f64 {
    let [c1, c2, c3, a, b] = *rows;
    let cover = (c1 + c2 + c3).min(a + c3).min(c1 + b).min(a + b);
    triple.map_or(cover, |t| cover.min(t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussInstance {
    pub gains_db: [f64; 5],
    pub regime: u8,
    pub case: GaussCase,
    pub achievable_sum: f64,
    pub outer_sum: f64,
    pub gap: f64,
}

impl GaussInstance {
    pub fn gap_ok(&self) -> bool {
        self.gap >= -GAP_TOL && self.gap <= GAP_BITS + GAP_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussSweep {
    pub formulas: Formulas,
    pub instances: Vec<GaussInstance>,
}

impl GaussSweep {
    pub fn violating(&self) -> impl Iterator<Item = &GaussInstance> {
        self.instances.iter().filter(|i| !i.gap_ok())
    }

    pub fn max_gap(&self) -> f64 {
        self.instances.iter().map(|i| i.gap).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_gap(&self) -> f64 {
        self.instances.iter().map(|i| i.gap).fold(f64::INFINITY, f64::min)
    }
}

/// The default dB grid `{0, 10, ..., 60}`.
pub fn default_grid() -> Vec<f64> {
    (0..=6).map(|i| 10.0 * i as f64).collect()
}

/// Every point of `grid^5` (dB values for SNR1, SNR2, SNR3, INR2, INR3).
pub fn sweep(grid_db: &[f64], formulas: Formulas, exec: Execution) -> Result<GaussSweep> {
    if grid_db.is_empty() {
        return Err(Error::Malformed("empty dB grid".into()));
    }
    let g = grid_db.len();
    let points: Vec<[f64; 5]> = (0..g.pow(5))
        .map(|mut i| {
            let mut v = [0.0; 5];
            for slot in v.iter_mut().rev() {
                *slot = grid_db[i % g];
                i /= g;
            }
            v
        })
        .collect();
    let instances = map_slice(exec, &points, |p| -> Result<GaussInstance> {
        let z = ZChainGauss::from_db(p)?;
        let a = z.achievable(formulas);
        Ok(GaussInstance {
            gains_db: *p,
            regime: a.outer.regime,
            case: a.case,
            achievable_sum: a.sum,
            outer_sum: a.outer.sum,
            gap: a.gap,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(GaussSweep { formulas, instances })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Vertex enumeration over every triple of tight constraints.
    fn vertex_max(rows: &[f64; 5], triple: Option<f64>) -> f64 {
        let mut cons: Vec<([f64; 3], f64)> = vec![
            ([1.0, 0.0, 0.0], rows[0]),
            ([0.0, 1.0, 0.0], rows[1]),
            ([0.0, 0.0, 1.0], rows[2]),
            ([1.0, 1.0, 0.0], rows[3]),
            ([0.0, 1.0, 1.0], rows[4]),
            ([-1.0, 0.0, 0.0], 0.0),
            ([0.0, -1.0, 0.0], 0.0),
            ([0.0, 0.0, -1.0], 0.0),
        ];
        if let Some(t) = triple {
            cons.push(([1.0, 1.0, 1.0], t));
        }
        let det = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let mut best = f64::NEG_INFINITY;
        let n = cons.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let m = [cons[i].0, cons[j].0, cons[k].0];
                    let d = det(m);
                    if d.abs() < 1e-12 {
                        continue;
                    }
                    let rhs = [cons[i].1, cons[j].1, cons[k].1];
                    let x: Vec<f64> = (0..3)
                        .map(|c| {
                            let mut mc = m;
                            for r in 0..3 {
                                mc[r][c] = rhs[r];
                            }
                            det(mc) / d
                        })
                        .collect();
                    let feasible = cons.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] + a[2] * x[2] <= b + 1e-9);
                    if feasible {
                        best = best.max(x.iter().sum());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn outer_examples() {
        let z = ZChainGauss::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let o = z.outer();
        assert_eq!(o.regime, 1);
        assert!((o.sum - (1.0 + 3f64.log2())).abs() < RATE_TOL);
        let z = ZChainGauss::new(3.0, 7.0, 15.0, 0.0, 0.0).unwrap();
        assert!((z.outer().sum - 9.0).abs() < RATE_TOL);
        let z = ZChainGauss::new(100.0, 10.0, 100.0, 10.0, 5.0).unwrap();
        let o = z.outer();
        assert_eq!((o.regime, o.triple), (4, Some(TripleBound::Strong)));
        assert!(o.sum <= 101f64.log2() + 106f64.log2() + RATE_TOL);
    }

    #[test]
    fn outer_matches_vertex_enumeration() {
        let grid = [0.0, 5.0, 20.0, 40.0];
        for a in grid {
            for b in grid {
                for c in grid {
                    for d in grid {
                        for e in grid {
                            let o = ZChainGauss::from_db(&[a, b, c, d, e]).unwrap().outer();
                            let v = vertex_max(&o.rows, o.triple_rhs);
                            assert!((o.sum - v).abs() < 1e-7, "{:?}: {} vs {}", [a, b, c, d, e], o.sum, v);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interference_free_has_zero_gap() {
        let z = ZChainGauss::new(10.0, 20.0, 30.0, 0.0, 0.0).unwrap();
        let a = z.achievable(Formulas::Corrected);
        assert!(a.gap.abs() < RATE_TOL, "{a:?}");
    }

    #[test]
    fn corrected_sweep_meets_gap() {
        let s = sweep(&default_grid(), Formulas::Corrected, Execution::Parallel).unwrap();
        assert_eq!(s.instances.len(), 16807);
        assert_eq!(s.violating().count(), 0, "max {} min {}", s.max_gap(), s.min_gap());
        let cases: std::collections::BTreeSet<GaussCase> = s.instances.iter().map(|i| i.case).collect();
        assert_eq!(cases.len(), 15);
    }

    #[test]
    fn printed_sweep_has_violations() {
        let s = sweep(&default_grid(), Formulas::Printed, Execution::Parallel).unwrap();
        let bad: std::collections::BTreeSet<GaussCase> = s.violating().map(|i| i.case).collect();
        use GaussCase::*;
        assert_eq!(bad, [A2, B2, D2, H, I, J, K].into_iter().collect());
        assert_eq!(s.violating().count(), 9178);
    }

    #[test]
    fn superposition_scheme_stays_below_outer() {
        let s = sweep(&default_grid(), Formulas::Corrected, Execution::Parallel).unwrap();
        for inst in &s.instances {
            let z = ZChainGauss::from_db(&inst.gains_db).unwrap();
            let sum = l1(z.snr1) + z.superposition_r2() + z.r3();
            assert!(sum <= z.outer().sum + RATE_TOL, "{:?}", inst.gains_db);
        }
    }
}

//! SINR-constrained spectrum sharing between primary and secondary links.
//!
//! `N` primary links always transmit. A binary activation vector over the `M`
//! secondary links chooses which of them share the channel. Every receiver
//! sees interference from all active transmitters except its own, plus noise.
//! An activation is feasible when every primary SINR and every active
//! secondary SINR meets the common floor. The objective is the sum of Shannon
//! capacities of the active secondary links and all primary links.

mod activation;
mod exhaustive;
mod file;
mod generator;

pub use activation::ActivationVector;
pub use exhaustive::{brute_force_optimum, MAX_EXHAUSTIVE_LINKS};
pub use file::{InstanceFile, LinkSpec};
pub use generator::InstanceGenerator;

use serde::{Deserialize, Serialize};

use crate::channel::{NodePosition, NoiseModel, PathLossModel};
use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link<T> {
    pub tx: NodePosition<T>,
    pub rx: NodePosition<T>,
}

impl<T: Real> Link<T> {
    pub fn new(tx: NodePosition<T>, rx: NodePosition<T>) -> Self {
        Self { tx, rx }
    }

    pub fn length(&self) -> T {
        self.tx.distance_to(&self.rx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharingInstance<T> {
    pub primary_links: Vec<Link<T>>,
    pub secondary_links: Vec<Link<T>>,
    /// Common transmit power of every transmitter, watts.
    pub transmit_power: T,
    pub path_loss: PathLossModel<T>,
    pub noise: NoiseModel<T>,
    /// Linear SINR floor applied to primary and active secondary receivers.
    pub sinr_floor: T,
    pub bandwidth: T,
}

impl<T: Real> SharingInstance<T> {
    pub fn validate(&self) -> Result<()> {
        self.path_loss.validate()?;
        if !(self.transmit_power >= T::zero()) {
            return Err(Error::domain(
                "transmit power",
                ">= 0",
                self.transmit_power.to_f64_lossy(),
            ));
        }
        if !(self.noise.noise_power > T::zero()) {
            return Err(Error::domain(
                "noise power",
                "> 0",
                self.noise.noise_power.to_f64_lossy(),
            ));
        }
        if !(self.sinr_floor >= T::zero()) {
            return Err(Error::domain(
                "SINR floor",
                ">= 0",
                self.sinr_floor.to_f64_lossy(),
            ));
        }
        if !(self.bandwidth > T::zero()) {
            return Err(Error::domain(
                "bandwidth",
                "> 0",
                self.bandwidth.to_f64_lossy(),
            ));
        }
        let finite = |p: &NodePosition<T>| p.x.is_finite() && p.y.is_finite();
        if !self
            .primary_links
            .iter()
            .chain(&self.secondary_links)
            .all(|l| finite(&l.tx) && finite(&l.rx))
        {
            return Err(Error::Config(
                "link endpoint coordinates must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn primary_count(&self) -> usize {
        self.primary_links.len()
    }

    pub fn secondary_count(&self) -> usize {
        self.secondary_links.len()
    }

    /// The same instance restricted to the first `count` secondary links.
    pub fn with_secondary_prefix(&self, count: usize) -> Self {
        let mut inst = self.clone();
        inst.secondary_links.truncate(count);
        inst
    }

    pub fn with_sinr_floor(&self, sinr_floor: T) -> Self {
        Self {
            sinr_floor,
            ..self.clone()
        }
    }

    /// Received powers for every transmitter/receiver pair, computed once.
    pub fn gains(&self) -> GainTable<T> {
        GainTable::new(self)
    }

    fn check_len(&self, activation: &ActivationVector) -> Result<()> {
        if activation.len() != self.secondary_count() {
            return Err(Error::LengthMismatch {
                expected: self.secondary_count(),
                got: activation.len(),
            });
        }
        Ok(())
    }
}

/// Precomputed received powers `W * gain(d)` for an instance.
///
/// Row-major matrices are indexed `[transmitter][receiver]`.
#[derive(Debug, Clone)]
pub struct GainTable<T> {
    n: usize,
    m: usize,
    noise: T,
    floor: T,
    bandwidth: T,
    /// primary tx i -> primary rx i
    primary_own: Vec<T>,
    /// secondary tx j -> secondary rx j
    secondary_own: Vec<T>,
    /// secondary tx l -> secondary rx j, `m * m`
    sec_to_sec: Vec<T>,
    /// primary tx i -> secondary rx j, `n * m`
    pri_to_sec: Vec<T>,
    /// secondary tx l -> primary rx i, `m * n`
    sec_to_pri: Vec<T>,
}

/// SINRs, objective and violation count for one activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub objective: T,
    pub violations: usize,
    pub report: SinrReport<T>,
}

impl<T: Real> GainTable<T> {
    pub fn new(inst: &SharingInstance<T>) -> Self {
        let w = inst.transmit_power;
        let pl = &inst.path_loss;
        let rx_power = |a: &NodePosition<T>, b: &NodePosition<T>| w * pl.gain(a.distance_to(b));
        let (p, s) = (&inst.primary_links, &inst.secondary_links);
        let mut sec_to_sec = Vec::with_capacity(s.len() * s.len());
        for l in s {
            for j in s {
                sec_to_sec.push(rx_power(&l.tx, &j.rx));
            }
        }
        let mut pri_to_sec = Vec::with_capacity(p.len() * s.len());
        for i in p {
            for j in s {
                pri_to_sec.push(rx_power(&i.tx, &j.rx));
            }
        }
        let mut sec_to_pri = Vec::with_capacity(s.len() * p.len());
        for l in s {
            for i in p {
                sec_to_pri.push(rx_power(&l.tx, &i.rx));
            }
        }
        Self {
            n: p.len(),
            m: s.len(),
            noise: inst.noise.noise_power,
            floor: inst.sinr_floor,
            bandwidth: inst.bandwidth,
            primary_own: p.iter().map(|l| rx_power(&l.tx, &l.rx)).collect(),
            secondary_own: s.iter().map(|l| rx_power(&l.tx, &l.rx)).collect(),
            sec_to_sec,
            pri_to_sec,
            sec_to_pri,
        }
    }

    pub fn primary_count(&self) -> usize {
        self.n
    }

    pub fn secondary_count(&self) -> usize {
        self.m
    }

    pub fn sinr_floor(&self) -> T {
        self.floor
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    /// SINR of secondary receiver `j`, assuming it is active. Only the bits of
    /// the other links are consulted.
    pub fn secondary_sinr_unchecked(&self, bits: &[bool], j: usize) -> T {
        let mut interference = self.noise;
        for (l, &on) in bits.iter().enumerate() {
            if on && l != j {
                interference = interference + self.sec_to_sec[l * self.m + j];
            }
        }
        for i in 0..self.n {
            interference = interference + self.pri_to_sec[i * self.m + j];
        }
        self.secondary_own[j] / interference
    }

    pub fn primary_sinr_unchecked(&self, bits: &[bool], i: usize) -> T {
        let mut interference = self.noise;
        for (l, &on) in bits.iter().enumerate() {
            if on {
                interference = interference + self.sec_to_pri[l * self.n + i];
            }
        }
        self.primary_own[i] / interference
    }

    /// Capacity of every link if it were alone on the channel. Since
    /// interference only lowers SINR, the sum bounds any objective.
    pub fn interference_free_bound(&self) -> T {
        self.primary_own
            .iter()
            .chain(&self.secondary_own)
            .map(|&p| link_capacity(self.bandwidth, p / self.noise))
            .sum()
    }

    pub fn evaluate(&self, activation: &ActivationVector) -> Evaluation<T> {
        let bits = activation.as_slice();
        debug_assert_eq!(bits.len(), self.m);
        let mut objective = T::zero();
        let mut violations = 0;
        let mut secondary = Vec::with_capacity(self.m);
        for (j, &on) in bits.iter().enumerate() {
            if on {
                let g = self.secondary_sinr_unchecked(bits, j);
                objective = objective + link_capacity(self.bandwidth, g);
                if !(g >= self.floor) {
                    violations += 1;
                }
                secondary.push(Some(g));
            } else {
                secondary.push(None);
            }
        }
        let mut primary = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let g = self.primary_sinr_unchecked(bits, i);
            objective = objective + link_capacity(self.bandwidth, g);
            if !(g >= self.floor) {
                violations += 1;
            }
            primary.push(g);
        }
        Evaluation {
            objective,
            violations,
            report: SinrReport {
                secondary_sinr: secondary,
                primary_sinr: primary,
            },
        }
    }

    /// Objective and violation count without building a report.
    pub fn score(&self, bits: &[bool]) -> (T, usize) {
        let mut objective = T::zero();
        let mut violations = 0;
        for (j, &on) in bits.iter().enumerate() {
            if on {
                let g = self.secondary_sinr_unchecked(bits, j);
                objective = objective + link_capacity(self.bandwidth, g);
                violations += usize::from(!(g >= self.floor));
            }
        }
        for i in 0..self.n {
            let g = self.primary_sinr_unchecked(bits, i);
            objective = objective + link_capacity(self.bandwidth, g);
            violations += usize::from(!(g >= self.floor));
        }
        (objective, violations)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrReport<T> {
    /// `Some(γ_j)` for active secondary links, `None` for silent ones.
    pub secondary_sinr: Vec<Option<T>>,
    pub primary_sinr: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharingSolution<T> {
    pub activation: ActivationVector,
    /// Sum capacity in bits/s under this activation.
    pub objective: T,
    pub feasible: bool,
    pub violations: usize,
    pub report: SinrReport<T>,
}

impl<T: Real> SharingSolution<T> {
    pub fn from_activation(table: &GainTable<T>, activation: ActivationVector) -> Self {
        let eval = table.evaluate(&activation);
        Self {
            activation,
            objective: eval.objective,
            feasible: eval.violations == 0,
            violations: eval.violations,
            report: eval.report,
        }
    }
}

/// SINR of active secondary link `j` (0-based).
pub fn secondary_sinr<T: Real>(
    instance: &SharingInstance<T>,
    activation: &ActivationVector,
    j: usize,
) -> Result<T> {
    instance.check_len(activation)?;
    if j >= instance.secondary_count() {
        return Err(Error::IndexOutOfRange {
            what: "secondary link",
            index: j,
            count: instance.secondary_count(),
        });
    }
    if !activation.is_active(j) {
        return Err(Error::InactiveLink { index: j });
    }
    Ok(instance
        .gains()
        .secondary_sinr_unchecked(activation.as_slice(), j))
}

/// SINR of primary link `i` (0-based).
pub fn primary_sinr<T: Real>(
    instance: &SharingInstance<T>,
    activation: &ActivationVector,
    i: usize,
) -> Result<T> {
    instance.check_len(activation)?;
    if i >= instance.primary_count() {
        return Err(Error::IndexOutOfRange {
            what: "primary link",
            index: i,
            count: instance.primary_count(),
        });
    }
    Ok(instance
        .gains()
        .primary_sinr_unchecked(activation.as_slice(), i))
}

pub fn sinr_report<T: Real>(
    instance: &SharingInstance<T>,
    activation: &ActivationVector,
) -> Result<SinrReport<T>> {
    instance.check_len(activation)?;
    Ok(instance.gains().evaluate(activation).report)
}

/// Number of violated floor constraints (primary and active secondary).
pub fn violation_count<T: Real>(
    instance: &SharingInstance<T>,
    activation: &ActivationVector,
) -> Result<usize> {
    instance.check_len(activation)?;
    Ok(instance.gains().score(activation.as_slice()).1)
}

pub fn is_feasible<T: Real>(
    instance: &SharingInstance<T>,
    activation: &ActivationVector,
) -> Result<bool> {
    Ok(violation_count(instance, activation)? == 0)
}

/// Shannon capacity `BW log2(1 + γ)` in bits/s.
#[inline]
pub fn link_capacity<T: Real>(bandwidth: T, sinr: T) -> T {
    bandwidth * (T::one() + sinr).log2()
}

/// Sum capacity of active secondary links plus all primary links, evaluated
/// regardless of feasibility.
pub fn objective<T: Real>(
    instance: &SharingInstance<T>,
    activation: &ActivationVector,
) -> Result<T> {
    instance.check_len(activation)?;
    Ok(instance.gains().score(activation.as_slice()).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> NodePosition<f64> {
        NodePosition::new(x, y)
    }

    pub(crate) fn base_instance(
        primary: Vec<Link<f64>>,
        secondary: Vec<Link<f64>>,
        noise: f64,
        floor: f64,
    ) -> SharingInstance<f64> {
        SharingInstance {
            primary_links: primary,
            secondary_links: secondary,
            transmit_power: 1.0,
            path_loss: PathLossModel::default(),
            noise: NoiseModel::new(noise).unwrap(),
            sinr_floor: floor,
            bandwidth: 1.0,
        }
    }

    #[test]
    fn secondary_sinr_reduces_to_snr_without_interference() {
        let inst = base_instance(vec![], vec![Link::new(p(0.0, 0.0), p(3.0, 0.0))], 0.01, 0.0);
        let act = ActivationVector::from_bits(vec![true]);
        let expected = crate::channel::snr_of(1.0, 1.0 / 9.0, &inst.noise);
        assert_relative_eq!(
            secondary_sinr(&inst, &act, 0).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn secondary_sinr_with_one_primary() {
        // sld = 1, psd = 2, N_o = 0.05 -> 1 / (0.25 + 0.05)
        let inst = base_instance(
            vec![Link::new(p(2.0, 0.0), p(100.0, 0.0))],
            vec![Link::new(p(-1.0, 0.0), p(0.0, 0.0))],
            0.05,
            0.0,
        );
        let act = ActivationVector::from_bits(vec![true]);
        assert_relative_eq!(
            secondary_sinr(&inst, &act, 0).unwrap(),
            1.0 / 0.3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            secondary_sinr(&inst, &act, 0).unwrap(),
            3.3333,
            epsilon = 1e-4
        );
    }

    #[test]
    fn power_cancels_when_interference_limited() {
        let mut inst = base_instance(
            vec![Link::new(p(2.0, 0.0), p(100.0, 0.0))],
            vec![
                Link::new(p(-1.0, 0.0), p(0.0, 0.0)),
                Link::new(p(0.0, 5.0), p(0.0, 9.0)),
            ],
            1e-15,
            0.0,
        );
        let act = ActivationVector::from_bits(vec![true, true]);
        let a = secondary_sinr(&inst, &act, 0).unwrap();
        inst.transmit_power = 2.0;
        let b = secondary_sinr(&inst, &act, 0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn inactive_and_out_of_range_queries_fail() {
        let inst = base_instance(vec![], vec![Link::new(p(0.0, 0.0), p(1.0, 0.0))], 0.1, 0.0);
        let off = ActivationVector::zeros(1);
        assert_eq!(
            secondary_sinr(&inst, &off, 0),
            Err(Error::InactiveLink { index: 0 })
        );
        assert!(matches!(
            secondary_sinr(&inst, &off, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            primary_sinr(&inst, &off, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            objective(&inst, &ActivationVector::zeros(2)),
            Err(Error::LengthMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn primary_sinr_examples() {
        let inst = base_instance(
            vec![Link::new(p(-1.0, 0.0), p(0.0, 0.0))],
            vec![Link::new(p(2.0, 0.0), p(50.0, 0.0))],
            0.05,
            0.0,
        );
        let off = ActivationVector::zeros(1);
        assert_relative_eq!(
            primary_sinr(&inst, &off, 0).unwrap(),
            1.0 / 0.05,
            max_relative = 1e-12
        );
        let on = ActivationVector::from_bits(vec![true]);
        assert_relative_eq!(
            primary_sinr(&inst, &on, 0).unwrap(),
            1.0 / 0.3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(link_capacity(1.0, 1.0), 1.0);
        assert_eq!(link_capacity(1e6, 3.0), 2e6);
        assert_eq!(link_capacity(1.0, 0.0), 0.0);
        assert_eq!(link_capacity(1.0f32, 3.0f32), 2.0f32);
    }

    #[test]
    fn floor_zero_always_feasible() {
        let inst = base_instance(
            vec![Link::new(p(0.0, 0.0), p(500.0, 0.0))],
            vec![
                Link::new(p(1.0, 0.0), p(499.0, 0.0)),
                Link::new(p(2.0, 0.0), p(498.0, 0.0)),
            ],
            1.0,
            0.0,
        );
        for mask in 0..4u64 {
            assert!(is_feasible(&inst, &ActivationVector::from_mask(mask, 2)).unwrap());
        }
    }

    #[test]
    fn zero_activation_objective_is_primary_sum() {
        let inst = base_instance(
            vec![
                Link::new(p(0.0, 0.0), p(2.0, 0.0)),
                Link::new(p(100.0, 0.0), p(101.0, 0.0)),
            ],
            vec![Link::new(p(50.0, 0.0), p(51.0, 0.0))],
            0.1,
            0.0,
        );
        let expected = (1.0f64 + 0.25 / 0.1).log2() + (1.0f64 + 1.0 / 0.1).log2();
        let got = objective(&inst, &ActivationVector::zeros(1)).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert!(is_feasible(&inst, &ActivationVector::zeros(1)).unwrap());
    }

    /// Straight-line recomputation from raw coordinates.
    fn spreadsheet_objective(inst: &SharingInstance<f64>, bits: &[bool]) -> (f64, bool) {
        let m = inst.path_loss.exponent;
        let w = inst.transmit_power;
        let n0 = inst.noise.noise_power;
        let d = |a: &NodePosition<f64>, b: &NodePosition<f64>| {
            ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt().max(1.0)
        };
        let mut total = 0.0;
        let mut ok = true;
        for (j, sj) in inst.secondary_links.iter().enumerate() {
            if !bits[j] {
                continue;
            }
            let mut den = n0;
            for (l, sl) in inst.secondary_links.iter().enumerate() {
                if l != j && bits[l] {
                    den += w / d(&sl.tx, &sj.rx).powf(m);
                }
            }
            for pi in &inst.primary_links {
                den += w / d(&pi.tx, &sj.rx).powf(m);
            }
            let g = (w / d(&sj.tx, &sj.rx).powf(m)) / den;
            ok &= g >= inst.sinr_floor;
            total += inst.bandwidth * (1.0 + g).log2();
        }
        for pi in &inst.primary_links {
            let mut den = n0;
            for (l, sl) in inst.secondary_links.iter().enumerate() {
                if bits[l] {
                    den += w / d(&sl.tx, &pi.rx).powf(m);
                }
            }
            let g = (w / d(&pi.tx, &pi.rx).powf(m)) / den;
            ok &= g >= inst.sinr_floor;
            total += inst.bandwidth * (1.0 + g).log2();
        }
        (total, ok)
    }

    #[test]
    fn objective_matches_spreadsheet_for_two_secondaries() {
        let mut inst = base_instance(
            vec![Link::new(p(0.0, 0.0), p(30.0, 0.0))],
            vec![
                Link::new(p(10.0, 20.0), p(15.0, 22.0)),
                Link::new(p(40.0, 5.0), p(44.0, 1.0)),
            ],
            0.01,
            db(6.0),
        );
        inst.bandwidth = 1e5;
        for mask in 0..4u64 {
            let act = ActivationVector::from_mask(mask, 2);
            let (want, feasible) = spreadsheet_objective(&inst, act.as_slice());
            assert_relative_eq!(objective(&inst, &act).unwrap(), want, max_relative = 1e-12);
            assert_eq!(is_feasible(&inst, &act).unwrap(), feasible);
        }
    }

    fn db(x: f64) -> f64 {
        crate::channel::db_to_linear(x)
    }

    #[test]
    fn superset_activation_can_reduce_objective() {
        // Two links whose receivers sit on top of each other's transmitters.
        let inst = base_instance(
            vec![],
            vec![
                Link::new(p(0.0, 0.0), p(10.0, 0.0)),
                Link::new(p(10.5, 0.0), p(0.5, 0.0)),
            ],
            1e-3,
            0.0,
        );
        let one = objective(&inst, &ActivationVector::from_bits(vec![true, false])).unwrap();
        let both = objective(&inst, &ActivationVector::from_bits(vec![true, true])).unwrap();
        assert!(both < one, "both={both} one={one}");
    }

    #[test]
    fn three_link_feasibility_matches_enumeration() {
        let inst = base_instance(
            vec![Link::new(p(0.0, 0.0), p(20.0, 0.0))],
            vec![
                Link::new(p(30.0, 5.0), p(35.0, 5.0)),
                Link::new(p(25.0, -3.0), p(26.0, 4.0)),
                Link::new(p(80.0, 80.0), p(84.0, 83.0)),
            ],
            1e-4,
            db(8.0),
        );
        let mut seen = [false; 2];
        for mask in 0..8u64 {
            let act = ActivationVector::from_mask(mask, 3);
            let (_, ok) = spreadsheet_objective(&inst, act.as_slice());
            assert_eq!(is_feasible(&inst, &act).unwrap(), ok, "mask {mask:03b}");
            seen[usize::from(ok)] = true;
        }
        assert!(
            seen[0] && seen[1],
            "instance should mix feasible and infeasible vectors"
        );
    }

    fn arb_instance() -> impl Strategy<Value = SharingInstance<f64>> {
        let link = (0.0f64..200.0, 0.0f64..200.0, 0.0f64..200.0, 0.0f64..200.0)
            .prop_map(|(a, b, c, d)| Link::new(p(a, b), p(c, d)));
        (
            proptest::collection::vec(link.clone(), 0..4),
            proptest::collection::vec(link, 1..7),
            -3.0f64..3.0,
        )
            .prop_map(|(pr, se, floor_db)| base_instance(pr, se, 1e-4, db(floor_db)))
    }

    proptest! {
        #[test]
        fn more_activity_never_helps_primaries(inst in arb_instance(), a in any::<u64>(), b in any::<u64>()) {
            let m = inst.secondary_count();
            let small = ActivationVector::from_mask(a & b, m);
            let big = ActivationVector::from_mask(a | b, m);
            for i in 0..inst.primary_count() {
                prop_assert!(primary_sinr(&inst, &big, i).unwrap() <= primary_sinr(&inst, &small, i).unwrap());
            }
        }

        #[test]
        fn capacity_monotone_and_linear(bw in 1.0f64..1e6, g in 0.0f64..1e3, dg in 1e-6f64..10.0, k in 0.1f64..10.0) {
            prop_assert!(link_capacity(bw, g + dg) > link_capacity(bw, g));
            let lhs = link_capacity(k * bw, g);
            let rhs = k * link_capacity(bw, g);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-12));
        }
    }
}

//! Threshold comparator and the edge trace it produces on the wake line.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Rising,
    Falling,
}

/// One transition of the wake line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriggerEdge {
    pub t_s: f64,
    pub kind: EdgeKind,
}

/// Envelope comparator with optional hysteresis and minimum hold time.
///
/// The line asserts when the envelope rises strictly above the assert
/// threshold and deasserts when it falls strictly below the (lower or
/// equal) deassert threshold, provided the line has been asserted at least
/// `min_hold_s`. With `deassert == assert` and `min_hold_s == 0` it is a
/// plain comparator.
#[derive(Debug, Clone)]
pub struct TriggerComparator {
    threshold_assert: f64,
    threshold_deassert: f64,
    min_hold_s: f64,
    asserted: bool,
    asserted_since: f64,
    last_t: Option<f64>,
}

impl TriggerComparator {
    pub fn new(threshold_assert: f64, threshold_deassert: f64, min_hold_s: f64) -> Result<Self> {
        if !(threshold_assert.is_finite() && threshold_assert > 0.0) {
            return Err(Error::Param(format!(
                "assert threshold must be positive, got {threshold_assert}"
            )));
        }
        if !threshold_deassert.is_finite()
            || threshold_deassert < 0.0
            || threshold_deassert > threshold_assert
        {
            return Err(Error::Param(format!(
                "deassert threshold must satisfy 0 <= deassert <= assert, \
                 got {threshold_deassert} vs {threshold_assert}"
            )));
        }
        if !(min_hold_s.is_finite() && min_hold_s >= 0.0) {
            return Err(Error::Param(format!(
                "minimum hold must be non-negative, got {min_hold_s}"
            )));
        }
        Ok(TriggerComparator {
            threshold_assert,
            threshold_deassert,
            min_hold_s,
            asserted: false,
            asserted_since: 0.0,
            last_t: None,
        })
    }

    pub fn is_asserted(&self) -> bool {
        self.asserted
    }

    /// Feed one envelope sample at time `t_s`; returns the edge emitted, if
    /// any. Times must be strictly increasing across calls.
    pub fn update(&mut self, envelope: f64, t_s: f64) -> Result<Option<TriggerEdge>> {
        if let Some(prev) = self.last_t {
            if t_s <= prev {
                return Err(Error::NonMonotonicTime { prev, next: t_s });
            }
        }
        self.last_t = Some(t_s);

        if !self.asserted {
            if envelope > self.threshold_assert {
                self.asserted = true;
                self.asserted_since = t_s;
                return Ok(Some(TriggerEdge {
                    t_s,
                    kind: EdgeKind::Rising,
                }));
            }
        } else if envelope < self.threshold_deassert && t_s - self.asserted_since >= self.min_hold_s
        {
            self.asserted = false;
            return Ok(Some(TriggerEdge {
                t_s,
                kind: EdgeKind::Falling,
            }));
        }
        Ok(None)
    }
}

/// The full edge history of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriggerTrace {
    pub edges: Vec<TriggerEdge>,
}

impl TriggerTrace {
    pub fn push(&mut self, edge: TriggerEdge) {
        self.edges.push(edge);
    }

    /// Edges must strictly increase in time and alternate rising/falling,
    /// starting with a rising edge.
    pub fn validate(&self) -> Result<()> {
        for (i, pair) in self.edges.windows(2).enumerate() {
            if pair[1].t_s <= pair[0].t_s {
                return Err(Error::Invariant(format!(
                    "trigger trace not strictly increasing at edge {}",
                    i + 1
                )));
            }
            if pair[1].kind == pair[0].kind {
                return Err(Error::Invariant(format!(
                    "trigger trace does not alternate at edge {}",
                    i + 1
                )));
            }
        }
        if let Some(first) = self.edges.first() {
            if first.kind != EdgeKind::Rising {
                return Err(Error::Invariant(
                    "trigger trace starts with a falling edge".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn rising_times(&self) -> Vec<f64> {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Rising)
            .map(|e| e.t_s)
            .collect()
    }

    pub fn n_rising(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Rising)
            .count()
    }

    /// Closed intervals during which the line was asserted, with a trailing
    /// open assertion clipped to `end_s`.
    pub fn asserted_intervals(&self, end_s: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut open: Option<f64> = None;
        for e in &self.edges {
            match e.kind {
                EdgeKind::Rising => open = Some(e.t_s),
                EdgeKind::Falling => {
                    if let Some(start) = open.take() {
                        out.push((start, e.t_s));
                    }
                }
            }
        }
        if let Some(start) = open {
            if end_s > start {
                out.push((start, end_s));
            }
        }
        out
    }

    /// Total asserted time up to `end_s`.
    pub fn asserted_seconds(&self, end_s: f64) -> f64 {
        self.asserted_intervals(end_s)
            .iter()
            .map(|(s, e)| e - s)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn edges_of(env: &[f64], cmp: &mut TriggerComparator) -> Vec<TriggerEdge> {
        env.iter()
            .enumerate()
            .filter_map(|(i, &v)| cmp.update(v, i as f64 * 0.002).unwrap())
            .collect()
    }

    #[test]
    fn hand_traced_edge_sequence() {
        // Threshold 1.0, no hysteresis or hold. Envelope crosses up at
        // sample 2 and back down at sample 5.
        let mut cmp = TriggerComparator::new(1.0, 1.0, 0.0).unwrap();
        let env = [0.2, 0.9, 1.1, 1.4, 1.0, 0.8, 0.5];
        let edges = edges_of(&env, &mut cmp);
        assert_eq!(edges.len(), 2);
        assert_eq!(edges[0].kind, EdgeKind::Rising);
        assert_eq!(edges[0].t_s, 2.0 * 0.002);
        assert_eq!(edges[1].kind, EdgeKind::Falling);
        assert_eq!(edges[1].t_s, 5.0 * 0.002);
        // Note sample 4 (exactly 1.0) neither asserts nor deasserts: both
        // comparisons are strict.
        assert!(!cmp.is_asserted());
    }

    #[test]
    fn exact_threshold_value_does_not_assert() {
        let mut cmp = TriggerComparator::new(1.0, 1.0, 0.0).unwrap();
        assert!(cmp.update(1.0, 0.0).unwrap().is_none());
        assert!(cmp.update(1.0 + 1e-12, 1.0).unwrap().is_some());
    }

    #[test]
    fn hysteresis_suppresses_chatter() {
        // Envelope dithers around the assert threshold; with a deassert
        // threshold below the dither band there is exactly one edge pair.
        let band: Vec<f64> = (0..200)
            .map(|i| 1.05 + 0.08 * ((i as f64) * 1.7).sin())
            .chain(std::iter::repeat_n(0.1, 10))
            .collect();
        let mut plain = TriggerComparator::new(1.0, 1.0, 0.0).unwrap();
        let chatter = edges_of(&band, &mut plain).len();
        assert!(chatter > 2, "test signal should chatter, got {chatter}");
        let mut hyst = TriggerComparator::new(1.0, 0.8, 0.0).unwrap();
        assert_eq!(edges_of(&band, &mut hyst).len(), 2);
    }

    #[test]
    fn min_hold_defers_deassert() {
        // Assert at t=0.1, envelope drops immediately, but the line must
        // stay up for 0.5 s.
        let mut cmp = TriggerComparator::new(1.0, 1.0, 0.5).unwrap();
        assert!(cmp.update(2.0, 0.1).unwrap().is_some());
        assert!(cmp.update(0.0, 0.2).unwrap().is_none());
        assert!(cmp.update(0.0, 0.59).unwrap().is_none());
        let edge = cmp.update(0.0, 0.61).unwrap().unwrap();
        assert_eq!(edge.kind, EdgeKind::Falling);
    }

    #[test]
    fn rejects_non_monotonic_time_and_bad_thresholds() {
        let mut cmp = TriggerComparator::new(1.0, 1.0, 0.0).unwrap();
        cmp.update(0.0, 1.0).unwrap();
        assert!(matches!(
            cmp.update(0.0, 1.0),
            Err(Error::NonMonotonicTime { .. })
        ));
        assert!(matches!(
            cmp.update(0.0, 0.5),
            Err(Error::NonMonotonicTime { .. })
        ));
        assert!(TriggerComparator::new(0.0, 0.0, 0.0).is_err());
        assert!(TriggerComparator::new(1.0, 2.0, 0.0).is_err());
        assert!(TriggerComparator::new(1.0, -0.1, 0.0).is_err());
        assert!(TriggerComparator::new(1.0, 1.0, -1.0).is_err());
        assert!(TriggerComparator::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn scaling_envelope_and_thresholds_together_preserves_edges() {
        // Multiplying the envelope and both thresholds by the same factor
        // must not move any edge: the comparisons see identical orderings.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
        for &k in &[0.5, 2.0, 3.7, 1024.0, 1e-3] {
            let env: Vec<f64> = (0..400).map(|_| rng.random_range(0.0..2.0)).collect();
            let mut base = TriggerComparator::new(1.0, 0.9, 0.01).unwrap();
            let mut scaled = TriggerComparator::new(k * 1.0, k * 0.9, 0.01).unwrap();
            let a = edges_of(&env, &mut base);
            let scaled_env: Vec<f64> = env.iter().map(|v| v * k).collect();
            let b = edges_of(&scaled_env, &mut scaled);
            assert_eq!(a, b, "scale factor {k}");
        }
    }

    #[test]
    fn trace_intervals_and_validation() {
        let mut trace = TriggerTrace::default();
        trace.push(TriggerEdge {
            t_s: 1.0,
            kind: EdgeKind::Rising,
        });
        trace.push(TriggerEdge {
            t_s: 3.0,
            kind: EdgeKind::Falling,
        });
        trace.push(TriggerEdge {
            t_s: 5.0,
            kind: EdgeKind::Rising,
        });
        trace.validate().unwrap();
        assert_eq!(trace.asserted_intervals(6.0), vec![(1.0, 3.0), (5.0, 6.0)]);
        assert_eq!(trace.asserted_seconds(6.0), 3.0);
        assert_eq!(trace.rising_times(), vec![1.0, 5.0]);

        let mut bad = trace.clone();
        bad.push(TriggerEdge {
            t_s: 7.0,
            kind: EdgeKind::Rising,
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_trace_is_valid_and_idle() {
        let trace = TriggerTrace::default();
        trace.validate().unwrap();
        assert!(trace.asserted_intervals(10.0).is_empty());
        assert_eq!(trace.asserted_seconds(10.0), 0.0);
        assert_eq!(trace.n_rising(), 0);
    }
}

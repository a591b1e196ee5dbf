//! Prime windows and action windows for the iteration argument.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SEGMENT: u64 = 1 << 16;

/// Default upper end of the sieve range.
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 40;

/// Primes in increasing order from a starting point, by segmented sieve of Eratosthenes.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    base: Vec<u64>,
    base_limit: u64,
    lo: u64,
    pending: VecDeque<u64>,
    cap: u64,
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeStream {
    /// Primes `≥ start`, never looking past `cap`.
    pub fn new(start: u64, cap: u64) -> Self {
        Self {
            base: Vec::new(),
            base_limit: 0,
            lo: start.max(2),
            pending: VecDeque::new(),
            cap,
        }
    }

    fn fill(&mut self) -> Result<()> {
        while self.pending.is_empty() {
            if self.lo > self.cap {
                return Err(Error::SieveCap {
                    cap: self.cap,
                    resume_from: self.lo,
                });
            }
            let hi = (self.lo + SEGMENT).min(self.cap.saturating_add(1));
            let root = (hi as f64).sqrt() as u64 + 1;
            if root > self.base_limit {
                self.base_limit = (2 * root).max(1024);
                self.base = simple_sieve(self.base_limit);
            }
            let len = (hi - self.lo) as usize;
            let mut composite = vec![false; len];
            for &p in &self.base {
                if p * p >= hi {
                    break;
                }
                let first = (self.lo.div_ceil(p) * p).max(p * p);
                let mut m = first;
                while m < hi {
                    composite[(m - self.lo) as usize] = true;
                    m += p;
                }
            }
            for (i, c) in composite.iter().enumerate() {
                if !c {
                    self.pending.push_back(self.lo + i as u64);
                }
            }
            self.lo = hi;
        }
        Ok(())
    }

    pub fn next_prime(&mut self) -> Result<u64> {
        self.fill()?;
        Ok(self.pending.pop_front().expect("filled"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeReport {
    pub primes: Vec<u64>,
    /// `(p_{j+1} − p_j)/p_j`.
    pub gap_ratios: Vec<f64>,
    /// `(p_last − p_first)/p_first`.
    pub telescoped: f64,
}

/// The `count` primes strictly above `lower`.
pub fn admissible_primes(lower: u64, count: usize) -> Result<PrimeReport> {
    if lower < 2 {
        return Err(Error::InvalidInput(format!("lower must be at least 2, got {lower}")));
    }
    let mut s = PrimeStream::new(lower + 1, DEFAULT_SIEVE_CAP);
    let primes = (0..count).map(|_| s.next_prime()).collect::<Result<Vec<_>>>()?;
    let gap_ratios = primes
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 / w[0] as f64)
        .collect();
    let telescoped = match (primes.first(), primes.last()) {
        (Some(&a), Some(&b)) => (b - a) as f64 / a as f64,
        _ => 0.0,
    };
    Ok(PrimeReport {
        primes,
        gap_ratios,
        telescoped,
    })
}

/// Closed integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn disjoint(&self, other: &IndexWindow) -> bool {
        self.is_empty() || other.is_empty() || self.hi < other.lo || other.hi < self.lo
    }
}

/// Integers in `[pΔ − n, pΔ + n]`.
pub fn mean_index_window(delta: f64, p: u64, n: usize) -> IndexWindow {
    let c = p as f64 * delta;
    let n = n as f64;
    // absorb roundoff in pΔ so that exact integer endpoints survive
    let slack = 1e-9 * (1.0 + c.abs());
    IndexWindow {
        lo: (c - n - slack).ceil() as i64,
        hi: (c + n + slack).floor() as i64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowPlan {
    /// No action other than 0 lies in `(−a, a)`.
    pub a: f64,
    pub c3: f64,
    pub m: usize,
    /// `p_i, …, p_{i+m}`.
    pub primes: Vec<u64>,
    /// `C3 (p_{i+m} − p_i)`.
    pub delta: f64,
    /// Open interval of admissible `α`.
    pub alpha_interval: (f64, f64),
    pub alpha: f64,
    pub inner_chain: bool,
    pub outer_chain: bool,
    /// Index windows for `p_i` and `p_{i+m}` when a mean index was supplied.
    pub index_windows: Option<(IndexWindow, IndexWindow)>,
    pub degree_selection: String,
}

impl WindowPlan {
    pub fn p_first(&self) -> u64 {
        self.primes[0]
    }

    pub fn p_last(&self) -> u64 {
        self.primes[self.primes.len() - 1]
    }

    /// `−p_i a < −α < −α + 2δ < 0 < α < α + 2δ < p_i a`.
    pub fn check_inner(&self, alpha: f64) -> bool {
        let pa = self.p_first() as f64 * self.a;
        let d2 = 2.0 * self.delta;
        -pa < -alpha && -alpha < -alpha + d2 && -alpha + d2 < 0.0 && 0.0 < alpha && alpha < alpha + d2 && alpha + d2 < pa
    }

    /// `−p_{i+m} a < −α + δ < 0 < α + δ < p_{i+m} a`.
    pub fn check_outer(&self, alpha: f64) -> bool {
        let pa = self.p_last() as f64 * self.a;
        -pa < -alpha + self.delta && -alpha + self.delta < 0.0 && 0.0 < alpha + self.delta && alpha + self.delta < pa
    }

    pub fn holds(&self) -> bool {
        self.p_first() as f64 * self.a > 6.0 * self.delta
            && self.alpha_interval.0 < self.alpha
            && self.alpha < self.alpha_interval.1
            && self.check_inner(self.alpha)
            && self.check_outer(self.alpha)
    }

    /// Attaches `[p Δ − n, p Δ + n]` for the first and last prime.
    pub fn with_index_windows(mut self, delta_h: f64, n: usize) -> Self {
        self.index_windows = Some((
            mean_index_window(delta_h, self.p_first(), n),
            mean_index_window(delta_h, self.p_last(), n),
        ));
        self
    }
}

pub fn plan_window(a: f64, c3: f64, m: usize, prime_floor: u64) -> Result<WindowPlan> {
    plan_window_capped(a, c3, m, prime_floor, DEFAULT_SIEVE_CAP)
}

/// Least prime `p_i ≥ prime_floor` with `p_i a > 6 C3 (p_{i+m} − p_i)`, with `α` at the
/// midpoint of `(p_i a − 4δ, p_i a − 2δ)`.
pub fn plan_window_capped(a: f64, c3: f64, m: usize, prime_floor: u64, cap: u64) -> Result<WindowPlan> {
    if !(a > 0.0 && a.is_finite()) || !(c3 > 0.0 && c3.is_finite()) || m == 0 {
        return Err(Error::InvalidInput(format!(
            "need a > 0, C3 > 0, m >= 1; got a = {a}, C3 = {c3}, m = {m}"
        )));
    }
    let mut stream = PrimeStream::new(prime_floor.max(2), cap);
    let mut win: VecDeque<u64> = VecDeque::with_capacity(m + 1);
    loop {
        let p = stream.next_prime().map_err(|e| match e {
            Error::SieveCap { cap, .. } => Error::SieveCap {
                cap,
                resume_from: win.front().copied().unwrap_or(prime_floor),
            },
            other => other,
        })?;
        win.push_back(p);
        if win.len() > m + 1 {
            win.pop_front();
        }
        if win.len() < m + 1 {
            continue;
        }
        let (pi, pm) = (win[0], win[m]);
        let delta = c3 * (pm - pi) as f64;
        if pi as f64 * a > 6.0 * delta {
            let pa = pi as f64 * a;
            let interval = (pa - 4.0 * delta, pa - 2.0 * delta);
            let plan = WindowPlan {
                a,
                c3,
                m,
                primes: win.iter().copied().collect(),
                delta,
                alpha_interval: interval,
                alpha: 0.5 * (interval.0 + interval.1),
                inner_chain: false,
                outer_chain: false,
                index_windows: None,
                degree_selection: "not computed: needs local Floer homology".into(),
            };
            let inner = plan.check_inner(plan.alpha);
            let outer = plan.check_outer(plan.alpha);
            let plan = WindowPlan {
                inner_chain: inner,
                outer_chain: outer,
                ..plan
            };
            if !plan.holds() {
                // only possible through roundoff at extreme magnitudes; keep searching
                continue;
            }
            return Ok(plan);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primes_above_ten() {
        assert_eq!(admissible_primes(10, 3).unwrap().primes, vec![11, 13, 17]);
        assert!(admissible_primes(1, 3).is_err());
    }

    #[test]
    fn stream_matches_trial_division() {
        let mut s = PrimeStream::new(65_000, u64::MAX);
        let mut expect = (65_000u64..).filter(|&n| trial_division(n));
        for _ in 0..2000 {
            assert_eq!(s.next_prime().unwrap(), expect.next().unwrap());
        }
    }

    #[test]
    fn cap_is_resumable() {
        let e = plan_window_capped(1e-6, 1.0, 1, 100, 1000).unwrap_err();
        assert!(matches!(e, Error::SieveCap { cap: 1000, .. }));
    }

    #[test]
    fn window_for_unit_constants() {
        let plan = plan_window(1.0, 1.0, 1, 100).unwrap();
        let mut expect = (100u64..).filter(|&n| trial_division(n));
        let mut p = expect.next().unwrap();
        loop {
            let q = expect.next().unwrap();
            if p > 6 * (q - p) {
                assert_eq!(plan.primes, vec![p, q]);
                break;
            }
            p = q;
        }
        assert!(plan.holds());
    }

    #[test]
    fn index_windows() {
        assert_eq!(mean_index_window(0.5, 10, 1), IndexWindow { lo: 4, hi: 6 });
        for p in [2, 7, 101] {
            assert_eq!(mean_index_window(0.0, p, 2), IndexWindow { lo: -2, hi: 2 });
        }
    }
}

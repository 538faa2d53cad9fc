//! Network timing: which control packet the zero-order hold applies and which
//! measurement the controller uses, under bounded time-varying delays,
//! out-of-order arrival and message rejection.
//!
//! Delays are integer multiples of the sampling time. A [`DelayHistory`]
//! stores, for `m` in `[lo; hi]`, the delay of the packet sent `m` samples
//! ago. The packet sent `hi` samples ago has always arrived, so the selection
//! below is always defined.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PacketError {
    #[error("delay range [{lo}; {hi}] is empty")]
    EmptyRange { lo: u32, hi: u32 },
    #[error("history needs {expected} delays for [{lo}; {hi}], got {got}")]
    HistoryLength {
        lo: u32,
        hi: u32,
        expected: usize,
        got: usize,
    },
    #[error("delay {delay} outside [{lo}; {hi}]")]
    DelayOutOfRange { delay: u32, lo: u32, hi: u32 },
    #[error("candidate index {j} outside [0; {max}]")]
    IndexOutOfRange { j: u32, max: u32 },
    #[error("no delay recorded for the packet sent at {0}")]
    MissingDelay(i64),
}

/// Inclusive delay range `[lo; hi]` of one channel, in sampling periods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChannelRange {
    lo: u32,
    hi: u32,
}

impl ChannelRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self, PacketError> {
        if lo > hi {
            return Err(PacketError::EmptyRange { lo, hi });
        }
        Ok(ChannelRange { lo, hi })
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn hi(&self) -> u32 {
        self.hi
    }

    /// Number of possible delay values.
    pub fn width(&self) -> u32 {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, d: u32) -> bool {
        (self.lo..=self.hi).contains(&d)
    }

    pub fn values(&self) -> impl Iterator<Item = u32> + Clone {
        self.lo..=self.hi
    }

    pub fn check(&self, d: u32) -> Result<u32, PacketError> {
        if self.contains(d) {
            Ok(d)
        } else {
            Err(PacketError::DelayOutOfRange {
                delay: d,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

impl fmt::Display for ChannelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.lo, self.hi)
    }
}

/// Delay bounds of both network channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DelayBounds {
    sc: ChannelRange,
    ca: ChannelRange,
}

impl DelayBounds {
    pub fn new(nsc_min: u32, nsc_max: u32, nca_min: u32, nca_max: u32) -> Result<Self, PacketError> {
        Ok(DelayBounds {
            sc: ChannelRange::new(nsc_min, nsc_max)?,
            ca: ChannelRange::new(nca_min, nca_max)?,
        })
    }

    /// Sensor-to-controller channel.
    pub fn sc(&self) -> ChannelRange {
        self.sc
    }

    /// Controller-to-actuator channel.
    pub fn ca(&self) -> ChannelRange {
        self.ca
    }

    pub fn n_min(&self) -> u32 {
        self.sc.lo + self.ca.lo
    }

    pub fn n_max(&self) -> u32 {
        self.sc.hi + self.ca.hi
    }

    /// Single channel carrying the summed delay, used for static controllers.
    pub fn combined(&self) -> ChannelRange {
        ChannelRange {
            lo: self.n_min(),
            hi: self.n_max(),
        }
    }
}

impl fmt::Display for DelayBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sc {} ca {}", self.sc, self.ca)
    }
}

/// Delays of the packets sent `lo..=hi` samples ago.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DelayHistory {
    range: ChannelRange,
    // values[i] is the delay of the packet sent lo + i samples ago
    values: Vec<u32>,
}

impl DelayHistory {
    /// `values` are given in index order `lo, lo+1, ..., hi`, i.e. newest
    /// packet first.
    pub fn new(range: ChannelRange, values: Vec<u32>) -> Result<Self, PacketError> {
        let expected = range.width() as usize;
        if values.len() != expected {
            return Err(PacketError::HistoryLength {
                lo: range.lo,
                hi: range.hi,
                expected,
                got: values.len(),
            });
        }
        for &v in &values {
            range.check(v)?;
        }
        Ok(DelayHistory { range, values })
    }

    /// Every packet suffered the same delay `d`.
    pub fn constant(range: ChannelRange, d: u32) -> Result<Self, PacketError> {
        Self::new(range, vec![d; range.width() as usize])
    }

    pub fn range(&self) -> ChannelRange {
        self.range
    }

    /// Delay of the packet sent `m` samples ago, `m` in `[lo; hi]`.
    pub fn delay(&self, m: u32) -> u32 {
        self.values[(m - self.range.lo) as usize]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

/// The `g` function of the selection rule: 0 if some packet sent between
/// `lo` and `hi - j` samples ago has arrived, 1 otherwise.
///
/// Evaluated literally as
/// `min{ max{0, N[hi-j] + j - hi}, max{0, N[hi-1-j] + j - hi + 1}, ..., max{0, N[lo] - lo}, 1 }`.
pub fn g_hat(j: u32, history: &DelayHistory) -> Result<u32, PacketError> {
    let (lo, hi) = (history.range.lo as i64, history.range.hi as i64);
    let j_max = (hi - lo) as u32;
    if j > j_max {
        return Err(PacketError::IndexOutOfRange { j, max: j_max });
    }
    let j = j as i64;
    let mut best: i64 = 1;
    let mut t = 0;
    while hi - t - j >= lo {
        let idx = hi - t - j;
        let term = (history.delay(idx as u32) as i64 + j - hi + t).max(0);
        best = best.min(term);
        t += 1;
    }
    Ok(best as u32)
}

/// Largest minimiser of [`g_hat`] over `j` in `[0; hi - lo]`.
///
/// Ties go to the latest candidate, i.e. the most recently sent packet.
pub fn f_hat(history: &DelayHistory) -> u32 {
    let j_max = history.range.hi - history.range.lo;
    let mut best_j = 0;
    let mut best_g = u32::MAX;
    for j in 0..=j_max {
        let g = g_hat(j, history).expect("j within range");
        if g <= best_g {
            best_g = g;
            best_j = j;
        }
    }
    best_j
}

/// Brute-force selection over absolute send times.
///
/// `delays` maps send index `p` to the delay of the packet sent at `p`. Among
/// the packets sent in `[k - hi; k - lo]`, returns `m - k + hi` where `m` is
/// the latest send index that has arrived by `k` (`p + delay(p) <= k`).
pub fn oracle_held_packet(
    k: i64,
    delays: &BTreeMap<i64, u32>,
    range: ChannelRange,
) -> Result<u32, PacketError> {
    let (lo, hi) = (range.lo as i64, range.hi as i64);
    let mut latest = None;
    for p in (k - hi)..=(k - lo) {
        let d = *delays.get(&p).ok_or(PacketError::MissingDelay(p))?;
        range.check(d)?;
        if p + d as i64 <= k {
            latest = Some(p);
        }
    }
    // the packet sent at k - hi has arrived by k
    let m = latest.expect("oldest packet in the window has always arrived");
    Ok((m - k + hi) as u32)
}

/// Offset from the current sample of the control value held by the ZOH:
/// the applied input is `u[k + offset]`, offset in `[-hi; -lo]`.
pub fn held_input_index(history: &DelayHistory) -> i64 {
    f_hat(history) as i64 - history.range.hi as i64
}

/// Offset from the current sample of the measurement used by the controller.
pub fn controller_measurement_index(history: &DelayHistory) -> i64 {
    f_hat(history) as i64 - history.range.hi as i64
}

/// Number of samples ago the selected packet was sent (`hi - f_hat`).
pub fn selected_age(history: &DelayHistory) -> u32 {
    history.range.hi - f_hat(history)
}

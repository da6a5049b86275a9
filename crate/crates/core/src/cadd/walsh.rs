use crate::error::{Error, Result};
use serde::Serialize;

/// Sequency-ordered Walsh function `wal(k)` sampled on `N` equal cells, where
/// `N` is the smallest power of two above `k`.
pub fn walsh_signs(k: usize) -> Vec<i8> {
    let n = (k + 1).next_power_of_two();
    // natural-order Hadamard row r has entry (-1)^popcount(r & c)
    let mut rows: Vec<Vec<i8>> = (0..n)
        .map(|r| (0..n).map(|c| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 }).collect())
        .collect();
    rows.sort_by_key(|row| sign_changes(row));
    rows.swap_remove(k)
}

fn sign_changes(row: &[i8]) -> usize {
    row.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Sign changes of `wal(k)` as fractions of the interval.
pub fn transitions(k: usize) -> Vec<f64> {
    let s = walsh_signs(k);
    let n = s.len() as f64;
    s.windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, _)| (i + 1) as f64 / n)
        .collect()
}

/// Nominal pulse times as fractions of the interval, with the terminal pulse
/// when the transition count is odd.
pub fn normalized_pulse_times(color: usize) -> Vec<f64> {
    let mut t = transitions(color);
    if t.len() % 2 == 1 {
        t.push(1.0);
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalshSequence {
    pub color: usize,
    pub duration: f64,
    pub pulse_ns: f64,
    /// Pulse start offsets within the interval.
    pub pulse_starts: Vec<f64>,
}

impl WalshSequence {
    /// Toggling-frame sign at offset `t`; 0 while a finite pulse is being played.
    pub fn sign_at(&self, t: f64) -> i8 {
        if self.pulse_ns > 0.0 && self.pulse_starts.iter().any(|&s| t >= s && t < s + self.pulse_ns) {
            return 0;
        }
        let flips = self.pulse_starts.iter().filter(|&&s| s + self.pulse_ns <= t).count();
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn pulse_centres(&self) -> Vec<f64> {
        self.pulse_starts.iter().map(|s| s + 0.5 * self.pulse_ns).collect()
    }
}

pub fn walsh_sequence(color: usize, duration: f64, pulse_ns: f64) -> Result<WalshSequence> {
    if color == 0 {
        return Err(Error::Domain("color 0 is the unbalanced constant sequence".into()));
    }
    if !(duration >= 0.0) || !(pulse_ns >= 0.0) {
        return Err(Error::Domain("durations must be non-negative".into()));
    }
    let fr = normalized_pulse_times(color);
    let count = fr.len();
    // free evolution between pulses keeps the Walsh proportions of T - count * w
    let free = duration - count as f64 * pulse_ns;
    let starts: Vec<f64> = fr.iter().enumerate().map(|(k, &f)| f * free + k as f64 * pulse_ns).collect();
    let too_short = Error::TooShort { duration, pulses: count, pulse_ns };
    if free < -1e-9 {
        return Err(too_short);
    }
    Ok(WalshSequence { color, duration, pulse_ns, pulse_starts: starts })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceEntry {
    pub color: usize,
    pub normalized_pulse_times: Vec<f64>,
}

/// Pre-built sequences for colors `1..=max_color`.
pub fn sequence_dictionary(max_color: usize) -> Vec<SequenceEntry> {
    (1..=max_color)
        .map(|color| SequenceEntry { color, normalized_pulse_times: normalized_pulse_times(color) })
        .collect()
}

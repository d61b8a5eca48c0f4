use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Role of a bosonic mode in a three-wave-mixing qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    Signal,
    Idler,
    Pump,
}

impl ModeLabel {
    /// One-letter tag used in operator labels (`s`, `i`, `p`).
    pub fn tag(self) -> &'static str {
        match self {
            ModeLabel::Signal => "s",
            ModeLabel::Idler => "i",
            ModeLabel::Pump => "p",
        }
    }
}

/// A single mode: its role and the physical qudit (group) it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub label: ModeLabel,
    pub group: usize,
}

impl Mode {
    /// Label such as `s1` or `p2`; the group index is omitted for
    /// single-group layouts.
    pub fn name(&self, single_group: bool) -> String {
        if single_group {
            self.label.tag().to_string()
        } else {
            format!("{}{}", self.label.tag(), self.group)
        }
    }
}

/// Ordered list of modes together with per-mode photon caps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeLayout {
    modes: Vec<Mode>,
    caps: Vec<u32>,
}

impl ModeLayout {
    /// Validates labels (distinct within a group) and group indices
    /// (contiguous from 1).
    pub fn new(modes: Vec<Mode>, caps: Vec<u32>) -> Result<Self> {
        if modes.len() != caps.len() {
            return Err(Error::InvalidLayout(format!(
                "{} modes but {} caps",
                modes.len(),
                caps.len()
            )));
        }
        let max_group = modes.iter().map(|m| m.group).max().unwrap_or(0);
        for g in 1..=max_group {
            let labels: Vec<ModeLabel> =
                modes.iter().filter(|m| m.group == g).map(|m| m.label).collect();
            if labels.is_empty() {
                return Err(Error::InvalidLayout(format!("group {g} has no modes")));
            }
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != labels.len() {
                return Err(Error::InvalidLayout(format!("duplicate label in group {g}")));
            }
        }
        if modes.iter().any(|m| m.group == 0) {
            return Err(Error::InvalidLayout("group indices start at 1".into()));
        }
        Ok(Self { modes, caps })
    }

    /// `groups` copies of (signal, idler, pump), every mode capped at `cap`.
    pub fn three_mode(groups: usize, cap: u32) -> Self {
        let modes = (1..=groups)
            .flat_map(|g| {
                [ModeLabel::Signal, ModeLabel::Idler, ModeLabel::Pump]
                    .into_iter()
                    .map(move |label| Mode { label, group: g })
            })
            .collect::<Vec<_>>();
        let caps = vec![cap; modes.len()];
        Self { modes, caps }
    }

    /// Two-mode (signal, pump) layout used by the two-mode binomial code.
    pub fn signal_pump(cap: u32) -> Self {
        Self {
            modes: vec![
                Mode { label: ModeLabel::Signal, group: 1 },
                Mode { label: ModeLabel::Pump, group: 1 },
            ],
            caps: vec![cap, cap],
        }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn groups(&self) -> usize {
        self.modes.iter().map(|m| m.group).max().unwrap_or(0)
    }

    /// Same modes, different caps.
    pub fn with_caps(&self, caps: Vec<u32>) -> Result<Self> {
        Self::new(self.modes.clone(), caps)
    }

    /// Index of the mode with the given role in the given group.
    pub fn find(&self, label: ModeLabel, group: usize) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label && m.group == group)
    }

    /// Mode name (`s1`, `p`, ...) used in operator labels.
    pub fn mode_name(&self, mode: usize) -> String {
        self.modes[mode].name(self.groups() <= 1)
    }

    /// Whether two layouts describe the same modes, ignoring caps.
    pub fn same_modes(&self, other: &Self) -> bool {
        self.modes == other.modes
    }

    /// Concatenation with `other`'s groups shifted past this layout's groups.
    pub fn concat(&self, other: &Self) -> Self {
        let shift = self.groups();
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().map(|m| Mode { label: m.label, group: m.group + shift }));
        let mut caps = self.caps.clone();
        caps.extend_from_slice(&other.caps);
        Self { modes, caps }
    }
}

/// Occupation-number tuple, one entry per mode of a layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState(pub Vec<u32>);

impl FockState {
    pub fn new(occupations: impl Into<Vec<u32>>) -> Self {
        Self(occupations.into())
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| n as u64).sum()
    }

    /// Concatenation used by tensor products.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// Occupation of `mode` shifted by `delta`, or `None` if it would go
    /// negative.
    pub fn shifted(&self, mode: usize, delta: i64) -> Option<Self> {
        let n = self.0[mode] as i64 + delta;
        if n < 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[mode] = n as u32;
        Some(Self(v))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for FockState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("occupation {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl From<&[u32]> for FockState {
    fn from(v: &[u32]) -> Self {
        Self(v.to_vec())
    }
}

impl<const K: usize> From<[u32; K]> for FockState {
    fn from(v: [u32; K]) -> Self {
        Self(v.to_vec())
    }
}

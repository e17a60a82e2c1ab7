use serde::{Deserialize, Serialize};

use crate::error::{AvError, Result};

/// Which pairing of adjacent windows an Allan variance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Maximum overlap: every `k = 2n..T` contributes one difference.
    Moav,
    /// Non-overlapping: `m = floor(T / 2n)` disjoint window pairs.
    Noav,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Moav => "moav",
            Variant::Noav => "noav",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    MoavEmpirical,
    NoavEmpirical,
    MoavTheoreticalNs,
    NoavTheoreticalNs,
    StationaryTheoretical,
}

impl SpectrumKind {
    pub fn empirical(variant: Variant) -> Self {
        match variant {
            Variant::Moav => SpectrumKind::MoavEmpirical,
            Variant::Noav => SpectrumKind::NoavEmpirical,
        }
    }

    pub fn theoretical(variant: Variant) -> Self {
        match variant {
            Variant::Moav => SpectrumKind::MoavTheoreticalNs,
            Variant::Noav => SpectrumKind::NoavTheoreticalNs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    /// Window length in samples.
    pub n: usize,
    pub av: f64,
}

/// Allan variance over a set of window lengths, sorted by `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllanSpectrum {
    entries: Vec<SpectrumEntry>,
    kind: SpectrumKind,
    provenance: String,
}

impl AllanSpectrum {
    /// Entries must be strictly increasing in `n` with finite `av >= 0`.
    pub fn new(
        entries: Vec<SpectrumEntry>,
        kind: SpectrumKind,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(AvError::Config(
                "spectrum entries must be strictly increasing in n".into(),
            ));
        }
        if let Some(e) = entries.iter().find(|e| !(e.av.is_finite() && e.av >= 0.0)) {
            return Err(AvError::Config(format!(
                "Allan variance at n = {} is {}, expected a finite non-negative value",
                e.n, e.av
            )));
        }
        Ok(Self {
            entries,
            kind,
            provenance: provenance.into(),
        })
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn windows(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.n)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.av)
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&n, |e| e.n)
            .ok()
            .map(|i| self.entries[i].av)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, av: f64) -> SpectrumEntry {
        SpectrumEntry { n, av }
    }

    #[test]
    fn validates_entries() {
        let kind = SpectrumKind::MoavEmpirical;
        assert!(AllanSpectrum::new(vec![e(1, 1.0), e(2, 0.5)], kind, "t").is_ok());
        assert!(AllanSpectrum::new(vec![e(2, 1.0), e(1, 0.5)], kind, "t").is_err());
        assert!(AllanSpectrum::new(vec![e(1, 1.0), e(1, 0.5)], kind, "t").is_err());
        assert!(AllanSpectrum::new(vec![e(1, -1e-3)], kind, "t").is_err());
        assert!(AllanSpectrum::new(vec![e(1, f64::NAN)], kind, "t").is_err());
    }

    #[test]
    fn lookup_by_window() {
        let s = AllanSpectrum::new(
            vec![e(1, 1.0), e(4, 0.25)],
            SpectrumKind::MoavEmpirical,
            "t",
        )
        .unwrap();
        assert_eq!(s.get(4), Some(0.25));
        assert_eq!(s.get(2), None);
    }
}

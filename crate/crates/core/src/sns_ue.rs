//! UE-side SNS: sample a device usage scenario and map (scenario, band,
//! element) to a fixed power attenuation from a user-supplied table.
//!
//! Table file format: CSV with columns
//! `scenario,band,element_index,attenuation_db` where scenario is one of
//! `one_hand`, `two_hand`, `head_one_hand`, `free_space` and band is one of
//! `below_1ghz`, `1-8.4ghz`, `14.5-15.5ghz`. The bundled table carries
//! placeholder values.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use rand::Rng;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// Device usage scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UsageScenario {
    OneHand,
    TwoHand,
    HeadOneHand,
    FreeSpace,
}

impl UsageScenario {
    pub fn token(self) -> &'static str {
        match self {
            UsageScenario::OneHand => "one_hand",
            UsageScenario::TwoHand => "two_hand",
            UsageScenario::HeadOneHand => "head_one_hand",
            UsageScenario::FreeSpace => "free_space",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "one_hand" => Some(UsageScenario::OneHand),
            "two_hand" => Some(UsageScenario::TwoHand),
            "head_one_hand" => Some(UsageScenario::HeadOneHand),
            "free_space" => Some(UsageScenario::FreeSpace),
            _ => None,
        }
    }
}

impl fmt::Display for UsageScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Usage probabilities: a fraction of UEs is obstructed at all, and the
/// obstructed ones split between the three grip scenarios (conditional
/// probabilities summing to 1).
#[derive(Debug, Clone, Copy)]
pub struct UsageProbabilities<F> {
    pub obstructed: F,
    pub one_hand: F,
    pub two_hand: F,
    pub head_one_hand: F,
}

impl<F: Scalar> Default for UsageProbabilities<F> {
    fn default() -> Self {
        Self {
            obstructed: F::lit(0.90),
            one_hand: F::lit(0.58),
            two_hand: F::lit(0.29),
            head_one_hand: F::lit(0.13),
        }
    }
}

impl<F: Scalar> UsageProbabilities<F> {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: F| v >= F::zero() && v <= F::one();
        if !in_unit(self.obstructed) {
            return Err(Error::InvalidConfig("obstructed must be in [0, 1]".into()));
        }
        let sum = self.one_hand + self.two_hand + self.head_one_hand;
        if !in_unit(self.one_hand)
            || !in_unit(self.two_hand)
            || !in_unit(self.head_one_hand)
            || (sum - F::one()).abs() > F::lit(1e-9)
        {
            return Err(Error::InvalidConfig(
                "conditional grip probabilities must sum to 1".into(),
            ));
        }
        Ok(())
    }
}

/// Draw a usage scenario with one uniform sample partitioning [0, 1).
pub fn sample_usage_scenario<F: Scalar, R: Rng + ?Sized>(
    probs: &UsageProbabilities<F>,
    rng: &mut R,
) -> UsageScenario {
    let u = F::uniform_01(rng);
    let free = F::one() - probs.obstructed;
    if u < free {
        return UsageScenario::FreeSpace;
    }
    let one = free + probs.obstructed * probs.one_hand;
    if u < one {
        return UsageScenario::OneHand;
    }
    let two = one + probs.obstructed * probs.two_hand;
    if u < two {
        UsageScenario::TwoHand
    } else {
        UsageScenario::HeadOneHand
    }
}

/// Frequency band of the attenuation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyBand {
    Below1GHz,
    From1To8p4GHz,
    From14p5To15p5GHz,
}

impl FrequencyBand {
    pub fn token(self) -> &'static str {
        match self {
            FrequencyBand::Below1GHz => "below_1ghz",
            FrequencyBand::From1To8p4GHz => "1-8.4ghz",
            FrequencyBand::From14p5To15p5GHz => "14.5-15.5ghz",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "below_1ghz" => Some(FrequencyBand::Below1GHz),
            "1-8.4ghz" => Some(FrequencyBand::From1To8p4GHz),
            "14.5-15.5ghz" => Some(FrequencyBand::From14p5To15p5GHz),
            _ => None,
        }
    }

    /// Band edges for nearest-band resolution, Hz.
    fn range_hz(self) -> (f64, f64) {
        match self {
            FrequencyBand::Below1GHz => (0.0, 1e9),
            FrequencyBand::From1To8p4GHz => (1e9, 8.4e9),
            FrequencyBand::From14p5To15p5GHz => (14.5e9, 15.5e9),
        }
    }

    fn distance_hz(self, freq_hz: f64) -> f64 {
        let (lo, hi) = self.range_hz();
        if freq_hz < lo {
            lo - freq_hz
        } else if freq_hz > hi {
            freq_hz - hi
        } else {
            0.0
        }
    }
}

impl fmt::Display for FrequencyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Band containing a carrier frequency, if any.
pub fn band_for_frequency(freq_hz: f64) -> Option<FrequencyBand> {
    if freq_hz < 1e9 {
        Some(FrequencyBand::Below1GHz)
    } else if freq_hz <= 8.4e9 {
        Some(FrequencyBand::From1To8p4GHz)
    } else if (14.5e9..=15.5e9).contains(&freq_hz) {
        Some(FrequencyBand::From14p5To15p5GHz)
    } else {
        None
    }
}

/// Nearest defined band by distance to the band edges.
pub fn nearest_band(freq_hz: f64) -> FrequencyBand {
    [
        FrequencyBand::Below1GHz,
        FrequencyBand::From1To8p4GHz,
        FrequencyBand::From14p5To15p5GHz,
    ]
    .into_iter()
    .min_by(|a, b| {
        a.distance_hz(freq_hz)
            .partial_cmp(&b.distance_hz(freq_hz))
            .unwrap()
    })
    .unwrap()
}

/// Map from (usage scenario, band, element index) to attenuation in dB.
#[derive(Debug, Clone, Default)]
pub struct UeAttenuationTable<F> {
    entries: HashMap<(UsageScenario, FrequencyBand, usize), F>,
}

impl<F: Scalar> UeAttenuationTable<F> {
    pub fn new() -> Self {
        Self {
            entries: HashMap::new(),
        }
    }

    pub fn insert(
        &mut self,
        scenario: UsageScenario,
        band: FrequencyBand,
        element: usize,
        attenuation_db: F,
    ) {
        self.entries
            .insert((scenario, band, element), attenuation_db);
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse the CSV format described at module level. Lines starting with
    /// `#` and a leading header row are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields[0] == "scenario" {
                continue;
            }
            if fields.len() != 4 {
                return Err(Error::MalformedTable {
                    line: idx + 1,
                    reason: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let scenario =
                UsageScenario::from_token(fields[0]).ok_or_else(|| Error::MalformedTable {
                    line: idx + 1,
                    reason: format!("unknown scenario '{}'", fields[0]),
                })?;
            let band =
                FrequencyBand::from_token(fields[1]).ok_or_else(|| Error::MalformedTable {
                    line: idx + 1,
                    reason: format!("unknown band '{}'", fields[1]),
                })?;
            let element: usize = fields[2].parse().map_err(|_| Error::MalformedTable {
                line: idx + 1,
                reason: format!("bad element index '{}'", fields[2]),
            })?;
            let db: f64 = fields[3].parse().map_err(|_| Error::MalformedTable {
                line: idx + 1,
                reason: format!("bad attenuation '{}'", fields[3]),
            })?;
            if db < 0.0 {
                return Err(Error::MalformedTable {
                    line: idx + 1,
                    reason: "attenuation must be >= 0 dB".into(),
                });
            }
            table.insert(scenario, band, element, F::lit(db));
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn lookup_db(&self, scenario: UsageScenario, band: FrequencyBand, element: usize) -> Result<F> {
        self.entries
            .get(&(scenario, band, element))
            .copied()
            .ok_or_else(|| Error::MissingTableEntry {
                scenario: scenario.token().into(),
                band: band.token().into(),
                element,
            })
    }
}

/// Linear per-element UE attenuation factor beta_u in (0, 1]. Free space is
/// 1 for every element; otherwise the table entry for the band containing
/// the carrier is converted from dB. Frequencies outside every band are an
/// error unless `use_nearest_band` is set.
pub fn ue_attenuation<F: Scalar>(
    scenario: UsageScenario,
    freq_hz: f64,
    element: usize,
    table: &UeAttenuationTable<F>,
    use_nearest_band: bool,
) -> Result<F> {
    if scenario == UsageScenario::FreeSpace {
        return Ok(F::one());
    }
    let band = match band_for_frequency(freq_hz) {
        Some(b) => b,
        None if use_nearest_band => nearest_band(freq_hz),
        None => return Err(Error::NoBandData { freq_hz }),
    };
    let db = table.lookup_db(scenario, band, element)?;
    Ok((-db).db_to_linear())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table() -> UeAttenuationTable<f64> {
        let mut t = UeAttenuationTable::new();
        for e in 0..8 {
            t.insert(UsageScenario::OneHand, FrequencyBand::From1To8p4GHz, e, 3.0);
            t.insert(UsageScenario::TwoHand, FrequencyBand::From1To8p4GHz, e, 6.0);
            t.insert(
                UsageScenario::HeadOneHand,
                FrequencyBand::From1To8p4GHz,
                e,
                9.0,
            );
        }
        t
    }

    #[test]
    fn probabilities_sum_to_one() {
        let p = UsageProbabilities::<f64>::default();
        p.validate().unwrap();
        let total = (1.0 - p.obstructed)
            + p.obstructed * (p.one_hand + p.two_hand + p.head_one_hand);
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn usage_scenario_frequencies() {
        let p = UsageProbabilities::<f64>::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            match sample_usage_scenario(&p, &mut rng) {
                UsageScenario::OneHand => counts[0] += 1,
                UsageScenario::TwoHand => counts[1] += 1,
                UsageScenario::HeadOneHand => counts[2] += 1,
                UsageScenario::FreeSpace => counts[3] += 1,
            }
        }
        let f = |c: usize| c as f64 / n as f64;
        // 0.9 · 0.58 = 0.522 and the binomial oracle for free space.
        assert!((f(counts[0]) - 0.522).abs() < 0.005, "one_hand {}", f(counts[0]));
        assert!((f(counts[3]) - 0.10).abs() < 0.003, "free {}", f(counts[3]));
        assert!((f(counts[1]) - 0.261).abs() < 0.005);
        assert!((f(counts[2]) - 0.117).abs() < 0.005);
    }

    #[test]
    fn band_mapping() {
        assert_eq!(band_for_frequency(0.7e9), Some(FrequencyBand::Below1GHz));
        // 7 GHz falls in the 1-8.4 GHz band.
        assert_eq!(band_for_frequency(7e9), Some(FrequencyBand::From1To8p4GHz));
        assert_eq!(
            band_for_frequency(15e9),
            Some(FrequencyBand::From14p5To15p5GHz)
        );
        assert_eq!(band_for_frequency(10e9), None);
        assert_eq!(nearest_band(10e9), FrequencyBand::From1To8p4GHz);
        assert_eq!(nearest_band(13e9), FrequencyBand::From14p5To15p5GHz);
    }

    #[test]
    fn free_space_is_unity() {
        let t = table();
        for e in 0..8 {
            let b = ue_attenuation(UsageScenario::FreeSpace, 7e9, e, &t, false).unwrap();
            assert_eq!(b, 1.0);
        }
    }

    #[test]
    fn three_db_entry() {
        let t = table();
        let b = ue_attenuation(UsageScenario::OneHand, 7e9, 0, &t, false).unwrap();
        assert!((b - 0.501187233627272).abs() < 1e-12);
        assert!(b > 0.0 && b <= 1.0);
    }

    #[test]
    fn out_of_band_errors_unless_nearest() {
        let t = table();
        let err = ue_attenuation(UsageScenario::OneHand, 10e9, 0, &t, false);
        assert!(matches!(err, Err(Error::NoBandData { .. })));
        let b = ue_attenuation(UsageScenario::OneHand, 10e9, 0, &t, true).unwrap();
        assert!((b - 0.501187233627272).abs() < 1e-12);
    }

    #[test]
    fn missing_entry_reported() {
        let t = table();
        let err = ue_attenuation(UsageScenario::OneHand, 7e9, 99, &t, false);
        assert!(matches!(err, Err(Error::MissingTableEntry { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let text = "\
# placeholder values
scenario,band,element_index,attenuation_db
one_hand,1-8.4ghz,0,3.0
one_hand,1-8.4ghz,1,4.5
two_hand,below_1ghz,0,1.0
head_one_hand,14.5-15.5ghz,2,12.0
";
        let t: UeAttenuationTable<f64> = UeAttenuationTable::parse(text).unwrap();
        assert!((ue_attenuation(UsageScenario::OneHand, 7e9, 1, &t, false).unwrap()
            - 10f64.powf(-0.45))
        .abs()
            < 1e-12);
        assert!(UeAttenuationTable::<f64>::parse("bogus,line").is_err());
        assert!(UeAttenuationTable::<f64>::parse("one_hand,1-8.4ghz,0,-3").is_err());
    }
}

//! Ladder-trend fitting. Convergence and boundedness claims about infinite
//! sequences are replaced by fitted log-log slopes over a ladder of truncations.

use serde::{Deserialize, Serialize};

/// Growth exponent separating bounded from growing constants.
pub const GROWTH_THRESHOLD: f64 = 0.5;
/// Decay exponent below which series increments count as convergent.
pub const DECAY_THRESHOLD: f64 = -0.5;
/// Relative band around a threshold treated as a tie.
pub const TIE_BAND: f64 = 0.1;
/// Minimum ladder length for a trend verdict.
pub const MIN_LADDER: usize = 4;

/// Strictly increasing list of truncation sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ladder(Vec<usize>);

impl Ladder {
    pub fn new(sizes: Vec<usize>) -> Result<Self, String> {
        if sizes.is_empty() {
            return Err("ladder is empty".into());
        }
        if sizes[0] == 0 {
            return Err("ladder sizes must be positive".into());
        }
        if let Some(w) = sizes.windows(2).find(|w| w[1] <= w[0]) {
            return Err(format!("ladder must be strictly increasing ({} then {})", w[0], w[1]));
        }
        Ok(Ladder(sizes))
    }

    /// `{start, 2·start, 4·start, ...}` with `len` entries.
    pub fn doubling(start: usize, len: usize) -> Self {
        Ladder::new((0..len).map(|i| start << i).collect()).expect("doubling ladder is valid")
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&n| n as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<usize>> for Ladder {
    type Error = String;
    fn try_from(v: Vec<usize>) -> Result<Self, String> {
        Ladder::new(v)
    }
}

impl From<Ladder> for Vec<usize> {
    fn from(l: Ladder) -> Self {
        l.0
    }
}

impl std::str::FromStr for Ladder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let sizes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad ladder entry {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ladder::new(sizes)
    }
}

/// Least-squares slope of `ln y` against `ln x`. Non-positive entries are skipped;
/// returns `None` with fewer than two usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Below,
    Tie,
    Above,
}

/// Place `slope` relative to `threshold` with a relative tie band.
pub fn classify(slope: f64, threshold: f64) -> Side {
    let band = TIE_BAND * threshold.abs();
    if slope > threshold + band {
        Side::Above
    } else if slope < threshold - band {
        Side::Below
    } else {
        Side::Tie
    }
}

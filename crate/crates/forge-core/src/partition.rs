//! Splitting a CPA input arrival profile into its three slope regions
//! (rising, plateau, falling), both empirically from a measured profile
//! and by closed-form widths, plus per-region adder recommendations.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::adders::AdderKind;
use crate::error::{Error, Result};
use crate::timing::ArrivalProfile;

/// Three contiguous LSB-to-MSB bit ranges covering a 2n-bit CPA span.
/// `r1` (rising arrivals) and `r3` (falling arrivals) may be empty;
/// the plateau `r2` sits between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RegionPartitionDoc", try_from = "RegionPartitionDoc")]
pub struct RegionPartition {
    n: usize,
    r1: Range<usize>,
    r2: Range<usize>,
    r3: Range<usize>,
}

/// Serialized form: each region as start + width.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionDoc {
    start: usize,
    width: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionPartitionDoc {
    n: usize,
    r1: RegionDoc,
    r2: RegionDoc,
    r3: RegionDoc,
}

impl From<RegionPartition> for RegionPartitionDoc {
    fn from(p: RegionPartition) -> Self {
        let doc = |r: &Range<usize>| RegionDoc {
            start: r.start,
            width: r.len(),
        };
        RegionPartitionDoc {
            n: p.n,
            r1: doc(&p.r1),
            r2: doc(&p.r2),
            r3: doc(&p.r3),
        }
    }
}

impl TryFrom<RegionPartitionDoc> for RegionPartition {
    type Error = Error;

    fn try_from(d: RegionPartitionDoc) -> Result<Self> {
        let range = |r: &RegionDoc| r.start..r.start + r.width;
        RegionPartition::new(d.n, range(&d.r1), range(&d.r2), range(&d.r3))
    }
}

impl RegionPartition {
    /// Build from explicit ranges, checking contiguity and coverage of
    /// `0..2n`.
    pub fn new(
        n: usize,
        r1: Range<usize>,
        r2: Range<usize>,
        r3: Range<usize>,
    ) -> Result<RegionPartition> {
        let p = RegionPartition { n, r1, r2, r3 };
        p.validate()?;
        Ok(p)
    }

    /// Build from three LSB-to-MSB region widths summing to `width`
    /// (which must be even: the span of an n-by-n multiplier CPA).
    pub fn from_widths(width: usize, widths: &[usize]) -> Result<RegionPartition> {
        if widths.len() != 3 {
            return Err(Error::PartitionMismatch(format!(
                "expected 3 region widths, got {}",
                widths.len()
            )));
        }
        if width == 0 || width % 2 != 0 {
            return Err(Error::PartitionMismatch(format!(
                "partition width must be even and positive, got {width}"
            )));
        }
        let (w1, w2, w3) = (widths[0], widths[1], widths[2]);
        RegionPartition::new(width / 2, 0..w1, w1..w1 + w2, w1 + w2..w1 + w2 + w3)
    }

    fn validate(&self) -> Result<()> {
        let w = 2 * self.n;
        let ok = self.r1.start == 0
            && self.r1.end == self.r2.start
            && self.r2.end == self.r3.start
            && self.r3.end == w
            && self.r1.start <= self.r1.end
            && self.r2.start <= self.r2.end
            && self.r3.start <= self.r3.end;
        if !ok {
            return Err(Error::PartitionMismatch(format!(
                "regions {:?}/{:?}/{:?} do not tile 0..{w}",
                self.r1, self.r2, self.r3
            )));
        }
        Ok(())
    }

    /// Operand width n; the partition covers 2n bits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total bits covered (2n).
    pub fn width(&self) -> usize {
        2 * self.n
    }

    pub fn r1(&self) -> Range<usize> {
        self.r1.clone()
    }

    pub fn r2(&self) -> Range<usize> {
        self.r2.clone()
    }

    pub fn r3(&self) -> Range<usize> {
        self.r3.clone()
    }

    /// The non-empty regions, LSB to MSB.
    pub fn regions(&self) -> Vec<Range<usize>> {
        [&self.r1, &self.r2, &self.r3]
            .into_iter()
            .filter(|r| !r.is_empty())
            .cloned()
            .collect()
    }

    /// Internal boundaries as bit indices: (end of r1, end of r2).
    pub fn boundaries(&self) -> (usize, usize) {
        (self.r1.end, self.r2.end)
    }
}

impl std::fmt::Display for RegionPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |f: &mut std::fmt::Formatter<'_>, r: &Range<usize>| -> std::fmt::Result {
            if r.is_empty() {
                write!(f, "-")
            } else {
                write!(f, "{}..={} ({})", r.start, r.end - 1, r.len())
            }
        };
        write!(f, "r1=")?;
        show(f, &self.r1)?;
        write!(f, " r2=")?;
        show(f, &self.r2)?;
        write!(f, " r3=")?;
        show(f, &self.r3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slope {
    Rise,
    Flat,
    Fall,
}

/// Detect the three regions of an arrival profile. Successive
/// differences are classified against the tolerance: rising when
/// d > ε, flat when |d| ≤ ε, falling when d < −ε. The rising prefix
/// and falling suffix tolerate embedded flats of length 1 (staircase
/// profiles step at gate granularity); runs of two or more flats end
/// the region. A width-1 falling region is merged into the plateau.
pub fn detect_regions(profile: &ArrivalProfile, epsilon: f64) -> Result<RegionPartition> {
    let arr = profile.arrivals();
    if arr.len() < 4 {
        return Err(Error::InvalidWidth {
            what: "profile for region detection",
            min: 4,
            got: arr.len(),
        });
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "tolerance must be non-negative, got {epsilon}"
        )));
    }
    let classes: Vec<Slope> = arr
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d > epsilon {
                Slope::Rise
            } else if d < -epsilon {
                Slope::Fall
            } else {
                Slope::Flat
            }
        })
        .collect();
    let len = arr.len();

    let mut last_rise = None;
    let mut flats = 0;
    for (i, c) in classes.iter().enumerate() {
        match c {
            Slope::Rise => {
                last_rise = Some(i);
                flats = 0;
            }
            Slope::Flat => {
                flats += 1;
                if flats >= 2 {
                    break;
                }
            }
            Slope::Fall => break,
        }
    }
    if last_rise == Some(classes.len() - 1) {
        // Still rising at the MSB: no plateau to partition.
        return Err(Error::DegenerateProfile);
    }
    let r1_end = last_rise.map_or(0, |i| i + 1);

    let mut first_fall = None;
    flats = 0;
    for (i, c) in classes.iter().enumerate().rev() {
        match c {
            Slope::Fall => {
                first_fall = Some(i);
                flats = 0;
            }
            Slope::Flat => {
                flats += 1;
                if flats >= 2 {
                    break;
                }
            }
            Slope::Rise => break,
        }
    }
    let mut r3_start = first_fall.map_or(len, |i| i + 1).max(r1_end);
    if len - r3_start == 1 {
        r3_start = len; // lone falling bit joins the plateau
    }
    if r1_end == r3_start {
        return Err(Error::DegenerateProfile);
    }
    RegionPartition::new(len / 2, 0..r1_end, r1_end..r3_start, r3_start..len)
}

/// Closed-form region widths for an n-by-n multiplier CPA:
/// r1 = n/2 bits, r2 = n + 2^x bits with x = floor(log2 n) − 2, and
/// r3 takes the remainder (n/4 when n is a power of two).
pub fn closed_form_partition(n: usize) -> Result<RegionPartition> {
    if n < 4 {
        return Err(Error::InvalidWidth {
            what: "closed-form partition",
            min: 4,
            got: n,
        });
    }
    let w1 = n / 2;
    let x = (usize::BITS - 1 - n.leading_zeros()) as i32 - 2;
    let w2 = n + (1usize << x);
    let w3 = 2 * n - w1 - w2;
    RegionPartition::from_widths(2 * n, &[w1, w2, w3])
}

/// Adder kinds chosen per region, with the normalized partition they
/// apply to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecommendation {
    pub partition: RegionPartition,
    pub kinds: Vec<AdderKind>,
    /// True when everything collapsed to a single region (the caller
    /// probably wants a wider tolerance or a bigger multiplier).
    pub degenerate: bool,
}

/// Recommend one adder per region: ripple where arrivals still climb,
/// BEC-based carry-select on the plateau, BEC-based lookahead-select on
/// the falling tail. Regions of width ≤ 1 are merged into a neighbor
/// first; with two regions left the tail keeps the lookahead-select
/// kind, and a single region degenerates to plain ripple.
pub fn recommend(partition: &RegionPartition) -> Result<RegionRecommendation> {
    let mut widths = [
        partition.r1().len(),
        partition.r2().len(),
        partition.r3().len(),
    ];
    // Merge narrow regions: leftmost merges right, others merge left.
    for i in 0..3 {
        if widths[i] != 0 && widths[i] <= 1 {
            let target = (0..i).rev().find(|&j| widths[j] > 0);
            match target {
                Some(j) => widths[j] += widths[i],
                None => {
                    if let Some(j) = (i + 1..3).find(|&j| widths[j] > 0) {
                        widths[j] += widths[i];
                    } else {
                        continue; // nothing to merge into: single 1-bit span
                    }
                }
            }
            widths[i] = 0;
        }
    }
    let normalized = RegionPartition::from_widths(partition.width(), &widths)?;
    let kinds = match normalized.regions().len() {
        3 => vec![AdderKind::Rca, AdderKind::Bcsla, AdderKind::Bcla],
        2 => vec![AdderKind::Rca, AdderKind::Bcla],
        _ => vec![AdderKind::Rca],
    };
    let degenerate = kinds.len() == 1;
    Ok(RegionRecommendation {
        partition: normalized,
        kinds,
        degenerate,
    })
}

/// Signed per-boundary disagreement between a detected partition and
/// the closed-form one, in bits (detected minus closed-form).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub n: usize,
    pub b1_detected: usize,
    pub b1_closed_form: usize,
    pub b1_offset: i64,
    pub b2_detected: usize,
    pub b2_closed_form: usize,
    pub b2_offset: i64,
}

/// Compare a detected partition against the closed-form one for the
/// same profile. Reporting only: the closed-form widths model a
/// particular technology's profiles, so offsets are expected.
pub fn compare_table(
    profile: &ArrivalProfile,
    detected: &RegionPartition,
    closed_form: &RegionPartition,
) -> Result<DivergenceReport> {
    if detected.n() != closed_form.n() || detected.width() != profile.len() {
        return Err(Error::PartitionMismatch(format!(
            "widths disagree: profile {} bits, detected n={}, closed-form n={}",
            profile.len(),
            detected.n(),
            closed_form.n()
        )));
    }
    let (d1, d2) = detected.boundaries();
    let (c1, c2) = closed_form.boundaries();
    Ok(DivergenceReport {
        n: detected.n(),
        b1_detected: d1,
        b1_closed_form: c1,
        b1_offset: d1 as i64 - c1 as i64,
        b2_detected: d2,
        b2_closed_form: c2,
        b2_offset: d2 as i64 - c2 as i64,
    })
}

//! Statistical metrics for plain, cipher and decrypted images.
//!
//! All metrics operate on single 8-bit planes. Pairwise metrics require equal
//! dimensions.

use serde::Serialize;

use crate::cipher::ImageRgb;
use crate::grid::Plane;
use crate::keystream::Component;
use crate::{Error, Result};

pub fn histogram(plane: &Plane) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in plane.as_slice() {
        h[usize::from(v)] += 1;
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
    /// Offset (+1, +1).
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
    ];

    fn offset(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        }
    }
}

/// Every adjacent pair `(plane[i][j], plane[i+dr][j+dc])` in row-major order.
pub fn adjacent_pairs(plane: &Plane, dir: Direction) -> Vec<(u8, u8)> {
    let (dr, dc) = dir.offset();
    let rows = plane.rows().saturating_sub(dr);
    let cols = plane.cols().saturating_sub(dc);
    let mut pairs = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            pairs.push((plane[(i, j)], plane[(i + dr, j + dc)]));
        }
    }
    pairs
}

/// Pearson correlation of two equally long samples.
pub fn pearson(c: &[f64], d: &[f64]) -> Result<f64> {
    if c.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: (c.len(), 1),
            got: (d.len(), 1),
        });
    }
    if c.is_empty() {
        return Err(Error::UndefinedCorrelation);
    }
    let n = c.len() as f64;
    let mean_c = c.iter().sum::<f64>() / n;
    let mean_d = d.iter().sum::<f64>() / n;
    let (mut cov, mut var_c, mut var_d) = (0.0, 0.0, 0.0);
    for (&a, &b) in c.iter().zip(d) {
        let (da, db) = (a - mean_c, b - mean_d);
        cov += da * db;
        var_c += da * da;
        var_d += db * db;
    }
    if var_c == 0.0 || var_d == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((cov / (var_c * var_d).sqrt()).clamp(-1.0, 1.0))
}

/// Correlation between each pixel and its neighbour in `dir`, over the full
/// population of adjacent pairs.
pub fn adjacent_correlation(plane: &Plane, dir: Direction) -> Result<f64> {
    let (c, d): (Vec<f64>, Vec<f64>) = adjacent_pairs(plane, dir)
        .into_iter()
        .map(|(a, b)| (f64::from(a), f64::from(b)))
        .unzip();
    pearson(&c, &d)
}

/// Correlation between two planes pixel by pixel.
pub fn cross_correlation(a: &Plane, b: &Plane) -> Result<f64> {
    a.check_same_dims(b)?;
    let to_f = |p: &Plane| {
        p.as_slice()
            .iter()
            .map(|&v| f64::from(v))
            .collect::<Vec<_>>()
    };
    pearson(&to_f(a), &to_f(b))
}

/// Percentage of positions where the planes differ.
pub fn npcr(c1: &Plane, c2: &Plane) -> Result<f64> {
    c1.check_same_dims(c2)?;
    let changed = c1
        .as_slice()
        .iter()
        .zip(c2.as_slice())
        .filter(|(a, b)| a != b)
        .count();
    Ok(100.0 * changed as f64 / c1.len() as f64)
}

fn abs_diff_sum(c1: &Plane, c2: &Plane) -> Result<u64> {
    c1.check_same_dims(c2)?;
    Ok(c1
        .as_slice()
        .iter()
        .zip(c2.as_slice())
        .map(|(&a, &b)| u64::from(a.abs_diff(b)))
        .sum())
}

pub fn mae(c1: &Plane, c2: &Plane) -> Result<f64> {
    Ok(abs_diff_sum(c1, c2)? as f64 / c1.len() as f64)
}

/// Mean absolute difference as a percentage of 255.
pub fn uaci(c1: &Plane, c2: &Plane) -> Result<f64> {
    Ok(100.0 * abs_diff_sum(c1, c2)? as f64 / (255.0 * c1.len() as f64))
}

/// Shannon entropy of the byte distribution, in bits per pixel.
pub fn entropy(plane: &Plane) -> f64 {
    let n = plane.len() as f64;
    histogram(plane)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

pub fn mse(f: &Plane, g: &Plane) -> Result<f64> {
    f.check_same_dims(g)?;
    let sum: u64 = f
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    Ok(sum as f64 / f.len() as f64)
}

/// `20 log10(MAX_f / √MSE)` with `MAX_f` the maximum of the first (original)
/// plane. Identical planes give `+∞`.
pub fn psnr(f: &Plane, g: &Plane) -> Result<f64> {
    let err = mse(f, g)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = f64::from(f.as_slice().iter().copied().max().unwrap_or(0));
    Ok(20.0 * (peak / err.sqrt()).log10())
}

pub const DEFAULT_SCATTER_SEED: u64 = 0x5EED_1DC7;

/// Adjacent-pixel pairs picked for plotting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScatterSample {
    pub seed: u64,
    pub pairs: Vec<(u8, u8)>,
}

// 64-bit LCG (Knuth's MMIX constants); the high bits drive index selection.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    fn below(&mut self, bound: usize) -> usize {
        ((u128::from(self.next() >> 32) * bound as u128) >> 32) as usize
    }
}

/// `count` distinct adjacent pairs chosen by a seeded partial Fisher–Yates
/// shuffle, reported in row-major order. `count` equal to the number of pairs
/// returns the whole population.
pub fn scatter_sample(
    plane: &Plane,
    dir: Direction,
    count: usize,
    seed: u64,
) -> Result<ScatterSample> {
    let all = adjacent_pairs(plane, dir);
    if count > all.len() {
        return Err(Error::InvalidParams(format!(
            "requested {count} pairs, only {} available",
            all.len()
        )));
    }
    let mut idx: Vec<usize> = (0..all.len()).collect();
    let mut rng = Lcg(seed);
    for k in 0..count {
        let j = k + rng.below(all.len() - k);
        idx.swap(k, j);
    }
    let mut chosen = idx[..count].to_vec();
    chosen.sort_unstable();
    Ok(ScatterSample {
        seed,
        pairs: chosen.into_iter().map(|i| all[i]).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationTriple {
    /// `None` when the plane has zero variance along that direction.
    pub h: Option<f64>,
    pub v: Option<f64>,
    pub d: Option<f64>,
}

impl CorrelationTriple {
    pub fn of(plane: &Plane) -> Self {
        let r = |dir| adjacent_correlation(plane, dir).ok();
        Self {
            h: r(Direction::Horizontal),
            v: r(Direction::Vertical),
            d: r(Direction::Diagonal),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentStats {
    pub name: String,
    pub entropy: f64,
    pub correlation: CorrelationTriple,
    pub histogram: Vec<u64>,
}

impl ComponentStats {
    pub fn of(name: impl Into<String>, plane: &Plane) -> Self {
        Self {
            name: name.into(),
            entropy: entropy(plane),
            correlation: CorrelationTriple::of(plane),
            histogram: histogram(plane).to_vec(),
        }
    }
}

/// PSNR for the report: a number, or the string `"inf"` for identical planes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Psnr(pub f64);

impl Serialize for Psnr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairStats {
    pub a: String,
    pub b: String,
    pub npcr: f64,
    pub uaci: f64,
    pub mae: f64,
    pub mse: f64,
    pub psnr: Psnr,
}

impl PairStats {
    pub fn of(
        a_name: impl Into<String>,
        a: &Plane,
        b_name: impl Into<String>,
        b: &Plane,
    ) -> Result<Self> {
        Ok(Self {
            a: a_name.into(),
            b: b_name.into(),
            npcr: npcr(a, b)?,
            uaci: uaci(a, b)?,
            mae: mae(a, b)?,
            mse: mse(a, b)?,
            psnr: Psnr(psnr(a, b)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub image: String,
    pub dims: [usize; 2],
    pub components: Vec<ComponentStats>,
    pub pairs: Vec<PairStats>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serialisable")
    }

    pub fn component(&self, name: &str) -> Option<&ComponentStats> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairStats> {
        self.pairs.iter().find(|p| p.a == a && p.b == b)
    }
}

/// Per-component statistics of the original and, when given, the encrypted
/// difference planes and the decrypted image, plus original-vs-encrypted and
/// original-vs-decrypted pair metrics. Components are named `<image>.<R|G|B>`
/// with image one of `original`, `encrypted`, `decrypted`.
pub fn full_report(
    label: &str,
    original: &ImageRgb,
    encrypted: Option<&[Plane; 3]>,
    decrypted: Option<&ImageRgb>,
) -> Result<AnalysisReport> {
    let mut components = Vec::new();
    let mut pairs = Vec::new();
    for c in Component::ALL {
        let name = |img: &str| format!("{img}.{}", c.name());
        let orig = original.plane(c);
        components.push(ComponentStats::of(name("original"), orig));
        if let Some(enc) = encrypted {
            let e = &enc[c.index()];
            components.push(ComponentStats::of(name("encrypted"), e));
            pairs.push(PairStats::of(name("original"), orig, name("encrypted"), e)?);
        }
        if let Some(dec) = decrypted {
            let d = dec.plane(c);
            components.push(ComponentStats::of(name("decrypted"), d));
            pairs.push(PairStats::of(name("original"), orig, name("decrypted"), d)?);
        }
    }
    Ok(AnalysisReport {
        image: label.to_string(),
        dims: [original.height(), original.width()],
        components,
        pairs,
    })
}

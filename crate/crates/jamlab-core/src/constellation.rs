//! Square M-QAM constellations with Gray labels and decision-cell geometry.
//!
//! Points live on the odd-integer grid (±1, ±3, ...) scaled to unit average
//! symbol power. Each axis carries a binary-reflected Gray code over its
//! amplitude levels and a symbol label is the I-axis bits followed by the
//! Q-axis bits, so grid-adjacent symbols always differ in exactly one bit.
//!
//! Because the constellation is a full product grid, minimum-distance
//! decision cells are axis-aligned rectangles. That makes the two geometric
//! oracles exact: the cheapest label-flipping displacement is the
//! perpendicular to the nearest cell wall (half the minimum point distance),
//! and the cheapest displacement into a chosen cell is the per-axis clamp of
//! the source point onto that cell.

use crate::error::{Error, Result};
use crate::iq::IqSample;

/// Binary-reflected Gray code of `n`.
fn gray(n: usize) -> usize {
    n ^ (n >> 1)
}

/// Inverse of [`gray`].
fn gray_inverse(g: usize) -> usize {
    let mut n = g;
    let mut shift = 1;
    while (g >> shift) > 0 {
        n ^= g >> shift;
        shift += 1;
    }
    n
}

/// An M-QAM constellation: points, Gray labels and normalization.
#[derive(Clone, Debug)]
pub struct ConstellationSpec {
    order: usize,
    bits_per_symbol: usize,
    /// Amplitude levels per axis, ascending, already scaled.
    levels: Vec<f64>,
    points: Vec<IqSample>,
    labels: Vec<String>,
    /// Label bit patterns as integers, I bits high, Q bits low.
    label_bits: Vec<u32>,
    scale: f64,
}

impl ConstellationSpec {
    /// Build the unit-average-power square QAM constellation of the given
    /// order. Only 4 (QPSK) and 16 are supported.
    pub fn qam(order: usize) -> Result<ConstellationSpec> {
        if order != 4 && order != 16 {
            return Err(Error::UnsupportedModulation(order));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let axis_bits = bits_per_symbol / 2;
        let levels_per_axis = 1usize << axis_bits;

        // Unscaled odd-integer levels: -(L-1), ..., -1, +1, ..., +(L-1).
        let raw: Vec<f64> = (0..levels_per_axis)
            .map(|k| (2 * k as i64 - (levels_per_axis as i64 - 1)) as f64)
            .collect();
        let mean_power: f64 =
            raw.iter().map(|a| a * a).sum::<f64>() * 2.0 / levels_per_axis as f64;
        let scale = 1.0 / mean_power.sqrt();
        let levels: Vec<f64> = raw.iter().map(|a| a * scale).collect();

        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        let mut label_bits = Vec::with_capacity(order);
        for i_idx in 0..levels_per_axis {
            for q_idx in 0..levels_per_axis {
                points.push(IqSample::new(levels[i_idx], levels[q_idx]));
                let gi = gray(i_idx);
                let gq = gray(q_idx);
                let bits = ((gi << axis_bits) | gq) as u32;
                label_bits.push(bits);
                labels.push(
                    (0..bits_per_symbol)
                        .rev()
                        .map(|b| if bits >> b & 1 == 1 { '1' } else { '0' })
                        .collect(),
                );
            }
        }

        Ok(ConstellationSpec {
            order,
            bits_per_symbol,
            levels,
            points,
            labels,
            label_bits,
            scale,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[IqSample] {
        &self.points
    }

    pub fn point(&self, symbol: usize) -> IqSample {
        self.points[symbol]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, symbol: usize) -> &str {
        &self.labels[symbol]
    }

    /// Label bits as an integer, I-axis bits in the high half.
    pub fn label_bits(&self, symbol: usize) -> u32 {
        self.label_bits[symbol]
    }

    /// Grid-to-unit-power normalization factor (1/√10 for 16QAM).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Symbol index of a bit-string label, if present.
    pub fn symbol_of_label(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn levels_per_axis(&self) -> usize {
        self.levels.len()
    }

    fn axis_indices(&self, symbol: usize) -> (usize, usize) {
        let l = self.levels_per_axis();
        (symbol / l, symbol % l)
    }

    /// Map a bit stream to symbol indices, log2(M) bits per symbol.
    pub fn symbols_from_bits(&self, bits: &[u8]) -> Result<Vec<usize>> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(Error::RaggedBitLength {
                len: bits.len(),
                bits_per_symbol: self.bits_per_symbol,
            });
        }
        let axis_bits = self.bits_per_symbol / 2;
        let l = self.levels_per_axis();
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|chunk| {
                let value = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                let i_idx = gray_inverse(value >> axis_bits);
                let q_idx = gray_inverse(value & (l - 1));
                i_idx * l + q_idx
            })
            .collect())
    }

    /// Modulate a bit stream: each log2(M)-bit group becomes the point whose
    /// label equals that group.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<IqSample>> {
        Ok(self
            .symbols_from_bits(bits)?
            .into_iter()
            .map(|s| self.points[s])
            .collect())
    }

    /// Minimum-distance decision: index of the nearest constellation point,
    /// ties broken toward the lowest symbol index.
    pub fn nearest_point(&self, x: IqSample) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (idx, p) in self.points.iter().enumerate() {
            let d = (x - *p).power();
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        best
    }

    /// Minimum pairwise distance between constellation points.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (a, pa) in self.points.iter().enumerate() {
            for pb in &self.points[a + 1..] {
                best = best.min(pa.distance(*pb));
            }
        }
        best
    }

    /// All other symbols at exactly the minimum pairwise distance from
    /// `symbol` (its grid-adjacent neighbors), in index order.
    pub fn min_distance_neighbors(&self, symbol: usize) -> Vec<usize> {
        let d = self.min_distance();
        let p = self.points[symbol];
        self.points
            .iter()
            .enumerate()
            .filter(|(idx, other)| *idx != symbol && (p.distance(**other) - d).abs() < 1e-9 * d)
            .map(|(idx, _)| idx)
            .collect()
    }

    /// Minimal-norm displacement that pushes `symbol` off its own decision
    /// cell: the perpendicular to the nearest cell wall, norm
    /// `min_distance() / 2`. Ties between equidistant walls resolve toward
    /// the adjacent symbol with the lowest index.
    pub fn nearest_boundary_vector(&self, symbol: usize) -> IqSample {
        let neighbors = self.min_distance_neighbors(symbol);
        // Grid constellations always have at least one adjacent neighbor.
        let target = neighbors[0];
        (self.points[target] - self.points[symbol]) * 0.5
    }

    /// Minimal-norm displacement from `src`'s point into `dst`'s decision
    /// cell: per-axis clamp of the source point onto the destination cell.
    /// Scaling the result by any factor > 1 lands strictly inside the cell.
    pub fn targeted_vector(&self, src: usize, dst: usize) -> Result<IqSample> {
        if src == dst {
            return Err(Error::DegenerateTarget { symbol: src });
        }
        let p = self.points[src];
        let (di, dq) = self.axis_indices(dst);
        let projected = IqSample::new(
            clamp_to_interval(p.i, self.cell_interval(di)),
            clamp_to_interval(p.q, self.cell_interval(dq)),
        );
        Ok(projected - p)
    }

    /// Decision interval of one axis level: midpoints to the neighboring
    /// levels, unbounded at the grid edges. Walls sit on even multiples of
    /// the scale, levels on odd ones, so a point is never on a wall.
    fn cell_interval(&self, level_idx: usize) -> (f64, f64) {
        let lo = if level_idx == 0 {
            f64::NEG_INFINITY
        } else {
            0.5 * (self.levels[level_idx - 1] + self.levels[level_idx])
        };
        let hi = if level_idx == self.levels_per_axis() - 1 {
            f64::INFINITY
        } else {
            0.5 * (self.levels[level_idx] + self.levels[level_idx + 1])
        };
        (lo, hi)
    }
}

fn clamp_to_interval(x: f64, (lo, hi): (f64, f64)) -> f64 {
    x.max(lo).min(hi)
}

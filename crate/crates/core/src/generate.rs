//! Seeded random instance generators.
//!
//! Every generator perturbs its output by a random jitter of relative size
//! `1e-6` of the bounding-box diagonal and retries with a fresh stream until
//! the result is in general position.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::{BoundingBox, Disk, DiskInstance, GeometryError, InstanceMeta, Point};
use crate::rng::{substream, Purpose};

/// Relative jitter magnitude.
pub const JITTER: f64 = 1e-6;
/// Attempts before giving up on general position.
pub const MAX_ATTEMPTS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Centers uniform in the unit square, radii uniform in `[r_min, r_max]`.
    UniformUnit { r_min: f64, r_max: f64 },
    /// Gaussian clusters joined by chains of small disks.
    Clustered,
    /// Near-coincident disks sharing a common point.
    Stacked,
    /// A path of overlapping disks along a horizontal line.
    Corridor,
}

impl Generator {
    pub const UNIFORM: Generator = Generator::UniformUnit { r_min: 0.02, r_max: 0.08 };

    pub fn name(&self) -> &'static str {
        match self {
            Generator::UniformUnit { .. } => "uniform_unit",
            Generator::Clustered => "clustered",
            Generator::Stacked => "stacked",
            Generator::Corridor => "corridor",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform_unit" | "uniform" => Ok(Generator::UNIFORM),
            "clustered" => Ok(Generator::Clustered),
            "stacked" => Ok(Generator::Stacked),
            "corridor" => Ok(Generator::Corridor),
            other => Err(format!(
                "unknown generator `{other}` (expected uniform_unit, clustered, stacked, corridor)"
            )),
        }
    }
}

/// Generates `n` disks with `generator` under `seed`.
pub fn generate(generator: Generator, n: usize, seed: u64) -> Result<DiskInstance, GeometryError> {
    if let Generator::UniformUnit { r_min, r_max } = generator {
        if !(r_min > 0.0 && r_min <= r_max) {
            return Err(GeometryError::NonPositiveRadius(r_min));
        }
    }
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(seed, Purpose::Generator, attempt, 0);
        let raw = match generator {
            Generator::UniformUnit { r_min, r_max } => uniform(n, r_min, r_max, &mut rng),
            Generator::Clustered => clustered(n, &mut rng),
            Generator::Stacked => stacked(n, &mut rng),
            Generator::Corridor => corridor(n),
        };
        let instance = DiskInstance::from_circles(jitter(raw, &mut substream(seed, Purpose::Jitter, attempt, 0)))?
            .with_meta(InstanceMeta { generator: Some(generator.name().to_string()), seed: Some(seed) });
        match instance.ensure_general_position() {
            Ok(()) => return Ok(instance),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn jitter(raw: Vec<(f64, f64, f64)>, rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    let disks: Vec<Disk> = raw
        .iter()
        .enumerate()
        .filter_map(|(id, &(x, y, r))| Disk::new(Point::new(x, y), r, id).ok())
        .collect();
    let amp = JITTER * BoundingBox::of_disks(&disks).map_or(1.0, |b| b.diagonal().max(f64::MIN_POSITIVE));
    raw.into_iter()
        .map(|(x, y, r)| {
            let dx = rng.gen_range(-amp..=amp);
            let dy = rng.gen_range(-amp..=amp);
            let dr = rng.gen_range(-amp..=amp);
            (x + dx, y + dy, (r + dr).max(0.5 * r))
        })
        .collect()
}

fn uniform(n: usize, r_min: f64, r_max: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen_range(r_min..=r_max))).collect()
}

fn stacked(n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    let spread = Normal::new(0.0, 0.01).expect("valid normal");
    (0..n)
        .map(|_| {
            let x = 0.5 + spread.sample(rng);
            let y = 0.5 + spread.sample(rng);
            (x, y, 0.3 + rng.gen_range(-0.01..=0.01))
        })
        .collect()
}

fn corridor(n: usize) -> Vec<(f64, f64, f64)> {
    let s = 1.0 / n.max(1) as f64;
    (0..n).map(|i| ((i as f64 + 0.5) * s, 0.5, 0.6 * s)).collect()
}

fn clustered(n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    const BRIDGE_SPACING: f64 = 0.03;
    const BRIDGE_RADIUS: f64 = 0.02;
    let k = ((n as f64).sqrt() / 2.0).round().max(1.0) as usize;
    let centers: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(0.15..0.85), rng.gen_range(0.15..0.85))).collect();
    let mut out = Vec::with_capacity(n);

    let mut budget = if k > 1 { n / 5 } else { 0 };
    'links: for w in centers.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let len = (x1 - x0).hypot(y1 - y0);
        let steps = (len / BRIDGE_SPACING).ceil() as usize;
        for s in 1..steps {
            if budget == 0 {
                break 'links;
            }
            let t = s as f64 / steps as f64;
            out.push((x0 + t * (x1 - x0), y0 + t * (y1 - y0), BRIDGE_RADIUS));
            budget -= 1;
        }
    }

    let spread = Normal::new(0.0, 0.04).expect("valid normal");
    let mut c = 0;
    while out.len() < n {
        let (cx, cy) = centers[c % k];
        out.push((cx + spread.sample(rng), cy + spread.sample(rng), rng.gen_range(0.02..=0.05)));
        c += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::depth_at;

    #[test]
    fn uniform_is_deterministic_and_valid() {
        let a = generate(Generator::UNIFORM, 100, 4).unwrap();
        let b = generate(Generator::UNIFORM, 100, 4).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert!(a.validate().is_ok());
        assert!(a.disks().iter().all(|d| (0.0199..=0.0801).contains(&d.radius)));
        assert_ne!(a.to_text(), generate(Generator::UNIFORM, 100, 5).unwrap().to_text());
    }

    #[test]
    fn stacked_has_full_depth_point() {
        let inst = generate(Generator::Stacked, 50, 1).unwrap();
        assert_eq!(depth_at(Point::new(0.5, 0.5), inst.disks()), 50);
    }

    #[test]
    fn corridor_is_a_path() {
        let inst = generate(Generator::Corridor, 12, 0).unwrap();
        let g = crate::graph::intersection_graph(&inst);
        assert_eq!(g.edges(), (0..11).map(|i| (i, i + 1)).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn clustered_and_single_disk() {
        let inst = generate(Generator::Clustered, 200, 8).unwrap();
        assert_eq!(inst.len(), 200);
        assert_eq!(generate(Generator::UNIFORM, 1, 0).unwrap().len(), 1);
        assert_eq!("stacked".parse::<Generator>().unwrap(), Generator::Stacked);
        assert!("bogus".parse::<Generator>().is_err());
    }
}

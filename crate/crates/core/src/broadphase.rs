//! Candidate-pair and nearby-boundary queries over a disk list.

use crate::geometry::{BoundingBox, Disk, Point};

/// Index pairs `(i, j)`, `i < j`, of disks whose centers are within
/// `ra + rb + margin`. Sweep over x-extents.
pub(crate) fn overlapping_pairs(disks: &[Disk], margin: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..disks.len()).collect();
    order.sort_by(|&a, &b| {
        let xa = disks[a].center.x - disks[a].radius;
        let xb = disks[b].center.x - disks[b].radius;
        xa.total_cmp(&xb).then(a.cmp(&b))
    });
    let mut pairs = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let a = &disks[i];
        let xmax = a.center.x + a.radius + margin;
        for &j in &order[pos + 1..] {
            let b = &disks[j];
            if b.center.x - b.radius > xmax {
                break;
            }
            if (a.center.y - b.center.y).abs() > a.radius + b.radius + margin {
                continue;
            }
            let reach = a.radius + b.radius + margin;
            if a.center.dist_sq(b.center) <= reach * reach {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Target number of boundaries per grid cell.
const CELL_OCCUPANCY: usize = 8;
/// Largest grid side.
const MAX_SIDE: usize = 2048;

/// Uniform grid over the instance; each cell lists the circles whose
/// boundary passes within `margin` of the cell. The cell size shrinks until
/// the busiest cell holds about `CELL_OCCUPANCY` boundaries.
pub(crate) struct BoundaryGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    /// Cell `i` owns `entries[offsets[i]..offsets[i + 1]]`.
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

impl BoundaryGrid {
    pub(crate) fn new(disks: &[Disk], margin: f64) -> Self {
        let Some(bbox) = BoundingBox::of_disks(disks) else {
            return Self { origin: Point::default(), cell: 1.0, nx: 0, ny: 0, offsets: vec![0], entries: Vec::new() };
        };
        let extent = bbox.extent().max(f64::MIN_POSITIVE);
        let side = ((disks.len() as f64).sqrt().ceil() as usize).clamp(4, 256);
        let coarse = Self::with_cell(disks, margin, bbox, extent / side as f64);
        let busiest = (0..coarse.nx * coarse.ny).map(|i| coarse.offsets[i + 1] - coarse.offsets[i]).max().unwrap_or(0);
        if busiest <= CELL_OCCUPANCY {
            return coarse;
        }
        let fine = (coarse.cell * CELL_OCCUPANCY as f64 / busiest as f64).max(extent / MAX_SIDE as f64);
        Self::with_cell(disks, margin, bbox, fine)
    }

    fn with_cell(disks: &[Disk], margin: f64, bbox: BoundingBox, cell: f64) -> Self {
        let origin = bbox.min.offset(-cell, -cell);
        let nx = (bbox.width() / cell).ceil() as usize + 3;
        let ny = (bbox.height() / cell).ceil() as usize + 3;
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (idx, d) in disks.iter().enumerate() {
            Self::ring_cells(origin, cell, nx, ny, d, margin, |c| pairs.push((c as u32, idx as u32)));
        }
        pairs.sort_unstable();
        let mut offsets = vec![0usize; nx * ny + 1];
        for &(c, _) in &pairs {
            offsets[c as usize + 1] += 1;
        }
        for i in 0..nx * ny {
            offsets[i + 1] += offsets[i];
        }
        let entries = pairs.into_iter().map(|(_, k)| k).collect();
        Self { origin, cell, nx, ny, offsets, entries }
    }

    /// Calls `emit` once for every cell the boundary of `d` passes within
    /// `margin` of, walking row by row along the ring.
    fn ring_cells(origin: Point, cell: f64, nx: usize, ny: usize, d: &Disk, margin: f64, mut emit: impl FnMut(usize)) {
        let outer = d.radius + margin;
        let inner = (d.radius - margin).max(0.0);
        let (_, y0) = Self::index_of(origin, cell, d.center.offset(0.0, -outer));
        let (_, y1) = Self::index_of(origin, cell, d.center.offset(0.0, outer));
        let col = |x: f64| (((x - origin.x) / cell).floor().max(0.0) as usize).min(nx - 1);
        let mut ranges: Vec<(usize, usize)> = Vec::with_capacity(2);
        for gy in y0..=y1.min(ny - 1) {
            let lo = origin.y + gy as f64 * cell;
            let hi = lo + cell;
            // Offsets of the band from the center row: nearest and farthest.
            let near = if lo <= d.center.y && d.center.y <= hi { 0.0 } else { (lo - d.center.y).abs().min((hi - d.center.y).abs()) };
            let far = (lo - d.center.y).abs().max((hi - d.center.y).abs());
            if near > outer {
                continue;
            }
            let wide = (outer * outer - near * near).max(0.0).sqrt();
            let narrow = if far >= inner { 0.0 } else { (inner * inner - far * far).sqrt() };
            ranges.clear();
            let (l0, l1) = (col(d.center.x - wide), col(d.center.x - narrow));
            let (r0, r1) = (col(d.center.x + narrow), col(d.center.x + wide));
            if l1 + 1 >= r0 {
                ranges.push((l0, r1));
            } else {
                ranges.push((l0, l1));
                ranges.push((r0, r1));
            }
            for &(a, b) in &ranges {
                for gx in a..=b {
                    let corner = Point::new(origin.x + gx as f64 * cell, lo);
                    let (dn, df) = rect_distances(d.center, corner, cell);
                    if dn <= outer && df >= d.radius - margin {
                        emit(gy * nx + gx);
                    }
                }
            }
        }
    }

    fn index_of(origin: Point, cell: f64, p: Point) -> (usize, usize) {
        let gx = ((p.x - origin.x) / cell).floor().max(0.0) as usize;
        let gy = ((p.y - origin.y) / cell).floor().max(0.0) as usize;
        (gx, gy)
    }

    pub(crate) fn cell_size(&self) -> f64 {
        self.cell
    }

    fn cell_entries(&self, i: usize) -> &[u32] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Circles whose boundary passes within `margin` of the cell holding `p`.
    pub(crate) fn near(&self, p: Point) -> &[u32] {
        let (gx, gy) = Self::index_of(self.origin, self.cell, p);
        if gx >= self.nx || gy >= self.ny || p.x < self.origin.x || p.y < self.origin.y {
            return &[];
        }
        self.cell_entries(gy * self.nx + gx)
    }

    /// Lower bound on the distance from `p` to any boundary other than
    /// `skip`, capped at one cell width.
    pub(crate) fn clearance(&self, disks: &[Disk], p: Point, skip: usize) -> f64 {
        let (gx, gy) = Self::index_of(self.origin, self.cell, p);
        let mut best = self.cell;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (x, y) = (gx as i64 + dx, gy as i64 + dy);
                if x < 0 || y < 0 || x as usize >= self.nx || y as usize >= self.ny {
                    continue;
                }
                for &k in self.cell_entries(y as usize * self.nx + x as usize) {
                    let k = k as usize;
                    if k != skip {
                        best = best.min(disks[k].boundary_distance(p));
                    }
                }
            }
        }
        best
    }
}

/// Nearest and farthest distance from `c` to the axis-aligned square `[lo, lo + side]^2`.
fn rect_distances(c: Point, lo: Point, side: f64) -> (f64, f64) {
    let hi = lo.offset(side, side);
    let nx = c.x.clamp(lo.x, hi.x) - c.x;
    let ny = c.y.clamp(lo.y, hi.y) - c.y;
    let fx = (c.x - lo.x).abs().max((c.x - hi.x).abs());
    let fy = (c.y - lo.y).abs().max((c.y - hi.y).abs());
    (nx.hypot(ny), fx.hypot(fy))
}

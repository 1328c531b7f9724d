//! Rectilinear Cartesian grids, node enumeration and classification against
//! the box domain, its interaction layer and the enlarged support domain.

use serde::Serialize;

use crate::scalar::Real;

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("spacing must be positive in every dimension")]
    NonPositiveSpacing,
    #[error("grid anisotropy h_max/h_min = {ratio} exceeds 16 (quasi-uniformity violated)")]
    AnisotropyTooLarge { ratio: f64 },
    #[error("domain box must satisfy box_lo < box_hi componentwise")]
    DegenerateBox,
    #[error("horizon delta must be positive")]
    NonPositiveDelta,
    #[error("dimension mismatch: domain has d={domain}, spacing has d={spacing}")]
    DimensionMismatch { domain: usize, spacing: usize },
}

/// Axis-aligned open box with its nonlocal horizon.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct DomainSpec<T> {
    pub box_lo: Vec<T>,
    pub box_hi: Vec<T>,
    pub delta: T,
}

impl<T: Real> DomainSpec<T> {
    pub fn new(box_lo: Vec<T>, box_hi: Vec<T>, delta: T) -> Result<Self, GridError> {
        if box_lo.len() != box_hi.len() || box_lo.is_empty() {
            return Err(GridError::DegenerateBox);
        }
        if box_lo.iter().zip(&box_hi).any(|(&l, &u)| !(l < u)) {
            return Err(GridError::DegenerateBox);
        }
        if !(delta > T::zero()) {
            return Err(GridError::NonPositiveDelta);
        }
        Ok(Self {
            box_lo,
            box_hi,
            delta,
        })
    }

    /// Unit square/cube (0,1)^d.
    pub fn unit_box(d: usize, delta: T) -> Self {
        Self::new(vec![T::zero(); d], vec![T::one(); d], delta).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.box_lo.len()
    }

    /// Per-dimension outward distance from `x` to the closed box.
    fn outward(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.box_lo.iter().zip(&self.box_hi))
            .map(|(&xi, (&lo, &hi))| (lo - xi).max(xi - hi).max(T::zero()))
            .collect()
    }

    /// Euclidean distance from `x` to the closed box.
    pub fn distance(&self, x: &[T]) -> T {
        crate::scalar::norm2(&self.outward(x))
    }

    /// Strict open-set membership.
    pub fn contains(&self, x: &[T]) -> bool {
        x.iter()
            .zip(self.box_lo.iter().zip(&self.box_hi))
            .all(|(&xi, (&lo, &hi))| lo < xi && xi < hi)
    }
}

/// Rectilinear Cartesian grid covering the domain enlarged by
/// `delta + 2 h_max` in every direction.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct GridSpec<T> {
    pub h: Vec<T>,
    pub h_max: T,
    pub hat_h: Vec<T>,
    pub index_lo: Vec<i64>,
    pub index_hi: Vec<i64>,
}

impl<T: Real> GridSpec<T> {
    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h_min(&self) -> T {
        self.h.iter().copied().fold(self.h_max, T::min)
    }

    /// Coordinates of the node with multi-index `k` (x_k = k (.) h).
    pub fn node(&self, k: &[i64]) -> Vec<T> {
        k.iter()
            .zip(&self.h)
            .map(|(&kj, &hj)| T::of_i64(kj) * hj)
            .collect()
    }

    /// Number of enumerated nodes.
    pub fn n_nodes(&self) -> usize {
        self.index_lo
            .iter()
            .zip(&self.index_hi)
            .map(|(&lo, &hi)| (hi - lo + 1) as usize)
            .product()
    }

    /// Flat (lexicographic) index of a multi-index, or `None` outside the
    /// enumerated box.
    pub fn flat(&self, k: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for j in 0..self.dim() {
            if k[j] < self.index_lo[j] || k[j] > self.index_hi[j] {
                return None;
            }
            let extent = (self.index_hi[j] - self.index_lo[j] + 1) as usize;
            idx = idx * extent + (k[j] - self.index_lo[j]) as usize;
        }
        Some(idx)
    }

    /// Iterate multi-indices in lexicographic order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.index_lo.clone(), self.index_hi.clone())
    }
}

/// Odometer iterator over a box of multi-indices, lexicographic order.
pub struct MultiIndexIter {
    lo: Vec<i64>,
    hi: Vec<i64>,
    cur: Vec<i64>,
    done: bool,
}

impl MultiIndexIter {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let done = lo.iter().zip(&hi).any(|(&l, &h)| l > h);
        let cur = lo.clone();
        Self { lo, hi, cur, done }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        for j in (0..self.cur.len()).rev() {
            if self.cur[j] < self.hi[j] {
                self.cur[j] += 1;
                for jj in j + 1..self.cur.len() {
                    self.cur[jj] = self.lo[jj];
                }
                return Some(out);
            }
        }
        self.done = true;
        Some(out)
    }
}

/// Classification of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeRole {
    /// Interior node x_k in Omega; carries an unknown coefficient.
    Unknown(usize),
    /// Node outside Omega whose basis support reaches into the interaction
    /// zone; carries Dirichlet data.
    Constrained(usize),
    /// Node too far out to contribute.
    Exterior,
}

/// Ordered node lists (lexicographic in k) plus a dense role lookup.
#[derive(Debug, Clone)]
pub struct NodePartition {
    pub unknown: Vec<Vec<i64>>,
    pub constrained: Vec<Vec<i64>>,
    pub roles: Vec<NodeRole>,
}

impl NodePartition {
    pub fn role(&self, grid_flat: usize) -> NodeRole {
        self.roles[grid_flat]
    }

    pub fn n_unknown(&self) -> usize {
        self.unknown.len()
    }
}

/// Build the grid for a domain, enlarging the index ranges by
/// `delta + 2 h_max` so every contributing basis function has a node.
pub fn build_grid<T: Real>(domain: &DomainSpec<T>, h: &[T]) -> Result<GridSpec<T>, GridError> {
    if h.len() != domain.dim() {
        return Err(GridError::DimensionMismatch {
            domain: domain.dim(),
            spacing: h.len(),
        });
    }
    if h.iter().any(|&hj| !(hj > T::zero())) {
        return Err(GridError::NonPositiveSpacing);
    }
    let h_max = h.iter().copied().fold(T::zero(), T::max);
    let h_min = h.iter().copied().fold(h_max, T::min);
    let ratio = h_max / h_min;
    if ratio > T::of(16.0) {
        return Err(GridError::AnisotropyTooLarge {
            ratio: ratio.to_f64().unwrap_or(f64::NAN),
        });
    }
    let margin = domain.delta + T::of(2.0) * h_max;
    // small nudge so box faces landing exactly on grid lines stay covered
    let fuzz = T::of(1e-12);
    let mut index_lo = Vec::with_capacity(h.len());
    let mut index_hi = Vec::with_capacity(h.len());
    for j in 0..h.len() {
        let lo = ((domain.box_lo[j] - margin) / h[j] - fuzz).floor();
        let hi = ((domain.box_hi[j] + margin) / h[j] + fuzz).ceil();
        index_lo.push(lo.to_i64().expect("index range fits i64"));
        index_hi.push(hi.to_i64().expect("index range fits i64"));
    }
    Ok(GridSpec {
        h: h.to_vec(),
        h_max,
        hat_h: h.iter().map(|&hj| hj / h_max).collect(),
        index_lo,
        index_hi,
    })
}

/// Classify every enumerated node. Deterministic: lexicographic order in k,
/// strict open-set membership for the unknowns.
pub fn classify_nodes<T: Real>(grid: &GridSpec<T>, domain: &DomainSpec<T>) -> NodePartition {
    let two = T::of(2.0);
    let mut unknown = Vec::new();
    let mut constrained = Vec::new();
    let mut roles = vec![NodeRole::Exterior; grid.n_nodes()];
    let node_reach = domain.delta + two * grid.h_max;
    for k in grid.indices() {
        let x = grid.node(&k);
        let flat = grid.flat(&k).expect("iterated index is in range");
        if domain.contains(&x) {
            roles[flat] = NodeRole::Unknown(unknown.len());
            unknown.push(k);
            continue;
        }
        // distance from the basis support box (x_k +- 2h_j) to Omega
        let support_dist = {
            let dx = x
                .iter()
                .zip(domain.box_lo.iter().zip(&domain.box_hi))
                .map(|(&xi, (&lo, &hi))| (lo - xi).max(xi - hi).max(T::zero()));
            dx.zip(&grid.h)
                .map(|(d, &hj)| (d - two * hj).max(T::zero()))
                .map(|r| r * r)
                .sum::<T>()
                .sqrt()
        };
        let node_dist = domain.distance(&x);
        if support_dist <= domain.delta || node_dist <= node_reach {
            roles[flat] = NodeRole::Constrained(constrained.len());
            constrained.push(k);
        }
    }
    NodePartition {
        unknown,
        constrained,
        roles,
    }
}

/// Restrict a scalar field to a node list, in the list's order (r^h).
pub fn restrict<T: Real>(
    grid: &GridSpec<T>,
    nodes: &[Vec<i64>],
    f: impl Fn(&[T]) -> T,
) -> Vec<T> {
    nodes.iter().map(|k| f(&grid.node(k))).collect()
}

/// Debug export: node coordinates and classification as JSON.
pub fn partition_to_json<T: Real>(
    grid: &GridSpec<T>,
    partition: &NodePartition,
) -> serde_json::Value {
    let coords = |ks: &[Vec<i64>]| -> Vec<Vec<f64>> {
        ks.iter()
            .map(|k| {
                grid.node(k)
                    .iter()
                    .map(|x| x.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    };
    serde_json::json!({
        "h": grid.h.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>(),
        "h_max": grid.h_max.to_f64(),
        "unknown_indices": partition.unknown,
        "unknown_coords": coords(&partition.unknown),
        "constrained_indices": partition.constrained,
        "constrained_coords": coords(&partition.constrained),
        "empty_unknown": partition.unknown.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit2(delta: f64) -> DomainSpec<f64> {
        DomainSpec::unit_box(2, delta)
    }

    #[test]
    fn unknown_count_matches_enumeration() {
        // Omega=(0,1)^2, h=(1/4,1/8), delta=1/8 -> 3 x 7 interior nodes
        let dom = unit2(0.125);
        let grid = build_grid(&dom, &[0.25, 0.125]).unwrap();
        let part = classify_nodes(&grid, &dom);
        assert_eq!(part.unknown.len(), 21);
    }

    #[test]
    fn single_interior_node_in_1d() {
        let dom = DomainSpec::unit_box(1, 0.25);
        let grid = build_grid(&dom, &[0.5]).unwrap();
        let part = classify_nodes(&grid, &dom);
        assert_eq!(part.unknown, vec![vec![1]]);
        assert_eq!(grid.node(&[1]), vec![0.5]);
    }

    #[test]
    fn anisotropic_setup_reports_hat_h() {
        let dom = unit2(0.125);
        let grid = build_grid(&dom, &[0.125, 0.0625]).unwrap();
        assert_eq!(grid.h_max, 0.125);
        assert_eq!(grid.hat_h, vec![1.0, 0.5]);
    }

    #[test]
    fn rejects_bad_spacings() {
        let dom = unit2(0.125);
        assert!(matches!(
            build_grid(&dom, &[0.25, 0.25 / 17.0]),
            Err(GridError::AnisotropyTooLarge { .. })
        ));
        assert!(matches!(
            build_grid(&dom, &[0.25, 0.0]),
            Err(GridError::NonPositiveSpacing)
        ));
    }

    #[test]
    fn boundary_node_is_constrained() {
        let dom = unit2(0.25);
        let grid = build_grid(&dom, &[0.125, 0.125]).unwrap();
        let part = classify_nodes(&grid, &dom);
        // (0, 1/2) lies on the boundary of the open box
        let flat = grid.flat(&[0, 4]).unwrap();
        assert!(matches!(part.role(flat), NodeRole::Constrained(_)));
        // (1/2, 1/2) is interior
        let flat = grid.flat(&[4, 4]).unwrap();
        assert!(matches!(part.role(flat), NodeRole::Unknown(_)));
        // (-1/8, 1/2) is within delta + 2h of Omega
        let flat = grid.flat(&[-1, 4]).unwrap();
        assert!(matches!(part.role(flat), NodeRole::Constrained(_)));
    }

    #[test]
    fn partition_is_disjoint_and_covers_near_zone() {
        let dom = unit2(0.125);
        let grid = build_grid(&dom, &[0.25, 0.125]).unwrap();
        let part = classify_nodes(&grid, &dom);
        let reach = dom.delta + 2.0 * grid.h_max;
        for k in grid.indices() {
            let x = grid.node(&k);
            let flat = grid.flat(&k).unwrap();
            let near = dom.distance(&x) <= reach;
            match part.role(flat) {
                NodeRole::Unknown(_) | NodeRole::Constrained(_) => {}
                NodeRole::Exterior => assert!(!near, "near node {k:?} left unclassified"),
            }
        }
    }

    #[test]
    fn restrict_follows_ordering() {
        let dom = unit2(0.125);
        let grid = build_grid(&dom, &[0.25, 0.25]).unwrap();
        let part = classify_nodes(&grid, &dom);
        let vals = restrict(&grid, &part.unknown, |_| 1.0);
        assert!(vals.iter().all(|&v| v == 1.0));
        let xs = restrict(&grid, &part.unknown, |x| x[0]);
        // lexicographic: x1 = 0.25 repeated over the x2-line, then 0.5, 0.75
        assert_eq!(&xs[..3], &[0.25, 0.25, 0.25]);
        assert_eq!(&xs[3..6], &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn restrict_manufactured_solution_value() {
        let dom = unit2(0.125);
        let grid = build_grid(&dom, &[0.5, 0.5]).unwrap();
        let u = |x: &[f64]| {
            x[0] * x[0] * (1.0 - x[0] * x[0]) + x[1] * x[1] * (1.0 - x[1] * x[1])
        };
        let vals = restrict(&grid, &[vec![1, 1]], u);
        assert!((vals[0] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn node_index_roundtrip_is_exact() {
        let dom = unit2(0.1);
        let grid = build_grid(&dom, &[0.125, 0.0625]).unwrap();
        for k in grid.indices() {
            let x = grid.node(&k);
            assert_eq!(x[0], k[0] as f64 * 0.125);
            assert_eq!(x[1], k[1] as f64 * 0.0625);
        }
    }

    #[test]
    fn classification_is_deterministic() {
        let dom = unit2(0.125);
        let grid = build_grid(&dom, &[0.25, 0.125]).unwrap();
        let a = classify_nodes(&grid, &dom);
        let b = classify_nodes(&grid, &dom);
        assert_eq!(a.unknown, b.unknown);
        assert_eq!(a.constrained, b.constrained);
    }
}

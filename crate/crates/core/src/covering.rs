//! Packing, covering and decorrelation numbers of the columns {ψ_j} or the
//! signed set {±ψ_j} under ‖·‖_n. All distances come from the Gram matrix.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::num::{abs, powf, sqrt};

/// Distances within this relative slack of a radius count as inside it.
const RADIUS_SLACK: f64 = 1e-12;

/// A point σψ_j of the (possibly signed) column set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub column: usize,
    pub negative: bool,
}

impl Point {
    fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }
}

/// Points in index order: ψ_1, −ψ_1, ψ_2, −ψ_2, … with signs, else ψ_1, ψ_2, ….
pub fn points(p: usize, include_signs: bool) -> Vec<Point> {
    let mut out = Vec::with_capacity(if include_signs { 2 * p } else { p });
    for column in 0..p {
        out.push(Point { column, negative: false });
        if include_signs {
            out.push(Point { column, negative: true });
        }
    }
    out
}

/// ρ(ψ_j, ψ_k) = ψ_jᵀψ_k/n.
pub fn corr(design: &DesignMatrix, j: usize, k: usize) -> f64 {
    design.corr(j, k)
}

/// ‖σψ_j − τψ_k‖_n².
pub fn squared_distance(design: &DesignMatrix, a: Point, b: Point) -> f64 {
    let g = design.gram();
    let v = g.get(a.column, a.column) + g.get(b.column, b.column) - 2.0 * a.sign() * b.sign() * g.get(a.column, b.column);
    v.max(0.0)
}

fn within(d2: f64, u: f64) -> bool {
    d2 <= u * u * (1.0 + RADIUS_SLACK) + RADIUS_SLACK * RADIUS_SLACK
}

/// Farthest-point order and the covering radius after each prefix.
///
/// `radii[k]` is the largest distance from any point to the first k+1
/// centers (zero once every point is a center).
fn farthest_point_order(design: &DesignMatrix, pts: &[Point]) -> (Vec<usize>, Vec<f64>) {
    let m = pts.len();
    let mut order = Vec::with_capacity(m);
    let mut radii = Vec::with_capacity(m);
    if m == 0 {
        return (order, radii);
    }
    let mut mind = vec![f64::INFINITY; m];
    let mut chosen = vec![false; m];
    let mut next = 0;
    loop {
        order.push(next);
        chosen[next] = true;
        for i in 0..m {
            let d2 = squared_distance(design, pts[next], pts[i]);
            if d2 < mind[i] {
                mind[i] = d2;
            }
        }
        let mut far = None;
        let mut far_d = -1.0;
        for i in 0..m {
            if !chosen[i] && mind[i] > far_d {
                far_d = mind[i];
                far = Some(i);
            }
        }
        match far {
            Some(i) if far_d > 0.0 => {
                radii.push(sqrt(far_d));
                next = i;
            }
            _ => {
                radii.push(0.0);
                break;
            }
        }
    }
    (order, radii)
}

/// Greedy maximal u-packing: starting from the first point, repeatedly adds
/// the point farthest from the chosen set (lowest index on ties) while that
/// distance is at least u. The result is also a u-covering.
pub fn greedy_packing(design: &DesignMatrix, u: f64, include_signs: bool) -> Result<Vec<Point>> {
    check_radius(u)?;
    let pts = points(design.p(), include_signs);
    let (order, radii) = farthest_point_order(design, &pts);
    Ok(packing_prefix(&order, &radii, u).iter().map(|&i| pts[i]).collect())
}

fn packing_prefix<'a>(order: &'a [usize], radii: &[f64], u: f64) -> &'a [usize] {
    // radii[k] is the distance of order[k+1] to the first k+1 centers
    let k = radii.iter().position(|&r| r < u * (1.0 - RADIUS_SLACK) || r == 0.0).unwrap_or(radii.len());
    &order[..(k + 1).min(order.len())]
}

fn check_radius(u: f64) -> Result<()> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Parameter(format!("radius must be positive and finite, got {u}")));
    }
    Ok(())
}

/// Minimum number of centers, drawn from the point set, whose u-balls cover it.
pub fn covering_exact(design: &DesignMatrix, u: f64, include_signs: bool, max_points: usize) -> Result<usize> {
    check_radius(u)?;
    let pts = points(design.p(), include_signs);
    let limit = max_points.min(64);
    if pts.len() > limit {
        return Err(Error::Capacity { what: "exact covering points", limit, got: pts.len() });
    }
    let m = pts.len();
    let cover: Vec<u64> = (0..m)
        .map(|c| (0..m).filter(|&i| within(squared_distance(design, pts[c], pts[i]), u)).fold(0u64, |acc, i| acc | 1 << i))
        .collect();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut best = greedy_set_cover(&cover, full);
    let max_cover = cover.iter().map(|c| c.count_ones()).max().unwrap_or(1).max(1);
    set_cover_bb(&cover, full, 0, 0, max_cover, &mut best);
    Ok(best)
}

fn greedy_set_cover(cover: &[u64], full: u64) -> usize {
    let mut covered = 0u64;
    let mut count = 0;
    while covered != full {
        let best = cover.iter().max_by_key(|c| (*c & !covered).count_ones()).copied().unwrap_or(0);
        covered |= best;
        count += 1;
    }
    count
}

fn set_cover_bb(cover: &[u64], full: u64, covered: u64, used: usize, max_cover: u32, best: &mut usize) {
    if covered == full {
        *best = (*best).min(used);
        return;
    }
    let left = (full & !covered).count_ones();
    let lower = used + left.div_ceil(max_cover) as usize;
    if lower >= *best {
        return;
    }
    // branch on the centers able to cover the first uncovered point
    let e = (full & !covered).trailing_zeros() as usize;
    let mut cands: Vec<u64> = cover.iter().filter(|c| *c & (1 << e) != 0).copied().collect();
    cands.sort_by_key(|c| core::cmp::Reverse((c & !covered).count_ones()));
    for c in cands {
        set_cover_bb(cover, full, covered | c, used + 1, max_cover, best);
    }
}

/// ρ-decorrelation number M(ρ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decorrelation {
    pub rho: f64,
    pub size: usize,
    /// False when the greedy fallback was used; `size` is then a lower bound.
    pub exact: bool,
}

/// Largest subset of {±ψ_j} with pairwise |ρ| < rho. Requires normalized columns,
/// so that a column and its negative always conflict.
pub fn decorrelation(design: &DesignMatrix, rho: f64, exact_limit: usize) -> Result<Decorrelation> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Parameter(format!("rho must lie in (0, 1], got {rho}")));
    }
    if !design.is_normalized(1e-9) {
        return Err(Error::Domain("decorrelation numbers require normalized columns".into()));
    }
    let p = design.p();
    let g = design.gram();
    let adjacent = |j: usize, k: usize| j != k && abs(g.get(j, k)) >= rho;
    if p <= exact_limit.min(64) {
        let adj: Vec<u64> = (0..p).map(|j| (0..p).filter(|&k| adjacent(j, k)).fold(0u64, |a, k| a | 1 << k)).collect();
        let all = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
        let mut best = greedy_independent(&adj, all);
        max_independent(&adj, all, 0, &mut best);
        Ok(Decorrelation { rho, size: best, exact: true })
    } else {
        let adj: Vec<Vec<usize>> = (0..p).map(|j| (0..p).filter(|&k| adjacent(j, k)).collect()).collect();
        let mut alive = vec![true; p];
        let mut size = 0;
        loop {
            let pick = (0..p).filter(|&j| alive[j]).min_by_key(|&j| adj[j].iter().filter(|&&k| alive[k]).count());
            let Some(j) = pick else { break };
            size += 1;
            alive[j] = false;
            for &k in &adj[j] {
                alive[k] = false;
            }
        }
        Ok(Decorrelation { rho, size, exact: false })
    }
}

fn greedy_independent(adj: &[u64], mut cand: u64) -> usize {
    let mut size = 0;
    while cand != 0 {
        let mut pick = cand.trailing_zeros() as usize;
        let mut deg = u32::MAX;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (adj[v] & cand).count_ones();
            if d < deg {
                deg = d;
                pick = v;
            }
        }
        size += 1;
        cand &= !(adj[pick] | 1 << pick);
    }
    size
}

fn max_independent(adj: &[u64], cand: u64, chosen: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(chosen);
        return;
    }
    if chosen + cand.count_ones() as usize <= *best {
        return;
    }
    let mut rest = cand;
    let mut pivot = cand.trailing_zeros() as usize;
    let mut deg = 0;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & cand).count_ones();
        // a vertex of degree ≤ 1 is always in some maximum set
        if d <= 1 {
            max_independent(adj, cand & !(adj[v] | 1 << v), chosen + 1, best);
            return;
        }
        if d > deg {
            deg = d;
            pivot = v;
        }
    }
    max_independent(adj, cand & !(adj[pivot] | 1 << pivot), chosen + 1, best);
    max_independent(adj, cand & !(1 << pivot), chosen, best);
}

/// u ∈ {2^{−k/2} : k = 0..10}.
pub fn default_radii() -> Vec<f64> {
    (0..=10).map(|k| powf(2.0, -(k as f64) / 2.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringProfile {
    /// Ascending radii.
    pub radii: Vec<f64>,
    pub packing_sizes: Vec<usize>,
    pub covering_upper: Vec<usize>,
    pub covering_exact: Option<Vec<usize>>,
    pub decorrelation: Vec<Decorrelation>,
    pub include_signs: bool,
    /// Size of the point set, a covering number at every radius.
    pub points: usize,
}

impl CoveringProfile {
    /// Best available covering number at the i-th radius.
    pub fn covering_at(&self, i: usize) -> usize {
        match &self.covering_exact {
            Some(ex) => ex[i].min(self.covering_upper[i]),
            None => self.covering_upper[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub radii: Vec<f64>,
    pub include_signs: bool,
    /// Exact coverings are computed when the point count is at most this.
    pub exact_max_points: usize,
    pub rhos: Vec<f64>,
    pub decorrelation_exact_limit: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            radii: default_radii(),
            include_signs: true,
            exact_max_points: 12,
            rhos: vec![0.25, 0.5, 0.75, 0.9],
            decorrelation_exact_limit: 40,
        }
    }
}

/// Packing and covering numbers on a radius grid; decorrelation numbers are
/// included only for normalized designs.
pub fn covering_profile(design: &DesignMatrix, opts: &ProfileOptions) -> Result<CoveringProfile> {
    if opts.radii.is_empty() {
        return Err(Error::Input("radius grid is empty".into()));
    }
    let mut radii = opts.radii.clone();
    for &u in &radii {
        check_radius(u)?;
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let pts = points(design.p(), opts.include_signs);
    let (order, fp_radii) = farthest_point_order(design, &pts);
    let packing_sizes: Vec<usize> = radii.iter().map(|&u| packing_prefix(&order, &fp_radii, u).len()).collect();
    let covering_exact = if pts.len() <= opts.exact_max_points.min(64) {
        Some(radii.iter().map(|&u| covering_exact(design, u, opts.include_signs, opts.exact_max_points)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let decorrelation = if design.is_normalized(1e-9) {
        opts.rhos.iter().map(|&r| decorrelation(design, r, opts.decorrelation_exact_limit)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(CoveringProfile {
        covering_upper: packing_sizes.clone(),
        radii,
        packing_sizes,
        covering_exact,
        decorrelation,
        include_signs: opts.include_signs,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{generate, DesignFamily, NormPolicy};

    #[test]
    fn corr_examples() {
        let d = generate(DesignFamily::Orthonormal, 8, 4, 1).unwrap();
        assert!(abs(corr(&d, 2, 2) - 1.0) < 1e-12);
        assert!(abs(corr(&d, 0, 3)) < 1e-12);
        let d = generate(DesignFamily::Equicorrelated { r: 0.5 }, 20, 5, 1).unwrap();
        assert!(abs(corr(&d, 1, 4) - 0.5) < 1e-10);
    }

    #[test]
    fn packing_examples() {
        let same = DesignMatrix::from_columns(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]], NormPolicy::Reject).unwrap();
        assert_eq!(greedy_packing(&same, 0.1, false).unwrap().len(), 1);
        let d = generate(DesignFamily::Orthonormal, 8, 4, 1).unwrap();
        assert_eq!(greedy_packing(&d, 1.0, false).unwrap().len(), 4);
        assert_eq!(greedy_packing(&d, 2.01, true).unwrap().len(), 1);
        assert_eq!(greedy_packing(&d, 1.0, true).unwrap().len(), 8);
        assert!(greedy_packing(&d, 0.0, true).is_err());
    }

    #[test]
    fn covering_small_cases() {
        let one = DesignMatrix::from_columns(&[vec![1.0, -1.0]], NormPolicy::Reject).unwrap();
        assert_eq!(covering_exact(&one, 0.5, false, 12).unwrap(), 1);
        // ψ and −ψ are 2 apart
        assert_eq!(covering_exact(&one, 2.0, true, 12).unwrap(), 1);
        assert_eq!(covering_exact(&one, 1.99, true, 12).unwrap(), 2);
        let d = generate(DesignFamily::Orthonormal, 20, 7, 1).unwrap();
        assert!(matches!(covering_exact(&d, 0.5, true, 12), Err(Error::Capacity { .. })));
    }

    #[test]
    fn decorrelation_examples() {
        let d = generate(DesignFamily::Equicorrelated { r: 0.5 }, 30, 5, 3).unwrap();
        assert_eq!(decorrelation(&d, 0.6, 40).unwrap().size, 5);
        assert_eq!(decorrelation(&d, 0.4, 40).unwrap().size, 1);
        let o = generate(DesignFamily::Orthonormal, 10, 4, 3).unwrap();
        for rho in [0.01, 0.5, 1.0] {
            assert_eq!(decorrelation(&o, rho, 40).unwrap().size, 4);
        }
        let g = decorrelation(&d, 0.6, 2).unwrap();
        assert!(!g.exact && g.size == 5);
        let raw = DesignMatrix::from_columns(&[vec![0.5, 0.5]], NormPolicy::Reject).unwrap();
        assert!(decorrelation(&raw, 0.5, 40).is_err());
    }

    #[test]
    fn profile_is_monotone() {
        let d = generate(DesignFamily::Ar1 { r: 0.7 }, 30, 6, 4).unwrap();
        let prof = covering_profile(&d, &ProfileOptions::default()).unwrap();
        for w in prof.packing_sizes.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let ex = prof.covering_exact.as_ref().unwrap();
        for i in 0..prof.radii.len() {
            assert!(ex[i] <= prof.covering_upper[i]);
        }
        for w in prof.decorrelation.windows(2) {
            assert!(w[1].size >= w[0].size);
        }
    }
}

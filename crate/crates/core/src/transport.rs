//! Discrete optimal transport between finitely supported measures.
//!
//! The discrepancy between two measures is the minimal expected cost of a
//! coupling with the given marginals — a finite linear program. Costs move
//! mass only along the predictors: displacing the response is forbidden
//! outright (infinite cost), so the discrepancy is finite only when the two
//! measures put the same mass on each response value. The predictor
//! displacement is priced by a groupwise dual norm raised to a fixed
//! exponent.
//!
//! The LP is solved exactly, per response class, by the classical
//! transportation simplex (northwest-corner start, tree duals, Bland's
//! entering rule, lowest-index leaving rule) in double precision.

use ndarray::{Array1, Array2};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::norm::{group_norm, GroupPartition, NormSpec};

/// A finitely supported probability measure on predictor-response pairs.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    pub xs: Vec<Array1<f64>>,
    pub ys: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(xs: Vec<Array1<f64>>, ys: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() != weights.len() {
            return Err(Error::DimensionMismatch(
                "atoms and weights must have equal lengths".into(),
            ));
        }
        if xs.is_empty() {
            return Err(Error::InvalidInput("measure needs at least one atom".into()));
        }
        let d = xs[0].len();
        if xs.iter().any(|x| x.len() != d) {
            return Err(Error::DimensionMismatch(
                "atoms must share one dimension".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(DiscreteMeasure { xs, ys, weights })
    }

    /// The empirical measure of a dataset: uniform mass on its rows.
    pub fn from_dataset(data: &Dataset) -> Self {
        let n = data.n();
        DiscreteMeasure {
            xs: (0..n).map(|i| data.x.row(i).to_owned()).collect(),
            ys: data.y.to_vec(),
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(x: Array1<f64>, y: f64) -> Self {
        DiscreteMeasure {
            xs: vec![x],
            ys: vec![y],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn d(&self) -> usize {
        self.xs[0].len()
    }
}

/// Exponent on the predictor-displacement norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostExponent {
    One,
    Two,
}

impl CostExponent {
    pub fn value(self) -> f64 {
        match self {
            CostExponent::One => 1.0,
            CostExponent::Two => 2.0,
        }
    }
}

/// Ground cost: `||x - x'||_dual^rho` when the responses agree, infinite
/// otherwise.
#[derive(Debug, Clone)]
pub struct CostSpec {
    pub part: GroupPartition,
    pub dual: NormSpec,
    pub rho: CostExponent,
}

impl CostSpec {
    /// The standard cost for a partition: dual of the square-root-size
    /// group norm, i.e. reciprocal-root weights with inner 2-norm and outer
    /// max.
    pub fn default_for(part: &GroupPartition, rho: CostExponent) -> Self {
        CostSpec {
            part: part.clone(),
            dual: NormSpec::l21_sqrt_sizes(part).dual(),
            rho,
        }
    }

    pub fn displacement_norm(&self, delta: &[f64]) -> Result<f64> {
        group_norm(delta, &self.part, &self.dual)
    }

    pub fn ground_cost(&self, xa: &Array1<f64>, ya: f64, xb: &Array1<f64>, yb: f64) -> Result<f64> {
        if ya != yb {
            return Ok(f64::INFINITY);
        }
        let delta: Vec<f64> = xa.iter().zip(xb.iter()).map(|(a, b)| a - b).collect();
        let norm = self.displacement_norm(&delta)?;
        Ok(match self.rho {
            CostExponent::One => norm,
            CostExponent::Two => norm * norm,
        })
    }
}

/// An optimal coupling and its cost. When the response marginals cannot be
/// matched the value is infinite and the coupling is all zero.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub coupling: Array2<f64>,
    pub value: f64,
}

impl TransportPlan {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Exact minimal transport cost between two finitely supported measures.
///
/// Atoms are bucketed by response value; a response-mass imbalance makes
/// the problem infeasible under this cost and returns the infinite flag.
/// Within each bucket the LP is solved by the transportation simplex.
pub fn transport_discrepancy(
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    cost: &CostSpec,
) -> Result<TransportPlan> {
    if p.d() != q.d() {
        return Err(Error::DimensionMismatch(
            "measures live in different dimensions".into(),
        ));
    }
    if p.d() != cost.part.d() {
        return Err(Error::DimensionMismatch(
            "cost partition does not match atom dimension".into(),
        ));
    }
    let m = p.len();
    let n = q.len();
    let mut coupling = Array2::<f64>::zeros((m, n));

    // Bucket atom indices by exact response value (normalizing -0.0).
    let key = |y: f64| -> u64 { (if y == 0.0 { 0.0 } else { y }).to_bits() };
    let mut classes: Vec<(u64, Vec<usize>, Vec<usize>)> = Vec::new();
    for (i, &y) in p.ys.iter().enumerate() {
        let k = key(y);
        match classes.iter_mut().find(|(c, _, _)| *c == k) {
            Some((_, pi, _)) => pi.push(i),
            None => classes.push((k, vec![i], Vec::new())),
        }
    }
    for (j, &y) in q.ys.iter().enumerate() {
        let k = key(y);
        match classes.iter_mut().find(|(c, _, _)| *c == k) {
            Some((_, _, qi)) => qi.push(j),
            None => classes.push((k, Vec::new(), vec![j])),
        }
    }

    let mut total = 0.0;
    for (_, p_idx, q_idx) in &classes {
        let wp: f64 = p_idx.iter().map(|&i| p.weights[i]).sum();
        let wq: f64 = q_idx.iter().map(|&j| q.weights[j]).sum();
        if (wp - wq).abs() > 1e-9 {
            // Mass must cross response values: infinite cost.
            return Ok(TransportPlan {
                coupling: Array2::zeros((m, n)),
                value: f64::INFINITY,
            });
        }
        if wp <= 0.0 {
            continue;
        }
        // Strip zero-weight atoms; they carry no mass.
        let rows: Vec<usize> = p_idx.iter().copied().filter(|&i| p.weights[i] > 0.0).collect();
        let cols: Vec<usize> = q_idx.iter().copied().filter(|&j| q.weights[j] > 0.0).collect();
        let supply: Vec<f64> = rows.iter().map(|&i| p.weights[i]).collect();
        let mut demand: Vec<f64> = cols.iter().map(|&j| q.weights[j]).collect();
        // Absorb rounding imbalance (at most 1e-9) into the last entry so
        // the simplex sees an exactly balanced problem.
        let diff = supply.iter().sum::<f64>() - demand.iter().sum::<f64>();
        if let Some(last) = demand.last_mut() {
            *last += diff;
        }
        let mut costs = Array2::<f64>::zeros((rows.len(), cols.len()));
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                costs[[a, b]] = cost.ground_cost(&p.xs[i], p.ys[i], &q.xs[j], q.ys[j])?;
            }
        }
        let flows = transportation_simplex(&supply, &demand, &costs)?;
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                let f = flows[[a, b]];
                if f != 0.0 {
                    coupling[[i, j]] += f;
                    total += f * costs[[a, b]];
                }
            }
        }
    }

    Ok(TransportPlan {
        coupling,
        value: total,
    })
}

/// Transportation simplex for a balanced problem with finite costs.
fn transportation_simplex(
    supply: &[f64],
    demand: &[f64],
    costs: &Array2<f64>,
) -> Result<Array2<f64>> {
    let m = supply.len();
    let n = demand.len();
    let mut flow = Array2::<f64>::zeros((m, n));
    let mut basic = vec![vec![false; n]; m];

    // Northwest-corner start: exactly m + n - 1 basic cells.
    {
        let mut a = supply.to_vec();
        let mut b = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let f = a[i].min(b[j]).max(0.0);
            flow[[i, j]] = f;
            basic[i][j] = true;
            a[i] -= f;
            b[j] -= f;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if a[i] <= b[j] && i < m - 1 {
                i += 1;
            } else if j < n - 1 {
                j += 1;
            } else {
                i += 1;
            }
        }
    }

    let cost_scale = costs.iter().fold(0.0f64, |acc, c| acc.max(c.abs())) + 1.0;
    let eps = 1e-12 * cost_scale;
    let max_pivots = 50 * (m + n) * (m + n) + 100;

    for _pivot in 0..max_pivots {
        // Tree duals: u_i + v_j = c_ij on basic cells, u_0 = 0.
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut stack: Vec<(bool, usize)> = vec![(true, 0)];
        while let Some((is_row, idx)) = stack.pop() {
            if is_row {
                for j in 0..n {
                    if basic[idx][j] && v[j].is_nan() {
                        v[j] = costs[[idx, j]] - u[idx];
                        stack.push((false, j));
                    }
                }
            } else {
                for i in 0..m {
                    if basic[i][idx] && u[i].is_nan() {
                        u[i] = costs[[i, idx]] - v[idx];
                        stack.push((true, i));
                    }
                }
            }
        }
        if u.iter().any(|t| t.is_nan()) || v.iter().any(|t| t.is_nan()) {
            return Err(Error::Numerical(
                "transportation basis lost tree connectivity".into(),
            ));
        }

        // Bland entering rule: first cell in row-major order with a
        // negative reduced cost.
        let mut entering = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if !basic[i][j] && costs[[i, j]] - u[i] - v[j] < -eps {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let (ei, ej) = match entering {
            Some(cell) => cell,
            None => return Ok(flow),
        };

        // The unique cycle: path from row ei to column ej through the tree.
        // parent[node] remembers the basic cell used to reach it; nodes are
        // rows 0..m and columns m..m+n.
        let mut parent = vec![usize::MAX; m + n];
        let mut via = vec![(0usize, 0usize); m + n];
        let mut queue = std::collections::VecDeque::new();
        parent[ei] = ei;
        queue.push_back(ei);
        while let Some(node) = queue.pop_front() {
            if node == m + ej {
                break;
            }
            if node < m {
                for j in 0..n {
                    if basic[node][j] && parent[m + j] == usize::MAX {
                        parent[m + j] = node;
                        via[m + j] = (node, j);
                        queue.push_back(m + j);
                    }
                }
            } else {
                let j = node - m;
                for i in 0..m {
                    if basic[i][j] && parent[i] == usize::MAX {
                        parent[i] = node;
                        via[i] = (i, j);
                        queue.push_back(i);
                    }
                }
            }
        }
        if parent[m + ej] == usize::MAX {
            return Err(Error::Numerical(
                "transportation basis lost tree connectivity".into(),
            ));
        }
        // Walk back from column ej to row ei collecting the path cells.
        let mut path = Vec::new();
        let mut node = m + ej;
        while node != ei {
            path.push(via[node]);
            node = parent[node];
        }
        // Alternating signs along the cycle, entering cell positive. The
        // path starts at ej's side, so cells at even positions (from the
        // entering end) lose flow.
        let mut minus_cells = Vec::new();
        for (k, &cell) in path.iter().enumerate() {
            if k % 2 == 0 {
                minus_cells.push(cell);
            }
        }
        let theta = minus_cells
            .iter()
            .map(|&(i, j)| flow[[i, j]])
            .fold(f64::INFINITY, f64::min);
        // Lowest-index leaving rule among cells attaining theta.
        let leaving = *minus_cells
            .iter()
            .filter(|&&(i, j)| flow[[i, j]] <= theta)
            .min_by_key(|&&(i, j)| (i, j))
            .expect("cycle has at least one decreasing cell");

        flow[[ei, ej]] += theta;
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                flow[[i, j]] -= theta;
            } else {
                flow[[i, j]] += theta;
            }
        }
        basic[ei][ej] = true;
        basic[leaving.0][leaving.1] = false;
        flow[[leaving.0, leaving.1]] = 0.0;
        // Clamp tiny negatives from float cancellation.
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 && flow[[i, j]] < 0.0 {
                flow[[i, j]] = 0.0;
            }
        }
    }
    Err(Error::Numerical(
        "transportation simplex exceeded its pivot budget".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Exponent;
    use ndarray::array;

    fn scalar_cost(rho: CostExponent) -> CostSpec {
        let part = GroupPartition::singletons(1);
        CostSpec {
            dual: NormSpec::new(vec![1.0], Exponent::Finite(2.0), Exponent::Infinity).unwrap(),
            part,
            rho,
        }
    }

    fn scalar_measure(points: &[(f64, f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::new(
            points.iter().map(|(x, _, _)| array![*x]).collect(),
            points.iter().map(|(_, y, _)| *y).collect(),
            points.iter().map(|(_, _, w)| *w).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_measures_cost_nothing() {
        let p = scalar_measure(&[(0.0, 1.0, 0.5), (2.0, 1.0, 0.5)]);
        let plan = transport_discrepancy(&p, &p, &scalar_cost(CostExponent::Two)).unwrap();
        assert_eq!(plan.value, 0.0);
        // Identity-like plan: all mass stays on the diagonal.
        assert!((plan.coupling[[0, 0]] - 0.5).abs() < 1e-12);
        assert!((plan.coupling[[1, 1]] - 0.5).abs() < 1e-12);
        assert!(plan.coupling[[0, 1]].abs() < 1e-12);
    }

    #[test]
    fn point_mass_sink_half_unit_distance() {
        // Uniform on {0, 1} to a point mass at 0 with squared cost: move
        // half the mass across distance 1.
        let p = scalar_measure(&[(0.0, 0.0, 0.5), (1.0, 0.0, 0.5)]);
        let q = DiscreteMeasure::point_mass(array![0.0], 0.0);
        let plan = transport_discrepancy(&p, &q, &scalar_cost(CostExponent::Two)).unwrap();
        assert!((plan.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn response_mismatch_is_infinite() {
        let p = scalar_measure(&[(0.0, 1.0, 1.0)]);
        let q = scalar_measure(&[(0.0, -1.0, 1.0)]);
        let plan = transport_discrepancy(&p, &q, &scalar_cost(CostExponent::One)).unwrap();
        assert!(plan.value.is_infinite());
        assert!(!plan.is_finite());
    }

    #[test]
    fn marginals_match_inputs() {
        let p = scalar_measure(&[(0.0, 0.0, 0.3), (1.5, 0.0, 0.45), (-2.0, 0.0, 0.25)]);
        let q = scalar_measure(&[(0.4, 0.0, 0.6), (1.0, 0.0, 0.4)]);
        let plan = transport_discrepancy(&p, &q, &scalar_cost(CostExponent::Two)).unwrap();
        for (i, &w) in p.weights.iter().enumerate() {
            let row: f64 = (0..q.len()).map(|j| plan.coupling[[i, j]]).sum();
            assert!((row - w).abs() < 1e-9);
        }
        for (j, &w) in q.weights.iter().enumerate() {
            let col: f64 = (0..p.len()).map(|i| plan.coupling[[i, j]]).sum();
            assert!((col - w).abs() < 1e-9);
        }
        assert!(plan.coupling.iter().all(|f| *f >= 0.0));
    }

    #[test]
    fn monotone_scalar_transport_is_optimal() {
        // With convex scalar cost the optimal plan is the monotone
        // rearrangement; its cost is computable by hand here.
        // P uniform on {0, 10}, Q uniform on {1, 9}: match 0->1, 10->9.
        let p = scalar_measure(&[(0.0, 0.0, 0.5), (10.0, 0.0, 0.5)]);
        let q = scalar_measure(&[(1.0, 0.0, 0.5), (9.0, 0.0, 0.5)]);
        let plan = transport_discrepancy(&p, &q, &scalar_cost(CostExponent::Two)).unwrap();
        assert!((plan.value - 0.5 * 1.0 - 0.5 * 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_assignment_bruteforce_on_uniform_instances() {
        // Equal-size uniform marginals make the optimum an assignment, so
        // permutation enumeration is an exact oracle.
        let part = GroupPartition::contiguous(&[2, 1]).unwrap();
        let cost = CostSpec::default_for(&part, CostExponent::Two);
        let mut rng = crate::rng::stream_rng(42, 1234);
        use rand::Rng;
        for trial in 0..10 {
            let k = 2 + (trial % 4);
            let gen = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Array1<f64>> {
                (0..k)
                    .map(|_| Array1::from_shape_fn(3, |_| rng.random::<f64>() * 4.0 - 2.0))
                    .collect()
            };
            let pxs = gen(&mut rng);
            let qxs = gen(&mut rng);
            let w = vec![1.0 / k as f64; k];
            let p = DiscreteMeasure::new(pxs.clone(), vec![0.0; k], w.clone()).unwrap();
            let q = DiscreteMeasure::new(qxs.clone(), vec![0.0; k], w).unwrap();
            let plan = transport_discrepancy(&p, &q, &cost).unwrap();

            // Brute-force assignment.
            let mut cmat = vec![vec![0.0; k]; k];
            for i in 0..k {
                for j in 0..k {
                    cmat[i][j] = cost.ground_cost(&pxs[i], 0.0, &qxs[j], 0.0).unwrap();
                }
            }
            let mut best = f64::INFINITY;
            let mut perm: Vec<usize> = (0..k).collect();
            permute(&mut perm, 0, &mut |p: &[usize]| {
                let c: f64 = p.iter().enumerate().map(|(i, &j)| cmat[i][j]).sum();
                if c < best {
                    best = c;
                }
            });
            best /= k as f64;
            assert!(
                (plan.value - best).abs() <= 1e-9 * best.max(1.0),
                "lp {} vs brute {best}",
                plan.value
            );
        }
    }

    fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }

    #[test]
    fn symmetric_cost_is_symmetric() {
        let p = scalar_measure(&[(0.0, 0.0, 0.25), (3.0, 0.0, 0.75)]);
        let q = scalar_measure(&[(1.0, 0.0, 0.5), (2.0, 0.0, 0.5)]);
        let cost = scalar_cost(CostExponent::Two);
        let ab = transport_discrepancy(&p, &q, &cost).unwrap();
        let ba = transport_discrepancy(&q, &p, &cost).unwrap();
        assert!((ab.value - ba.value).abs() < 1e-12);
    }
}

//! Random graphs with a target degree correlation, empirical neighbor-degree
//! beliefs, k-hop neighborhoods and ex-post evaluation of degree-symmetric
//! strategies on realized graphs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::degree_model::{DegreeDistribution, NeighborBeliefs};
use crate::error::{input, Error, Result};
use crate::expected_utility::{ActionGrid, StrategyProfile};
use crate::payoff::PayoffModel;
use crate::seed::{derive_seed, rng_from_seed, sample_categorical, Rng};

/// Rewiring stops once the achieved correlation is this close to the target.
pub const ASSORTATIVITY_TOL: f64 = 0.02;
/// Fresh stub matchings tried before giving up on a simple graph.
pub const MATCHING_RETRIES: usize = 20;
/// Degree redraws allowed to fix the parity of the stub count.
pub const PARITY_RETRIES: usize = 1_000;

/// How a generated graph came about.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMeta {
    pub seed: Option<u64>,
    pub target_r: Option<f64>,
    /// Degree correlation right after stub matching, before rewiring.
    pub initial_r: f64,
    /// Pearson degree correlation over edges; 0 when degrees do not vary.
    pub achieved_r: f64,
    /// All edge endpoints share one degree, so the correlation is undefined.
    pub degenerate: bool,
    pub rewiring_attempts: u64,
    pub rewiring_accepted: u64,
    pub budget_exhausted: bool,
    /// Degree redraws made to even out the stub count.
    pub parity_redraws: usize,
    /// Node degrees lowered to `n - 1`.
    pub capped_degrees: usize,
}

/// A simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInstance {
    adjacency: Vec<Vec<usize>>,
    pub meta: GraphMeta,
}

impl GraphInstance {
    /// Builds a graph from an edge list; self-loops and repeated edges are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u}, {v}) outside a graph of {n} nodes")));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Input(format!("edge ({u}, {v}) listed twice")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut g = GraphInstance {
            adjacency,
            meta: GraphMeta {
                seed: None,
                target_r: None,
                initial_r: 0.0,
                achieved_r: 0.0,
                degenerate: false,
                rewiring_attempts: 0,
                rewiring_accepted: 0,
                budget_exhausted: false,
                parity_redraws: 0,
                capped_degrees: 0,
            },
        };
        let (r, degenerate) = match g.assortativity() {
            Some(r) => (r, false),
            None => (0.0, true),
        };
        g.meta.achieved_r = r;
        g.meta.degenerate = degenerate;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|l| l.binary_search(&v).is_ok())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Pearson correlation of the degrees at the two ends of an edge, or
    /// `None` when there are no edges or all endpoints share one degree.
    pub fn assortativity(&self) -> Option<f64> {
        let degrees = self.degrees();
        let edges: Vec<(usize, usize)> = self.edges().iter().map(|&(u, v)| (degrees[u], degrees[v])).collect();
        DegreeMoments::from_pairs(&edges).correlation()
    }
}

/// Edge sums behind the degree correlation. Degree-preserving rewiring only
/// moves `cross`.
#[derive(Debug, Clone, Copy)]
struct DegreeMoments {
    edges: f64,
    sum: f64,
    squares: f64,
    cross: f64,
}

impl DegreeMoments {
    fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        let mut m = DegreeMoments {
            edges: pairs.len() as f64,
            sum: 0.0,
            squares: 0.0,
            cross: 0.0,
        };
        for &(a, b) in pairs {
            let (a, b) = (a as f64, b as f64);
            m.sum += a + b;
            m.squares += a * a + b * b;
            m.cross += a * b;
        }
        m
    }

    fn correlation_with(&self, cross: f64) -> Option<f64> {
        if self.edges == 0.0 {
            return None;
        }
        let mean = self.sum / (2.0 * self.edges);
        let var = self.squares / (2.0 * self.edges) - mean * mean;
        if var <= 1e-12 * mean.max(1.0) * mean.max(1.0) {
            return None;
        }
        Some(((cross / self.edges - mean * mean) / var).clamp(-1.0, 1.0))
    }

    fn correlation(&self) -> Option<f64> {
        self.correlation_with(self.cross)
    }
}

/// Which nodes `k_hop_neighborhood` reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HopSemantics {
    /// The recurrence as written: from two hops on, `i` is its own
    /// neighbor's neighbor and appears whenever it has an edge.
    #[default]
    Literal,
    ExcludeSelf,
}

/// `N_i^1` is the neighbor set; `N_i^k` adds the neighbors of every member
/// of `N_i^{k-1}`. Returned sorted.
pub fn k_hop_neighborhood(g: &GraphInstance, i: usize, k: usize, semantics: HopSemantics) -> Result<Vec<usize>> {
    if i >= g.n() {
        return Err(Error::Input(format!("node {i} outside a graph of {} nodes", g.n())));
    }
    if k == 0 {
        return Err(input("k must be at least 1"));
    }
    let mut member = vec![false; g.n()];
    let mut frontier: Vec<usize> = g.neighbors(i).to_vec();
    for &j in &frontier {
        member[j] = true;
    }
    // Members from earlier rounds already contributed their neighbors, so
    // each round only expands what the previous one added.
    for _ in 1..k {
        let mut next = Vec::new();
        for &j in &frontier {
            for &l in g.neighbors(j) {
                if !member[l] {
                    member[l] = true;
                    next.push(l);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    if semantics == HopSemantics::ExcludeSelf {
        member[i] = false;
    }
    Ok((0..g.n()).filter(|&j| member[j]).collect())
}

/// Degree law, target correlation and number of rewiring attempts.
#[derive(Debug, Clone, PartialEq)]
pub struct AssortativityTarget {
    pub law: DegreeDistribution,
    pub r_target: f64,
    pub rewiring_budget: u64,
}

impl AssortativityTarget {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.r_target) {
            return Err(Error::Input(format!("r_target {} outside [-1, 1]", self.r_target)));
        }
        Ok(())
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn draw_degrees(law: &DegreeDistribution, n: usize, rng: &mut Rng) -> Result<(Vec<usize>, usize, usize)> {
    let mut capped = 0;
    let draw = |rng: &mut Rng| {
        let d = sample_categorical(law.pmf(), rng.gen::<f64>());
        if d > n - 1 {
            (n - 1, true)
        } else {
            (d, false)
        }
    };
    let mut degrees = Vec::with_capacity(n);
    for _ in 0..n {
        let (d, c) = draw(rng);
        capped += usize::from(c);
        degrees.push(d);
    }
    let mut redraws = 0;
    while degrees.iter().sum::<usize>() % 2 == 1 {
        if redraws == PARITY_RETRIES {
            return Err(Error::Generation(format!(
                "stub count stayed odd after {PARITY_RETRIES} degree redraws"
            )));
        }
        let i = rng.gen_range(0..n);
        let (d, c) = draw(rng);
        capped += usize::from(c);
        degrees[i] = d;
        redraws += 1;
    }
    Ok((degrees, redraws, capped))
}

/// Pairs stubs at random and removes self-loops and repeated edges by
/// double-edge swaps.
fn match_stubs(degrees: &[usize], rng: &mut Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = degrees.iter().enumerate().flat_map(|(i, &d)| core::iter::repeat_n(i, d)).collect();
    stubs.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|c| key(c[0], c[1])).collect();
    let mut present = BTreeSet::new();
    let mut bad = Vec::new();
    for (idx, &(u, v)) in edges.iter().enumerate() {
        if u == v || !present.insert((u, v)) {
            bad.push(idx);
        }
    }
    let m = edges.len();
    let mut attempts = 0usize;
    let limit = 1_000 + 100 * m;
    while let Some(&idx) = bad.last() {
        if attempts == limit || m < 2 {
            return None;
        }
        attempts += 1;
        let other = rng.gen_range(0..m);
        if other == idx || bad.contains(&other) {
            continue;
        }
        let (a, b) = edges[idx];
        let (mut c, mut d) = edges[other];
        if rng.gen::<bool>() {
            core::mem::swap(&mut c, &mut d);
        }
        let (e1, e2) = (key(a, d), key(c, b));
        if a == d || c == b || e1 == e2 || present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&edges[other]);
        present.insert(e1);
        present.insert(e2);
        edges[idx] = e1;
        edges[other] = e2;
        bad.pop();
    }
    Some(edges)
}

/// Configuration-model graph on `n` nodes with degrees drawn from the
/// target law, then rewired toward the target degree correlation.
///
/// Degrees above `n - 1` are capped. An odd stub count is fixed by redrawing
/// the degree of a random node. Rewiring swaps the endpoints of two random
/// edges and keeps the swap only when it brings the correlation strictly
/// closer to the target; it stops within `ASSORTATIVITY_TOL` of the target or
/// when the attempt budget runs out (`meta.budget_exhausted`).
pub fn sample_graph(target: &AssortativityTarget, n: usize, seed: u64) -> Result<GraphInstance> {
    target.validate()?;
    if n < 2 {
        return Err(input("a graph needs at least 2 nodes"));
    }
    let mut rng = rng_from_seed(derive_seed(seed, "graph", 0));
    let (degrees, parity_redraws, capped_degrees) = draw_degrees(&target.law, n, &mut rng)?;
    let mut edges = None;
    for _ in 0..MATCHING_RETRIES {
        edges = match_stubs(&degrees, &mut rng);
        if edges.is_some() {
            break;
        }
    }
    let mut edges = edges.ok_or_else(|| {
        Error::Generation(format!(
            "no simple graph found for the sampled degree sequence after {MATCHING_RETRIES} matchings"
        ))
    })?;

    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (degrees[u], degrees[v])).collect();
    let mut moments = DegreeMoments::from_pairs(&pairs);
    let degenerate = moments.correlation().is_none();
    let initial_r = moments.correlation().unwrap_or(0.0);
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    let mut budget_exhausted = false;
    if !degenerate && edges.len() >= 2 {
        let mut present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
        let mut r = moments.correlation().unwrap_or(0.0);
        let m = edges.len();
        while (r - target.r_target).abs() > ASSORTATIVITY_TOL {
            if attempts == target.rewiring_budget {
                budget_exhausted = true;
                break;
            }
            attempts += 1;
            let i = rng.gen_range(0..m);
            let j = rng.gen_range(0..m);
            if i == j {
                continue;
            }
            let (a, b) = edges[i];
            let (mut c, mut d) = edges[j];
            if rng.gen::<bool>() {
                core::mem::swap(&mut c, &mut d);
            }
            if a == d || c == b {
                continue;
            }
            let (e1, e2) = (key(a, d), key(c, b));
            if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
                continue;
            }
            let deg = |x: usize| degrees[x] as f64;
            let cross = moments.cross + deg(a) * deg(d) + deg(c) * deg(b) - deg(a) * deg(b) - deg(c) * deg(d);
            let Some(r_new) = moments.correlation_with(cross) else { continue };
            if (r_new - target.r_target).abs() >= (r - target.r_target).abs() {
                continue;
            }
            present.remove(&edges[i]);
            present.remove(&edges[j]);
            present.insert(e1);
            present.insert(e2);
            edges[i] = e1;
            edges[j] = e2;
            moments.cross = cross;
            r = r_new;
            accepted += 1;
        }
    }
    edges.sort_unstable();
    let mut g = GraphInstance::from_edges(n, &edges)?;
    g.meta.seed = Some(seed);
    g.meta.target_r = Some(target.r_target);
    g.meta.initial_r = initial_r;
    g.meta.rewiring_attempts = attempts;
    g.meta.rewiring_accepted = accepted;
    g.meta.budget_exhausted = budget_exhausted;
    g.meta.parity_redraws = parity_redraws;
    g.meta.capped_degrees = capped_degrees;
    Ok(g)
}

/// `counts[d][e]`: edge endpoints at degree-`d` nodes whose other end has
/// degree `e`. Symmetric by construction.
pub fn endpoint_degree_counts(g: &GraphInstance) -> Vec<Vec<u64>> {
    let degrees = g.degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut counts = vec![vec![0u64; max + 1]; max + 1];
    for (u, list) in g.adjacency.iter().enumerate() {
        for &v in list {
            counts[degrees[u]][degrees[v]] += 1;
        }
    }
    counts
}

/// Conditional-i.i.d. beliefs estimated from the graph: the row of degree
/// `d` is the degree law at the far end of edges leaving degree-`d` nodes.
pub fn empirical_beliefs(g: &GraphInstance) -> Result<NeighborBeliefs> {
    if g.edge_count() == 0 {
        return Err(input("cannot estimate beliefs from an edgeless graph"));
    }
    let counts = endpoint_degree_counts(g);
    let max = counts.len() - 1;
    let mut rows = Vec::new();
    for (d, row) in counts.iter().enumerate().skip(1) {
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let probs: Vec<f64> = (1..=max).map(|e| row[e] as f64 / total as f64).collect();
        rows.push((d, probs));
    }
    NeighborBeliefs::conditional_iid(rows)
}

/// Realized mean utility of one degree class.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpostRow {
    pub degree: usize,
    pub nodes: usize,
    pub trials: usize,
    pub mean: f64,
    /// Spread of per-node means over `sqrt(nodes)`; with a single node, the
    /// spread of per-trial utilities over `sqrt(trials)`.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpostReport {
    pub rows: Vec<ExpostRow>,
}

fn check_expost_inputs(g: &GraphInstance, model: &PayoffModel, grid: &ActionGrid, profile: &StrategyProfile) -> Result<()> {
    model.validate()?;
    if profile.grid_len() != grid.len() {
        return Err(input("profile and grid sizes differ"));
    }
    for d in g.degrees() {
        if d > 0 && profile.law(d).is_none() {
            return Err(Error::Input(format!("profile has no law for degree {d}, which occurs in the graph")));
        }
    }
    Ok(())
}

/// Per-node utilities for one trial: each node with an edge draws its action
/// from the profile at its own degree. Isolated nodes get `NaN`.
pub fn expost_trial(
    g: &GraphInstance,
    model: &PayoffModel,
    grid: &ActionGrid,
    profile: &StrategyProfile,
    seed: u64,
    trial: u64,
) -> Result<Vec<f64>> {
    check_expost_inputs(g, model, grid, profile)?;
    let mut rng = rng_from_seed(derive_seed(seed, "expost-trial", trial));
    let actions: Vec<f64> = (0..g.n())
        .map(|i| match profile.law(g.degree(i)) {
            Some(law) if g.degree(i) > 0 => grid.point(sample_categorical(law, rng.gen::<f64>())),
            _ => 0.0,
        })
        .collect();
    Ok((0..g.n())
        .map(|i| {
            if g.degree(i) == 0 {
                return f64::NAN;
            }
            let sum: f64 = g.neighbors(i).iter().map(|&j| actions[j]).sum();
            model.utility_of_sum(actions[i], sum)
        })
        .collect())
}

/// Groups per-trial node utilities (from `expost_trial`, in trial order)
/// into per-degree means and standard errors.
pub fn summarize_expost(g: &GraphInstance, trials: &[Vec<f64>]) -> Result<ExpostReport> {
    if trials.is_empty() {
        return Err(input("need at least one trial"));
    }
    if trials.iter().any(|t| t.len() != g.n()) {
        return Err(input("trial utilities do not match the graph size"));
    }
    let t = trials.len() as f64;
    let node_means: Vec<f64> = (0..g.n()).map(|i| trials.iter().map(|tr| tr[i]).sum::<f64>() / t).collect();
    let degrees = g.degrees();
    let classes: BTreeSet<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
    let mut rows = Vec::new();
    for d in classes {
        let members: Vec<usize> = (0..g.n()).filter(|&i| degrees[i] == d).collect();
        let k = members.len() as f64;
        let mean = members.iter().map(|&i| node_means[i]).sum::<f64>() / k;
        let std_error = if members.len() >= 2 {
            let var = members.iter().map(|&i| { let e = node_means[i] - mean; e * e }).sum::<f64>() / (k - 1.0);
            libm::sqrt(var / k)
        } else if trials.len() >= 2 {
            let i = members[0];
            let var = trials.iter().map(|tr| { let e = tr[i] - mean; e * e }).sum::<f64>() / (t - 1.0);
            libm::sqrt(var / t)
        } else {
            0.0
        };
        rows.push(ExpostRow {
            degree: d,
            nodes: members.len(),
            trials: trials.len(),
            mean,
            std_error,
        });
    }
    Ok(ExpostReport { rows })
}

/// Plays the profile on the graph `trials` times (trial `t` seeded from
/// `derive_seed(seed, "expost-trial", t)`) and averages realized utility by
/// degree. Isolated nodes are left out.
pub fn expost_payoffs(
    g: &GraphInstance,
    model: &PayoffModel,
    grid: &ActionGrid,
    profile: &StrategyProfile,
    trials: usize,
    seed: u64,
) -> Result<ExpostReport> {
    if trials == 0 {
        return Err(input("need at least one trial"));
    }
    let per_trial = (0..trials as u64)
        .map(|t| expost_trial(g, model, grid, profile, seed, t))
        .collect::<Result<Vec<_>>>()?;
    summarize_expost(g, &per_trial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{BenefitFunction, CostFunction};

    fn path3() -> GraphInstance {
        GraphInstance::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn hops_on_a_path() {
        let g = path3();
        assert_eq!(k_hop_neighborhood(&g, 0, 1, HopSemantics::Literal).unwrap(), vec![1]);
        assert_eq!(k_hop_neighborhood(&g, 0, 2, HopSemantics::Literal).unwrap(), vec![0, 1, 2]);
        assert_eq!(k_hop_neighborhood(&g, 0, 2, HopSemantics::ExcludeSelf).unwrap(), vec![1, 2]);
        assert!(k_hop_neighborhood(&g, 3, 1, HopSemantics::Literal).is_err());
        assert!(k_hop_neighborhood(&g, 0, 0, HopSemantics::Literal).is_err());
    }

    #[test]
    fn isolated_node_has_no_neighborhood() {
        let g = GraphInstance::from_edges(3, &[(0, 1)]).unwrap();
        for k in 1..4 {
            assert!(k_hop_neighborhood(&g, 2, k, HopSemantics::Literal).unwrap().is_empty());
        }
    }

    #[test]
    fn from_edges_rejects_non_simple() {
        assert!(GraphInstance::from_edges(3, &[(0, 0)]).is_err());
        assert!(GraphInstance::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(GraphInstance::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn regular_law_gives_regular_graph() {
        let target = AssortativityTarget {
            law: DegreeDistribution::point_mass(2).unwrap(),
            r_target: 0.0,
            rewiring_budget: 1_000,
        };
        let g = sample_graph(&target, 6, 3).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 2));
        assert!(g.meta.degenerate);
        assert_eq!(g.meta.achieved_r, 0.0);
    }

    #[test]
    fn same_seed_same_graph() {
        let target = AssortativityTarget {
            law: DegreeDistribution::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap(),
            r_target: -0.2,
            rewiring_budget: 10_000,
        };
        let a = sample_graph(&target, 100, 42).unwrap();
        let b = sample_graph(&target, 100, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.degrees().iter().sum::<usize>() % 2 == 0);
    }

    #[test]
    fn star_beliefs() {
        let g = GraphInstance::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let b = empirical_beliefs(&g).unwrap();
        assert_eq!(b.degrees(), &[1, 4]);
        assert_eq!(b.row(1).unwrap(), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(b.row(4).unwrap(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.assortativity(), Some(-1.0));
    }

    #[test]
    fn ring_beliefs() {
        let g = GraphInstance::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let b = empirical_beliefs(&g).unwrap();
        assert_eq!(b.row(2).unwrap(), &[0.0, 1.0]);
        assert!(empirical_beliefs(&GraphInstance::from_edges(3, &[]).unwrap()).is_err());
    }

    #[test]
    fn expost_without_spillover_ignores_the_graph() {
        let model = PayoffModel::sum_of_investments(BenefitFunction::Power { alpha: 0.5 }, CostFunction::Linear { c0: 0.5 }, 0.0).unwrap();
        let grid = ActionGrid::uniform(5).unwrap();
        let g = path3();
        let p = StrategyProfile::pure(&grid, &[(1, 1), (2, 2)]).unwrap();
        let r = expost_payoffs(&g, &model, &grid, &p, 10, 1).unwrap();
        assert!((r.rows[0].mean - (libm::sqrt(0.25) - 0.125)).abs() < 1e-15);
        assert!((r.rows[1].mean - (libm::sqrt(0.5) - 0.25)).abs() < 1e-15);
        assert_eq!(r.rows[1].std_error, 0.0);
    }

    #[test]
    fn expost_needs_every_degree() {
        let model = PayoffModel::best_shot(CostFunction::Linear { c0: 0.3 }).unwrap();
        let p = StrategyProfile::binary(&[(1, 0.5)]).unwrap();
        assert!(expost_payoffs(&path3(), &model, &ActionGrid::binary(), &p, 5, 0).is_err());
    }
}

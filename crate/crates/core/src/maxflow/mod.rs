//! Exact minimization of the grid energy and enumeration of every optimal
//! labeling over a λ interval.
//!
//! Seed pixels are contracted out of the flow graph: their incident edges
//! become unary terms on the free neighbours, so sentinel costs never enter
//! the solver. λ is handled in the same fixed point as the costs.
//!
//! Breakpoints are found by recursive bisection of the λ interval. The
//! minimal optimal foreground set grows monotonically with λ, so every pixel
//! has a threshold at which it joins the foreground. Each interval `(a, b)`
//! carries the pixels whose threshold is known to lie in it; a solve at the
//! midpoint only involves those pixels, with everything else fixed, and
//! splits them between the two halves. An interval with no pixels holds no
//! breakpoint, and one narrower than the resolution assigns its pixels the
//! right endpoint.

mod graph;

pub use graph::{FlowGraph, FlowGraphBuilder};

use crate::energy::{from_units, to_units, EnergyModel, COST_SCALE};
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// One minimizer of `E_λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSolution {
    pub labeling: BinaryMask,
    pub lambda: f64,
    pub energy: f64,
    /// Energy of the same labeling without the λ term.
    pub base_energy: f64,
}

/// Every distinct optimal labeling on `[λ_min, λ_max]`, ordered by λ.
///
/// Each solution's `lambda` is the breakpoint where it becomes optimal
/// (the interval start for the first one).
#[derive(Clone, Debug, PartialEq)]
pub struct BreakpointSet {
    pub solutions: Vec<CutSolution>,
    pub lambda_range: (f64, f64),
}

impl BreakpointSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// `E_λ(X)` in fixed-point units, by direct summation over the model terms.
pub fn energy_units(model: &EnergyModel, labeling: &BinaryMask, lambda_units: i64) -> i128 {
    assert_eq!(labeling.len(), model.len(), "labeling does not match model");
    let x = labeling.as_slice();
    let (bg, fg) = (model.bg_cost_units(), model.fg_cost_units());
    let (hard_fg, hard_bg) = (model.hard_fg(), model.hard_bg());
    let mut e: i128 = 0;
    for u in 0..model.len() {
        if x[u] {
            e += fg[u] as i128;
            if hard_bg[u] {
                e += model.sentinel_units();
            }
        } else {
            e += bg[u] as i128;
            if hard_fg[u] {
                e += model.sentinel_units();
            } else if !hard_bg[u] {
                e += lambda_units as i128;
            }
        }
    }
    for (u, v, w) in model.edges() {
        if x[u] != x[v] {
            e += w as i128;
        }
    }
    e
}

/// `E_λ(X)` for a real λ.
pub fn evaluate_energy(model: &EnergyModel, labeling: &BinaryMask, lambda: f64) -> f64 {
    let base = energy_units(model, labeling, 0);
    from_units(base) + lambda * background_free_count(model, labeling) as f64
}

/// Number of non-seed pixels labeled background: the slope of `E_λ(X)` in λ.
pub fn background_free_count(model: &EnergyModel, labeling: &BinaryMask) -> usize {
    (0..model.len()).filter(|&u| !labeling.at(u) && model.lambda_applies(u)).count()
}

/// Reusable solver for one model at many values of λ.
#[derive(Clone, Debug)]
pub struct CutSolver<'a> {
    model: &'a EnergyModel,
    /// Pixel index of each graph node.
    pixels: Vec<usize>,
    /// Background cost per node, without λ.
    c0: Vec<i64>,
    c1: Vec<i64>,
    graph: FlowGraph,
    terminal: Vec<i64>,
    /// Energy of the contracted seed-seed edges.
    constant: i128,
    /// Labeling with every free pixel background.
    seeded: BinaryMask,
}

impl<'a> CutSolver<'a> {
    pub fn new(model: &'a EnergyModel) -> Self {
        let n = model.len();
        let mut node_of = vec![u32::MAX; n];
        let mut pixels = Vec::new();
        for u in 0..n {
            if model.lambda_applies(u) {
                node_of[u] = pixels.len() as u32;
                pixels.push(u);
            }
        }
        let mut c0: Vec<i64> = pixels.iter().map(|&u| model.bg_cost_units()[u]).collect();
        let mut c1: Vec<i64> = pixels.iter().map(|&u| model.fg_cost_units()[u]).collect();
        let (hard_fg, hard_bg) = (model.hard_fg(), model.hard_bg());
        let mut builder = FlowGraphBuilder::new(pixels.len());
        let mut constant = 0i128;
        for (u, v, w) in model.edges() {
            match (node_of[u], node_of[v]) {
                (a, b) if a != u32::MAX && b != u32::MAX => builder.add_edge(a as usize, b as usize, w, w),
                (a, _) if a != u32::MAX => {
                    if hard_fg[v] {
                        c0[a as usize] += w;
                    } else {
                        c1[a as usize] += w;
                    }
                }
                (_, b) if b != u32::MAX => {
                    if hard_fg[u] {
                        c0[b as usize] += w;
                    } else {
                        c1[b as usize] += w;
                    }
                }
                _ => {
                    if hard_fg[u] != hard_fg[v] {
                        constant += w as i128;
                    }
                }
            }
        }
        let seeded = BinaryMask::from_vec(model.width(), model.height(), hard_fg.to_vec()).expect("model dims");
        debug_assert!(hard_fg.iter().zip(hard_bg).all(|(a, b)| !(a & b)));
        Self { model, terminal: vec![0; pixels.len()], graph: builder.build(), pixels, c0, c1, constant, seeded }
    }

    pub fn model(&self) -> &EnergyModel {
        self.model
    }

    /// Minimal-foreground optimal labeling at a fixed-point λ.
    pub fn solve_units(&mut self, lambda_units: i64) -> (BinaryMask, i128) {
        let mut offset = self.constant;
        for (k, t) in self.terminal.iter_mut().enumerate() {
            let bg = self.c0[k] + lambda_units;
            let fg = self.c1[k];
            *t = bg - fg;
            offset += bg.min(fg) as i128;
        }
        self.graph.reset(&self.terminal);
        let flow = self.graph.maxflow();
        let side = self.graph.source_side();
        let mut labeling = self.seeded.clone();
        for (k, &u) in self.pixels.iter().enumerate() {
            labeling.set_at(u, side[k]);
        }
        let cut = flow as i128 + offset;
        debug_assert_eq!(cut, energy_units(self.model, &labeling, lambda_units));
        (labeling, cut)
    }

    pub fn solve(&mut self, lambda: f64) -> CutSolution {
        let units = to_units(lambda);
        let (labeling, _) = self.solve_units(units);
        let lambda = units as f64 / COST_SCALE;
        CutSolution {
            energy: evaluate_energy(self.model, &labeling, lambda),
            base_energy: from_units(energy_units(self.model, &labeling, 0)),
            labeling,
            lambda,
        }
    }
}

/// Minimal optimal labeling at `lambda_units` among labelings `X` with
/// `lower ⊆ X ⊆ upper`; seeds must already respect both bounds.
pub fn solve_between(model: &EnergyModel, lambda_units: i64, lower: &BinaryMask, upper: &BinaryMask) -> BinaryMask {
    let region: Vec<usize> =
        (0..model.len()).filter(|&u| model.lambda_applies(u) && upper.at(u) && !lower.at(u)).collect();
    let mut scratch = vec![u32::MAX; model.len()];
    let mut labeling = lower.clone();
    for u in solve_region(model, lambda_units, &region, |v| lower.at(v), &mut scratch) {
        labeling.set_at(u, true);
    }
    labeling
}

/// Solves for the pixels of `region` with every other pixel fixed
/// (`fixed_fg` tells which way); returns the region pixels labelled
/// foreground. `scratch` must be all `u32::MAX` and is left that way.
fn solve_region(
    model: &EnergyModel,
    lambda_units: i64,
    region: &[usize],
    fixed_fg: impl Fn(usize) -> bool,
    scratch: &mut [u32],
) -> Vec<usize> {
    if region.is_empty() {
        return Vec::new();
    }
    let (w, n) = (model.width(), model.len());
    for (k, &u) in region.iter().enumerate() {
        scratch[u] = k as u32;
    }
    let (bg, fg) = (model.bg_cost_units(), model.fg_cost_units());
    let (right, down) = (model.right_units(), model.down_units());
    let mut terminal: Vec<i64> = region.iter().map(|&u| bg[u] + lambda_units - fg[u]).collect();
    let mut builder = FlowGraphBuilder::new(region.len());
    // fixed neighbours contribute to the node's unary; only the difference matters
    let mut link = |k: usize, v: usize, wgt: i64| {
        if wgt == 0 {
            return;
        }
        match scratch[v] {
            u32::MAX if fixed_fg(v) => terminal[k] += wgt,
            u32::MAX => terminal[k] -= wgt,
            j if (j as usize) > k => builder.add_edge(k, j as usize, wgt, wgt),
            _ => {}
        }
    };
    for (k, &u) in region.iter().enumerate() {
        let x = u % w;
        if x > 0 {
            link(k, u - 1, right[u - 1]);
        }
        if x + 1 < w {
            link(k, u + 1, right[u]);
        }
        if u >= w {
            link(k, u - w, down[u - w]);
        }
        if u + w < n {
            link(k, u + w, down[u]);
        }
    }
    for &u in region {
        scratch[u] = u32::MAX;
    }
    let mut graph = builder.build();
    graph.reset(&terminal);
    graph.maxflow();
    graph.source_side().into_iter().zip(region).filter(|(side, _)| *side).map(|(_, &u)| u).collect()
}

/// Global minimizer of `E_λ`; among ties, the one with the fewest foreground
/// pixels. λ is rounded to the fixed-point grid.
pub fn min_cut(model: &EnergyModel, lambda: f64) -> CutSolution {
    CutSolver::new(model).solve(lambda)
}

/// Default λ interval `±(max |bg - fg| gap + w_s)` spanning the family from
/// all-background to all-foreground in the absence of seeds.
pub fn default_lambda_range(model: &EnergyModel, w_s: f64) -> (f64, f64) {
    let r = model.max_unary_gap() + w_s;
    (-r, r)
}

/// Enumerates every distinct optimal labeling on `[lambda_min, lambda_max]`.
///
/// `delta` is the breakpoint resolution; `None` uses
/// `1e-6 * (lambda_max - lambda_min)`. The search never resolves below the
/// fixed-point grid.
pub fn parametric_cuts(
    model: &EnergyModel,
    lambda_min: f64,
    lambda_max: f64,
    delta: Option<f64>,
) -> Result<BreakpointSet> {
    if !(lambda_min <= lambda_max) || !lambda_min.is_finite() || !lambda_max.is_finite() {
        return Err(Error::InvalidLambdaRange(lambda_min, lambda_max));
    }
    let delta = delta.unwrap_or(1e-6 * (lambda_max - lambda_min));
    let min_width = to_units(delta).max(1);
    let (lo, hi) = (to_units(lambda_min), to_units(lambda_max));

    let n = model.len();
    let mut solver = CutSolver::new(model);
    let (x_lo, _) = solver.solve_units(lo);
    let (x_hi, _) = solver.solve_units(hi);
    debug_assert!(x_lo.is_subset_of(&x_hi), "parametric family not nested");
    // each pixel's threshold lies in (low[u], high[u]]
    let mut low = vec![i64::MIN; n];
    let mut high = vec![i64::MAX; n];
    let mut pending = Vec::new();
    for u in 0..n {
        if x_lo.at(u) {
            high[u] = lo;
        } else if x_hi.at(u) {
            (low[u], high[u]) = (lo, hi);
            pending.push(u);
        } else {
            low[u] = hi;
        }
    }
    let mut scratch = vec![u32::MAX; n];
    let mut stack = vec![(lo, hi, pending)];
    while let Some((a, b, region)) = stack.pop() {
        if region.is_empty() || b - a <= min_width {
            continue;
        }
        let m = a + (b - a) / 2;
        let fg = solve_region(model, m, &region, |v| high[v] <= a, &mut scratch);
        for &u in &fg {
            high[u] = m;
        }
        let above: Vec<usize> = region.into_iter().filter(|&u| high[u] != m).collect();
        for &u in &above {
            low[u] = m;
        }
        stack.push((m, b, above));
        stack.push((a, m, fg));
    }

    // walk the chain, updating the λ-free energy and slope pixel by pixel
    let mut order: Vec<usize> = (0..n).filter(|&u| high[u] > lo && high[u] <= hi).collect();
    order.sort_by_key(|&u| (high[u], u));
    let mut x = x_lo;
    let mut base = energy_units(model, &x, 0);
    let mut slope = background_free_count(model, &x) as i128;
    let mut solutions = vec![CutSolution {
        energy: from_units(base) + from_units(lo as i128) * slope as f64,
        base_energy: from_units(base),
        labeling: x.clone(),
        lambda: from_units(lo as i128),
    }];
    let (w, right, down) = (model.width(), model.right_units(), model.down_units());
    let (bg, fg) = (model.bg_cost_units(), model.fg_cost_units());
    let mut i = 0;
    while i < order.len() {
        let t = high[order[i]];
        let (prev_base, prev_slope) = (base, slope);
        while i < order.len() && high[order[i]] == t {
            let u = order[i];
            base += (fg[u] - bg[u]) as i128;
            slope -= 1;
            let x_row = u % w;
            let mut flip = |v: usize, wgt: i64| base += if x.at(v) { -(wgt as i128) } else { wgt as i128 };
            if x_row > 0 {
                flip(u - 1, right[u - 1]);
            }
            if x_row + 1 < w {
                flip(u + 1, right[u]);
            }
            if u >= w {
                flip(u - w, down[u - w]);
            }
            if u + w < n {
                flip(u + w, down[u]);
            }
            x.set_at(u, true);
            i += 1;
        }
        // exact crossing of the previous solution's energy line with this one's
        let lambda = (base - prev_base) as f64 / (prev_slope - slope) as f64 / COST_SCALE;
        solutions.push(CutSolution {
            energy: from_units(base) + lambda * slope as f64,
            base_energy: from_units(base),
            labeling: x.clone(),
            lambda,
        });
    }
    Ok(BreakpointSet { solutions, lambda_range: (lambda_min, lambda_max) })
}

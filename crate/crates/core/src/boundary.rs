//! Sampling of the boundary sphere `{e^{tI} : t ∈ (0,π), I ∈ S}`.
//!
//! The normalized measure `dσ(I) dt` is approximated by a product rule:
//! midpoint nodes in `t` and a Fibonacci lattice on the sphere of imaginary
//! units, all with equal weights so that the total mass is 1.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quaternion::{exp_unit, Quaternion, UnitImaginary};
use crate::series::SliceLaurentSeries;
use crate::EPS0;

#[derive(Clone, Debug)]
pub struct BoundaryGrid {
    t_nodes: Vec<f64>,
    t_weights: Vec<f64>,
    sphere_nodes: Vec<UnitImaginary>,
    sphere_weights: Vec<f64>,
    includes_reals: bool,
}

/// Midpoint rule on `(0, π)` times a Fibonacci lattice with `n_sphere` points.
pub fn make_grid(n_t: usize, n_sphere: usize) -> Result<BoundaryGrid> {
    if n_t < 2 || n_sphere < 2 {
        return Err(Error::InvalidGrid(format!("need n_t >= 2 and n_sphere >= 2, got {n_t} x {n_sphere}")));
    }
    let t_nodes = (0..n_t).map(|i| (i as f64 + 0.5) * PI / n_t as f64).collect();
    Ok(BoundaryGrid {
        t_nodes,
        t_weights: vec![1.0 / n_t as f64; n_t],
        sphere_nodes: fibonacci_sphere(n_sphere),
        sphere_weights: vec![1.0 / n_sphere as f64; n_sphere],
        includes_reals: false,
    })
}

/// Deterministic, nearly uniform points on the unit 2-sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<UnitImaginary> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            UnitImaginary::new([r * a.cos(), r * a.sin(), z]).expect("lattice point on the sphere")
        })
        .collect()
}

impl BoundaryGrid {
    /// Also reports the real points `±1` (they carry no measure).
    pub fn with_reals(mut self) -> Self {
        self.includes_reals = true;
        self
    }

    pub fn includes_reals(&self) -> bool {
        self.includes_reals
    }

    pub fn n_t(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn n_sphere(&self) -> usize {
        self.sphere_nodes.len()
    }

    pub fn len(&self) -> usize {
        self.n_t() * self.n_sphere()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn t_weights(&self) -> &[f64] {
        &self.t_weights
    }

    pub fn sphere_nodes(&self) -> &[UnitImaginary] {
        &self.sphere_nodes
    }

    pub fn sphere_weights(&self) -> &[f64] {
        &self.sphere_weights
    }

    pub fn total_weight(&self) -> f64 {
        self.t_weights.iter().sum::<f64>() * self.sphere_weights.iter().sum::<f64>()
    }

    /// All nodes in t-major, sphere-minor order as `(t, I, weight)`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, UnitImaginary, f64)> + '_ {
        self.t_nodes.iter().zip(&self.t_weights).flat_map(move |(&t, &wt)| {
            self.sphere_nodes.iter().zip(&self.sphere_weights).map(move |(&u, &ws)| (t, u, wt * ws))
        })
    }

    /// Weighted sum of `h(e^{tI})` over the grid.
    pub fn integrate(&self, mut h: impl FnMut(Quaternion) -> f64) -> f64 {
        self.nodes().map(|(t, u, w)| w * h(exp_unit(t, &u))).sum()
    }
}

/// Evaluation at a boundary point; cannot hit the zero-division case.
pub(crate) fn eval_boundary(f: &SliceLaurentSeries, q: Quaternion) -> Quaternion {
    f.evaluate(q).expect("boundary points are invertible")
}

/// Rebuilds `f(x + yI)` from the values at `x + yJ` and `x + yK`.
pub fn representation(
    val_j: Quaternion,
    val_k: Quaternion,
    j: &UnitImaginary,
    k: &UnitImaginary,
    i: &UnitImaginary,
) -> Result<Quaternion> {
    let (jq, kq, iq) = (j.to_quaternion(), k.to_quaternion(), i.to_quaternion());
    let d = jq - kq;
    if d.norm() <= EPS0 {
        return Err(Error::DegenerateUnits);
    }
    let d_inv = d.inverse()?;
    Ok((d_inv * jq + iq * d_inv) * val_j - (d_inv * kq + iq * d_inv) * val_k)
}

/// Uniform quadrature of `(1/2π) ∫ conj(g(e^{θI})) f(e^{θI}) dθ` with `n_theta` nodes.
pub fn slice_inner(f: &SliceLaurentSeries, g: &SliceLaurentSeries, unit: &UnitImaginary, n_theta: usize) -> Quaternion {
    let mut acc = Quaternion::ZERO;
    for k in 0..n_theta {
        let q = exp_unit(2.0 * PI * k as f64 / n_theta as f64, unit);
        acc += eval_boundary(g, q).conj() * eval_boundary(f, q);
    }
    acc / n_theta as f64
}

/// Grid maximum of `|f|`: a lower bound for the essential supremum.
pub fn ess_sup_estimate(f: &SliceLaurentSeries, grid: &BoundaryGrid) -> f64 {
    let mut best = grid.nodes().map(|(t, u, _)| eval_boundary(f, exp_unit(t, &u)).norm()).fold(0.0, f64::max);
    if grid.includes_reals {
        for q in [Quaternion::ONE, -Quaternion::ONE] {
            best = best.max(eval_boundary(f, q).norm());
        }
    }
    best
}

/// Distance from unimodularity: the larger of the nodewise `max | |φ| - 1 |`
/// and the coefficient residual `‖φ̃ * φ^c - 1‖`.
pub fn unimodularity_residual(phi: &SliceLaurentSeries, grid: &BoundaryGrid) -> Result<f64> {
    let nodal =
        grid.nodes().map(|(t, u, _)| (eval_boundary(phi, exp_unit(t, &u)).norm() - 1.0).abs()).fold(0.0, f64::max);
    Ok(nodal.max(modulus_coefficient_residual(phi)?))
}

/// `‖φ̃ * φ^c - 1‖` in L².
pub fn modulus_coefficient_residual(phi: &SliceLaurentSeries) -> Result<f64> {
    let p = phi.tilde().star(&phi.conjugate())?;
    Ok(p.distance(&SliceLaurentSeries::one()))
}

/// Largest nodewise gap in `|φ(e^{-tI})|² = Re((φ̃ * φ^c)(e^{tI}))`.
pub fn modulus_identity_residual(phi: &SliceLaurentSeries, grid: &BoundaryGrid) -> Result<f64> {
    let p = phi.tilde().star(&phi.conjugate())?;
    Ok(grid
        .nodes()
        .map(|(t, u, _)| {
            let lhs = eval_boundary(phi, exp_unit(-t, &u)).norm_sqr();
            let rhs = eval_boundary(&p, exp_unit(t, &u)).re();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max))
}

/// Weighted fraction of grid nodes where `|f^s| < threshold`.
pub fn zero_set_fraction(f: &SliceLaurentSeries, grid: &BoundaryGrid, threshold: f64) -> Result<f64> {
    let s = f.symmetrize()?;
    Ok(grid.integrate(|q| if eval_boundary(&s, q).norm() < threshold { 1.0 } else { 0.0 }))
}

/// Weighted fraction of grid nodes where `| |φ^s| - 1 | <= tol`.
pub fn unimodular_fraction(phi: &SliceLaurentSeries, grid: &BoundaryGrid, tol: f64) -> Result<f64> {
    let s = phi.symmetrize()?;
    Ok(grid.integrate(|q| if (eval_boundary(&s, q).norm() - 1.0).abs() <= tol { 1.0 } else { 0.0 }))
}

/// Largest spread of `|f|` across a single sphere `e^{tS}` of the grid.
pub fn sphere_spread(f: &SliceLaurentSeries, grid: &BoundaryGrid) -> f64 {
    let mut worst = 0.0f64;
    for &t in grid.t_nodes() {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for u in grid.sphere_nodes() {
            let m = eval_boundary(f, exp_unit(t, u)).norm();
            lo = lo.min(m);
            hi = hi.max(m);
        }
        worst = worst.max(hi - lo);
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub unit: [f64; 3],
    pub value: Quaternion,
}

impl TraceRow {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

/// Values of `f` at every node in t-major, sphere-minor order.
pub fn trace(f: &SliceLaurentSeries, grid: &BoundaryGrid) -> Vec<TraceRow> {
    grid.nodes().map(|(t, u, _)| TraceRow { t, unit: u.vector(), value: eval_boundary(f, exp_unit(t, &u)) }).collect()
}

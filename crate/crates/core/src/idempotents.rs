//! Slice idempotents `f * f = f`.
//!
//! On every sphere `e^{tS}` an idempotent is identically 0, identically 1, or
//! vanishes at exactly one point `e^{tJ}` and equals 1 at exactly one point
//! `e^{tK}`. In the last case it is the affine function
//! `I ↦ -((J-K)⁻¹K + I(J-K)⁻¹)`.
//!
//! Most interesting idempotents jump between spheres and have no finite
//! Laurent expansion, so they are built and checked in the sampled model of
//! [`crate::periodic`], whose nodes are the t-nodes of a boundary grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::boundary::{eval_boundary, fibonacci_sphere, BoundaryGrid};
use crate::error::{Error, Result};
use crate::periodic::PeriodicWindow;
use crate::quaternion::{exp_unit, Quaternion, UnitImaginary};
use crate::series::SliceLaurentSeries;
use crate::{DEFAULT_MAX_DEGREE, EPS0};

/// Tolerance for recognising 0, 1 and the affine pair form on a sphere.
pub const CLASSIFY_TOL: f64 = 1e-8;

const SPHERE_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SphereBehavior {
    Zero,
    One,
    /// Zero at `e^{tJ}`, one at `e^{tK}`.
    Pair {
        j: UnitImaginary,
        k: UnitImaginary,
    },
}

impl SphereBehavior {
    pub fn pair(j: UnitImaginary, k: UnitImaginary) -> Result<Self> {
        if (j.to_quaternion() - k.to_quaternion()).norm() <= EPS0 {
            return Err(Error::DegenerateUnits);
        }
        Ok(SphereBehavior::Pair { j, k })
    }

    /// Zero, one, or a pair with antipodal units.
    pub fn is_self_tilde_conjugate(&self) -> bool {
        match self {
            SphereBehavior::Pair { j, k } => (j.to_quaternion() + k.to_quaternion()).norm() < CLASSIFY_TOL,
            _ => true,
        }
    }

    /// Behaviour of the conjugate function: the roles of `J` and `K` swap.
    pub fn conjugate(&self) -> SphereBehavior {
        match *self {
            SphereBehavior::Pair { j, k } => SphereBehavior::Pair { j: k, k: j },
            other => other,
        }
    }
}

/// Value at `e^{tI}` of an idempotent with the given behaviour on that sphere.
pub fn idempotent_value(b: &SphereBehavior, unit: &UnitImaginary) -> Result<Quaternion> {
    match b {
        SphereBehavior::Zero => Ok(Quaternion::ZERO),
        SphereBehavior::One => Ok(Quaternion::ONE),
        SphereBehavior::Pair { j, k } => {
            let (jq, kq) = (j.to_quaternion(), k.to_quaternion());
            let d = jq - kq;
            if d.norm() <= EPS0 {
                return Err(Error::DegenerateUnits);
            }
            let d_inv = d.inverse()?;
            Ok(-(d_inv * kq + unit.to_quaternion() * d_inv))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BehaviorTag {
    Zero,
    One,
    Pair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecInterval {
    pub t0: f64,
    pub t1: f64,
    pub tag: BehaviorTag,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<UnitImaginary>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<UnitImaginary>,
}

impl SpecInterval {
    pub fn new(t0: f64, t1: f64, behavior: SphereBehavior) -> Self {
        let (tag, j, k) = match behavior {
            SphereBehavior::Zero => (BehaviorTag::Zero, None, None),
            SphereBehavior::One => (BehaviorTag::One, None, None),
            SphereBehavior::Pair { j, k } => (BehaviorTag::Pair, Some(j), Some(k)),
        };
        SpecInterval { t0, t1, tag, j, k }
    }

    pub fn behavior(&self) -> Result<SphereBehavior> {
        match self.tag {
            BehaviorTag::Zero => Ok(SphereBehavior::Zero),
            BehaviorTag::One => Ok(SphereBehavior::One),
            BehaviorTag::Pair => match (self.j, self.k) {
                (Some(j), Some(k)) => SphereBehavior::pair(j, k)
                    .map_err(|_| Error::InvalidSpec(format!("J and K coincide on [{}, {})", self.t0, self.t1))),
                _ => Err(Error::InvalidSpec(format!("pair on [{}, {}) needs both J and K", self.t0, self.t1))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealPoints {
    #[serde(rename = "+1")]
    pub plus: u8,
    #[serde(rename = "-1")]
    pub minus: u8,
}

/// Piecewise-constant description of an idempotent over `t ∈ (0, π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdempotentSpec {
    pub intervals: Vec<SpecInterval>,
    pub real_points: RealPoints,
}

const COVER_TOL: f64 = 1e-9;

impl IdempotentSpec {
    /// Checks that the intervals tile `(0, π)` in order and every behaviour is well formed.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.intervals.is_empty() {
            return bad("no intervals".into());
        }
        if self.intervals[0].t0.abs() > COVER_TOL {
            return bad(format!("first interval starts at {} instead of 0", self.intervals[0].t0));
        }
        let last = self.intervals.last().unwrap().t1;
        if (last - PI).abs() > COVER_TOL {
            return bad(format!("last interval ends at {last} instead of pi"));
        }
        for (n, iv) in self.intervals.iter().enumerate() {
            if !(iv.t0 < iv.t1) {
                return bad(format!("interval {n} is empty: [{}, {})", iv.t0, iv.t1));
            }
            if n > 0 && (iv.t0 - self.intervals[n - 1].t1).abs() > COVER_TOL {
                return bad(format!("gap or overlap between intervals {} and {n}", n - 1));
            }
            iv.behavior()?;
        }
        if self.real_points.plus > 1 || self.real_points.minus > 1 {
            return bad("real point values must be 0 or 1".into());
        }
        Ok(())
    }

    pub fn behavior_at(&self, t: f64) -> Result<SphereBehavior> {
        let iv = self
            .intervals
            .iter()
            .find(|iv| iv.t0 <= t && t < iv.t1)
            .or_else(|| self.intervals.last().filter(|iv| t >= iv.t0 && t <= iv.t1 + COVER_TOL))
            .ok_or_else(|| Error::InvalidSpec(format!("no interval contains t = {t}")))?;
        iv.behavior()
    }

    pub fn value(&self, t: f64, unit: &UnitImaginary) -> Result<Quaternion> {
        idempotent_value(&self.behavior_at(t)?, unit)
    }

    /// Series whose values at every sphere of an `n_t` grid follow the spec.
    pub fn build(&self, n_t: usize) -> Result<SliceFit> {
        self.validate()?;
        fit_behaviors(PeriodicWindow::for_grid(n_t), |t| self.behavior_at(t))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: IdempotentSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidSpec(format!("spec JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization")
    }
}

/// A fitted series together with how far its values stray from the target off the fit slice.
#[derive(Clone, Debug)]
pub struct SliceFit {
    pub series: SliceLaurentSeries,
    pub window: PeriodicWindow,
    pub slice_residual: f64,
}

/// Fits a series to the idempotent with behaviour `behavior(t)` at each node sphere.
pub fn fit_behaviors(
    window: PeriodicWindow,
    mut behavior: impl FnMut(f64) -> Result<SphereBehavior>,
) -> Result<SliceFit> {
    let t_nodes: Vec<f64> = window.angles().into_iter().filter(|&th| th < PI).collect();
    let behaviors: Vec<SphereBehavior> = t_nodes.iter().map(|&t| behavior(t)).collect::<Result<_>>()?;
    let lookup = |t: f64| {
        let i = t_nodes.iter().position(|&s| (s - t).abs() < 1e-12).expect("fit queries node angles");
        behaviors[i]
    };
    let series = window.fit(&UnitImaginary::I, |t, u| idempotent_value(&lookup(t), u).expect("validated behaviour"));

    let probes = fibonacci_sphere(16);
    let mut slice_residual = 0.0f64;
    for (t, b) in t_nodes.iter().zip(&behaviors) {
        for u in &probes {
            let want = idempotent_value(b, u)?;
            slice_residual = slice_residual.max((eval_boundary(&series, exp_unit(*t, u)) - want).norm());
        }
    }
    Ok(SliceFit { series, window, slice_residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdempotentReport {
    /// `max |f*f - f|` over grid nodes.
    pub pointwise: f64,
    /// `‖f*f - f‖` in the sampled model of the grid.
    pub periodic_coefficient: f64,
    /// `‖f*f - f‖` for plain convolution; includes truncation error of jump functions.
    pub linear_coefficient: f64,
}

impl IdempotentReport {
    pub fn residual(&self) -> f64 {
        self.pointwise + self.periodic_coefficient
    }
}

/// Idempotency residuals of `f` on the spheres of `grid`.
pub fn verify_idempotent(f: &SliceLaurentSeries, grid: &BoundaryGrid) -> Result<IdempotentReport> {
    verify_idempotent_bounded(f, grid, DEFAULT_MAX_DEGREE)
}

pub fn verify_idempotent_bounded(
    f: &SliceLaurentSeries,
    grid: &BoundaryGrid,
    max_degree: i64,
) -> Result<IdempotentReport> {
    let ff = f.star_bounded(f, max_degree)?;
    let pointwise = grid
        .nodes()
        .map(|(t, u, _)| {
            let q = exp_unit(t, &u);
            (eval_boundary(&ff, q) - eval_boundary(f, q)).norm()
        })
        .fold(0.0, f64::max);
    let w = PeriodicWindow::for_grid(grid.n_t());
    let periodic_coefficient = w.star(f, f).distance(&w.fold(f));
    Ok(IdempotentReport { pointwise, periodic_coefficient, linear_coefficient: ff.distance(f) })
}

/// `max |tilde(f^c) - f|` coefficientwise in the sampled model of `window`.
pub fn tilde_conjugate_residual(f: &SliceLaurentSeries, window: PeriodicWindow) -> f64 {
    window.tilde(&f.conjugate()).max_coeff_distance(&window.fold(f))
}

fn unclassifiable(t: f64, reason: impl Into<String>) -> Error {
    Error::Unclassifiable { t, reason: reason.into() }
}

/// Reads off `J` and `K` in closed form from the two values on the slice through `i`
/// and checks the result against samples over the whole sphere.
pub fn classify_sphere(f: &SliceLaurentSeries, t: f64) -> Result<SphereBehavior> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::InvalidInput(format!("sphere parameter t = {t} outside (0, pi)")));
    }
    let i0 = UnitImaginary::I;
    let plus = eval_boundary(f, exp_unit(t, &i0));
    let minus = eval_boundary(f, exp_unit(t, &-i0));
    // f(e^{tI}) = alpha + I beta on the whole sphere
    let alpha = (plus + minus) * 0.5;
    let beta = -(i0.to_quaternion() * (plus - minus)) * 0.5;

    let samples: Vec<(UnitImaginary, Quaternion)> =
        fibonacci_sphere(SPHERE_SAMPLES).into_iter().map(|u| (u, eval_boundary(f, exp_unit(t, &u)))).collect();
    let fits = |b: &SphereBehavior| -> Result<f64> {
        let mut worst = 0.0f64;
        for (u, v) in &samples {
            worst = worst.max((idempotent_value(b, u)? - *v).norm());
        }
        Ok(worst)
    };

    if fits(&SphereBehavior::Zero)? < CLASSIFY_TOL {
        return Ok(SphereBehavior::Zero);
    }
    if fits(&SphereBehavior::One)? < CLASSIFY_TOL {
        return Ok(SphereBehavior::One);
    }
    let beta_inv = beta.inverse().map_err(|_| unclassifiable(t, "constant on the sphere but neither 0 nor 1"))?;
    let jq = -(alpha * beta_inv);
    let kq = (Quaternion::ONE - alpha) * beta_inv;
    for (name, q) in [("zero", jq), ("one", kq)] {
        if q.re().abs() > CLASSIFY_TOL || (q.norm() - 1.0).abs() > CLASSIFY_TOL {
            return Err(unclassifiable(t, format!("{name} location {q} is not a unit imaginary")));
        }
    }
    let behavior = SphereBehavior::pair(UnitImaginary::new(jq.vector())?, UnitImaginary::new(kq.vector())?)
        .map_err(|_| unclassifiable(t, "zero and one locations coincide"))?;
    let err = fits(&behavior)?;
    if err > CLASSIFY_TOL {
        return Err(unclassifiable(t, format!("pair form misses samples by {err:e}")));
    }
    Ok(behavior)
}

/// Value 0 or 1 at a real point, read from the nearest sphere of the grid.
pub fn classify_real_point(f: &SliceLaurentSeries, grid: &BoundaryGrid, positive: bool) -> Result<u8> {
    let t = if positive { grid.t_nodes()[0] } else { *grid.t_nodes().last().unwrap() };
    match classify_sphere(f, t)? {
        SphereBehavior::Zero => Ok(0),
        SphereBehavior::One => Ok(1),
        SphereBehavior::Pair { .. } => {
            Err(unclassifiable(if positive { 0.0 } else { PI }, "slice values near the real point depend on the unit"))
        }
    }
}

/// Checks that `a = f(e^{-tJ})` at the zero `e^{tJ}` has the form `1 + yK` with `K ⊥ J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoPointReport {
    pub t: f64,
    pub j: UnitImaginary,
    pub a: Quaternion,
    pub x: f64,
    pub y: f64,
    pub k: Option<UnitImaginary>,
    /// `|x - 1|`
    pub real_part: f64,
    /// `|⟨K, J⟩|`, or `|⟨Im a, J⟩|` when `y` is too small to define `K`.
    pub orthogonality: f64,
    /// `‖aJ + Ja - 2J‖`
    pub anticommutator: f64,
    /// `max_I |f(e^{tI}) - ((1 + IJ)/2) a|`
    pub formula: f64,
    /// `|a - 1|`
    pub distance_to_one: f64,
}

impl TwoPointReport {
    pub fn max_residual(&self) -> f64 {
        self.real_part.max(self.orthogonality).max(self.anticommutator).max(self.formula)
    }
}

pub fn check_two_point_form(f: &SliceLaurentSeries, t: f64) -> Result<TwoPointReport> {
    let SphereBehavior::Pair { j, .. } = classify_sphere(f, t)? else {
        return Err(unclassifiable(t, "no isolated zero on this sphere"));
    };
    let jq = j.to_quaternion();
    let a = eval_boundary(f, exp_unit(-t, &j));
    let (x, y, k) = a.slice_decompose();
    let orthogonality = match k {
        Some(k) if y > CLASSIFY_TOL => k.dot(&j).abs(),
        _ => Quaternion::imaginary(a.vector()).dot(jq).abs(),
    };
    let formula = fibonacci_sphere(64)
        .iter()
        .map(|u| {
            let lhs = eval_boundary(f, exp_unit(t, u));
            let rhs = (Quaternion::ONE + u.to_quaternion() * jq) * 0.5 * a;
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max);
    Ok(TwoPointReport {
        t,
        j,
        a,
        x,
        y,
        k,
        real_part: (x - 1.0).abs(),
        orthogonality,
        anticommutator: (a * jq + jq * a - jq * 2.0).norm(),
        formula,
        distance_to_one: (a - Quaternion::ONE).norm(),
    })
}

/// The imaginary unit `cos t·i + sin t·j`.
pub fn rotating_unit(t: f64) -> UnitImaginary {
    UnitImaginary::new([t.cos(), t.sin(), 0.0]).expect("unit circle point")
}

/// Sphere behaviour of `(1 + I(cos t·i + sin t·j))/2`.
pub fn rotating_behavior(t: f64) -> SphereBehavior {
    let u = rotating_unit(t);
    SphereBehavior::Pair { j: u, k: -u }
}

/// The idempotent `(1 + I(cos t·i + sin t·j))/2` sampled on an `n_t` grid.
pub fn rotating_example(n_t: usize) -> Result<SliceFit> {
    fit_behaviors(PeriodicWindow::for_grid(n_t), |t| Ok(rotating_behavior(t)))
}

/// `ℓ(e^{tI}) = (1 - IJ)/2`, zero at `-J` and one at `J` on every sphere.
pub fn half_slice_spec(j: UnitImaginary) -> IdempotentSpec {
    IdempotentSpec {
        intervals: vec![SpecInterval::new(0.0, PI, SphereBehavior::Pair { j: -j, k: j })],
        real_points: RealPoints { plus: 1, minus: 0 },
    }
}

/// Indicator of the spheres with `t ∈ (0, π/3) ∪ (2π/3, π)`.
pub fn spherical_indicator_spec() -> IdempotentSpec {
    IdempotentSpec {
        intervals: vec![
            SpecInterval::new(0.0, PI / 3.0, SphereBehavior::One),
            SpecInterval::new(PI / 3.0, 2.0 * PI / 3.0, SphereBehavior::Zero),
            SpecInterval::new(2.0 * PI / 3.0, PI, SphereBehavior::One),
        ],
        real_points: RealPoints { plus: 1, minus: 1 },
    }
}

//! Shift-invariant subspaces of H² and inner-outer factorization.
//!
//! All subspaces are finite truncations: the closed span of `qⁿ * g` is
//! replaced by `n = 0..=depth`, and vectors live on an explicit ambient
//! support. The inner product is the right-Hilbert one, so projections read
//! `Pf = Σ uᵢ ⟨f, uᵢ⟩` with the quaternion on the right.

use serde::Serialize;

use crate::boundary::{make_grid, unimodularity_residual, BoundaryGrid};
use crate::error::{Error, Result};
use crate::operators::{
    periodic_multiplier, shift_matrix, support_radius, CoefficientModel, ModelFrame, QuaternionMatrix,
};
use crate::quaternion::Quaternion;
use crate::series::{SliceLaurentSeries, Support};
use crate::{DEFAULT_MAX_DEGREE, EPS0};

/// Vectors whose Gram-Schmidt residual falls below this fraction of their norm are dropped.
pub const RANK_TOL: f64 = 1e-10;
/// Minimal residual of a generator outside the shifted subspace.
pub const WANDERING_TOL: f64 = 1e-8;
/// Coefficients below this norm are ignored when fixing the phase of a wandering vector.
pub const PHASE_TOL: f64 = 1e-8;

fn inner(a: &[Quaternion], b: &[Quaternion]) -> Quaternion {
    a.iter().zip(b).map(|(&x, &y)| y.conj() * x).sum()
}

fn norm(a: &[Quaternion]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal family on a common ambient support.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    ambient: Support,
    vectors: Vec<Vec<Quaternion>>,
}

impl SubspaceBasis {
    pub fn empty(ambient: Support) -> Self {
        SubspaceBasis { ambient, vectors: Vec::new() }
    }

    pub fn ambient(&self) -> Support {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> Vec<SliceLaurentSeries> {
        self.vectors.iter().map(|v| SliceLaurentSeries::new(self.ambient.lo, v.clone())).collect()
    }

    fn dense(&self, f: &SliceLaurentSeries) -> Result<Vec<Quaternion>> {
        let s = f.trim(0.0).support();
        if !f.is_zero() && !self.ambient.contains_support(&s) {
            return Err(Error::AmbientMismatch {
                lo: s.lo,
                hi: s.hi,
                ambient_lo: self.ambient.lo,
                ambient_hi: self.ambient.hi,
            });
        }
        Ok(self.ambient.iter().map(|n| f.coeff(n)).collect())
    }

    /// Appends `v` after two passes of orthogonalization; returns whether it was kept.
    fn push(&mut self, mut v: Vec<Quaternion>) -> bool {
        let original = norm(&v);
        if original <= EPS0 {
            return false;
        }
        for _ in 0..2 {
            for u in &self.vectors {
                let c = inner(&v, u);
                for (x, &y) in v.iter_mut().zip(u) {
                    *x -= y * c;
                }
            }
        }
        let r = norm(&v);
        if r < RANK_TOL * original {
            return false;
        }
        for x in v.iter_mut() {
            *x *= 1.0 / r;
        }
        self.vectors.push(v);
        true
    }

    /// Adds vectors one by one, dropping those already in the span.
    pub fn extend<'a>(&mut self, vectors: impl IntoIterator<Item = &'a SliceLaurentSeries>) -> Result<()> {
        for v in vectors {
            let d = self.dense(v)?;
            self.push(d);
        }
        Ok(())
    }

    /// `Σ uᵢ ⟨f, uᵢ⟩`.
    pub fn project(&self, f: &SliceLaurentSeries) -> Result<SliceLaurentSeries> {
        let d = self.dense(f)?;
        let mut out = vec![Quaternion::ZERO; d.len()];
        for u in &self.vectors {
            let c = inner(&d, u);
            for (o, &y) in out.iter_mut().zip(u) {
                *o += y * c;
            }
        }
        Ok(SliceLaurentSeries::new(self.ambient.lo, out))
    }

    /// `max |⟨uᵢ, uⱼ⟩ - δᵢⱼ|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { Quaternion::ONE } else { Quaternion::ZERO };
                worst = worst.max((inner(a, b) - target).norm());
            }
        }
        worst
    }
}

/// Right-Hilbert Gram-Schmidt over the union of the input supports.
pub fn orthonormalize(vectors: &[SliceLaurentSeries]) -> SubspaceBasis {
    let Some(first) = vectors.first() else {
        return SubspaceBasis::empty(Support::new(0, 0));
    };
    let ambient = vectors.iter().fold(first.support(), |s, v| s.union(&v.support()));
    let mut b = SubspaceBasis::empty(ambient);
    b.extend(vectors).expect("ambient covers every input");
    b
}

fn require_hardy(f: &SliceLaurentSeries) -> Result<()> {
    match f.first_negative_index() {
        Some(n) => Err(Error::NotHardy(n)),
        None => Ok(()),
    }
}

/// Orthonormal basis of `span{qⁿ * g : n = 0..=depth}` on `[0, g.n_max + depth]`.
pub fn krylov_span(g: &SliceLaurentSeries, depth: usize) -> Result<SubspaceBasis> {
    require_hardy(g)?;
    let ambient = Support::new(0, g.n_max().max(0) + depth as i64);
    let mut b = SubspaceBasis::empty(ambient);
    let g = g.restrict(Support::new(0, g.n_max().max(0)));
    for n in 0..=depth as i64 {
        b.extend([&g.shift(n)])?;
    }
    Ok(b)
}

pub fn project(f: &SliceLaurentSeries, basis: &SubspaceBasis) -> Result<SliceLaurentSeries> {
    basis.project(f)
}

/// `‖1 - P1‖` for the projection onto the depth-truncated shift span of `g`.
pub fn cyclicity_residual(g: &SliceLaurentSeries, depth: usize) -> Result<f64> {
    if g.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let b = krylov_span(g, depth)?;
    let one = SliceLaurentSeries::one();
    Ok(one.distance(&b.project(&one)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclicityVerdict {
    Cyclic,
    NonCyclic,
    Inconclusive,
}

impl CyclicityVerdict {
    pub fn from_residual(r: f64) -> Self {
        if r < 1e-6 {
            CyclicityVerdict::Cyclic
        } else if r > 0.1 {
            CyclicityVerdict::NonCyclic
        } else {
            CyclicityVerdict::Inconclusive
        }
    }
}

/// Orthonormal basis of `span{qⁿ * gᵢ : n = 1..=depth}` on `[0, max n_max + depth]`.
pub fn shifted_span(generators: &[SliceLaurentSeries], depth: usize) -> Result<SubspaceBasis> {
    let top = generators.iter().map(|g| g.n_max().max(0)).max().unwrap_or(0);
    let mut b = SubspaceBasis::empty(Support::new(0, top + depth as i64));
    for g in generators {
        for n in 1..=depth as i64 {
            b.extend([&g.shift(n)])?;
        }
    }
    Ok(b)
}

/// Right-multiplies by the unit that makes the lowest significant coefficient positive real.
pub fn normalize_phase(phi: &SliceLaurentSeries) -> SliceLaurentSeries {
    match phi.coeffs().iter().find(|a| a.norm() > PHASE_TOL) {
        Some(&a) => phi.scale_right(a.conj() * (1.0 / a.norm())),
        None => phi.clone(),
    }
}

/// Unit vector of `K ⊖ qK` for `K` the shift span of `generators`, phase normalized.
pub fn wandering_vector(generators: &[SliceLaurentSeries], depth: usize) -> Result<SliceLaurentSeries> {
    if generators.is_empty() {
        return Err(Error::InvalidInput("no generators".into()));
    }
    for g in generators {
        require_hardy(g)?;
    }
    let gens: Vec<SliceLaurentSeries> =
        generators.iter().map(|g| g.restrict(Support::new(0, g.n_max().max(0)))).collect();
    let qk = shifted_span(&gens, depth)?;
    for g in &gens {
        let r = g.restrict(qk.ambient());
        let r = &r - &qk.project(&r)?;
        let n = r.l2_norm();
        if n > WANDERING_TOL {
            return Ok(normalize_phase(&r.scale(1.0 / n)));
        }
    }
    Err(Error::DoublyInvariant)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactorResiduals {
    pub reconstruction: f64,
    pub unimodularity: f64,
    pub cyclicity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub phi: SliceLaurentSeries,
    pub g: SliceLaurentSeries,
    pub residuals: FactorResiduals,
    pub depth: usize,
    pub max_degree: i64,
}

impl FactorizationReport {
    pub fn summary(&self) -> String {
        let r = &self.residuals;
        format!(
            "reconstruction {:.3e}, unimodularity {:.3e}, cyclicity {:.3e} (depth {}, max_degree {})",
            r.reconstruction, r.unimodularity, r.cyclicity, self.depth, self.max_degree
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

#[derive(Clone, Debug)]
pub struct FactorOptions {
    /// Shift depth; see [`default_depth`].
    pub depth: Option<usize>,
    pub max_degree: i64,
    pub reconstruction_tol: f64,
    pub unimodularity_tol: f64,
    pub cyclicity_tol: f64,
    /// Grid for the nodewise part of the unimodularity check.
    pub grid: BoundaryGrid,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            depth: None,
            max_degree: DEFAULT_MAX_DEGREE,
            reconstruction_tol: 1e-8,
            unimodularity_tol: 1e-6,
            cyclicity_tol: 1e-6,
            grid: make_grid(128, 256).expect("default grid"),
        }
    }
}

/// Smallest depth chosen automatically.
pub const MIN_AUTO_DEPTH: i64 = 64;

/// Four times the support width but at least [`MIN_AUTO_DEPTH`], capped so the span fits in `max_degree`.
pub fn default_depth(f: &SliceLaurentSeries, max_degree: i64) -> usize {
    let width = f.n_max() - f.n_min() + 1;
    (4 * width).max(MIN_AUTO_DEPTH).min(max_degree - f.n_max()).max(1) as usize
}

/// Splits `f = φ * g` with `φ` the wandering vector of `{f}` and `g = φ̃^c * f`.
///
/// Returns the report on success; when a post-check fails the same report is
/// carried by [`Error::FactorizationResidual`].
pub fn inner_outer_factorize(f: &SliceLaurentSeries, opts: &FactorOptions) -> Result<FactorizationReport> {
    require_hardy(f)?;
    if f.l2_norm() <= EPS0 {
        return Err(Error::ZeroFunction);
    }
    let f = f.restrict(Support::new(0, f.n_max().max(0)));
    f.check_limit(opts.max_degree)?;
    let depth = opts.depth.unwrap_or_else(|| default_depth(&f, opts.max_degree));

    let phi = wandering_vector(std::slice::from_ref(&f), depth)?.trim_tail(1e-13);
    let g = phi.tilde().conjugate().star_bounded(&f, opts.max_degree)?.restrict(Support::new(0, f.n_max()));
    let reconstruction = f.distance(&phi.star_bounded(&g, opts.max_degree)?);
    let unimodularity = unimodularity_residual(&phi, &opts.grid)?;
    let g_depth = (depth as i64).min(opts.max_degree - g.n_max()).max(1) as usize;
    let cyclicity = cyclicity_residual(&g, g_depth)?;

    let report = FactorizationReport {
        phi,
        g,
        residuals: FactorResiduals { reconstruction, unimodularity, cyclicity },
        depth,
        max_degree: opts.max_degree,
    };
    let ok = reconstruction < opts.reconstruction_tol
        && unimodularity < opts.unimodularity_tol
        && cyclicity < opts.cyclicity_tol;
    if ok {
        Ok(report)
    } else {
        Err(Error::FactorizationResidual(Box::new(report)))
    }
}

/// Largest admissible `|a|` for a Blaschke zero.
pub const BLASCHKE_RADIUS: f64 = 0.7;

/// Blaschke factor with zero at `a`, truncated to `[0, order]`.
///
/// Built as `(a - q) * (1 - qā)^{-*}` with the inverse expanded to `order`,
/// then normalized on the right by `ā/|a|` so the constant term is `|a|`.
pub fn blaschke_factor(a: Quaternion, order: usize) -> Result<SliceLaurentSeries> {
    let r = a.norm();
    if r > BLASCHKE_RADIUS {
        return Err(Error::PointTooCloseToBoundary(r));
    }
    let window = Support::new(0, order as i64);
    let zero_factor = SliceLaurentSeries::new(0, vec![a, -Quaternion::ONE]);
    if r <= EPS0 {
        return Ok(zero_factor.restrict(window));
    }
    let denominator = SliceLaurentSeries::new(0, vec![Quaternion::ONE, -a.conj()]);
    let inverse = denominator.star_inverse(window)?;
    let b = zero_factor.star(&inverse)?.restrict(window).scale_right(a.conj() * (1.0 / r));

    let tail = 4.0 * r.powi(order as i32).max(1e-300);
    let at_zero = b.evaluate(a)?.norm();
    let modulus = crate::boundary::modulus_coefficient_residual(&b)?;
    if at_zero > tail.max(1e-12) || modulus > tail.max(1e-12) {
        return Err(Error::InvalidInput(format!(
            "Blaschke factor at order {order} misses its checks: |B(a)| = {at_zero:e}, modulus residual {modulus:e}"
        )));
    }
    Ok(b)
}

/// Product of Blaschke factors, truncated to `[0, order]` after every step.
pub fn blaschke_product(zeros: &[Quaternion], order: usize) -> Result<SliceLaurentSeries> {
    let window = Support::new(0, order as i64);
    let mut acc = SliceLaurentSeries::one();
    for &a in zeros {
        acc = acc.star(&blaschke_factor(a, order)?)?.restrict(window);
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectorReport {
    /// `‖P² - P‖`
    pub idempotency: f64,
    /// `‖P† - P‖`
    pub self_adjointness: f64,
    /// `‖φ̃ * φ^c - φ̃‖`
    pub tilde_identity: f64,
    /// `‖(Id - P) M_q P‖ + ‖(Id - P) M_q⁻¹ P‖`
    pub shift_invariance: f64,
}

impl ProjectorReport {
    pub fn projection(&self) -> f64 {
        self.idempotency + self.self_adjointness
    }

    pub fn max_residual(&self) -> f64 {
        self.projection().max(self.tilde_identity).max(self.shift_invariance)
    }
}

/// Checks whether `P = M_φ` is the orthogonal projection onto a doubly invariant subspace.
pub fn doubly_invariant_projector(phi: &SliceLaurentSeries, model: CoefficientModel) -> Result<ProjectorReport> {
    let r = support_radius(phi);
    let frame = ModelFrame::new(model, 2 * r + 2);
    let p = frame.multiplier(phi);
    let id = QuaternionMatrix::identity(frame.ambient);
    let (up, down) = match frame.periodic {
        Some(w) => (
            periodic_multiplier(&SliceLaurentSeries::monomial(1, Quaternion::ONE), w),
            periodic_multiplier(&SliceLaurentSeries::monomial(-1, Quaternion::ONE), w),
        ),
        None => (shift_matrix(frame.ambient, 1), shift_matrix(frame.ambient, -1)),
    };
    let idempotency = frame.residual(&p.mul(&p)?.sub(&p)?);
    let self_adjointness = frame.residual(&p.adjoint().sub(&p)?);
    let complement = id.sub(&p)?;
    let shift_invariance =
        frame.residual(&complement.mul(&up)?.mul(&p)?) + frame.residual(&complement.mul(&down)?.mul(&p)?);
    let tilde_identity = match frame.periodic {
        Some(w) => w.star(&w.tilde(phi), &phi.conjugate()).distance(&w.tilde(phi)),
        None => phi.tilde().star(&phi.conjugate())?.distance(&phi.tilde()),
    };
    Ok(ProjectorReport { idempotency, self_adjointness, tilde_identity, shift_invariance })
}

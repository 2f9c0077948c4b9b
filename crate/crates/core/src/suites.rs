//! Self-checks run by `slicelab verify`.
//!
//! Every suite draws its fixtures from a seeded generator and reports one row
//! per property: the measured residual, the bound it is compared with, and
//! whether it passed.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{
    eval_boundary, make_grid, modulus_coefficient_residual, modulus_identity_residual, BoundaryGrid,
};
use crate::error::Result;
use crate::idempotents::{
    check_two_point_form, classify_sphere, half_slice_spec, rotating_example, rotating_unit, spherical_indicator_spec,
    verify_idempotent_bounded, SphereBehavior,
};
use crate::operators::{isometry_residual, multiplier_matrix, CoefficientModel};
use crate::periodic::PeriodicWindow;
use crate::quaternion::{exp_unit, Quaternion, UnitImaginary};
use crate::sampling::{random_blaschke, random_outer, random_series, random_series_within, random_unit_monomial};
use crate::series::{SliceLaurentSeries, Support};
use crate::subspaces::{
    blaschke_factor, cyclicity_residual, doubly_invariant_projector, inner_outer_factorize, normalize_phase,
    wandering_vector, FactorOptions,
};
use crate::DEFAULT_MAX_DEGREE;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: f64,
    pub grid_t: usize,
    pub grid_sphere: usize,
    pub max_degree: i64,
    pub depth: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, tol: 1e-8, grid_t: 128, grid_sphere: 256, max_degree: DEFAULT_MAX_DEGREE, depth: None }
    }
}

impl SuiteConfig {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn grid(&self) -> Result<BoundaryGrid> {
        make_grid(self.grid_t, self.grid_sphere)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Algebra,
    Adjoint,
    Isometry,
    Idempotent,
    Beurling,
    Factorization,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Algebra, Suite::Adjoint, Suite::Isometry, Suite::Idempotent, Suite::Beurling, Suite::Factorization];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Adjoint => "adjoint",
            Suite::Isometry => "isometry",
            Suite::Idempotent => "idempotent",
            Suite::Beurling => "beurling",
            Suite::Factorization => "factorization",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Below,
    Above,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub property: String,
    pub value: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn below(&mut self, property: &str, value: f64, bound: f64) {
        self.push(property, value, bound, Comparison::Below, value < bound);
    }

    fn above(&mut self, property: &str, value: f64, bound: f64) {
        self.push(property, value, bound, Comparison::Above, value > bound);
    }

    fn push(&mut self, property: &str, value: f64, bound: f64, comparison: Comparison, passed: bool) {
        self.checks.push(Check { suite: self.suite, property: property.to_string(), value, bound, comparison, passed });
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rec = Recorder { suite: suite.name(), checks: Vec::new() };
    match suite {
        Suite::Algebra => algebra(cfg, &mut rec)?,
        Suite::Adjoint => adjoint(cfg, &mut rec)?,
        Suite::Isometry => isometry(cfg, &mut rec)?,
        Suite::Idempotent => idempotent(cfg, &mut rec)?,
        Suite::Beurling => beurling(cfg, &mut rec)?,
        Suite::Factorization => factorization(cfg, &mut rec)?,
    }
    Ok(rec.checks)
}

/// Fixed-width table, one row per check.
pub fn format_table(checks: &[Check]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<14} {:<44} {:>12} {:>12}  result", "suite", "property", "value", "bound");
    for c in checks {
        let op = match c.comparison {
            Comparison::Below => "<",
            Comparison::Above => ">",
        };
        let _ = writeln!(
            out,
            "{:<14} {:<44} {:>12.3e} {}{:>11.1e}  {}",
            c.suite,
            c.property,
            c.value,
            op,
            c.bound,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    out
}

fn algebra(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let mut rng = cfg.rng(1);
    let (mut assoc, mut anti, mut norm, mut inv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let f = random_series_within(&mut rng, 16);
        let g = random_series_within(&mut rng, 16);
        let h = random_series_within(&mut rng, 16);
        let m = cfg.max_degree;
        let l = f.star_bounded(&g, m)?.star_bounded(&h, m)?;
        let r = f.star_bounded(&g.star_bounded(&h, m)?, m)?;
        assoc = assoc.max(l.max_coeff_distance(&r));
        let c1 = f.star_bounded(&g, m)?.conjugate();
        let c2 = g.conjugate().star_bounded(&f.conjugate(), m)?;
        anti = anti.max(c1.max_coeff_distance(&c2));
        norm = norm.max((f.l2_norm() - f.conjugate().l2_norm()).abs());
        inv = inv.max(f.tilde().tilde().max_coeff_distance(&f));
    }
    rec.below("star associativity", assoc, 1e-11);
    rec.below("conjugate reverses products", anti, 1e-11);
    rec.below("conjugation preserves the norm", norm, 1e-11);
    rec.below("tilde is an involution", inv, 1e-11);

    let mut compat = 0.0f64;
    let grid = make_grid(16, 16)?;
    for _ in 0..20 {
        let f = random_series_within(&mut rng, 8);
        let g = random_series_within(&mut rng, 8);
        let fg = f.star_bounded(&g, cfg.max_degree)?;
        for (t, u, _) in grid.nodes() {
            let q = exp_unit(t, &u);
            let fq = eval_boundary(&f, q);
            if fq.norm() <= 1e-6 {
                continue;
            }
            let rhs = fq * eval_boundary(&g, f.t_map(q)?);
            compat = compat.max((eval_boundary(&fg, q) - rhs).norm() / (1.0 + g.l1_norm()));
        }
    }
    rec.below("pointwise product formula", compat, 1e-9);

    let f = SliceLaurentSeries::new(0, vec![Quaternion::ONE, Quaternion::real(0.5)]);
    let r = f.star_inverse_bounded(Support::new(0, 60), cfg.max_degree)?;
    let resid = &f.star_bounded(&r, cfg.max_degree)? - &SliceLaurentSeries::one();
    rec.below("star inverse of 1 + q/2", resid.restrict(Support::new(0, 60)).l2_norm(), 1e-10);
    Ok(())
}

fn adjoint(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let mut rng = cfg.rng(2);
    let (mut ident, mut entries) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let phi = random_series_within(&mut rng, 6);
        let f = random_series_within(&mut rng, 6);
        let codomain = f.support().sum(&phi.support());
        let g = random_series(&mut rng, codomain);
        let m = multiplier_matrix(&phi, f.support(), codomain);
        let adj = multiplier_matrix(&phi.tilde().conjugate(), codomain, f.support());
        let lhs = m.apply(&f)?.l2_inner(&g);
        let rhs = f.l2_inner(&adj.apply(&g)?);
        ident = ident.max((lhs - rhs).norm());
        entries = entries.max(m.adjoint().sub(&adj)?.max_abs());
    }
    rec.below("<M f, g> = <f, M~c g>", ident, 1e-11);
    rec.below("conjugate transpose = tilde-conjugate multiplier", entries, 1e-12);
    Ok(())
}

fn isometry(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let mut rng = cfg.rng(3);
    let domain = Support::new(0, 16);
    let mut uni = 0.0f64;
    let mut modulus = 0.0f64;
    for k in 0..6 {
        let phi = if k < 3 { random_unit_monomial(&mut rng, 4) } else { random_blaschke(&mut rng, 1, 0.1, 0.5, 128)? };
        uni = uni.max(isometry_residual(&phi, domain)?);
        modulus = modulus.max(modulus_coefficient_residual(&phi)?);
    }
    rec.below("isometry residual, unimodular", uni, 1e-9);
    rec.below("tilde(phi) * conj(phi) = 1, unimodular", modulus, 1e-9);

    let mut non = f64::INFINITY;
    let mut non_modulus = f64::INFINITY;
    for _ in 0..6 {
        let phi = random_outer(&mut rng, 2, 0.6);
        non = non.min(isometry_residual(&phi, domain)?);
        non_modulus = non_modulus.min(modulus_coefficient_residual(&phi)?);
    }
    rec.above("isometry residual, non-unimodular", non, 1e-2);
    rec.above("tilde(phi) * conj(phi) = 1 fails, non-unimodular", non_modulus, 1e-2);

    let phi = random_series_within(&mut rng, 6);
    let coarse = make_grid(cfg.grid_t.min(32), cfg.grid_sphere.min(32))?;
    rec.below(
        "|phi(e^-tI)|^2 = Re(tilde(phi) * conj(phi))",
        modulus_identity_residual(&phi, &coarse)? / (1.0 + phi.l1_norm().powi(2)),
        1e-9,
    );
    Ok(())
}

fn idempotent(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let grid = cfg.grid()?;
    let window = PeriodicWindow::for_grid(cfg.grid_t);
    let j = UnitImaginary::new([1.0, -2.0, 2.0])?;
    let examples = [
        ("spherical indicator", spherical_indicator_spec().build(cfg.grid_t)?),
        ("half-slice (1 - IJ)/2", half_slice_spec(j).build(cfg.grid_t)?),
        ("rotating (1 + I u(t))/2", rotating_example(cfg.grid_t)?),
    ];
    for (name, fit) in &examples {
        let r = verify_idempotent_bounded(&fit.series, &grid, cfg.max_degree)?;
        rec.below(&format!("f * f = f, {name}"), r.residual(), cfg.tol);
    }

    let probe: Vec<f64> = grid.t_nodes().iter().copied().step_by((cfg.grid_t / 8).max(1)).collect();
    let (mut angle, mut two_point, mut to_one) = (0.0f64, 0.0f64, 0.0f64);
    for &t in &probe {
        for (fit, zero, one) in [(&examples[1].1, -j, j), (&examples[2].1, rotating_unit(t), -rotating_unit(t))] {
            match classify_sphere(&fit.series, t)? {
                SphereBehavior::Pair { j: z, k: o } => angle = angle.max(z.angle_to(&zero)).max(o.angle_to(&one)),
                _ => angle = f64::INFINITY,
            }
            let rep = check_two_point_form(&fit.series, t)?;
            two_point = two_point.max(rep.max_residual());
            to_one = to_one.max(rep.distance_to_one);
        }
    }
    rec.below("classified zero/one units, angular error", angle, 1e-6);
    rec.below("f(e^-tJ) = 1 + yK with K orthogonal to J", two_point, cfg.tol);
    rec.below("f(e^-tJ) = 1 for self tilde-conjugate examples", to_one, cfg.tol);

    let mut proj = 0.0f64;
    for (_, fit) in &examples {
        proj = proj.max(doubly_invariant_projector(&fit.series, CoefficientModel::Periodic { window })?.max_residual());
    }
    rec.below("doubly invariant projector residuals", proj, 1e-9);
    let q = SliceLaurentSeries::monomial(1, Quaternion::ONE);
    let fail = doubly_invariant_projector(&q, CoefficientModel::Periodic { window })?.projection();
    rec.above("q is not a projector", fail, 1.0 - 1e-12);
    Ok(())
}

fn beurling(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let mut rng = cfg.rng(5);
    let depth = cfg.depth.unwrap_or(96);
    let n = 128usize;
    let mut worst = 0.0f64;
    for k in 0..4 {
        let inner = match k {
            0 => random_unit_monomial(&mut rng, 3),
            1 | 2 => random_blaschke(&mut rng, 1, 0.2, 0.5, n)?,
            _ => random_blaschke(&mut rng, 2, 0.2, 0.5, n)?,
        };
        let gens: Vec<SliceLaurentSeries> =
            (0..2).map(|_| inner.star(&random_outer(&mut rng, 1, 0.5))).collect::<Result<_>>()?;
        let phi = wandering_vector(&gens, depth)?;
        worst = worst.max(phi.max_coeff_distance(&normalize_phase(&inner)));
    }
    rec.below("wandering vector recovers the inner factor", worst, 1e-6);

    let mut cyc = 0.0f64;
    for _ in 0..4 {
        cyc = cyc.max(cyclicity_residual(&random_outer(&mut rng, 2, 0.6), 64)?);
    }
    rec.below("cyclicity residual, outer", cyc, 1e-6);
    let b = blaschke_factor(Quaternion::new(0.0, 0.4, 0.0, 0.0), n)?;
    rec.above("cyclicity residual, Blaschke factor", cyclicity_residual(&b, 64)?, 0.5);
    Ok(())
}

fn factorization(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let mut rng = cfg.rng(6);
    let opts = FactorOptions {
        depth: cfg.depth,
        max_degree: cfg.max_degree,
        reconstruction_tol: cfg.tol,
        grid: cfg.grid()?,
        ..FactorOptions::default()
    };
    let a = Quaternion::new(0.0, 0.4, 0.0, 0.0);
    let b = Quaternion::new(0.0, 0.0, 0.3, 0.0);
    let inners = [SliceLaurentSeries::monomial(1, Quaternion::ONE), crate::subspaces::blaschke_product(&[a, b], 128)?];
    let (mut recon, mut uni, mut cyc, mut again) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for inner in &inners {
        let outer = random_outer(&mut rng, 1, 0.5);
        let f = inner.star(&outer)?.restrict(Support::new(0, inner.n_max().max(0) + outer.n_max()));
        let rep = match inner_outer_factorize(&f, &opts) {
            Ok(r) => r,
            Err(crate::Error::FactorizationResidual(r)) => *r,
            Err(e) => return Err(e),
        };
        recon = recon.max(rep.residuals.reconstruction);
        uni = uni.max(rep.residuals.unimodularity);
        cyc = cyc.max(rep.residuals.cyclicity);
        let second = match inner_outer_factorize(&rep.g, &opts) {
            Ok(r) => r,
            Err(crate::Error::FactorizationResidual(r)) => *r,
            Err(e) => return Err(e),
        };
        again = again.max(second.phi.max_coeff_distance(&SliceLaurentSeries::one()));
    }
    rec.below("reconstruction |f - phi * g|", recon, cfg.tol);
    rec.below("unimodularity of phi", uni, 1e-6);
    rec.below("cyclicity residual of g", cyc, 1e-6);
    rec.below("refactoring g gives phi = 1", again, 1e-6);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass_on_a_small_grid() {
        let cfg = SuiteConfig { grid_t: 16, grid_sphere: 32, ..SuiteConfig::default() };
        for suite in [Suite::Algebra, Suite::Adjoint, Suite::Isometry, Suite::Idempotent] {
            let checks = run_suite(suite, &cfg).unwrap();
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.passed, "{}", format_table(std::slice::from_ref(c)));
            }
        }
    }

    #[test]
    fn all_suites_pass_at_defaults() {
        let cfg = SuiteConfig::default();
        for suite in Suite::ALL {
            let checks = run_suite(suite, &cfg).unwrap();
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).cloned().collect();
            assert!(failed.is_empty(), "{}", format_table(&failed));
        }
    }

    #[test]
    fn table_has_one_row_per_check() {
        let cfg = SuiteConfig { grid_t: 8, grid_sphere: 8, ..SuiteConfig::default() };
        let checks = run_suite(Suite::Adjoint, &cfg).unwrap();
        let table = format_table(&checks);
        assert_eq!(table.lines().count(), checks.len() + 1);
        assert!(table.contains("PASS"));
    }
}

//! Seeded random series and fixture families.

use rand::Rng;

use crate::error::Result;
use crate::quaternion::Quaternion;
use crate::series::{SliceLaurentSeries, Support};
use crate::subspaces::blaschke_product;

/// Series with independent standard Gaussian coefficient components on `support`.
pub fn random_series<R: Rng + ?Sized>(rng: &mut R, support: Support) -> SliceLaurentSeries {
    SliceLaurentSeries::from_fn(support, |_| Quaternion::random(rng))
}

/// Random series whose support is a random subinterval of `[-bound, bound]`.
pub fn random_series_within<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> SliceLaurentSeries {
    let a = rng.gen_range(-bound..=bound);
    let b = rng.gen_range(-bound..=bound);
    random_series(rng, Support::new(a.min(b), a.max(b)))
}

/// Random Hardy polynomial on `[0, degree]`.
pub fn random_hardy<R: Rng + ?Sized>(rng: &mut R, degree: i64) -> SliceLaurentSeries {
    random_series(rng, Support::new(0, degree))
}

/// Quaternion with uniformly random direction and norm in `[r_min, r_max]`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> Quaternion {
    Quaternion::random_unit(rng) * rng.gen_range(r_min..=r_max)
}

/// `qᵏ u` with `|u| = 1` and `0 <= k <= max_power`.
pub fn random_unit_monomial<R: Rng + ?Sized>(rng: &mut R, max_power: i64) -> SliceLaurentSeries {
    SliceLaurentSeries::monomial(rng.gen_range(0..=max_power), Quaternion::random_unit(rng))
}

/// `(1 + q c₁) * ... * (1 + q cₘ) u` with `|cᵢ| <= r_max < 1`.
///
/// Each factor has the Hardy star inverse `Σ qⁿ (-cᵢ)ⁿ`, so the product is outer.
pub fn random_outer<R: Rng + ?Sized>(rng: &mut R, factors: usize, r_max: f64) -> SliceLaurentSeries {
    let mut acc = SliceLaurentSeries::constant(Quaternion::random_unit(rng));
    for _ in 0..factors {
        let c = random_point(rng, 0.05, r_max);
        let f = SliceLaurentSeries::new(0, vec![Quaternion::ONE, c]);
        acc = f.convolve(&acc);
    }
    acc
}

/// Blaschke product with `zeros` random zeros of norm in `[r_min, r_max]`, truncated to `order`.
pub fn random_blaschke<R: Rng + ?Sized>(
    rng: &mut R,
    zeros: usize,
    r_min: f64,
    r_max: f64,
    order: usize,
) -> Result<SliceLaurentSeries> {
    let pts: Vec<Quaternion> = (0..zeros).map(|_| random_point(rng, r_min, r_max)).collect();
    blaschke_product(&pts, order)
}

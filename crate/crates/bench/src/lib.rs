//! Fixtures shared by the benchmarks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use leibniz_core::arith::rational::{frac, int};
use leibniz_core::families::{first_family, sample_lie_alpha, sample_solvable_parameters};
use leibniz_core::{Algebra, LieVariant, Rational};

/// A first-family member with every parameter nonzero.
pub fn generic_first_family(n: usize) -> Algebra {
    let alpha: BTreeMap<_, _> = (3..=n).map(|k| (k, frac(k as i64, 2))).collect();
    first_family(n, &alpha, &int(1))
}

/// The first-family member with a single unit parameter.
pub fn unit_first_family(n: usize) -> Algebra {
    first_family(n, &BTreeMap::new(), &int(1))
}

/// A seeded admissible `(r, alpha, b)` for the conjecture check with `a1 = 0`.
pub fn conjecture_instance(variant: LieVariant, n: usize, seed: u64) -> (usize, Vec<Rational>, BTreeMap<usize, Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let r = rng.gen_range(1..=n - 4);
        let Some(alpha) = sample_lie_alpha(variant, n, r, &mut rng) else { continue };
        let Some(params) = sample_solvable_parameters(variant, n, r, &alpha, true, 10, &mut rng) else { continue };
        let b = params
            .iter()
            .filter_map(|(v, q)| v.name().strip_prefix('b').and_then(|i| i.parse().ok()).map(|i| (i, q.clone())))
            .collect();
        return (r, alpha, b);
    }
}

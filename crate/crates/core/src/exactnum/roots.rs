use num_bigint::BigUint;
use num_traits::{One, Pow};

/// `(⌊a^(1/n)⌋, root^n == a)`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn integer_nth_root(a: &BigUint, n: u32) -> (BigUint, bool) {
    assert!(n >= 1, "root degree must be positive");
    let root = a.nth_root(n);
    let exact = Pow::pow(&root, n) == *a;
    (root, exact)
}

/// Writes `a = u^g` with `u` not a perfect power and `g` maximal.
///
/// `a <= 1` is returned as `(a, 1)`.
pub fn perfect_power_base(a: &BigUint) -> (BigUint, u32) {
    if *a <= BigUint::one() {
        return (a.clone(), 1);
    }
    let max_exp = a.bits() as u32;
    for g in (2..=max_exp).rev() {
        let (root, exact) = integer_nth_root(a, g);
        if exact && root > BigUint::one() {
            // `root` may itself be a perfect power only if `g` was not maximal,
            // which the descending scan rules out.
            return (root, g);
        }
    }
    (a.clone(), 1)
}

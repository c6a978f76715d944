//! Tiny fixed-stride vector helpers for the 2-d/3-d agent arrays.
//!
//! Agent coordinates live in flat `Vec<f64>` buffers with `dims` values per
//! row. Everything here takes plain slices so the hot loops stay free of
//! bounds-check noise and the call sites read like the formulas they encode.

/// Euclidean norm of one coordinate row.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance between two rows of equal length.
#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for k in 0..a.len() {
        let d = a[k] - b[k];
        acc += d * d;
    }
    acc.sqrt()
}

/// `x^e`, routed through integer exponentiation when `e` is a small whole
/// number. The interaction exponents are almost always 2, 4, or 6, and
/// `powi` is several times cheaper than `powf` inside the pair loop.
#[inline]
pub fn powf_fast(x: f64, e: f64) -> f64 {
    let i = e as i32;
    if i as f64 == e && (-16..=16).contains(&i) {
        x.powi(i)
    } else {
        x.powf(e)
    }
}

/// Rescale `v` in place to magnitude `target`. No-op if `v` is zero.
#[inline]
pub fn rescale(v: &mut [f64], target: f64) {
    let n = norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x = (*x / n) * target;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_and_dist_match_hand_values() {
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        assert_eq!(dist(&[1.0, 1.0], [4.0, 5.0].as_slice()), 5.0);
        assert_eq!(dist(&[0.0, 0.0, 2.0], [0.0, 0.0, -1.0].as_slice()), 3.0);
    }

    #[test]
    fn powf_fast_agrees_with_powf() {
        for &(x, e) in &[(0.5, 2.0), (1.3, 4.0), (2.0, 6.0), (0.7, 0.5), (3.0, 0.1)] {
            let got = powf_fast(x, e);
            let want = x.powf(e);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
        // Exactness on the dyadic cases the oracles rely on.
        assert_eq!(powf_fast(0.5, 2.0), 0.25);
        assert_eq!(powf_fast(0.5, 4.0), 0.0625);
        assert_eq!(powf_fast(1.0, 3.7), 1.0);
    }

    #[test]
    fn rescale_hits_target_exactly_on_axis() {
        let mut v = [10.0, 0.0];
        rescale(&mut v, 1.0);
        assert_eq!(v, [1.0, 0.0]);
        let mut z = [0.0, 0.0];
        rescale(&mut z, 1.0);
        assert_eq!(z, [0.0, 0.0]);
    }
}

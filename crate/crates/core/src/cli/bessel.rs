//! Bessel functions of the first kind by downward recurrence.

/// Magnitude at which the recurrence is rescaled to avoid overflow.
const RESCALE_AT: f64 = 1e100;

/// Below this argument the ascending series is used; it converges fast and
/// without cancellation there, while the recurrence would overflow.
const SERIES_BELOW: f64 = 1.0;

/// J_n(x) = Σ_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!).
fn ascending_series(n: usize, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = (1..=n).fold(1.0, |acc, i| acc * h / i as f64);
    let mut sum = term;
    for k in 1.. {
        term *= -h * h / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() * 1e-3 || term == 0.0 {
            break;
        }
    }
    sum
}

/// J_0(x), …, J_{n_max}(x) for x > 0. Small arguments use the ascending
/// series. Otherwise Miller's algorithm runs J_{k-1} = (2k/x) J_k - J_{k+1}
/// down from a high starting order with arbitrary seed values and
/// normalizes with J_0 + 2 Σ_k J_{2k} = 1.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    assert!(x > 0.0, "x must be positive");
    if x < SERIES_BELOW {
        return (0..=n_max).map(|n| ascending_series(n, x)).collect();
    }
    let top = n_max.max(x.ceil() as usize);
    // orders well past max(n, x) are negligible at double precision
    let mut start = top + 40 + (3.0 * (top as f64).sqrt()).ceil() as usize + top / 2;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; n_max + 1];
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300_f64.max(f64::MIN_POSITIVE); // J_k at k = start
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order <= n_max {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            even_sum += cur;
        }
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            next *= s;
            even_sum *= s;
            for v in &mut out {
                *v *= s;
            }
        }
    }
    let norm = cur + 2.0 * even_sum;
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// J_n(x).
pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_sequence(x, n)[n]
}

fn binomial(k: usize, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, t| acc * (k - t) as f64 / (t + 1) as f64)
}

/// k-th derivative of J_n, from J_n^{(k)} = 2^{-k} Σ_i (-1)^i C(k,i) J_{n-k+2i}
/// with J_{-m} = (-1)^m J_m.
pub fn bessel_j_derivative(n: usize, k: usize, x: f64) -> f64 {
    let seq = bessel_j_sequence(x, n + k);
    let at = |order: i64| -> f64 {
        let m = order.unsigned_abs() as usize;
        if order < 0 && m % 2 == 1 {
            -seq[m]
        } else {
            seq[m]
        }
    };
    let sum: f64 = (0..=k).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * binomial(k, i) * at(n as i64 - k as i64 + 2 * i as i64)).sum();
    sum / 2f64.powi(k as i32)
}

/// J_10(x) and J_10'(x).
pub fn bessel_reference(x: f64) -> (f64, f64) {
    (bessel_j(10, x), bessel_j_derivative(10, 1, x))
}

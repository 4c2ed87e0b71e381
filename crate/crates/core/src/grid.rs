//! Fourth-order stencils on uniform grids.

use crate::error::{Error, Result};
use crate::linops::{real, Mat};

fn combo(terms: &[(f64, &Mat)], scale: f64) -> Mat {
    let mut out = terms[0].1 * real(terms[0].0 * scale);
    for (w, m) in &terms[1..] {
        out += *m * real(w * scale);
    }
    out
}

/// Derivative of uniformly sampled matrices: central five-point stencil in
/// the interior, one-sided fourth-order stencils in the two outer points at
/// each end.
pub(crate) fn derivative(f: &[Mat], h: f64) -> Result<Vec<Mat>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::InvalidCurve(format!(
            "need at least 5 samples for fourth-order differences, got {n}"
        )));
    }
    let s = 1.0 / (12.0 * h);
    let mut d = Vec::with_capacity(n);
    d.push(combo(
        &[(-25.0, &f[0]), (48.0, &f[1]), (-36.0, &f[2]), (16.0, &f[3]), (-3.0, &f[4])],
        s,
    ));
    d.push(combo(
        &[(-3.0, &f[0]), (-10.0, &f[1]), (18.0, &f[2]), (-6.0, &f[3]), (1.0, &f[4])],
        s,
    ));
    for j in 2..n - 2 {
        d.push(combo(
            &[(1.0, &f[j - 2]), (-8.0, &f[j - 1]), (8.0, &f[j + 1]), (-1.0, &f[j + 2])],
            s,
        ));
    }
    let m = n - 1;
    d.push(combo(
        &[(3.0, &f[m]), (10.0, &f[m - 1]), (-18.0, &f[m - 2]), (6.0, &f[m - 3]), (-1.0, &f[m - 4])],
        s,
    ));
    d.push(combo(
        &[(25.0, &f[m]), (-48.0, &f[m - 1]), (36.0, &f[m - 2]), (-16.0, &f[m - 3]), (3.0, &f[m - 4])],
        s,
    ));
    Ok(d)
}

/// Cubic interpolation at the midpoint of every grid interval.
pub(crate) fn midpoints(f: &[Mat]) -> Vec<Mat> {
    let n = f.len();
    assert!(n >= 4, "cubic midpoint interpolation needs 4 samples");
    let s = 1.0 / 16.0;
    (0..n - 1)
        .map(|j| {
            if j == 0 {
                combo(&[(5.0, &f[0]), (15.0, &f[1]), (-5.0, &f[2]), (1.0, &f[3])], s)
            } else if j == n - 2 {
                combo(&[(5.0, &f[n - 1]), (15.0, &f[n - 2]), (-5.0, &f[n - 3]), (1.0, &f[n - 4])], s)
            } else {
                combo(&[(-1.0, &f[j - 1]), (9.0, &f[j]), (9.0, &f[j + 1]), (-1.0, &f[j + 2])], s)
            }
        })
        .collect()
}

/// Composite Simpson rule; an odd number of intervals ends with a 3/8 panel.
pub(crate) fn simpson(f: &[f64], h: f64) -> f64 {
    let intervals = f.len().saturating_sub(1);
    match intervals {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        _ => {
            let even_end = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
            let mut s = 0.0;
            for j in (0..even_end).step_by(2) {
                s += h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
            }
            if even_end < intervals {
                let j = even_end;
                s += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> Mat {
        Mat::from_element(1, 1, real(x))
    }

    #[test]
    fn derivative_is_exact_on_quartics() {
        let h = 0.1;
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t + 0.3 * t.powi(3) - 0.2 * t.powi(4);
        let dp = |t: f64| -2.0 + t + 0.9 * t * t - 0.8 * t.powi(3);
        let f: Vec<Mat> = (0..9).map(|j| scalar(p(j as f64 * h))).collect();
        for (j, d) in derivative(&f, h).unwrap().iter().enumerate() {
            assert!((d[(0, 0)].re - dp(j as f64 * h)).abs() < 1e-12, "at {j}");
        }
        assert!(derivative(&f[..4], h).is_err());
    }

    #[test]
    fn midpoints_are_exact_on_cubics() {
        let p = |t: f64| 0.5 - t + 2.0 * t * t - 0.7 * t.powi(3);
        let h = 0.25;
        let f: Vec<Mat> = (0..7).map(|j| scalar(p(j as f64 * h))).collect();
        for (j, m) in midpoints(&f).iter().enumerate() {
            assert!((m[(0, 0)].re - p((j as f64 + 0.5) * h)).abs() < 1e-13);
        }
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let p = |t: f64| 1.0 + t - 3.0 * t * t + t.powi(3);
        let exact = |t: f64| t + 0.5 * t * t - t.powi(3) + 0.25 * t.powi(4);
        for n in 2..9 {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|j| p(j as f64 * h)).collect();
            assert!((simpson(&f, h) - exact(1.0)).abs() < 1e-14, "n = {n}");
        }
    }
}

//! Real roots of low-degree polynomials with multiplicities.
//!
//! Roots are isolated recursively: the real roots of `p'` split the line
//! into intervals on which `p` is monotone, so each interval holds at most
//! one simple root, found by bisection. A critical point where `p` itself
//! vanishes (to the given tolerance) is a multiple root whose multiplicity
//! is one more than its multiplicity as a root of `p'`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u32,
}

/// Tolerances for [`real_roots`].
#[derive(Debug, Clone, Copy)]
pub struct RootTolerances {
    /// `|p(c)| <= multiple * Σ|a_i| max(|c|, 1)^i` at a critical point `c`
    /// marks a multiple root.
    pub multiple: f64,
    /// Roots closer than `cluster * (|r| + 1)` are merged.
    pub cluster: f64,
}

impl Default for RootTolerances {
    fn default() -> Self {
        RootTolerances {
            multiple: 1e-13,
            cluster: super::CLUSTER_TOL,
        }
    }
}

/// Horner evaluation; coefficients in descending order.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_abs(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().fold(0.0, |acc, &c| acc * ax + c.abs())
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (n - i) as f64)
        .collect()
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(coeffs, lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn isolate(coeffs: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<RealRoot> {
    let degree = coeffs.len() - 1;
    match degree {
        0 => return Vec::new(),
        1 => {
            let r = -coeffs[1] / coeffs[0];
            return if r >= lo && r <= hi {
                vec![RealRoot {
                    value: r,
                    multiplicity: 1,
                }]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }

    let critical = isolate(&derivative(coeffs), lo, hi, tol);
    let mut out = Vec::new();
    // (position, is a root of p)
    let mut breaks = vec![(lo, false)];
    for c in &critical {
        let is_root = eval(coeffs, c.value).abs() <= tol * eval_abs(coeffs, c.value.abs().max(1.0));
        if is_root {
            out.push(RealRoot {
                value: c.value,
                multiplicity: c.multiplicity + 1,
            });
        }
        breaks.push((c.value, is_root));
    }
    breaks.push((hi, false));

    for w in breaks.windows(2) {
        let ((a, ra), (b, rb)) = (w[0], w[1]);
        // p is monotone on [a, b]; a root at an endpoint excludes one inside
        if ra || rb || b <= a {
            continue;
        }
        let (fa, fb) = (eval(coeffs, a), eval(coeffs, b));
        if fa == 0.0 || fb == 0.0 {
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) {
            out.push(RealRoot {
                value: bisect(coeffs, a, b),
                multiplicity: 1,
            });
        }
    }
    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    out
}

/// Merges roots closer than the clustering tolerance, summing
/// multiplicities.
pub fn cluster(mut roots: Vec<RealRoot>, tol: f64) -> Vec<RealRoot> {
    roots.sort_by(|x, y| x.value.total_cmp(&y.value));
    let mut out: Vec<RealRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        if let Some(last) = out.last_mut() {
            if (r.value - last.value).abs() <= tol * (last.value.abs().max(r.value.abs()) + 1.0) {
                let m = last.multiplicity + r.multiplicity;
                last.value = (last.value * last.multiplicity as f64
                    + r.value * r.multiplicity as f64)
                    / m as f64;
                last.multiplicity = m;
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// All real roots of the polynomial with descending coefficients
/// `coeffs`. The leading coefficient must be nonzero; zero polynomials and
/// constants have no roots.
pub fn real_roots(coeffs: &[f64], tol: RootTolerances) -> Vec<RealRoot> {
    let first = coeffs.iter().position(|&c| c != 0.0);
    let Some(first) = first else {
        return Vec::new();
    };
    let c = &coeffs[first..];
    if c.len() < 2 {
        return Vec::new();
    }
    let lead = c[0].abs();
    let bound = 1.0 + c[1..].iter().map(|x| x.abs() / lead).fold(0.0, f64::max);
    let bound = bound * 1.01;
    cluster(isolate(c, -bound, bound, tol.multiple), tol.cluster)
}

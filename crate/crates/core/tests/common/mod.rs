//! Deterministic quadrature oracles shared by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod quadrature: bisect the interval with the
/// largest error estimate until the total estimate drops below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..100_000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return total;
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    panic!("quadrature did not converge on [{a}, {b}]");
}

/// Integral over `[lo, hi]^2` of `sqrt|det g~|` for the two-vertex graph
/// with off-diagonal weight `w`, excluding the sliver `|det psi| <= tol`
/// exactly as the estimator does.
///
/// With `psi = [[a, w], [w, d]]`, `D = ad - w^2` and `c = w^2`,
/// `sqrt|det g~| = (1/2) sqrt|ad + c| |D|^(-3/2)`. The inner integral over
/// `d` is split at `D = 0` and each side is mapped by `s = |D|^(-1/2)`,
/// which turns the singular factor into the smooth integrand
/// `sqrt(2c +- s^-2) / a`.
pub fn two_vertex_volume(w: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let c = w * w;
    let inner = |a: f64| -> f64 {
        let mut total = 0.0;
        // D > 0 side: v = ad - c in [max(tol, a lo - c), a hi - c].
        let v1 = tol.max(a * lo - c);
        let v2 = a * hi - c;
        if v2 > v1 {
            let g = |s: f64| (1.0 + 2.0 * c * s * s).sqrt() / s;
            total += integrate(g, v2.powf(-0.5), v1.powf(-0.5), 1e-12, 0.0) / a;
        }
        // D < 0 side: u = c - ad in [max(tol, c - a hi), c - a lo].
        let u1 = tol.max(c - a * hi);
        let u2 = c - a * lo;
        if u2 > u1 {
            let g = |s: f64| (2.0 * c * s * s - 1.0).max(0.0).sqrt() / s;
            total += integrate(g, u2.powf(-0.5), u1.powf(-0.5), 1e-12, 0.0) / a;
        }
        total
    };
    // The inner integral has kinks where D = 0 meets the box edges.
    let mut cuts = vec![lo, hi];
    for k in [c / lo, c / hi] {
        if k > lo && k < hi {
            cuts.push(k);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|p| integrate(inner, p[0], p[1], 1e-10, 0.0)).sum()
}

/// Nested 2-D integral of a smooth integrand over `[lo, hi]^2`.
pub fn integrate_square<F: Fn(f64, f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    integrate(|x| integrate(|y| f(x, y), lo, hi, rel_tol, 0.0), lo, hi, rel_tol, 0.0)
}

/// Mean and standard error.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

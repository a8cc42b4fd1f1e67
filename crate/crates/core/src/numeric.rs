//! Numerical building blocks: simplex minimization, bracketed root finding,
//! adaptive quadrature and finite-difference Hessians.

/// Options for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Stop when every vertex lies within `rel_tol * (1 + |x_best|)` of the
    /// best vertex in every coordinate.
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Edge length of the initial simplex, per coordinate.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_evals: 20_000,
            initial_step: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead downhill simplex minimization (standard coefficients
/// 1, 2, 1/2, 1/2). Non-finite objective values are treated as `+∞`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step * (1.0 + x0[i].abs() * 0.1);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = &simplex[0];
        let diameter_ok = simplex[1..].iter().all(|v| {
            v.iter()
                .zip(best)
                .all(|(a, b)| (a - b).abs() <= opts.rel_tol * (1.0 + b.abs()))
        });
        if diameter_ok {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let f_r = eval(&reflected, &mut evals);
        if f_r < values[0] {
            let expanded = along(2.0);
            let f_e = eval(&expanded, &mut evals);
            if f_e < f_r {
                simplex[dim] = expanded;
                values[dim] = f_e;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_r;
            }
            continue;
        }
        if f_r < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[dim] {
            let c = along(0.5);
            let fc = eval(&c, &mut evals);
            (c, fc)
        } else {
            let c = along(-0.5);
            let fc = eval(&c, &mut evals);
            (c, fc)
        };
        if f_c < values[dim].min(f_r) {
            simplex[dim] = contracted;
            values[dim] = f_c;
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].clone();
        for i in 1..=dim {
            for j in 0..dim {
                simplex[i][j] = best[j] + 0.5 * (simplex[i][j] - best[j]);
            }
            values[i] = eval(&simplex[i], &mut evals);
        }
    }

    let (idx, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty simplex");
    SimplexOutcome {
        x: simplex[idx].clone(),
        value: values[idx],
        evaluations: evals,
        converged,
    }
}

/// Failure of [`brent_root`]: the bracket does not contain a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoSignChange {
    pub lower: f64,
    pub upper: f64,
    pub f_lower: f64,
    pub f_upper: f64,
}

/// Brent–Dekker root finding on `[a, b]`; `f(a)` and `f(b)` must differ in
/// sign (or one of them be zero).
pub fn brent_root<F>(
    mut f: F,
    a: f64,
    b: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64, NoSignChange>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(NoSignChange {
            lower: a,
            upper: b,
            f_lower: fa,
            f_upper: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

#[allow(clippy::excessive_precision)]
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * GK_WEIGHTS[7];
    let mut gauss = fc * GAUSS7_WEIGHTS[3];
    for j in 0..7 {
        let dx = half * GK_NODES[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += GK_WEIGHTS[j] * s;
        if j % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of `f` over the finite
/// interval `[a, b]`. Returns the estimate once the summed error estimate
/// drops below `abs_tol`, or after `max_intervals` bisections.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gauss_kronrod_15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= abs_tol || parts.len() >= MAX_INTERVALS {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod_15(&mut f, lo, mid);
        let (v2, e2) = gauss_kronrod_15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

/// Like [`integrate`], but starts from `pieces` equal panels so that narrow
/// features on a wide interval are not missed by the first coarse rule.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    pieces: usize,
    abs_tol: f64,
) -> f64 {
    let width = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == pieces { b } else { lo + width };
            integrate(&mut f, lo, hi, abs_tol / pieces as f64)
        })
        .sum()
}

/// Integral of `f` over `(0, ∞)` computed on the log scale,
/// `∫ f(eᵘ) eᵘ du`, which copes with power-law tails and integrable
/// singularities at zero.
pub fn integrate_positive_log_scale<F: FnMut(f64) -> f64>(mut f: F, abs_tol: f64) -> f64 {
    integrate_pieces(
        |u| {
            let x = u.exp();
            let v = f(x) * x;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        -700.0,
        700.0,
        280,
        abs_tol,
    )
}

/// Integral of `f` over `[a, ∞)` through the substitution `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, abs_tol: f64) -> f64 {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let v = f(a + t / one_minus) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
    )
}

/// Central-difference Hessian with step `1e-5 * (1 + |x_i|)` per coordinate.
pub fn numeric_hessian<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64]) -> Vec<Vec<f64>> {
    let k = x.len();
    let h: Vec<f64> = x.iter().map(|v| 1e-5 * (1.0 + v.abs())).collect();
    let f0 = f(x);
    let mut hess = vec![vec![0.0; k]; k];
    let mut point = x.to_vec();
    for i in 0..k {
        point[i] = x[i] + h[i];
        let fp = f(&point);
        point[i] = x[i] - h[i];
        let fm = f(&point);
        point[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                point[i] = x[i] + si * h[i];
                point[j] = x[j] + sj * h[j];
                let v = f(&point);
                point[i] = x[i];
                point[j] = x[j];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Refines a minimizer of a smooth `f` with up to `max_steps` Newton steps
/// built from central-difference derivatives. A step is kept only if it
/// does not raise `f` beyond rounding noise, so the result is never worse
/// than `x` by more than that noise.
pub fn newton_polish<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], max_steps: usize) -> Vec<f64> {
    let k = x.len();
    let mut cur = x.to_vec();
    let mut f_cur = f(&cur);
    for _ in 0..max_steps {
        let mut grad = vec![0.0; k];
        let mut probe = cur.clone();
        for i in 0..k {
            // five-point stencil: truncation error O(h⁴)
            let h = 1e-3 * (1.0 + cur[i].abs());
            let mut at = |t: f64| {
                probe[i] = cur[i] + t * h;
                let v = f(&probe);
                probe[i] = cur[i];
                v
            };
            grad[i] = (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h);
        }
        let hess = numeric_hessian(&mut f, &cur);
        let Some(inv) = invert(&hess) else { break };
        // positive definite along the step direction only
        let step: Vec<f64> = (0..k)
            .map(|i| -(0..k).map(|j| inv[i][j] * grad[j]).sum::<f64>())
            .collect();
        let descent: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        if !(descent <= 0.0) || step.iter().any(|s| !s.is_finite()) {
            break;
        }
        let next: Vec<f64> = cur.iter().zip(&step).map(|(c, s)| c + s).collect();
        let f_next = f(&next);
        if !(f_next <= f_cur + 8.0 * f64::EPSILON * (1.0 + f_cur.abs())) {
            break;
        }
        let small = step
            .iter()
            .zip(&cur)
            .all(|(s, c)| s.abs() <= 1e-13 * (1.0 + c.abs()));
        cur = next;
        f_cur = f_next.min(f_cur);
        if small {
            break;
        }
    }
    cur
}

/// Inverse of a small square matrix by Gauss–Jordan elimination with partial
/// pivoting; `None` when the matrix is singular to working precision.
pub fn invert(matrix: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[row][j] -= factor * a[col][j];
                        inv[row][j] -= factor * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

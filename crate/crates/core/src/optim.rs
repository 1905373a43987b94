//! Bounded Nelder-Mead simplex search.
//!
//! Trial points are clamped to the box after every reflection, expansion,
//! contraction and shrink. There is no randomness: the start simplex is
//! `x0` plus one axis step per coordinate.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Checked between iterations, so one step may overshoot by up to `n + 2`.
    pub max_evals: usize,
    /// Stop once every vertex lies within this relative distance of the best.
    pub rel_tol: f64,
    /// Initial axis step as a fraction of `|x0_i|` (or of the box width when
    /// `x0_i` is zero).
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 500,
            rel_tol: 1e-4,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

fn clamp(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(l, h);
    }
}

fn rel_size(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .flat_map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
        })
        .fold(0.0, f64::max)
}

/// Minimizes `f` over the box `[lo, hi]` starting from `x0`.
///
/// NaN objective values are treated as `+inf`. The returned point is the
/// best one evaluated, which includes `x0` itself.
pub fn minimize<F>(
    mut f: F,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(
        n > 0 && lo.len() == n && hi.len() == n,
        "dimension mismatch"
    );
    assert!(lo.iter().zip(hi).all(|(l, h)| l <= h), "empty box");
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    clamp(&mut start, lo, hi);
    let mut simplex = vec![(start.clone(), eval(&start))];
    for i in 0..n {
        let width = hi[i] - lo[i];
        let mut step = if start[i] != 0.0 {
            opts.initial_step * start[i].abs()
        } else {
            opts.initial_step * width
        };
        if start[i] + step > hi[i] {
            step = -step;
        }
        let mut x = start.clone();
        x[i] += step;
        clamp(&mut x, lo, hi);
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let centroid = |s: &[(Vec<f64>, f64)]| {
        let mut c = vec![0.0; n];
        for (x, _) in &s[..n] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / n as f64;
            }
        }
        c
    };
    let toward = |c: &[f64], x: &[f64], t: f64| -> Vec<f64> {
        let mut p: Vec<f64> = c.iter().zip(x).map(|(ci, xi)| ci + t * (xi - ci)).collect();
        clamp(&mut p, lo, hi);
        p
    };

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if rel_size(&simplex) < opts.rel_tol {
            converged = true;
            break;
        }
        if evals.get() >= opts.max_evals {
            break;
        }
        let c = centroid(&simplex);
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        let xr = toward(&c, &worst, -1.0);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = toward(&c, &worst, -2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xk, fk) = if fr < f_worst {
            let x = toward(&c, &worst, -0.5);
            let fx = eval(&x);
            (x, fx)
        } else {
            let x = toward(&c, &worst, 0.5);
            let fx = eval(&x);
            (x, fx)
        };
        if fk < fr.min(f_worst) {
            simplex[n] = (xk, fk);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            v.0 = toward(&best, &v.0, 0.5);
            v.1 = eval(&v.0);
        }
    }
    let (x, fx) = simplex.swap_remove(0);
    Minimum {
        x,
        fx,
        evals: evals.get(),
        converged,
    }
}

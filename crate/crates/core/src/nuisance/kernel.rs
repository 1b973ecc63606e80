//! Nadaraya-Watson blip estimation with an Epanechnikov kernel and
//! cross-validated bandwidth.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::model::{Covariate, NuisanceModel, Observation};
use crate::rng::{self, Purpose};

/// `K(u) = 3/4 (1 - u^2) I(|u| <= 1)`.
pub fn epanechnikov(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

/// Kernel-weighted mean of one arm's outcomes.
///
/// Points with `|x - w_i| < h` contribute. When none does, the prediction is
/// the mean outcome of the arm's nearest training point(s): the limit of the
/// estimate as the bandwidth at `x` grows to the nearest-neighbour distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSmoother {
    w: Vec<f64>,
    y: Vec<f64>,
}

impl ArmSmoother {
    /// `points` need not be sorted.
    pub fn new(mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_sorted(points)
    }

    fn from_sorted(points: Vec<(f64, f64)>) -> Self {
        let (w, y) = points.into_iter().unzip();
        Self { w, y }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn predict(&self, x: f64, h: f64) -> f64 {
        let lo = self.w.partition_point(|&wi| wi <= x - h);
        let hi = self.w.partition_point(|&wi| wi < x + h);
        let (mut num, mut den) = (0.0, 0.0);
        for i in lo..hi {
            let k = epanechnikov((x - self.w[i]) / h);
            num += k * self.y[i];
            den += k;
        }
        if den > 0.0 {
            num / den
        } else {
            self.nearest_mean(x)
        }
    }

    fn nearest_mean(&self, x: f64) -> f64 {
        let mut walk = self.walk(x);
        let (d0, y0) = walk.next().expect("arm is nonempty");
        let (mut sum, mut count) = (y0, 1.0);
        for (d, y) in walk {
            if d > d0 {
                break;
            }
            sum += y;
            count += 1.0;
        }
        sum / count
    }

    /// Training points as `(distance, y)` in nondecreasing distance from `x`.
    fn walk(&self, x: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mut r = self.w.partition_point(|&wi| wi < x);
        let mut l = r;
        std::iter::from_fn(move || {
            let dl = if l > 0 { x - self.w[l - 1] } else { f64::INFINITY };
            let dr = if r < self.w.len() { self.w[r] - x } else { f64::INFINITY };
            if dl == f64::INFINITY && dr == f64::INFINITY {
                None
            } else if dl <= dr {
                l -= 1;
                Some((dl, self.y[l]))
            } else {
                r += 1;
                Some((dr, self.y[r - 1]))
            }
        })
    }

}

/// Sorted points with prefix sums of `w, w^2, y, y w, y w^2` and, per grid
/// bandwidth, window pointers that only move right.
struct PrefixWindows {
    w: Vec<f64>,
    pre: Vec<[f64; 5]>,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl PrefixWindows {
    fn new(points: impl Iterator<Item = (f64, f64)>, n_grid: usize) -> Self {
        let mut w = Vec::new();
        let mut acc = [0.0; 5];
        let mut pre = vec![acc];
        for (wi, y) in points {
            let terms = [wi, wi * wi, y, y * wi, y * wi * wi];
            for k in 0..5 {
                acc[k] += terms[k];
            }
            pre.push(acc);
            w.push(wi);
        }
        Self {
            w,
            pre,
            lo: vec![0; n_grid],
            hi: vec![0; n_grid],
        }
    }

    /// Count and moment sums over `|x - w_i| < h` (the `j`-th bandwidth).
    #[inline(always)]
    fn sums(&mut self, j: usize, x: f64, h: f64) -> (usize, [f64; 5]) {
        let w = &self.w;
        let (lo, hi) = (&mut self.lo[j], &mut self.hi[j]);
        while *lo < w.len() && w[*lo] <= x - h {
            *lo += 1;
        }
        *hi = (*hi).max(*lo);
        while *hi < w.len() && w[*hi] < x + h {
            *hi += 1;
        }
        let (a, b) = (self.pre[*hi], self.pre[*lo]);
        (*hi - *lo, [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]])
    }
}

/// Below this total kernel weight the prefix-sum cancellation is no longer
/// negligible and the window is summed directly.
const MIN_GRID_WEIGHT: f64 = 0.05;

/// One arm of the cross-validation data. Predictions for a point in fold
/// `f` use every other fold: window sums over all points minus those over
/// fold `f`. Queries must arrive in nondecreasing order.
struct FoldedArm {
    w: Vec<f64>,
    y: Vec<f64>,
    fold: Vec<usize>,
    all: PrefixWindows,
    per_fold: Vec<PrefixWindows>,
}

impl FoldedArm {
    /// `points` as `(w, y, fold)`, sorted by `w`.
    fn new(points: Vec<(f64, f64, usize)>, folds: usize, n_grid: usize) -> Self {
        let all = PrefixWindows::new(points.iter().map(|p| (p.0, p.1)), n_grid);
        let per_fold = (0..folds)
            .map(|f| PrefixWindows::new(points.iter().filter(|p| p.2 == f).map(|p| (p.0, p.1)), n_grid))
            .collect();
        Self {
            w: points.iter().map(|p| p.0).collect(),
            y: points.iter().map(|p| p.1).collect(),
            fold: points.iter().map(|p| p.2).collect(),
            all,
            per_fold,
        }
    }

    fn training_size(&self, f: usize) -> usize {
        self.w.len() - self.per_fold[f].w.len()
    }

    fn predict(&mut self, x: f64, f: usize, grid: &[f64], out: &mut [f64]) {
        for (j, &h) in grid.iter().enumerate() {
            let (ca, sa) = self.all.sums(j, x, h);
            let (cf, sf) = self.per_fold[f].sums(j, x, h);
            let s: [f64; 5] = std::array::from_fn(|k| sa[k] - sf[k]);
            let c = (ca - cf) as f64;
            let sd2 = s[1] - 2.0 * x * s[0] + x * x * c;
            let syd2 = s[4] - 2.0 * x * s[3] + x * x * s[2];
            let inv = 1.0 / (h * h);
            let den = c - sd2 * inv;
            out[j] = if c > 0.0 && den >= MIN_GRID_WEIGHT {
                (s[2] - syd2 * inv) / den
            } else {
                self.direct(x, h, f)
            };
        }
    }

    /// [`ArmSmoother::predict`] on the points outside fold `f`.
    fn direct(&self, x: f64, h: f64, f: usize) -> f64 {
        let lo = self.w.partition_point(|&wi| wi <= x - h);
        let hi = self.w.partition_point(|&wi| wi < x + h);
        let (mut num, mut den) = (0.0, 0.0);
        for i in (lo..hi).filter(|&i| self.fold[i] != f) {
            let k = epanechnikov((x - self.w[i]) / h);
            num += k * self.y[i];
            den += k;
        }
        if den > 0.0 {
            return num / den;
        }
        let mut r = self.w.partition_point(|&wi| wi < x);
        let mut l = r;
        let (mut best, mut sum, mut count) = (f64::INFINITY, 0.0, 0.0);
        loop {
            while l > 0 && self.fold[l - 1] == f {
                l -= 1;
            }
            while r < self.w.len() && self.fold[r] == f {
                r += 1;
            }
            let dl = if l > 0 { x - self.w[l - 1] } else { f64::INFINITY };
            let dr = if r < self.w.len() { self.w[r] - x } else { f64::INFINITY };
            let (d, y) = if dl <= dr {
                if dl == f64::INFINITY {
                    break;
                }
                l -= 1;
                (dl, self.y[l])
            } else {
                r += 1;
                (dr, self.y[r - 1])
            };
            if d > best {
                break;
            }
            best = d;
            sum += y;
            count += 1.0;
        }
        sum / count
    }
}

/// Arm-wise Nadaraya-Watson fit at a fixed bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBlipFit {
    h: f64,
    treated: ArmSmoother,
    control: ArmSmoother,
}

impl KernelBlipFit {
    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    /// Kernel estimate of `E[Y | A = a, W = w]`.
    pub fn arm_mean(&self, a: u8, w: f64) -> f64 {
        if a == 1 {
            self.treated.predict(w, self.h)
        } else {
            self.control.predict(w, self.h)
        }
    }

    pub fn blip(&self, w: f64) -> f64 {
        self.arm_mean(1, w) - self.arm_mean(0, w)
    }
}

fn real_of(o: &Observation, learner: &'static str) -> Result<f64> {
    match o.w {
        Covariate::Real(x) => Ok(x),
        Covariate::Stratum(_) => Err(Error::CovariateKind {
            learner,
            expected: "continuous",
        }),
    }
}

fn split_arms(sorted: impl Iterator<Item = (f64, u8, f64)>) -> Result<(ArmSmoother, ArmSmoother)> {
    let (mut t, mut c) = (Vec::new(), Vec::new());
    for (w, a, y) in sorted {
        if a == 1 {
            t.push((w, y));
        } else {
            c.push((w, y));
        }
    }
    if t.is_empty() || c.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "kernel fit needs both arms (treated {}, control {})",
            t.len(),
            c.len()
        )));
    }
    Ok((ArmSmoother::from_sorted(t), ArmSmoother::from_sorted(c)))
}

/// Fits the kernel blip estimator at bandwidth `h`.
pub fn nw_blip(data: &[Observation], h: f64) -> Result<KernelBlipFit> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")));
    }
    let mut pts = data
        .iter()
        .map(|o| Ok((real_of(o, "kernel")?, o.a, o.y)))
        .collect::<Result<Vec<_>>>()?;
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (treated, control) = split_arms(pts.into_iter())?;
    Ok(KernelBlipFit { h, treated, control })
}

/// Candidate bandwidths and fold count for cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    candidates: Vec<f64>,
    folds: usize,
}

impl BandwidthGrid {
    pub fn new(candidates: Vec<f64>, folds: usize) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("bandwidth grid is empty".into()));
        }
        if candidates.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidArgument("bandwidths must be positive".into()));
        }
        if candidates.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidArgument("bandwidth grid must be strictly increasing".into()));
        }
        if folds < 2 {
            return Err(Error::InvalidArgument("cross-validation needs at least 2 folds".into()));
        }
        Ok(Self { candidates, folds })
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn folds(&self) -> usize {
        self.folds
    }
}

impl Default for BandwidthGrid {
    /// `h = 0.01, 0.02, ..., 0.20` with 10 folds.
    fn default() -> Self {
        Self::new((1..=20).map(|i| i as f64 / 100.0).collect(), 10).expect("valid grid")
    }
}

/// Doubly robust pseudo-outcome whose regression on `W` is the blip.
fn pseudo_outcome<M: NuisanceModel + ?Sized>(oracle: &M, o: &Observation) -> Result<f64> {
    let sign = if o.a == 1 { 1.0 } else { -1.0 };
    Ok(sign / oracle.g(o.a, o.w)? * (o.y - oracle.q_bar(o.a, o.w)?) + oracle.q_bar(1, o.w)? - oracle.q_bar(0, o.w)?)
}

/// Cross-validated risk of each grid bandwidth under the squared
/// pseudo-outcome loss. Folds are contiguous blocks of a seeded shuffle.
pub fn cv_risks<M: NuisanceModel + ?Sized>(data: &[Observation], grid: &BandwidthGrid, oracle: &M, seed: u64) -> Result<Vec<f64>> {
    let n = data.len();
    let k = grid.folds;
    if n < k {
        return Err(Error::InvalidArgument(format!("{n} observations cannot fill {k} folds")));
    }
    let xs = data.iter().map(|o| real_of(o, "kernel")).collect::<Result<Vec<_>>>()?;
    let pseudo = data.iter().map(|o| pseudo_outcome(oracle, o)).collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, 0, Purpose::Folds));
    let mut fold_of = vec![0usize; n];
    for f in 0..k {
        for &i in &order[f * n / k..(f + 1) * n / k] {
            fold_of[i] = f;
        }
    }
    let mut by_w: Vec<usize> = (0..n).collect();
    by_w.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));

    let hs = grid.candidates();
    let arm = |t: u8| {
        let pts = by_w.iter().filter(|&&i| data[i].a == t).map(|&i| (xs[i], data[i].y, fold_of[i])).collect();
        FoldedArm::new(pts, k, hs.len())
    };
    let (mut treated, mut control) = (arm(1), arm(0));
    for f in 0..k {
        let (t, c) = (treated.training_size(f), control.training_size(f));
        if t == 0 || c == 0 {
            return Err(Error::InvalidArgument(format!(
                "kernel fit needs both arms (treated {t}, control {c}) outside fold {f}"
            )));
        }
    }
    let mut risk = vec![0.0; hs.len()];
    let (mut p1, mut p0) = (vec![0.0; hs.len()], vec![0.0; hs.len()]);
    for &i in &by_w {
        treated.predict(xs[i], fold_of[i], hs, &mut p1);
        control.predict(xs[i], fold_of[i], hs, &mut p0);
        for j in 0..hs.len() {
            let e = pseudo[i] - (p1[j] - p0[j]);
            risk[j] += e * e;
        }
    }
    for r in &mut risk {
        *r /= n as f64;
    }
    Ok(risk)
}

/// Grid bandwidth with the smallest cross-validated risk (smallest `h` on
/// ties). `oracle` supplies the outcome regression and propensity used in
/// the loss; pass the truth in simulations or an estimate otherwise.
pub fn cv_select_bandwidth<M: NuisanceModel + ?Sized>(data: &[Observation], grid: &BandwidthGrid, oracle: &M, seed: u64) -> Result<f64> {
    let risk = cv_risks(data, grid, oracle, seed)?;
    let mut best = 0;
    for (j, r) in risk.iter().enumerate() {
        if r.is_nan() {
            return Err(Error::Numerical("cross-validated risk is NaN".into()));
        }
        if *r < risk[best] {
            best = j;
        }
    }
    Ok(grid.candidates[best])
}

//! Two-sample statistics over per-replication results.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Welch {
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_diff: f64,
    pub std_err: f64,
    pub t: f64,
    pub df: f64,
}

/// Welch's unequal-variance t statistic for `mean(a) - mean(b)` with
/// Welch-Satterthwaite degrees of freedom.
///
/// When both samples have zero variance the statistic is 0 for equal means
/// and infinite otherwise, and `df` falls back to `n_a + n_b - 2`.
pub fn welch(a: &[f64], b: &[f64]) -> Welch {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mean_a, mean_b) = (mean(a), mean(b));
    let (qa, qb) = (variance(a) / na, variance(b) / nb);
    let std_err = (qa + qb).sqrt();
    let mean_diff = mean_a - mean_b;
    let t = if std_err > 0.0 {
        mean_diff / std_err
    } else if mean_diff == 0.0 {
        0.0
    } else {
        mean_diff.signum() * f64::INFINITY
    };
    let df = if qa + qb > 0.0 {
        let denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
        (qa + qb) * (qa + qb) / denom
    } else {
        na + nb - 2.0
    };
    Welch {
        mean_a,
        mean_b,
        mean_diff,
        std_err,
        t,
        df,
    }
}

impl Welch {
    /// Two-sided confidence interval for the mean difference.
    pub fn confidence_interval(&self, level: f64) -> (f64, f64) {
        if self.std_err == 0.0 {
            return (self.mean_diff, self.mean_diff);
        }
        let q = student_quantile(0.5 + level / 2.0, self.df);
        (self.mean_diff - q * self.std_err, self.mean_diff + q * self.std_err)
    }

    /// One-sided p-value for the alternative `mean(a) > mean(b)`.
    pub fn p_greater(&self) -> f64 {
        if self.t.is_infinite() {
            return if self.t > 0.0 { 0.0 } else { 1.0 };
        }
        1.0 - student_cdf(self.t, self.df)
    }

    /// One-sided p-value for the alternative `mean(a) < mean(b)`.
    pub fn p_less(&self) -> f64 {
        if self.t.is_infinite() {
            return if self.t < 0.0 { 0.0 } else { 1.0 };
        }
        student_cdf(self.t, self.df)
    }
}

fn student(df: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, df.max(1e-9)).expect("positive degrees of freedom")
}

pub fn student_cdf(t: f64, df: f64) -> f64 {
    student(df).cdf(t)
}

pub fn student_quantile(p: f64, df: f64) -> f64 {
    student(df).inverse_cdf(p)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Continuity-corrected normal score for `a > b`.
    pub z: f64,
    /// One-sided p-value for `a` tending to exceed `b`.
    pub p_greater: f64,
    /// One-sided p-value for `a` tending to fall below `b`.
    pub p_less: f64,
}

/// Mann-Whitney U test with mid-ranks for ties and the tie-corrected
/// normal approximation (with continuity correction).
pub fn mann_whitney(a: &[f64], b: &[f64]) -> MannWhitney {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = all.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let mid_rank = (i + j) as f64 / 2.0 + 1.0;
        let ties = (j - i + 1) as f64;
        tie_term += ties * ties * ties - ties;
        rank_sum_a += all[i..=j].iter().filter(|e| e.1).count() as f64 * mid_rank;
        i = j + 1;
    }
    let u = rank_sum_a - na * (na + 1.0) / 2.0;
    let mu = na * nb / 2.0;
    let nt = na + nb;
    let var = na * nb / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    if var <= 0.0 {
        return MannWhitney {
            u,
            z: 0.0,
            p_greater: 0.5,
            p_less: 0.5,
        };
    }
    let sd = var.sqrt();
    let z_greater = (u - mu - 0.5) / sd;
    let z_less = (u - mu + 0.5) / sd;
    MannWhitney {
        u,
        z: (u - mu) / sd,
        p_greater: 1.0 - normal.cdf(z_greater),
        p_less: normal.cdf(z_less),
    }
}

//! Pairwise and multiple-comparison tests over an N-datasets x K-algorithms
//! metrics matrix: paired t, Wilcoxon signed-ranks, Sign test, Friedman
//! ranking, and the Nemenyi critical difference.

use ndarray::Array2;
use statrs::distribution::{
    Binomial, ChiSquared, ContinuousCDF, DiscreteCDF, Normal, StudentsT,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatError {
    #[error("need at least {min} paired observations, got {n}")]
    TooFew { n: usize, min: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unknown algorithm column `{0}`")]
    UnknownColumn(String),
    #[error("metrics matrix line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("domain error: {0}")]
    Domain(String),
}

/// N x K evaluation-metric values for K algorithms over N datasets.
#[derive(Debug, Clone)]
pub struct MetricsMatrix {
    pub dataset_ids: Vec<String>,
    pub algorithm_ids: Vec<String>,
    pub metric: String,
    pub horizon: usize,
    pub values: Array2<f64>,
}

impl MetricsMatrix {
    /// Parse a CSV with header `dataset,<algo_1>,...,<algo_K>`.
    pub fn from_csv(text: &str, metric: &str, horizon: usize) -> Result<Self, StatError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(StatError::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 3 || !cols[0].eq_ignore_ascii_case("dataset") {
            return Err(StatError::Parse {
                line: 1,
                message: "header must be `dataset,<algo_1>,...,<algo_K>` with K >= 2".into(),
            });
        }
        let algorithm_ids: Vec<String> = cols[1..].iter().map(|s| s.to_string()).collect();
        let k = algorithm_ids.len();
        let mut dataset_ids = Vec::new();
        let mut data = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != k + 1 {
                return Err(StatError::Parse {
                    line: i + 1,
                    message: format!("expected {} fields, found {}", k + 1, cells.len()),
                });
            }
            dataset_ids.push(cells[0].to_string());
            for cell in &cells[1..] {
                let v: f64 = cell.parse().map_err(|_| StatError::Parse {
                    line: i + 1,
                    message: format!("cannot parse `{cell}` as a number"),
                })?;
                if !v.is_finite() {
                    return Err(StatError::Parse {
                        line: i + 1,
                        message: format!("non-finite value `{cell}`"),
                    });
                }
                data.push(v);
            }
        }
        if dataset_ids.is_empty() {
            return Err(StatError::TooFew { n: 0, min: 1 });
        }
        let values = Array2::from_shape_vec((dataset_ids.len(), k), data)
            .expect("row-major layout");
        Ok(Self {
            dataset_ids,
            algorithm_ids,
            metric: metric.to_string(),
            horizon,
            values,
        })
    }

    pub fn n_datasets(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_algorithms(&self) -> usize {
        self.values.ncols()
    }

    pub fn column(&self, algorithm: &str) -> Result<Vec<f64>, StatError> {
        let j = self
            .algorithm_ids
            .iter()
            .position(|a| a == algorithm)
            .ok_or_else(|| StatError::UnknownColumn(algorithm.to_string()))?;
        Ok(self.values.column(j).to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Decision {
    Accept,
    Reject,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Accept => write!(f, "A"),
            Decision::Reject => write!(f, "R"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestResult {
    pub statistic: f64,
    pub critical: f64,
    pub decision: Decision,
    pub alpha: f64,
    pub warnings: Vec<String>,
}

/// Supported reference distributions for [`critical_value`].
#[derive(Debug, Clone, Copy)]
pub enum Dist {
    StudentT { df: usize },
    Normal,
    ChiSquared { df: usize },
}

/// Quantile of a reference distribution, accurate to about 1e-3 over the
/// ranges the test battery needs.
pub fn critical_value(dist: Dist, quantile: f64) -> Result<f64, StatError> {
    if !(0.0 < quantile && quantile < 1.0) {
        return Err(StatError::Domain(format!(
            "quantile {quantile} outside (0, 1)"
        )));
    }
    let value = match dist {
        Dist::StudentT { df } => {
            if df < 1 {
                return Err(StatError::Domain("student-t needs df >= 1".into()));
            }
            StudentsT::new(0.0, 1.0, df as f64)
                .expect("valid parameters")
                .inverse_cdf(quantile)
        }
        Dist::Normal => Normal::standard().inverse_cdf(quantile),
        Dist::ChiSquared { df } => {
            if df < 1 {
                return Err(StatError::Domain("chi-squared needs df >= 1".into()));
            }
            ChiSquared::new(df as f64)
                .expect("valid parameters")
                .inverse_cdf(quantile)
        }
    };
    Ok(value)
}

fn differences(baseline: &[f64], variant: &[f64]) -> Result<Vec<f64>, StatError> {
    if baseline.len() != variant.len() {
        return Err(StatError::Degenerate(format!(
            "column lengths differ: {} vs {}",
            baseline.len(),
            variant.len()
        )));
    }
    Ok(baseline.iter().zip(variant).map(|(b, v)| b - v).collect())
}

/// Two-sided paired t-test on `d_u = baseline_u - variant_u`.
pub fn paired_t(baseline: &[f64], variant: &[f64], alpha: f64) -> Result<TestResult, StatError> {
    let d = differences(baseline, variant)?;
    let n = d.len();
    if n < 2 {
        return Err(StatError::TooFew { n, min: 2 });
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(StatError::Degenerate(
            "all paired differences are identical".into(),
        ));
    }
    let se = (var / n as f64).sqrt();
    let statistic = mean / se;
    let critical = critical_value(Dist::StudentT { df: n - 1 }, 1.0 - alpha / 2.0)?;
    Ok(TestResult {
        statistic,
        critical,
        decision: if statistic.abs() > critical {
            Decision::Reject
        } else {
            Decision::Accept
        },
        alpha,
        warnings: Vec::new(),
    })
}

/// Average ranks (1-based) of `values` in ascending order, ties averaged.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share the average
        let avg = (i + j + 2) as f64 / 2.0;
        for &ix in &order[i..=j] {
            ranks[ix] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Wilcoxon signed-ranks test. Zero differences contribute half their rank
/// to each side; the decision compares `|z|` against the normal quantile.
pub fn wilcoxon(baseline: &[f64], variant: &[f64], alpha: f64) -> Result<TestResult, StatError> {
    let d = differences(baseline, variant)?;
    let n = d.len();
    if n < 2 {
        return Err(StatError::TooFew { n, min: 2 });
    }
    if d.iter().all(|&x| x == 0.0) {
        return Err(StatError::Degenerate("all paired differences are zero".into()));
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let ranks = average_ranks(&abs);
    let mut b_plus = 0.0;
    let mut b_minus = 0.0;
    for (du, r) in d.iter().zip(&ranks) {
        if *du > 0.0 {
            b_plus += r; // variant value is smaller: variant wins
        } else if *du < 0.0 {
            b_minus += r;
        } else {
            b_plus += r / 2.0;
            b_minus += r / 2.0;
        }
    }
    let b_star = b_plus.min(b_minus);
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0).sqrt();
    let statistic = (b_star - mean) / sd;
    let critical = critical_value(Dist::Normal, 1.0 - alpha / 2.0)?;
    let mut warnings = Vec::new();
    if n < 10 {
        warnings.push(format!(
            "normal approximation is unreliable for N = {n} < 10"
        ));
    }
    Ok(TestResult {
        statistic,
        critical,
        decision: if statistic.abs() > critical {
            Decision::Reject
        } else {
            Decision::Accept
        },
        alpha,
        warnings,
    })
}

/// Count of datasets where the variant strictly wins, ties credited half to
/// each side.
pub fn sign_wins(baseline: &[f64], variant: &[f64]) -> Result<f64, StatError> {
    let d = differences(baseline, variant)?;
    Ok(d.iter()
        .map(|&du| {
            if du > 0.0 {
                1.0
            } else if du == 0.0 {
                0.5
            } else {
                0.0
            }
        })
        .sum())
}

/// Two-sided binomial tail p-value for `wins` successes out of `n` fair
/// coin flips.
fn binomial_two_sided_p(n: usize, wins: f64) -> f64 {
    let bin = Binomial::new(0.5, n as u64).expect("valid parameters");
    let lower = bin.cdf(wins.floor() as u64);
    let hi = wins.ceil() as u64;
    let upper = if hi == 0 { 1.0 } else { bin.sf(hi - 1) };
    (2.0 * lower.min(upper)).min(1.0)
}

/// Sign test. For `N > 25` the normal approximation is used
/// (reject iff `|W - N/2| >= z * sqrt(N)/2`); otherwise the exact two-sided
/// binomial test.
pub fn sign_test(baseline: &[f64], variant: &[f64], alpha: f64) -> Result<TestResult, StatError> {
    let wins = sign_wins(baseline, variant)?;
    let n = baseline.len();
    if n < 1 {
        return Err(StatError::TooFew { n, min: 1 });
    }
    let nf = n as f64;
    let z = critical_value(Dist::Normal, 1.0 - alpha / 2.0)?;
    let critical = nf / 2.0 + z * nf.sqrt() / 2.0;
    let mut warnings = Vec::new();
    let decision = if n > 25 {
        if (wins - nf / 2.0).abs() >= z * nf.sqrt() / 2.0 {
            Decision::Reject
        } else {
            Decision::Accept
        }
    } else {
        warnings.push(format!("exact binomial test used for N = {n} <= 25"));
        if binomial_two_sided_p(n, wins) <= alpha {
            Decision::Reject
        } else {
            Decision::Accept
        }
    };
    Ok(TestResult {
        statistic: wins,
        critical,
        decision,
        alpha,
        warnings,
    })
}

/// Per-dataset ranks and their averages per algorithm.
#[derive(Debug, Clone)]
pub struct RankTable {
    /// N x K, each row a permutation of 1..K with ties averaged.
    pub ranks: Array2<f64>,
    pub average: Vec<f64>,
}

/// Rank every dataset's metric values ascending (1 = best), ties averaged.
pub fn rank_matrix(matrix: &MetricsMatrix) -> RankTable {
    let (n, k) = (matrix.n_datasets(), matrix.n_algorithms());
    let mut ranks = Array2::zeros((n, k));
    for u in 0..n {
        let row: Vec<f64> = matrix.values.row(u).to_vec();
        for (j, r) in average_ranks(&row).into_iter().enumerate() {
            ranks[[u, j]] = r;
        }
    }
    let average = (0..k)
        .map(|j| ranks.column(j).sum() / n as f64)
        .collect();
    RankTable { ranks, average }
}

/// Friedman statistic from average ranks.
pub fn friedman_from_avg_ranks(
    average: &[f64],
    n: usize,
    alpha: f64,
) -> Result<TestResult, StatError> {
    let k = average.len();
    if k < 2 || n < 1 {
        return Err(StatError::TooFew { n, min: 1 });
    }
    let kf = k as f64;
    let sum_sq: f64 = average.iter().map(|r| r * r).sum();
    let statistic = 12.0 * n as f64 / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
    let critical = critical_value(Dist::ChiSquared { df: k - 1 }, 1.0 - alpha)?;
    let mut warnings = Vec::new();
    if n <= 10 || k <= 5 {
        warnings.push(format!(
            "chi-squared approximation is unreliable for N = {n}, K = {k} (need N > 10 and K > 5)"
        ));
    }
    Ok(TestResult {
        statistic,
        critical,
        decision: if statistic > critical {
            Decision::Reject
        } else {
            Decision::Accept
        },
        alpha,
        warnings,
    })
}

pub fn friedman(ranks: &RankTable, alpha: f64) -> Result<TestResult, StatError> {
    friedman_from_avg_ranks(&ranks.average, ranks.ranks.nrows(), alpha)
}

/// Nemenyi critical difference and the pairwise significance flags.
#[derive(Debug, Clone)]
pub struct NemenyiResult {
    pub cd: f64,
    /// `significant[i][j]` iff `|avg_rank_i - avg_rank_j| > cd`.
    pub significant: Vec<Vec<bool>>,
}

pub fn nemenyi(avg_ranks: &[f64], n: usize, q_alpha: f64) -> Result<NemenyiResult, StatError> {
    if q_alpha <= 0.0 {
        return Err(StatError::Domain(format!("q_alpha {q_alpha} must be positive")));
    }
    let k = avg_ranks.len() as f64;
    let cd = q_alpha * (k * (k + 1.0) / (6.0 * n as f64)).sqrt();
    let significant = avg_ranks
        .iter()
        .map(|ri| {
            avg_ranks
                .iter()
                .map(|rj| (ri - rj).abs() > cd)
                .collect()
        })
        .collect();
    Ok(NemenyiResult { cd, significant })
}

/// Built-in two-decimal `q_alpha` values at alpha = 0.05 for K = 2..=20
/// (studentized range over sqrt(2)). The K = 16 entry is pinned to 3.523.
pub fn q_alpha_05(k: usize) -> Option<f64> {
    const TABLE: [f64; 19] = [
        1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313,
        3.354, 3.391, 3.523, 3.458, 3.489, 3.517, 3.544,
    ];
    if (2..=20).contains(&k) {
        Some(TABLE[k - 2])
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn paired_t_hand_example() {
        // d = [1,2,3]: mean 2, s = 1, se = 1/sqrt(3)
        let bl = [2.0, 4.0, 6.0];
        let tg = [1.0, 2.0, 3.0];
        let r = paired_t(&bl, &tg, 0.05).unwrap();
        assert_relative_eq!(r.statistic, 2.0 * 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(r.statistic, 3.464, epsilon = 1e-3);
    }

    #[test]
    fn paired_t_degenerate() {
        let xs = [1.0, 2.0, 3.0];
        assert!(matches!(
            paired_t(&xs, &xs, 0.05),
            Err(StatError::Degenerate(_))
        ));
        // constant nonzero differences are degenerate too
        let ys = [0.0, 1.0, 2.0];
        assert!(matches!(
            paired_t(&xs, &ys, 0.05),
            Err(StatError::Degenerate(_))
        ));
    }

    #[test]
    fn critical_values_match_published() {
        assert_relative_eq!(
            critical_value(Dist::Normal, 0.975).unwrap(),
            1.9600,
            epsilon = 1e-3
        );
        assert_relative_eq!(
            critical_value(Dist::StudentT { df: 89 }, 0.975).unwrap(),
            1.987,
            epsilon = 2e-3
        );
        assert_relative_eq!(
            critical_value(Dist::ChiSquared { df: 15 }, 0.975).unwrap(),
            27.488,
            epsilon = 1e-2
        );
        assert!(critical_value(Dist::Normal, 1.5).is_err());
        assert!(critical_value(Dist::StudentT { df: 0 }, 0.9).is_err());
    }

    #[test]
    fn wilcoxon_saturated_statistic() {
        // variant strictly better on all 90 datasets: B* = 0
        let bl: Vec<f64> = (0..90).map(|i| 2.0 + i as f64).collect();
        let tg: Vec<f64> = (0..90).map(|i| 1.0 + i as f64).collect();
        let r = wilcoxon(&bl, &tg, 0.05).unwrap();
        assert_relative_eq!(r.statistic.abs(), 8.238, epsilon = 5e-3);
        assert_eq!(r.decision, Decision::Reject);
        assert_relative_eq!(r.critical, 1.9599, epsilon = 1e-3);
    }

    #[test]
    fn wilcoxon_symmetric_ranks_accept() {
        let bl = [2.0, 1.0];
        let tg = [1.0, 2.0];
        let r = wilcoxon(&bl, &tg, 0.05).unwrap();
        // |d| ties at rank 1.5 each: B+ = B- = 1.5
        assert_eq!(r.decision, Decision::Accept);
        assert!(!r.warnings.is_empty(), "small-N warning expected");
    }

    #[test]
    fn wilcoxon_all_zero_is_degenerate() {
        let xs = [1.0, 2.0, 3.0];
        assert!(matches!(
            wilcoxon(&xs, &xs, 0.05),
            Err(StatError::Degenerate(_))
        ));
    }

    #[test]
    fn sign_test_threshold_and_saturation() {
        let bl: Vec<f64> = (0..90).map(|i| 2.0 + i as f64).collect();
        let tg: Vec<f64> = (0..90).map(|i| 1.0 + i as f64).collect();
        let r = sign_test(&bl, &tg, 0.05).unwrap();
        assert_eq!(r.statistic, 90.0);
        assert_relative_eq!(r.critical, 54.30, epsilon = 5e-3);
        assert_eq!(r.decision, Decision::Reject);
    }

    #[test]
    fn sign_test_even_split_accepts() {
        let bl = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let tg = [0.0, 0.0, 0.0, 3.0, 3.0, 3.0];
        let r = sign_test(&bl, &tg, 0.05).unwrap();
        assert_eq!(r.statistic, 3.0);
        assert_eq!(r.decision, Decision::Accept);
    }

    #[test]
    fn antisymmetry() {
        let bl = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.3, 5.8, 7.7, 0.3, 6.1];
        let tg = [2.0, 1.6, 3.5, 1.5, 8.0, 3.0, 4.9, 5.0, 7.0, 0.5, 5.5];
        let t_ab = paired_t(&bl, &tg, 0.05).unwrap();
        let t_ba = paired_t(&tg, &bl, 0.05).unwrap();
        assert_relative_eq!(t_ab.statistic, -t_ba.statistic, epsilon = 1e-12);
        let w_ab = wilcoxon(&bl, &tg, 0.05).unwrap();
        let w_ba = wilcoxon(&tg, &bl, 0.05).unwrap();
        assert_relative_eq!(w_ab.statistic, w_ba.statistic, epsilon = 1e-12);
        let wins_ab = sign_wins(&bl, &tg).unwrap();
        let wins_ba = sign_wins(&tg, &bl).unwrap();
        assert_relative_eq!(wins_ab + wins_ba, bl.len() as f64, epsilon = 1e-12);
    }

    fn matrix(rows: &[&[f64]]) -> MetricsMatrix {
        let n = rows.len();
        let k = rows[0].len();
        let mut data = Vec::new();
        for r in rows {
            data.extend_from_slice(r);
        }
        MetricsMatrix {
            dataset_ids: (0..n).map(|i| format!("d{i}")).collect(),
            algorithm_ids: (0..k).map(|j| format!("a{j}")).collect(),
            metric: "rmse".into(),
            horizon: 1,
            values: Array2::from_shape_vec((n, k), data).unwrap(),
        }
    }

    #[test]
    fn rank_rows() {
        let rt = rank_matrix(&matrix(&[&[0.3, 0.1, 0.2]]));
        assert_eq!(rt.ranks.row(0).to_vec(), vec![3.0, 1.0, 2.0]);
        let rt = rank_matrix(&matrix(&[&[0.1, 0.1, 0.2]]));
        assert_eq!(rt.ranks.row(0).to_vec(), vec![1.5, 1.5, 3.0]);
    }

    #[test]
    fn rank_sums_with_ties() {
        let rt = rank_matrix(&matrix(&[
            &[0.1, 0.1, 0.2, 0.4],
            &[0.5, 0.5, 0.5, 0.5],
            &[0.9, 0.3, 0.3, 0.1],
        ]));
        for u in 0..3 {
            let s: f64 = rt.ranks.row(u).sum();
            assert_relative_eq!(s, 10.0, epsilon = 1e-12); // K(K+1)/2 for K=4
        }
        let total: f64 = rt.average.iter().sum();
        assert_relative_eq!(total, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn friedman_examples() {
        // all ranks equal (K+1)/2
        let r = friedman_from_avg_ranks(&[2.0, 2.0, 2.0], 12, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.decision, Decision::Accept);
        // N=2, K=3, both datasets ranked [1,2,3]
        let rt = rank_matrix(&matrix(&[&[0.1, 0.2, 0.3], &[1.0, 2.0, 3.0]]));
        let r = friedman(&rt, 0.05).unwrap();
        assert_relative_eq!(r.statistic, 4.0, epsilon = 1e-12);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn friedman_rank_invariance() {
        let m1 = matrix(&[&[0.1, 0.5, 0.3], &[0.7, 0.2, 0.9], &[0.4, 0.6, 0.5]]);
        // apply a strictly increasing transform per dataset
        let transformed: Vec<Vec<f64>> = m1
            .values
            .rows()
            .into_iter()
            .enumerate()
            .map(|(u, row)| row.iter().map(|v| (u + 1) as f64 * v.exp()).collect())
            .collect();
        let rows: Vec<&[f64]> = transformed.iter().map(|r| r.as_slice()).collect();
        let m2 = matrix(&rows);
        let f1 = friedman(&rank_matrix(&m1), 0.05).unwrap();
        let f2 = friedman(&rank_matrix(&m2), 0.05).unwrap();
        assert_relative_eq!(f1.statistic, f2.statistic, epsilon = 1e-12);
    }

    #[test]
    fn nemenyi_cd() {
        let r = nemenyi(&vec![1.0; 16], 90, 3.523).unwrap();
        assert_relative_eq!(r.cd, 2.500, epsilon = 5e-3);
        assert!(r.significant.iter().flatten().all(|s| !s));
        // doubling N shrinks CD by 1/sqrt(2)
        let r2 = nemenyi(&vec![1.0; 16], 180, 3.523).unwrap();
        assert_relative_eq!(r2.cd, r.cd / 2f64.sqrt(), epsilon = 1e-12);
        assert!(nemenyi(&[1.0, 2.0], 10, 0.0).is_err());
    }

    #[test]
    fn q_alpha_table() {
        assert_eq!(q_alpha_05(16), Some(3.523));
        assert_eq!(q_alpha_05(2), Some(1.960));
        assert_eq!(q_alpha_05(21), None);
    }

    #[test]
    fn matrix_csv_roundtrip() {
        let text = "dataset,bl,tg\nAAPL,1.5,1.2\nMSFT,0.9,1.0\n";
        let m = MetricsMatrix::from_csv(text, "rmse", 1).unwrap();
        assert_eq!(m.n_datasets(), 2);
        assert_eq!(m.column("tg").unwrap(), vec![1.2, 1.0]);
        assert!(matches!(
            m.column("nope"),
            Err(StatError::UnknownColumn(_))
        ));
        assert!(MetricsMatrix::from_csv("dataset,only\nx,1\n", "rmse", 1).is_err());
    }
}

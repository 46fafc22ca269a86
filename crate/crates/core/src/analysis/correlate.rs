use super::{AnalysisError, DecimatedSeries};

/// Values of `b` at the bin centres of `a`, by linear interpolation.
///
/// Bins of `a` outside `b`'s time range get `None`.
pub fn resample_onto(a: &DecimatedSeries, b: &DecimatedSeries) -> Vec<Option<f64>> {
    let mut j = 0;
    a.t_s
        .iter()
        .map(|&t| {
            if b.is_empty() || t < b.t_s[0] || t > b.t_s[b.len() - 1] {
                return None;
            }
            while j + 1 < b.len() && b.t_s[j + 1] < t {
                j += 1;
            }
            if b.t_s[j] == t || j + 1 == b.len() {
                return Some(b.value[j]);
            }
            let (t0, t1) = (b.t_s[j], b.t_s[j + 1]);
            let f = (t - t0) / (t1 - t0);
            Some(b.value[j] + f * (b.value[j + 1] - b.value[j]))
        })
        .collect()
}

fn same_grid(a: &DecimatedSeries, b: &DecimatedSeries) -> bool {
    a.t_s == b.t_s
}

/// Pearson correlation of two co-binned series.
///
/// `b` is interpolated onto `a`'s bin centres unless the grids already match.
pub fn pearson_correlation(a: &DecimatedSeries, b: &DecimatedSeries) -> Result<f64, AnalysisError> {
    let pairs: Vec<(f64, f64)> = if same_grid(a, b) {
        a.value.iter().copied().zip(b.value.iter().copied()).collect()
    } else {
        a.value
            .iter()
            .zip(resample_onto(a, b))
            .filter_map(|(x, y)| y.map(|y| (*x, y)))
            .collect()
    };
    if pairs.len() < 3 {
        return Err(AnalysisError::GridMismatch { overlap: pairs.len() });
    }
    pearson_pairs(&pairs)
}

pub(crate) fn pearson_pairs(pairs: &[(f64, f64)]) -> Result<f64, AnalysisError> {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Exact zero or round-off level relative to the data scale.
    let tiny = |s: f64, m: f64| s <= (1e-13 * m.abs()).powi(2) * n || s == 0.0;
    if tiny(sxx, mx) || tiny(syy, my) {
        return Err(AnalysisError::ZeroVariance);
    }
    let r = if sxx == syy { sxy / sxx } else { sxy / (sxx * syy).sqrt() };
    Ok(r.clamp(-1.0, 1.0))
}

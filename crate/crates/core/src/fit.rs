use crate::error::{Error, Result};

/// Unweighted least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted points.
    pub rms_residual: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return Err(Error::Domain {
            what: "number of fit points",
            constraint: "≥ 2",
            value: n,
        });
    }
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::Domain {
            what: "spread of fit abscissae",
            constraint: "> 0",
            value: 0.0,
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

/// Geometric grid from `start` down (or up) to `stop`, endpoints exact.
pub fn geometric_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
        return Err(Error::InvalidBetaGrid);
    }
    if points < 2 {
        return Err(Error::Domain {
            what: "points",
            constraint: "≥ 2",
            value: points as f64,
        });
    }
    let (a, b) = (start.ln(), stop.ln());
    let last = (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / last).exp())
        .collect();
    grid[0] = start;
    grid[points - 1] = stop;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(&[1.0], &[1.0]).is_err());
        assert!(least_squares(&[1.0, 1.0], &[0.0, 2.0]).is_err());
        assert!(least_squares(&[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn default_style_grid() {
        let g = geometric_grid(1e-1, 1e-5, 17).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 1e-1);
        assert_eq!(g[16], 1e-5);
        assert!((g[4] - 1e-2).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!(geometric_grid(0.0, 1.0, 3).is_err());
    }
}

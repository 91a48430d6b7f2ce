use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Belief, PROB_TOL};

/// Quarter-minute cells over 0..=30 minutes.
pub const DEFAULT_TRANSIT_CELLS: usize = 121;

/// Evenly spaced grid over `[0, 30]` with the given step.
pub fn transit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 30.0) {
        return Err(Error::InvalidParameter(format!("grid step {step}")));
    }
    let n = (30.0 / step).round() as usize;
    if ((n as f64) * step - 30.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("grid step {step} does not divide 30")));
    }
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// Masses on an ordered grid of state values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedDistribution {
    pub grid: Vec<f64>,
    pub masses: Vec<f64>,
}

impl DiscretizedDistribution {
    pub fn mean(&self) -> f64 {
        self.grid.iter().zip(&self.masses).map(|(x, m)| x * m).sum()
    }

    pub fn to_belief(&self) -> Result<Belief> {
        Belief::new(self.masses.clone())
    }
}

/// Cell `i` collects the CDF mass between the midpoints to its neighbours;
/// the end cells absorb both tails.
pub fn discretize(cdf: impl Fn(f64) -> f64, grid: &[f64]) -> Result<DiscretizedDistribution> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("grid must be strictly ascending".into()));
    }
    let edges: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut masses = Vec::with_capacity(grid.len());
    let mut prev = 0.0;
    for e in &edges {
        let c = cdf(*e).clamp(prev, 1.0);
        masses.push(c - prev);
        prev = c;
    }
    masses.push(1.0 - prev);
    let total: f64 = masses.iter().sum();
    debug_assert!((total - 1.0).abs() < PROB_TOL);
    Ok(DiscretizedDistribution {
        grid: grid.to_vec(),
        masses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generative::{normal_cdf, BoxCoxT};

    #[test]
    fn gaussian_mass_below_zero() {
        // cell centers at odd multiples of 0.05, so 0 is an edge
        let grid: Vec<f64> = (0..500).map(|i| -19.95 + 0.1 * i as f64).collect();
        let d = discretize(|x| normal_cdf((x - 5.0) / 2.0), &grid).unwrap();
        let below: f64 = d.grid.iter().zip(&d.masses).filter(|(x, _)| **x < 0.0).map(|(_, m)| m).sum();
        assert!((below - 0.0062).abs() < 5e-5);
    }

    #[test]
    fn point_mass_lands_in_one_cell() {
        let grid = transit_grid(1.0).unwrap();
        let d = discretize(|x| if x >= 7.2 { 1.0 } else { 0.0 }, &grid).unwrap();
        assert_eq!(d.masses[7], 1.0);
        assert_eq!(d.masses.iter().filter(|m| **m > 0.0).count(), 1);
    }

    #[test]
    fn bct_mass_is_conserved() {
        let bct = BoxCoxT::new(14.0, 0.3, 0.5, 6.0).unwrap();
        let grid = transit_grid(1.0).unwrap();
        let d = discretize(|x| bct.cdf(x), &grid).unwrap();
        assert!((d.masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(d.masses.iter().all(|m| *m >= 0.0));
    }

    #[test]
    fn default_grid_has_121_cells() {
        assert_eq!(transit_grid(0.25).unwrap().len(), DEFAULT_TRANSIT_CELLS);
        assert!(transit_grid(0.7).is_err());
    }

    #[test]
    fn unsorted_grid_is_refused() {
        assert!(discretize(normal_cdf, &[0.0, 2.0, 1.0]).is_err());
    }
}

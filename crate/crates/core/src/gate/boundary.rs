use std::fmt;

use super::{classify, input_wins, GateConfig, InputVector, TieRule, TIE_EPSILON};
use crate::error::GateError;

/// Decision hyperplane `sum_i a_i * g[i] = g_t` over relaxed activations.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub g: Vec<f64>,
    pub g_t: f64,
}

impl Hyperplane {
    /// Coefficients normalized so the right-hand side is 1.
    pub fn normalized(&self) -> Vec<f64> {
        self.g.iter().map(|g| g / self.g_t).collect()
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.g {
            write!(f, "{g:.8e},")?;
        }
        write!(f, "{:.8e}", self.g_t)
    }
}

/// Classification of a uniform grid over `[0, 1]^n` (n = 2 or 3).
///
/// Cells are stored with `a1` varying slowest; coordinate `j` of a cell is
/// `index_j / (resolution - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub n: usize,
    pub resolution: usize,
    pub cells: Vec<bool>,
    pub hyperplane: Hyperplane,
}

impl BoundaryGrid {
    pub fn coordinate(&self, index: usize) -> f64 {
        index as f64 / (self.resolution - 1) as f64
    }

    /// Grid indices of flat cell `flat`, `a1` first.
    pub fn indices(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        let mut rem = flat;
        for slot in idx.iter_mut().rev() {
            *slot = rem % self.resolution;
            rem /= self.resolution;
        }
        idx
    }

    pub fn get(&self, indices: &[usize]) -> bool {
        let flat = indices.iter().fold(0, |acc, &i| acc * self.resolution + i);
        self.cells[flat]
    }

    /// CSV with header `a1,...,an,class`, one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.n {
            out.push_str(&format!("a{j},"));
        }
        out.push_str("class\n");
        for (flat, &class) in self.cells.iter().enumerate() {
            for i in self.indices(flat) {
                out.push_str(&format!("{:.8e},", self.coordinate(i)));
            }
            out.push_str(if class { "1\n" } else { "0\n" });
        }
        out
    }
}

pub fn boundary_grid(config: &GateConfig, resolution: usize) -> Result<BoundaryGrid, GateError> {
    let n = config.n_inputs();
    if !(2..=3).contains(&n) {
        return Err(GateError::GridDimension(n));
    }
    if resolution < 2 {
        return Err(GateError::Resolution(resolution));
    }
    let hyperplane = config.hyperplane();
    let total = resolution.pow(n as u32);
    let step = 1.0 / (resolution - 1) as f64;
    let cells = (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut sum = 0.0;
            for g in hyperplane.g.iter().rev() {
                sum += (rem % resolution) as f64 * step * g;
                rem /= resolution;
            }
            input_wins(sum, hyperplane.g_t, config.tie_rule())
        })
        .collect();
    Ok(BoundaryGrid {
        n,
        resolution,
        cells,
        hyperplane,
    })
}

/// Human-readable notes for a boundary export: the class under each tie
/// rule, rows whose currents tie, and which resistance inequality holds.
pub fn boundary_notes(config: &GateConfig) -> Result<Vec<String>, GateError> {
    let mut notes = Vec::new();
    let mut classes = Vec::new();
    for tie in [TieRule::InputWins, TieRule::ThresholdWins] {
        let table = config.clone().with_tie_rule(tie).truth_table()?;
        classes.push(classify(&table));
        notes.push(format!(
            "class ({}): {} [{}]",
            tie.name(),
            classes.last().unwrap(),
            table.to_bitstring()
        ));
    }
    let n = config.n_inputs();
    let g_t = config.threshold_conductance();
    for row in 0..1usize << n {
        let input = InputVector::from_index(row, n);
        let g_in: f64 = input
            .bits()
            .iter()
            .zip(config.input_conductances())
            .filter(|(b, _)| **b)
            .map(|(_, g)| g)
            .sum();
        if (g_in - g_t).abs() <= TIE_EPSILON * g_in.max(g_t) {
            notes.push(format!(
                "row {input}: branch currents tie, output set by the tie rule"
            ));
        }
    }
    if classes[0] != classes[1] {
        notes.push("class depends on the tie rule".to_string());
    }
    let th = 1.0 / g_t;
    let m = config.input_memristances();
    let parallel = 1.0 / config.input_conductances().iter().sum::<f64>();
    if m.iter().all(|&r| r > th) && parallel < th {
        notes.push("every M_i > TH and parallel(M) < TH: AND-like".to_string());
    } else if m.iter().all(|&r| r < th) {
        notes.push("every M_i < TH: OR-like".to_string());
    }
    Ok(notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weights_put_the_line_through_single_input_corners() {
        let g = GateConfig::new(vec![3e6, 3e6], vec![3e6]).unwrap();
        let grid = boundary_grid(&g, 11).unwrap();
        assert_eq!(grid.hyperplane.normalized(), vec![1.0, 1.0]);
        assert!(grid.get(&[10, 0]));
        assert!(grid.get(&[0, 10]));
        assert!(!grid.get(&[4, 5]));
        assert!(grid.get(&[6, 5]));
    }

    #[test]
    fn notes_flag_tie_dependence() {
        let g = GateConfig::new(vec![3e6, 3e6], vec![3e6]).unwrap();
        let notes = boundary_notes(&g).unwrap();
        assert!(
            notes.iter().any(|n| n == "class depends on the tie rule"),
            "{notes:?}"
        );
        assert!(notes.iter().any(|n| n.starts_with("row (1,0)")));
        let g = GateConfig::new(vec![3e6, 3e6], vec![2e6]).unwrap();
        let notes = boundary_notes(&g).unwrap();
        assert!(notes.iter().any(|n| n.ends_with("AND-like")), "{notes:?}");
    }

    #[test]
    fn guards() {
        let one = GateConfig::new(vec![1e3], vec![1e3]).unwrap();
        assert!(matches!(
            boundary_grid(&one, 11),
            Err(GateError::GridDimension(1))
        ));
        let two = GateConfig::new(vec![1e3, 1e3], vec![1e3]).unwrap();
        assert!(matches!(
            boundary_grid(&two, 1),
            Err(GateError::Resolution(1))
        ));
    }

    #[test]
    fn csv_shape() {
        let g = GateConfig::new(vec![1e3, 1e3, 1e3], vec![1e3]).unwrap();
        let csv = boundary_grid(&g, 2).unwrap().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "a1,a2,a3,class");
        assert_eq!(lines.len(), 9);
        assert!(lines[1].ends_with(",0"));
        assert!(lines[8].ends_with(",1"));
    }
}

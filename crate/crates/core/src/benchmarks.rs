//! Reference quartic-oscillator levels for `V = ½x² + λx⁴`, `ħ = m = 1`.

/// One tabulated level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticLevel {
    pub lambda: f64,
    pub n: usize,
    /// Tabulated Hamilton–Jacobi value.
    pub method: f64,
    /// Tabulated Schrödinger-equation value.
    pub schrodinger: f64,
}

/// Absolute tolerance for agreement with the tabulated reference values.
pub const TABLE_TOLERANCE: f64 = 5e-6;

impl QuarticLevel {
    /// The two tabulated values disagree beyond [`TABLE_TOLERANCE`].
    pub fn inconsistent(&self) -> bool {
        (self.method - self.schrodinger).abs() > TABLE_TOLERANCE
    }
}

const fn level(lambda: f64, n: usize, method: f64, schrodinger: f64) -> QuarticLevel {
    QuarticLevel { lambda, n, method, schrodinger }
}

pub const QUARTIC_LEVELS: [QuarticLevel; 12] = [
    level(0.002, 0, 0.5014895, 0.50148966),
    level(0.002, 1, 1.5074192, 1.50741940),
    level(0.002, 2, 2.51920, 2.51920212),
    level(0.01, 0, 0.50725615, 0.50725620),
    level(0.01, 1, 1.5356482, 1.53564828),
    level(0.01, 2, 2.590842, 2.59084580),
    level(0.1, 0, 0.5591463, 0.55914633),
    level(0.1, 1, 1.769450, 1.76950264),
    level(0.1, 2, 3.13862431, 3.13862431),
    level(1.0, 0, 0.80377065, 0.80377065),
    level(1.0, 1, 2.737789, 2.73789227),
    level(1.0, 2, 5.179295, 5.17929169),
];

/// Turning points of the `λ = 1`, `n = 2` state, `±1.42811`.
pub const QUARTIC_N2_TURNING_POINT: f64 = 1.42811;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_two_pairs_disagree() {
        let bad: std::vec::Vec<_> = QUARTIC_LEVELS.iter().filter(|l| l.inconsistent()).map(|l| (l.lambda, l.n)).collect();
        assert_eq!(bad, [(0.1, 1), (1.0, 1)]);
    }
}

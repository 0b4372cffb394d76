//! Coordinate charts: ordered coordinate names that give `Coord` indices
//! their meaning when parsing and printing.

/// An ordered list of coordinate names. Index i in an [`crate::expr::Expr`]
/// refers to `names[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Chart {
        Chart { names: names.into_iter().map(Into::into).collect() }
    }

    /// Configuration chart `q1..q4`.
    pub fn config() -> Chart {
        Chart::new(["q1", "q2", "q3", "q4"])
    }

    /// Phase-space chart `q1..q4, p1..p4`; momentum `p_mu` is index `mu + 4`.
    pub fn phase() -> Chart {
        Chart::new(["q1", "q2", "q3", "q4", "p1", "p2", "p3", "p4"])
    }

    /// Canonical chart `Q1..Q4, P1..P4` carrying the separation constants.
    pub fn canonical() -> Chart {
        Chart::new(["Q1", "Q2", "Q3", "Q4", "P1", "P2", "P3", "P4"])
    }

    /// Abstract chart `x1..x8` used for statements about generic
    /// 2n-dimensional deformed space.
    pub fn abstract8() -> Chart {
        Chart::new(["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"])
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Index of momentum conjugate to configuration coordinate `mu` on an
/// 8-dimensional pair chart.
pub fn momentum(mu: usize) -> usize {
    mu + 4
}

//! Piecewise polynomials with exact integration.
//!
//! Kernels in this crate are piecewise linear or quadratic, so their norms
//! can be integrated exactly by splitting each piece at its real roots.

/// A real polynomial, coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `k · (t − r₁)(t − r₂)`.
    pub fn from_roots2(scale: f64, r1: f64, r2: f64) -> Self {
        Self::new(vec![scale * r1 * r2, -scale * (r1 + r2), scale])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k as f64 + 1.0)),
        );
        Self::new(out)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(hi) - anti.eval(lo)
    }

    /// Real roots of a polynomial of degree at most two, sorted.
    ///
    /// # Panics
    /// Panics for degree three or higher.
    pub fn real_roots(&self) -> Vec<f64> {
        match self.coeffs.as_slice() {
            [_] => Vec::new(),
            [c0, c1] => vec![-c0 / c1],
            [c0, c1, c2] => {
                let disc = c1 * c1 - 4.0 * c2 * c0;
                if disc < 0.0 {
                    return Vec::new();
                }
                // Stable form avoids cancellation in the smaller root.
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                let mut roots = if q == 0.0 {
                    vec![0.0, 0.0]
                } else {
                    vec![q / c2, c0 / q]
                };
                roots.sort_by(f64::total_cmp);
                roots
            }
            _ => panic!("real_roots supports degree <= 2, got {}", self.degree()),
        }
    }
}

/// One polynomial piece on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Poly,
}

/// A function made of polynomial pieces over consecutive intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<Piece>) -> Self {
        debug_assert!(pieces.windows(2).all(|w| w[0].hi == w[1].lo));
        Self { pieces }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self::new(
            self.pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    hi: p.hi,
                    poly: f(&p.poly),
                })
                .collect(),
        )
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| p.poly.integral(p.lo, p.hi)).sum()
    }

    pub fn integral_of_square(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.poly.mul(&p.poly).integral(p.lo, p.hi))
            .sum()
    }

    /// `∫|p|`, splitting each piece at its interior roots.
    pub fn abs_integral(&self) -> f64 {
        let mut total = 0.0;
        for piece in &self.pieces {
            let mut cuts = vec![piece.lo];
            cuts.extend(
                piece
                    .poly
                    .real_roots()
                    .into_iter()
                    .filter(|r| *r > piece.lo && *r < piece.hi),
            );
            cuts.push(piece.hi);
            let anti = piece.poly.antiderivative();
            for w in cuts.windows(2) {
                total += (anti.eval(w[1]) - anti.eval(w[0])).abs();
            }
        }
        total
    }

    /// `sup |p|` over the pieces, including one-sided limits at breakpoints.
    pub fn sup_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        for piece in &self.pieces {
            let mut candidates = vec![piece.lo, piece.hi];
            candidates.extend(
                piece
                    .poly
                    .derivative()
                    .real_roots()
                    .into_iter()
                    .filter(|r| *r > piece.lo && *r < piece.hi),
            );
            for t in candidates {
                best = best.max(piece.poly.eval(t).abs());
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_are_accurate() {
        let p = Poly::from_roots2(0.5, 1e-9, 3.0);
        let r = p.real_roots();
        assert!((r[0] - 1e-9).abs() < 1e-22);
        assert!((r[1] - 3.0).abs() < 1e-15);
        assert!(Poly::new(vec![1.0, 0.0, 1.0]).real_roots().is_empty());
    }

    #[test]
    fn abs_integral_of_sign_changing_line() {
        // ∫₋₁² |t| = 1/2 + 2
        let p = PiecewisePoly::new(vec![Piece {
            lo: -1.0,
            hi: 2.0,
            poly: Poly::new(vec![0.0, 1.0]),
        }]);
        assert!((p.abs_integral() - 2.5).abs() < 1e-15);
        assert!((p.sup_abs() - 2.0).abs() < 1e-15);
        assert!((p.integral() - 1.5).abs() < 1e-15);
        assert!((p.integral_of_square() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_point_found_for_sup() {
        // 1 − 4(t − ½)² peaks at ½ with value 1
        let p = PiecewisePoly::new(vec![Piece {
            lo: 0.0,
            hi: 1.0,
            poly: Poly::new(vec![0.0, 4.0, -4.0]),
        }]);
        assert!((p.sup_abs() - 1.0).abs() < 1e-15);
    }
}

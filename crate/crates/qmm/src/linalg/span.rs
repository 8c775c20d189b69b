//! Lazy orthogonal span tracking.
//!
//! The equivalence checkers ask one question O(m·n²) times: does a new
//! operator lie in the span of everything accepted so far? Re-running a
//! rank computation per query costs O(n⁶) each. The tracker instead keeps
//! a growing orthogonal set, so a membership query is |O| inner products
//! (O(n⁴) for an n-dimensional machine) and an insertion is one
//! Gram-Schmidt residual.

use super::{Complex, ComplexMatrix};

/// Growing orthogonal basis for the span of a sequence of matrices.
///
/// Invariants: stored elements are pairwise orthogonal under the Frobenius
/// inner product, each has unit Frobenius norm, and their span equals the
/// span of every matrix accepted by [`SpanTracker::extend`]. The element
/// count never exceeds `dim`.
#[derive(Clone, Debug)]
pub struct SpanTracker {
    dim: usize,
    tolerance: f64,
    elements: Vec<ComplexMatrix>,
}

impl SpanTracker {
    /// Relative tolerance on the squared residual norm below which a
    /// matrix counts as spanned. 10⁻⁹ keeps a wide gap between genuine
    /// rank deficiency (residual ~10⁻¹⁵ relative) and genuine novelty.
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    /// Tracker for a space of the given dimension (the hard cap on stored
    /// elements: n² for complex n×n operators, n(n+1)/2 when callers feed
    /// only real parts of Hermitian operators).
    pub fn new(dim: usize) -> Self {
        Self::with_tolerance(dim, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(dim: usize, tolerance: f64) -> Self {
        assert!(tolerance >= 0.0, "tolerance must be nonnegative");
        SpanTracker {
            dim,
            tolerance,
            elements: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.elements.len() >= self.dim
    }

    /// The stored orthogonal elements, in insertion order.
    pub fn orthogonal_elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Whether `rho` lies in the tracked span.
    ///
    /// Uses the projection identity: the squared residual equals
    /// ⟨ρ,ρ⟩ − Σᵢ |⟨Oᵢ,ρ⟩|² / ⟨Oᵢ,Oᵢ⟩, so no residual matrix is formed.
    /// Membership means residual² ≤ tolerance · ⟨ρ,ρ⟩; the zero matrix is
    /// contained in any tracker, including an empty one.
    pub fn contains(&self, rho: &ComplexMatrix) -> bool {
        let norm_sq = rho.frobenius_norm_sq();
        if norm_sq == 0.0 {
            return true;
        }
        let mut projected = 0.0;
        for elem in &self.elements {
            let coef = elem.frobenius_inner(rho);
            projected += coef.norm_sqr() / elem.frobenius_norm_sq();
        }
        norm_sq - projected <= self.tolerance * norm_sq
    }

    /// Adds `rho` to the tracked span if it is independent of it.
    ///
    /// Returns true when the Gram-Schmidt residual of `rho` against the
    /// stored elements is significant; the residual (not `rho` itself) is
    /// then stored, renormalized to unit Frobenius norm to limit drift.
    /// Returns false for spanned matrices and for a full tracker.
    pub fn extend(&mut self, rho: &ComplexMatrix) -> bool {
        if self.is_full() {
            return false;
        }
        let norm_sq = rho.frobenius_norm_sq();
        if norm_sq == 0.0 {
            return false;
        }
        let mut residual = self.project_out(rho);
        // A second pass costs the same O(|O|·dim) and restores the
        // orthogonality that classical Gram-Schmidt loses to cancellation
        // when rho is nearly spanned.
        residual = self.project_out(&residual);
        let residual_sq = residual.frobenius_norm_sq();
        if residual_sq <= self.tolerance * norm_sq {
            return false;
        }
        let inv_norm = Complex::new(1.0 / residual_sq.sqrt(), 0.0);
        self.elements.push(residual.scale(inv_norm));
        true
    }

    /// ρ minus its projection onto every stored element.
    fn project_out(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut residual = rho.clone();
        for elem in &self.elements {
            let coef = elem.frobenius_inner(&residual) / elem.frobenius_norm_sq();
            residual = residual.sub(&elem.scale(coef));
        }
        residual
    }

    /// Projection coefficients of `rho` onto the stored elements, in
    /// storage order. `rho` is reconstructed as Σᵢ cᵢ·Oᵢ exactly when it
    /// lies in the tracked span.
    pub fn projection_coefficients(&self, rho: &ComplexMatrix) -> Vec<Complex> {
        self.elements
            .iter()
            .map(|elem| elem.frobenius_inner(rho) / elem.frobenius_norm_sq())
            .collect()
    }
}

//! Quasismoothness of hypersurface sections through first-order jets at Cox
//! lifts: a section cuts a quasismooth divisor at a point exactly when its
//! value and constrained gradient there are not all zero.

pub mod nu;

pub use nu::{
    beta_diagnostic, nu, nu_profile, smooth_profile, BetaReport, BetaRow, NuCertificate,
    NuControl, NuOutcome, NuProfile, ProfileClass, ProfilePoint,
};

use crate::error::{Error, Result};
use crate::ff::FieldElement;
use crate::linalg;
use crate::points::ClosedPoint;
use crate::toric::{Monomial, Section, Variety};

/// A complete intersection inside the ambient variety, presented by explicit
/// homogeneous generators. Quasismoothness of the subscheme itself is checked
/// pointwise (Jacobian rank equals the codimension at every visited point).
pub struct AmbientSubscheme {
    pub generators: Vec<Section>,
    pub codim: usize,
}

impl AmbientSubscheme {
    /// Does the point lie on the subscheme?
    pub fn contains(&self, variety: &Variety, coords: &[FieldElement]) -> Result<bool> {
        for g in &self.generators {
            if !g.evaluate(variety, coords)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Everything the jet of a section at one fixed lift needs: coordinate power
/// tables and, for a proper subscheme, the reduced Jacobian of its generators.
pub struct JetContext<'v> {
    variety: &'v Variety,
    coords: Vec<FieldElement>,
    /// Row-reduced Jacobian rows of the subscheme generators with their pivot
    /// columns; empty for the ambient variety itself.
    jac_rows: Vec<Vec<FieldElement>>,
    jac_pivots: Vec<usize>,
    /// Gradient coordinates that survive the reduction, ascending.
    free_cols: Vec<usize>,
}

impl<'v> JetContext<'v> {
    pub fn new(
        variety: &'v Variety,
        coords: &[FieldElement],
        subscheme: Option<&AmbientSubscheme>,
    ) -> Result<JetContext<'v>> {
        let d = variety.num_vars();
        assert_eq!(coords.len(), d);
        let (jac_rows, jac_pivots, free_cols) = match subscheme {
            None => (Vec::new(), Vec::new(), (0..d).collect()),
            Some(y) => {
                for g in &y.generators {
                    if !g.evaluate(variety, coords)?.is_zero() {
                        return Err(Error::NotOnY);
                    }
                }
                let mut rows = Vec::with_capacity(y.generators.len());
                for g in &y.generators {
                    let mut grad = Vec::with_capacity(d);
                    for i in 0..d {
                        grad.push(g.partial_derivative(variety, i)?.evaluate(variety, coords)?);
                    }
                    rows.push(grad);
                }
                let pivots = linalg::rref(&mut rows);
                if pivots.len() != y.codim {
                    return Err(Error::AmbientNotQuasismoothHere);
                }
                let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
                (rows, pivots, free)
            }
        };
        Ok(JetContext {
            variety,
            coords: coords.to_vec(),
            jac_rows,
            jac_pivots,
            free_cols,
        })
    }

    /// Length of the jet vectors this context produces: 1 + (d - codim).
    pub fn jet_len(&self) -> usize {
        1 + self.free_cols.len()
    }

    /// Power tables for the coordinates, covering every exponent in `basis`.
    pub fn powers_for(&self, basis: &[Monomial]) -> Vec<Vec<FieldElement>> {
        crate::toric::section::coordinate_powers(&self.coords, basis)
    }

    /// Jet of a single monomial: (value, gradient reduced modulo the row span
    /// of the subscheme Jacobian, projected to the surviving coordinates).
    pub fn jet_of_monomial(
        &self,
        m: &Monomial,
        powers: &[Vec<FieldElement>],
    ) -> Vec<FieldElement> {
        let desc = &self.coords[0].desc;
        let d = self.coords.len();
        let p = desc.p;
        let value = crate::toric::section::monomial_value(m, powers);
        let mut grad = vec![FieldElement::zero(desc); d];
        for i in 0..d {
            let e = m.exponents[i];
            if e == 0 || e as u64 % p == 0 {
                continue;
            }
            let mut prod = FieldElement::one(desc);
            let mut zero = false;
            for j in 0..d {
                let ej = m.exponents[j] as usize - usize::from(j == i);
                if ej > 0 {
                    if self.coords[j].is_zero() {
                        zero = true;
                        break;
                    }
                    prod = prod.mul(&powers[j][ej]);
                }
            }
            if !zero {
                grad[i] = prod.scale(e as u64 % p);
            }
        }
        self.assemble_jet(value, grad)
    }

    /// Jet of a full section at the lift.
    pub fn jet_of_section(&self, f: &Section) -> Result<Vec<FieldElement>> {
        let level = self.variety.tower.level_of(&self.coords[0]);
        let powers = self.powers_for(&f.basis);
        let desc = &self.coords[0].desc;
        let mut acc = vec![FieldElement::zero(desc); self.jet_len()];
        for (m, c) in f.basis.iter().zip(&f.coeffs) {
            if c.is_zero() {
                continue;
            }
            let c_up = self.variety.tower.embed(c, level)?;
            let jet = self.jet_of_monomial(m, &powers);
            for (a, j) in acc.iter_mut().zip(&jet) {
                *a = a.add(&c_up.mul(j));
            }
        }
        Ok(acc)
    }

    fn assemble_jet(&self, value: FieldElement, mut grad: Vec<FieldElement>) -> Vec<FieldElement> {
        // eliminate the pivot components using the reduced Jacobian rows
        for (row, &pc) in self.jac_rows.iter().zip(&self.jac_pivots) {
            if grad[pc].is_zero() {
                continue;
            }
            let f = grad[pc].clone();
            for j in 0..grad.len() {
                let s = f.mul(&row[j]);
                grad[j] = grad[j].sub(&s);
            }
        }
        let mut jet = Vec::with_capacity(self.jet_len());
        jet.push(value);
        for &c in &self.free_cols {
            jet.push(grad[c].clone());
        }
        jet
    }
}

/// The jet of a section at given Cox coordinates (ambient or relative to a
/// complete-intersection subscheme).
pub fn jet_vector(
    variety: &Variety,
    f: &Section,
    coords: &[FieldElement],
    subscheme: Option<&AmbientSubscheme>,
) -> Result<Vec<FieldElement>> {
    JetContext::new(variety, coords, subscheme)?.jet_of_section(f)
}

/// Quasismoothness of the intersection with V(f) at a closed point: the jet
/// is nonzero there. The answer does not depend on the chosen lift because
/// each component scales by a character of the quotient group along the fiber.
pub fn is_quasismooth_at(
    variety: &Variety,
    f: &Section,
    point: &ClosedPoint,
    subscheme: Option<&AmbientSubscheme>,
) -> Result<bool> {
    let jet = jet_vector(variety, f, &point.coords, subscheme)?;
    Ok(jet.iter().any(|x| !x.is_zero()))
}

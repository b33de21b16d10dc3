//! Finite signed mixtures of point masses.
//!
//! Every estimator in this crate expresses its distribution estimate in this
//! representation: a sorted list of `(location, weight)` atoms whose weights
//! may be negative, so the associated function `y ↦ Σ wᵢ·1{xᵢ ≤ y}` can
//! locally decrease and need not be a cumulative distribution function.
//! Quantiles therefore use a first-crossing rule, which remains well defined
//! under local non-monotonicity.

use crate::{Error, Result};

/// Default cap on the number of atom pairs a convolution may enumerate.
pub const CONVOLVE_BUDGET: u128 = 100_000_000;

/// A finite signed mixture of point masses.
///
/// Canonical form: locations strictly increasing, atoms at exactly equal
/// locations coalesced by summing their weights, and atoms whose coalesced
/// weight is exactly zero removed.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomMixture {
    atoms: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    total_mass: f64,
}

impl AtomMixture {
    /// Builds a canonical mixture from `(location, weight)` pairs in any order.
    ///
    /// `total_mass` is the plain sum of the input weights.
    pub fn from_atoms(pairs: &[(f64, f64)]) -> Result<Self> {
        for &(x, w) in pairs {
            if !x.is_finite() {
                return Err(Error::NonFinite("atom location"));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("atom weight"));
            }
        }
        let total_mass = pairs.iter().map(|&(_, w)| w).sum();
        Ok(Self::canonical(pairs.to_vec(), total_mass))
    }

    /// Sorts, coalesces exact duplicate locations, drops exact-zero weights,
    /// and precomputes the running cumulative sums.
    fn canonical(mut pairs: Vec<(f64, f64)>, total_mass: f64) -> Self {
        pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite locations"));
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match atoms.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => atoms.push((x, w)),
            }
        }
        atoms.retain(|&(_, w)| w != 0.0);
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut run = 0.0;
        for &(_, w) in &atoms {
            run += w;
            cumulative.push(run);
        }
        Self { atoms, cumulative, total_mass }
    }

    /// The canonical atoms, sorted by strictly increasing location.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Number of canonical atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// True when the mixture has no atoms.
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Sum of the weights as supplied at construction time.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Evaluates `Σ wᵢ·1{xᵢ ≤ y}`; right-continuous in `y`.
    pub fn evaluate(&self, y: f64) -> f64 {
        let idx = self.atoms.partition_point(|&(x, _)| x <= y);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// Linear combination `Σ cᵢ·mᵢ` of mixtures, canonicalized.
    ///
    /// `total_mass` is set to `Σ cᵢ·total_mass(mᵢ)`.
    pub fn combine(terms: &[(f64, &AtomMixture)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Shape("combine needs at least one term".into()));
        }
        let mut pairs = Vec::with_capacity(terms.iter().map(|(_, m)| m.len()).sum());
        let mut total_mass = 0.0;
        for &(c, m) in terms {
            if !c.is_finite() {
                return Err(Error::NonFinite("combination coefficient"));
            }
            total_mass += c * m.total_mass;
            for &(x, w) in &m.atoms {
                let cw = c * w;
                if !cw.is_finite() {
                    return Err(Error::NonFinite("scaled atom weight"));
                }
                pairs.push((x, cw));
            }
        }
        Ok(Self::canonical(pairs, total_mass))
    }

    /// Convolution by exact pairwise enumeration, with the default pair budget.
    pub fn convolve(&self, other: &AtomMixture) -> Result<Self> {
        self.convolve_with_budget(other, CONVOLVE_BUDGET)
    }

    /// Convolution with an explicit cap on the number of enumerated pairs.
    ///
    /// Produces an atom at every `xᵢ + zⱼ` with weight `wᵢ·vⱼ`;
    /// `total_mass` is the product of the two input masses.
    pub fn convolve_with_budget(&self, other: &AtomMixture, budget: u128) -> Result<Self> {
        let required = self.atoms.len() as u128 * other.atoms.len() as u128;
        if required > budget {
            return Err(Error::ConvolutionBudget { required, budget });
        }
        let mut pairs = Vec::with_capacity(required as usize);
        for &(x, w) in &self.atoms {
            for &(z, v) in &other.atoms {
                let loc = x + z;
                if !loc.is_finite() {
                    return Err(Error::NonFinite("convolved atom location"));
                }
                pairs.push((loc, w * v));
            }
        }
        Ok(Self::canonical(pairs, self.total_mass * other.total_mass))
    }

    /// First-crossing quantile: the smallest atom location at which the
    /// running cumulative sum reaches `p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        for (i, &c) in self.cumulative.iter().enumerate() {
            if c >= p {
                return Ok(self.atoms[i].0);
            }
        }
        Err(Error::NoQuantile { p })
    }

    /// Supremum of `|F₁(y) − F₂(y)|`, checked at every jump location of
    /// either mixture and at the left limit just below it.
    pub fn sup_distance(&self, other: &AtomMixture) -> f64 {
        let (a, b) = (&self.atoms, &other.atoms);
        let (mut i, mut j) = (0, 0);
        let (mut fa, mut fb) = (0.0_f64, 0.0_f64);
        let mut sup = 0.0_f64;
        while i < a.len() || j < b.len() {
            let x = match (a.get(i), b.get(j)) {
                (Some(&(xa, _)), Some(&(xb, _))) => xa.min(xb),
                (Some(&(xa, _)), None) => xa,
                (None, Some(&(xb, _))) => xb,
                (None, None) => unreachable!(),
            };
            sup = sup.max((fa - fb).abs());
            while i < a.len() && a[i].0 == x {
                fa = self.cumulative[i];
                i += 1;
            }
            while j < b.len() && b[j].0 == x {
                fb = other.cumulative[j];
                j += 1;
            }
            sup = sup.max((fa - fb).abs());
        }
        sup
    }

    /// Renders the mixture as two-column CSV, locations ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("location,weight\n");
        for &(x, w) in &self.atoms {
            out.push_str(&format!("{x},{w}\n"));
        }
        out
    }
}

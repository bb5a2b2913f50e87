//! Finite Abelian groups in single-index form.
//!
//! Two families are supported: the cyclic group `Z(d)` and the product
//! `Z(d) x Z(d)`. Elements are always stored as a canonical index
//! `0..order`. For the product group the index of the pair `(alpha, beta)`
//! is `d * alpha + beta`, and the group law is componentwise addition
//! modulo `d`, which is *not* addition modulo `d^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Largest group order for which a Cayley table is materialized.
pub const MAX_CAYLEY_ORDER: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Cyclic,
    Product,
}

/// A finite Abelian group: `Z(d)` or `Z(d) x Z(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroupSpec", into = "RawGroupSpec")]
pub struct GroupSpec {
    kind: GroupKind,
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGroupSpec {
    kind: GroupKind,
    d: usize,
}

impl TryFrom<RawGroupSpec> for GroupSpec {
    type Error = WalkError;

    fn try_from(raw: RawGroupSpec) -> Result<Self> {
        GroupSpec::new(raw.kind, raw.d)
    }
}

impl From<GroupSpec> for RawGroupSpec {
    fn from(spec: GroupSpec) -> Self {
        RawGroupSpec {
            kind: spec.kind,
            d: spec.d,
        }
    }
}

/// An element of a [`GroupSpec`], identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(usize);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0
    }
}

impl GroupSpec {
    pub fn new(kind: GroupKind, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(WalkError::Domain(format!(
                "group modulus d must be >= 2, got {d}"
            )));
        }
        if kind == GroupKind::Product && d.checked_mul(d).is_none() {
            return Err(WalkError::Domain(format!("d = {d} overflows d^2")));
        }
        Ok(GroupSpec { kind, d })
    }

    pub fn cyclic(d: usize) -> Result<Self> {
        Self::new(GroupKind::Cyclic, d)
    }

    pub fn product(d: usize) -> Result<Self> {
        Self::new(GroupKind::Product, d)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn modulus(&self) -> usize {
        self.d
    }

    /// Number of elements: `d` for the cyclic group, `d^2` for the product.
    pub fn order(&self) -> usize {
        match self.kind {
            GroupKind::Cyclic => self.d,
            GroupKind::Product => self.d * self.d,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(0)
    }

    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index < self.order() {
            Ok(GroupElement(index))
        } else {
            Err(WalkError::Domain(format!(
                "element index {index} out of range for group of order {}",
                self.order()
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order()).map(GroupElement)
    }

    fn check(&self, g: GroupElement) -> Result<()> {
        self.element(g.0).map(|_| ())
    }

    pub fn add(&self, g: GroupElement, h: GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement(self.add_unchecked(g.0, h.0)))
    }

    pub fn inverse(&self, g: GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement(self.inverse_unchecked(g.0)))
    }

    pub(crate) fn add_unchecked(&self, a: usize, b: usize) -> usize {
        let d = self.d;
        match self.kind {
            GroupKind::Cyclic => (a + b) % d,
            GroupKind::Product => {
                let alpha = (a / d + b / d) % d;
                let beta = (a % d + b % d) % d;
                d * alpha + beta
            }
        }
    }

    pub(crate) fn inverse_unchecked(&self, a: usize) -> usize {
        let d = self.d;
        match self.kind {
            GroupKind::Cyclic => (d - a) % d,
            GroupKind::Product => {
                let (alpha, beta) = (a / d, a % d);
                d * ((d - alpha) % d) + (d - beta) % d
            }
        }
    }

    /// Splits a product-group index into `(alpha, beta)` with `nu = d * alpha + beta`.
    pub fn decode_pair(&self, g: GroupElement) -> Result<(usize, usize)> {
        self.require_product()?;
        self.check(g)?;
        Ok((g.0 / self.d, g.0 % self.d))
    }

    /// Inverse of [`GroupSpec::decode_pair`].
    pub fn encode_pair(&self, alpha: usize, beta: usize) -> Result<GroupElement> {
        self.require_product()?;
        if alpha >= self.d || beta >= self.d {
            return Err(WalkError::Domain(format!(
                "pair ({alpha}, {beta}) out of range for d = {}",
                self.d
            )));
        }
        Ok(GroupElement(self.d * alpha + beta))
    }

    fn require_product(&self) -> Result<()> {
        match self.kind {
            GroupKind::Product => Ok(()),
            GroupKind::Cyclic => Err(WalkError::Unsupported(
                "pair coordinates exist only for the product group".into(),
            )),
        }
    }

    /// Regular representation: `M(r)` has its single 1 of row `a` in column `a + r`.
    pub fn permutation_rep(&self, r: GroupElement) -> Result<PermutationMatrix> {
        self.check(r)?;
        let image = (0..self.order())
            .map(|a| self.add_unchecked(a, r.0))
            .collect();
        Ok(PermutationMatrix { image })
    }

    pub fn cayley_table(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.order();
        if n > MAX_CAYLEY_ORDER {
            return Err(WalkError::Capacity {
                what: "Cayley table",
                limit: MAX_CAYLEY_ORDER,
                requested: n,
            });
        }
        Ok((0..n)
            .map(|a| (0..n).map(|b| self.add_unchecked(a, b)).collect())
            .collect())
    }
}

/// A permutation matrix stored as the image of each row index.
///
/// Row `a` carries its single nonzero entry in column `image[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMatrix {
    image: Vec<usize>,
}

impl PermutationMatrix {
    pub fn identity(n: usize) -> Self {
        PermutationMatrix {
            image: (0..n).collect(),
        }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(WalkError::invariant(
                    "permutation",
                    format!("{image:?} is not a bijection on 0..{n}"),
                ));
            }
        }
        Ok(PermutationMatrix { image })
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &PermutationMatrix) -> Result<PermutationMatrix> {
        WalkError::check_len(self.size(), other.size())?;
        Ok(PermutationMatrix {
            image: self.image.iter().map(|&j| other.image[j]).collect(),
        })
    }

    pub fn transpose(&self) -> PermutationMatrix {
        let mut image = vec![0; self.size()];
        for (a, &b) in self.image.iter().enumerate() {
            image[b] = a;
        }
        PermutationMatrix { image }
    }

    /// Row vector times matrix: entry `a` of `x` moves to position `image[a]`.
    pub fn apply_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        WalkError::check_len(self.size(), x.len())?;
        let mut y = vec![0.0; x.len()];
        for (a, &b) in self.image.iter().enumerate() {
            y[b] = x[a];
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.size();
        nalgebra::DMatrix::from_fn(n, n, |a, b| if self.image[a] == b { 1.0 } else { 0.0 })
    }
}

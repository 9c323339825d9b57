//! Finite groups built from cyclic factors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One element of a [`GroupSpec`]: an index per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<usize>);

impl GroupElement {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn identity(arity: usize) -> Self {
        Self(vec![0; arity])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&i| i == 0)
    }
}

impl From<Vec<usize>> for GroupElement {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Action of the rotation factor on translation pairs, as a lookup table.
///
/// `table[j][k * k_y + k']` is the flat index of `h_j(k, k')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationAction {
    k_x: usize,
    k_y: usize,
    table: Vec<Vec<usize>>,
}

impl TranslationAction {
    /// Validates that every row is an automorphism of `Z_kx × Z_ky` and that
    /// `j ↦ table[j]` is a homomorphism from `Z_|H|`.
    pub fn new(k_x: usize, k_y: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let size = k_x * k_y;
        if table.is_empty() {
            return Err(Error::Validation("action table has no rows".into()));
        }
        for (j, row) in table.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Validation(format!(
                    "action row {j} has {} entries, expected {size}",
                    row.len()
                )));
            }
            let mut seen = vec![false; size];
            for &v in row {
                if v >= size || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Validation(format!(
                        "action row {j} is not a bijection on Z_{k_x} x Z_{k_y}"
                    )));
                }
            }
        }
        let action = Self { k_x, k_y, table };
        action.check_automorphisms()?;
        Ok(action)
    }

    /// The rotation action of `h_0^j` by `j` quarter turns,
    /// `(k, k') ↦ (−k', k)` per step, repeated `4 / h_order` times.
    /// Requires `k_x == k_y` and `h_order ∈ {1, 2, 4}`.
    pub fn rotation(k: usize, h_order: usize) -> Result<Self> {
        if !matches!(h_order, 1 | 2 | 4) {
            return Err(Error::Unsupported(format!(
                "integer translations admit rotation groups of order 1, 2 or 4, not {h_order}"
            )));
        }
        let quarter_turns = 4 / h_order;
        let table = (0..h_order)
            .map(|j| {
                (0..k * k)
                    .map(|flat| {
                        let (mut x, mut y) = (flat / k, flat % k);
                        for _ in 0..j * quarter_turns {
                            (x, y) = ((k - y) % k, x);
                        }
                        x * k + y
                    })
                    .collect()
            })
            .collect();
        Self::new(k, k, table)
    }

    pub fn h_order(&self) -> usize {
        self.table.len()
    }

    pub fn translation_orders(&self) -> (usize, usize) {
        (self.k_x, self.k_y)
    }

    /// `h_j(a)` for the translation `a = (k, k')`.
    pub fn apply(&self, j: usize, a: (usize, usize)) -> (usize, usize) {
        let flat = self.table[j % self.table.len()][a.0 * self.k_y + a.1];
        (flat / self.k_y, flat % self.k_y)
    }

    fn check_automorphisms(&self) -> Result<()> {
        let (kx, ky) = (self.k_x, self.k_y);
        let h = self.table.len();
        let add = |a: (usize, usize), b: (usize, usize)| ((a.0 + b.0) % kx, (a.1 + b.1) % ky);
        for j in 0..h {
            for a in 0..kx * ky {
                let a = (a / ky, a % ky);
                for b in 0..kx * ky {
                    let b = (b / ky, b % ky);
                    if self.apply(j, add(a, b)) != add(self.apply(j, a), self.apply(j, b)) {
                        return Err(Error::Validation(format!(
                            "action row {j} is not additive on translations"
                        )));
                    }
                }
            }
        }
        for j1 in 0..h {
            for j2 in 0..h {
                for a in 0..kx * ky {
                    let a = (a / ky, a % ky);
                    if self.apply(j1, self.apply(j2, a)) != self.apply((j1 + j2) % h, a) {
                        return Err(Error::Validation(format!(
                            "action rows {j1} and {j2} do not compose like rotation indices"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupKind {
    SingleCyclic,
    DirectProduct,
    /// Translations `Z_K × Z_K'` with rotations `Z_|H|` acting on them.
    SemiDirect { action: TranslationAction },
}

/// A finite group assembled from cyclic factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    factors: Vec<usize>,
    #[serde(flatten)]
    kind: GroupKind,
}

impl GroupSpec {
    pub fn cyclic(k: usize) -> Result<Self> {
        Self::new(vec![k], GroupKind::SingleCyclic)
    }

    pub fn direct(factors: Vec<usize>) -> Result<Self> {
        Self::new(factors, GroupKind::DirectProduct)
    }

    /// `(Z_K × Z_K') ⋊ Z_|H|` with factor order `(K, K', |H|)`.
    pub fn semi_direct(action: TranslationAction) -> Result<Self> {
        let (kx, ky) = action.translation_orders();
        let h = action.h_order();
        Self::new(vec![kx, ky, h], GroupKind::SemiDirect { action })
    }

    /// Semi-direct product with the rotation preset of [`TranslationAction::rotation`].
    pub fn translations_rotations(k: usize, h_order: usize) -> Result<Self> {
        Self::semi_direct(TranslationAction::rotation(k, h_order)?)
    }

    pub fn new(factors: Vec<usize>, kind: GroupKind) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Validation("a group needs at least one factor".into()));
        }
        if let Some(pos) = factors.iter().position(|&k| k == 0) {
            return Err(Error::Validation(format!("factor {pos} has order 0")));
        }
        match &kind {
            GroupKind::SingleCyclic if factors.len() != 1 => {
                return Err(Error::Validation(format!(
                    "single-cyclic group given {} factors",
                    factors.len()
                )))
            }
            GroupKind::SemiDirect { action } => {
                let (kx, ky) = action.translation_orders();
                if factors != [kx, ky, action.h_order()] {
                    return Err(Error::Validation(format!(
                        "semi-direct factors {factors:?} disagree with the action ({kx}, {ky}, {})",
                        action.h_order()
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { factors, kind })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn action(&self) -> Option<&TranslationAction> {
        match &self.kind {
            GroupKind::SemiDirect { action } => Some(action),
            _ => None,
        }
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.factors.len())
    }

    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        if g.indices().len() != self.factors.len() {
            return Err(Error::Validation(format!(
                "element {g} has {} indices, group has {} factors",
                g.indices().len(),
                self.factors.len()
            )));
        }
        for (i, (&v, &k)) in g.indices().iter().zip(&self.factors).enumerate() {
            if v >= k {
                return Err(Error::Validation(format!(
                    "index {i} of element {g} is {v}, must be below {k}"
                )));
            }
        }
        Ok(())
    }

    /// Every element, last factor varying fastest.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|flat| self.element_at(flat)).collect()
    }

    /// Element at mixed-radix position `flat` (last factor fastest).
    pub fn element_at(&self, mut flat: usize) -> GroupElement {
        let mut idx = vec![0; self.factors.len()];
        for (slot, &k) in idx.iter_mut().zip(&self.factors).rev() {
            *slot = flat % k;
            flat /= k;
        }
        GroupElement(idx)
    }

    /// Inverse of [`GroupSpec::element_at`].
    pub fn position(&self, g: &GroupElement) -> usize {
        g.indices()
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&v, &k)| acc * k + v)
    }

    /// The group product `g ∘ h`.
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(self.compose_unchecked(g, h))
    }

    pub(crate) fn compose_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let (a, b) = (g.indices(), h.indices());
        match &self.kind {
            GroupKind::SemiDirect { action } => {
                // (a1, h1)(a2, h2) = (a1 + h1(a2), h1 h2)
                let (kx, ky, ho) = (self.factors[0], self.factors[1], self.factors[2]);
                let (rx, ry) = action.apply(a[2], (b[0], b[1]));
                GroupElement(vec![(a[0] + rx) % kx, (a[1] + ry) % ky, (a[2] + b[2]) % ho])
            }
            _ => GroupElement(
                a.iter()
                    .zip(b)
                    .zip(&self.factors)
                    .map(|((x, y), k)| (x + y) % k)
                    .collect(),
            ),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        Ok(self.inverse_unchecked(g))
    }

    pub(crate) fn inverse_unchecked(&self, g: &GroupElement) -> GroupElement {
        let a = g.indices();
        match &self.kind {
            GroupKind::SemiDirect { action } => {
                // (a, h)^-1 = (h^-1(-a), h^-1)
                let (kx, ky, ho) = (self.factors[0], self.factors[1], self.factors[2]);
                let h_inv = (ho - a[2]) % ho;
                let (x, y) = action.apply(h_inv, ((kx - a[0]) % kx, (ky - a[1]) % ky));
                GroupElement(vec![x, y, h_inv])
            }
            _ => GroupElement(
                a.iter()
                    .zip(&self.factors)
                    .map(|(&x, &k)| (k - x) % k)
                    .collect(),
            ),
        }
    }

    /// True when `g` and `h` are conjugate (brute force over the group).
    pub fn are_conjugate(&self, g: &GroupElement, h: &GroupElement) -> bool {
        self.elements().iter().any(|x| {
            let xg = self.compose_unchecked(x, g);
            self.compose_unchecked(&xg, &self.inverse_unchecked(x)) == *h
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: &[usize]) -> GroupElement {
        GroupElement::new(v.to_vec())
    }

    #[test]
    fn cyclic_compose_and_inverse() {
        let g = GroupSpec::cyclic(10).unwrap();
        assert_eq!(g.compose(&el(&[3]), &el(&[9])).unwrap(), el(&[2]));
        assert_eq!(g.inverse(&el(&[3])).unwrap(), el(&[7]));
        assert_eq!(g.inverse(&el(&[0])).unwrap(), el(&[0]));
        assert_eq!(g.compose(&g.identity(), &el(&[4])).unwrap(), el(&[4]));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let g = GroupSpec::cyclic(10).unwrap();
        assert!(matches!(g.compose(&el(&[10]), &el(&[0])), Err(Error::Validation(_))));
        assert!(g.validate(&el(&[1, 2])).is_err());
        assert!(GroupSpec::direct(vec![3, 0]).is_err());
    }

    #[test]
    fn semi_direct_product_matches_hand_computation() {
        let g = GroupSpec::translations_rotations(3, 4).unwrap();
        // ((1,0),1) ∘ ((1,0),0) = ((1,0) + h((1,0)), 1) = ((1,1), 1)
        assert_eq!(g.compose(&el(&[1, 0, 1]), &el(&[1, 0, 0])).unwrap(), el(&[1, 1, 1]));
        assert_eq!(g.compose(&el(&[1, 0, 0]), &el(&[1, 0, 1])).unwrap(), el(&[2, 0, 1]));
    }

    #[test]
    fn semi_direct_inverse_matches_brute_force() {
        let g = GroupSpec::translations_rotations(3, 4).unwrap();
        let x = el(&[1, 1, 1]);
        let brute: Vec<_> = g
            .elements()
            .into_iter()
            .filter(|y| g.compose(&x, y).unwrap().is_identity())
            .collect();
        assert_eq!(brute.len(), 1);
        assert_eq!(g.inverse(&x).unwrap(), brute[0]);
    }

    #[test]
    fn semi_direct_is_associative_exhaustively() {
        let g = GroupSpec::translations_rotations(3, 4).unwrap();
        let els = g.elements();
        assert_eq!(els.len(), 36);
        for a in &els {
            for b in &els {
                let ab = g.compose_unchecked(a, b);
                for c in &els {
                    let left = g.compose_unchecked(&ab, c);
                    let right = g.compose_unchecked(a, &g.compose_unchecked(b, c));
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn non_homomorphic_action_is_rejected() {
        // a row-0 that is not the identity breaks h_0 = e
        let swap: Vec<usize> = (0..9).map(|f| (f % 3) * 3 + f / 3).collect();
        assert!(TranslationAction::new(3, 3, vec![swap.clone(), swap.clone(), swap]).is_err());
        let not_bijective = vec![vec![0; 9]];
        assert!(TranslationAction::new(3, 3, not_bijective).is_err());
        assert!(matches!(TranslationAction::rotation(5, 5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn element_positions_round_trip() {
        let g = GroupSpec::direct(vec![4, 5, 5]).unwrap();
        for (i, e) in g.elements().iter().enumerate() {
            assert_eq!(g.position(e), i);
        }
        assert_eq!(g.element_at(7), el(&[0, 1, 2]));
    }
}

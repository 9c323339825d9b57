//! Character tables and the isomorphism test they support.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::operator::LatentOperator;
use crate::group::spec::{GroupElement, GroupSpec};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterEntry {
    pub element: Vec<usize>,
    pub trace_re: f64,
    pub trace_im: f64,
}

impl CharacterEntry {
    pub fn trace(&self) -> Complex64 {
        Complex64::new(self.trace_re, self.trace_im)
    }
}

/// Trace of a representation at every group element, in element order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterTable {
    entries: Vec<CharacterEntry>,
}

impl CharacterTable {
    pub fn from_traces(traces: impl IntoIterator<Item = (GroupElement, Complex64)>) -> Self {
        Self {
            entries: traces
                .into_iter()
                .map(|(g, t)| CharacterEntry {
                    element: g.indices().to_vec(),
                    trace_re: t.re,
                    trace_im: t.im,
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[CharacterEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, g: &GroupElement) -> Option<Complex64> {
        self.entries
            .iter()
            .find(|e| e.element == g.indices())
            .map(CharacterEntry::trace)
    }

    /// The regular-representation pattern: `dim` at the identity, 0 elsewhere.
    pub fn regular(spec: &GroupSpec, dim: usize) -> Self {
        Self::from_traces(spec.elements().into_iter().map(|g| {
            let t = if g.is_identity() { dim as f64 } else { 0.0 };
            (g, Complex64::new(t, 0.0))
        }))
    }

    /// Largest `|χ(g) − χ(h)|` over conjugate pairs `g, h`.
    pub fn class_function_deviation(&self, spec: &GroupSpec) -> f64 {
        let mut worst = 0.0f64;
        for g in spec.elements() {
            let Some(tg) = self.get(&g) else { continue };
            for x in spec.elements() {
                let conj = spec.compose_unchecked(
                    &spec.compose_unchecked(&x, &g),
                    &spec.inverse_unchecked(&x),
                );
                if let Some(tc) = self.get(&conj) {
                    worst = worst.max((tg - tc).norm());
                }
            }
        }
        worst
    }
}

/// Traces of `build(g)` for every element of `spec`.
pub fn character_table<F>(spec: &GroupSpec, exec: Execution, build: F) -> Result<CharacterTable>
where
    F: Fn(&GroupElement) -> Result<LatentOperator> + Sync + Send,
{
    let elements = spec.elements();
    let traces = exec.map(&elements, |g| build(g).map(|op| op.trace()));
    let traces = traces.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CharacterTable::from_traces(elements.into_iter().zip(traces)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsomorphismReport {
    pub isomorphic: bool,
    pub max_deviation: f64,
    pub worst_element: Option<Vec<usize>>,
}

/// Compares two character tables element by element.
pub fn verify_isomorphic(a: &CharacterTable, b: &CharacterTable, tol: f64) -> Result<IsomorphismReport> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "character tables cover {} and {} elements",
            a.len(),
            b.len()
        )));
    }
    let mut max_deviation = 0.0f64;
    let mut worst_element = None;
    for ea in a.entries() {
        let tb = b
            .entries()
            .iter()
            .find(|e| e.element == ea.element)
            .ok_or_else(|| {
                Error::Validation(format!("element {:?} missing from second table", ea.element))
            })?
            .trace();
        let d = (ea.trace() - tb).norm();
        if d > max_deviation || worst_element.is_none() {
            max_deviation = max_deviation.max(d);
            worst_element = Some(ea.element.clone());
        }
    }
    Ok(IsomorphismReport {
        isomorphic: max_deviation <= tol,
        max_deviation,
        worst_element,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::operator::{disentangled_operator, shift_operator_complex, shift_operator_perm};

    fn cyclic_table(k: usize, dim: usize, build: fn(usize, usize, usize) -> Result<LatentOperator>) -> CharacterTable {
        let spec = GroupSpec::cyclic(k).unwrap();
        character_table(&spec, Execution::Sequential, |g| build(k, dim, g.indices()[0])).unwrap()
    }

    #[test]
    fn permutation_shift_table_is_regular() {
        let t = cyclic_table(10, 800, shift_operator_perm);
        let spec = GroupSpec::cyclic(10).unwrap();
        let r = verify_isomorphic(&t, &CharacterTable::regular(&spec, 800), 0.0).unwrap();
        assert!(r.isomorphic);
    }

    #[test]
    fn disentangled_table_follows_closed_form() {
        let t = cyclic_table(10, 800, disentangled_operator);
        for (k, e) in t.entries().iter().enumerate() {
            let expected = if k == 0 {
                800.0
            } else {
                798.0 + 2.0 * (std::f64::consts::TAU * k as f64 / 10.0).cos()
            };
            assert!((e.trace() - Complex64::new(expected, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn shift_tables_agree_but_disentangled_differs() {
        let perm = cyclic_table(10, 800, shift_operator_perm);
        let complex = cyclic_table(10, 800, shift_operator_complex);
        let dis = cyclic_table(10, 800, disentangled_operator);
        assert!(verify_isomorphic(&perm, &complex, 1e-9).unwrap().isomorphic);
        let r = verify_isomorphic(&perm, &dis, 1e-9).unwrap();
        assert!(!r.isomorphic);
        assert!(r.max_deviation >= 796.0);
        assert_eq!(r.worst_element, Some(vec![1]));
        assert!(verify_isomorphic(&dis, &dis, 0.0).unwrap().isomorphic);
    }

    #[test]
    fn mismatched_tables_are_rejected() {
        let a = cyclic_table(4, 8, shift_operator_perm);
        let b = cyclic_table(5, 10, shift_operator_perm);
        assert!(matches!(verify_isomorphic(&a, &b, 1e-9), Err(Error::Validation(_))));
    }

    #[test]
    fn json_summary_shape() {
        let t = cyclic_table(2, 2, shift_operator_perm);
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v[1]["element"], serde_json::json!([1]));
        assert_eq!(v[0]["trace_re"], serde_json::json!(2.0));
        assert_eq!(v[1]["trace_im"], serde_json::json!(0.0));
    }
}

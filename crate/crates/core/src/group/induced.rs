//! Representations of translations ⋊ rotations built by induction from the
//! characters of the translation subgroup.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::operator::{root_of_unity, DenseBlock, LatentOperator, OperatorPayload};
use crate::group::spec::{GroupElement, GroupSpec, TranslationAction};
use crate::numkit::ComplexMatrix;

/// Index `(x₁, y₁)` of the translation character
/// `χ(k, k') = exp(2iπ (x₁k/K + y₁k'/K'))`.
pub type CharacterIndex = (usize, usize);

fn semi_direct_action(spec: &GroupSpec) -> Result<&TranslationAction> {
    spec.action().ok_or_else(|| {
        Error::Unsupported("induced representations need a semi-direct group".into())
    })
}

/// Phase of `χ_r(a)` as a numerator over `K·K'`.
fn phase(kx: usize, ky: usize, r: CharacterIndex, a: (usize, usize)) -> usize {
    (r.0 * a.0 * ky + r.1 * a.1 * kx) % (kx * ky)
}

fn character(kx: usize, ky: usize, r: CharacterIndex, a: (usize, usize)) -> Complex64 {
    root_of_unity(kx * ky, phase(kx, ky, r, a))
}

/// Character index of `h_j · χ_r`, i.e. of `a ↦ χ_r(h_j⁻¹(a))`.
fn act_on_character(action: &TranslationAction, j: usize, r: CharacterIndex) -> Result<CharacterIndex> {
    let (kx, ky) = action.translation_orders();
    let h = action.h_order();
    let j_inv = (h - j % h) % h;
    let gx = action.apply(j_inv, (1 % kx, 0));
    let gy = action.apply(j_inv, (0, 1 % ky));
    let want = (phase(kx, ky, r, gx), phase(kx, ky, r, gy));
    for x in 0..kx {
        for y in 0..ky {
            if (phase(kx, ky, (x, y), (1 % kx, 0)), phase(kx, ky, (x, y), (0, 1 % ky))) == want {
                return Ok((x, y));
            }
        }
    }
    Err(Error::Inconsistent(format!(
        "rotation {j} does not map character {r:?} to a character of the translations"
    )))
}

/// One representative per rotation orbit of the nonzero translation
/// characters: the lexicographically smallest member of each orbit.
pub fn orbit_representatives(spec: &GroupSpec) -> Result<Vec<CharacterIndex>> {
    Ok(character_orbits(spec)?.into_iter().map(|o| o[0]).collect())
}

/// The orbits themselves, each listed from its representative onward
/// (`h_0·r, h_1·r, …`).
pub fn character_orbits(spec: &GroupSpec) -> Result<Vec<Vec<CharacterIndex>>> {
    let action = semi_direct_action(spec)?;
    let (kx, ky) = action.translation_orders();
    let h = action.h_order();
    let a_order = kx * ky;
    if (a_order - 1) % h != 0 {
        return Err(Error::Inconsistent(format!(
            "{} nonzero translation characters cannot split into orbits of size {h}",
            a_order - 1
        )));
    }
    let mut seen = vec![false; a_order];
    seen[0] = true;
    let mut orbits = Vec::with_capacity((a_order - 1) / h);
    for flat in 1..a_order {
        if seen[flat] {
            continue;
        }
        let r = (flat / ky, flat % ky);
        let orbit = (0..h)
            .map(|j| act_on_character(action, j, r))
            .collect::<Result<Vec<_>>>()?;
        for &(x, y) in &orbit {
            let f = x * ky + y;
            if seen[f] && f != flat {
                return Err(Error::Inconsistent(format!(
                    "character {r:?} has a nontrivial stabilizer; orbits must have size {h}"
                )));
            }
            seen[f] = true;
        }
        orbits.push(orbit);
    }
    if orbits.len() != (a_order - 1) / h {
        return Err(Error::Inconsistent(format!(
            "found {} orbits, expected {}",
            orbits.len(),
            (a_order - 1) / h
        )));
    }
    Ok(orbits)
}

/// Sum of squared degrees of the irreducible pieces: `|H|` characters of
/// degree 1 plus `(|A|−1)/|H|` induced pieces of degree `|H|`.
pub fn degree_sum(spec: &GroupSpec) -> Result<usize> {
    let action = semi_direct_action(spec)?;
    let (kx, ky) = action.translation_orders();
    let h = action.h_order();
    let reps = orbit_representatives(spec)?.len();
    debug_assert_eq!(reps, (kx * ky - 1) / h);
    Ok(h + reps * h * h)
}

/// Permutation `P_h` for `h = h_0^j` on the coset representatives
/// `h_i = h_0^i`: column `i` has its 1 in row `(i + j) mod |H|`.
pub fn rotation_permutation(h_order: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(h_order, h_order, |r, c| {
        if r == (c + j) % h_order {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Fourier matrices with `B_rc = e^{−2iπ rc/|H|}` and `C_rc = e^{2iπ rc/|H|}`,
/// so that `P_h = B · ψ_h · C / |H|`.
pub fn fourier_conjugation_matrices(h_order: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if h_order == 0 {
        return Err(Error::Validation("rotation order must be positive".into()));
    }
    let b = ComplexMatrix::from_fn(h_order, h_order, |r, c| {
        root_of_unity(h_order, (h_order - (r * c) % h_order) % h_order)
    });
    let c = ComplexMatrix::from_fn(h_order, h_order, |r, c| root_of_unity(h_order, r * c));
    Ok((b, c))
}

/// The induced representation `ρ(g)` repeated `dim / (|A||H|)` times.
///
/// Each copy holds the `|H|` one-dimensional rotation characters followed by
/// `|H|` copies of `M_r(a)·P_h` for every orbit representative `r`, where
/// `M_r(a) = diag(χ_r(h_i⁻¹(a)))`.
pub fn induced_rep_operator(spec: &GroupSpec, g: &GroupElement, dim: usize) -> Result<LatentOperator> {
    let action = semi_direct_action(spec)?;
    spec.validate(g)?;
    let (kx, ky) = action.translation_orders();
    if kx % 2 == 0 || ky % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "induced construction needs odd translation orders, got ({kx}, {ky})"
        )));
    }
    let h = action.h_order();
    let period = kx * ky * h;
    if !dim.is_multiple_of(period) {
        return Err(Error::Dimension(format!(
            "induced operator needs |A||H| = {period} to divide the latent dimension {dim}"
        )));
    }
    let idx = g.indices();
    let (a, j) = ((idx[0], idx[1]), idx[2]);

    let reps = orbit_representatives(spec)?;
    let trivial = ComplexMatrix::from_diagonal(
        &(0..h).map(|n| root_of_unity(h, n * j)).collect::<Vec<_>>(),
    );
    let perm = rotation_permutation(h, j);
    let orbit_blocks: Vec<ComplexMatrix> = reps
        .iter()
        .map(|&r| {
            let diag: Vec<Complex64> = (0..h)
                .map(|i| character(kx, ky, r, action.apply((h - i) % h, a)))
                .collect();
            ComplexMatrix::from_diagonal(&diag)
                .matmul(&perm)
                .expect("square blocks of equal size")
        })
        .collect();

    let mut blocks = Vec::new();
    let mut offset = 0;
    for _ in 0..dim / period {
        blocks.push(DenseBlock {
            offset,
            matrix: trivial.clone(),
        });
        offset += h;
        for m in &orbit_blocks {
            for _ in 0..h {
                blocks.push(DenseBlock {
                    offset,
                    matrix: m.clone(),
                });
                offset += h;
            }
        }
    }
    debug_assert_eq!(offset, dim);
    LatentOperator::new(g.clone(), dim, OperatorPayload::Dense(blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::operator::shift_operator_complex;
    use std::collections::BTreeSet;

    #[test]
    fn orbits_partition_nonzero_characters() {
        for (k, expected) in [(3, 2), (5, 6)] {
            let spec = GroupSpec::translations_rotations(k, 4).unwrap();
            let orbits = character_orbits(&spec).unwrap();
            assert_eq!(orbits.len(), expected);
            let mut all = BTreeSet::new();
            for o in &orbits {
                assert_eq!(o.len(), 4);
                assert_eq!(o[0], *o.iter().min().unwrap());
                for &c in o {
                    assert!(all.insert(c), "orbits overlap at {c:?}");
                }
            }
            all.insert((0, 0));
            assert_eq!(all.len(), k * k);
        }
    }

    #[test]
    fn orbits_are_closed_under_the_action() {
        let spec = GroupSpec::translations_rotations(5, 4).unwrap();
        let action = spec.action().unwrap();
        for o in character_orbits(&spec).unwrap() {
            let set: BTreeSet<_> = o.iter().copied().collect();
            for &c in &o {
                for j in 0..4 {
                    assert!(set.contains(&act_on_character(action, j, c).unwrap()));
                }
            }
        }
    }

    #[test]
    fn even_orders_have_stabilizers() {
        // (2,0) is fixed by the half turn when K = 4
        let spec = GroupSpec::translations_rotations(4, 4).unwrap();
        assert!(matches!(character_orbits(&spec), Err(Error::Inconsistent(_))));
        let g = spec.identity();
        assert!(matches!(
            induced_rep_operator(&spec, &g, 64),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn degree_sum_equals_group_order() {
        for (k, h) in [(3, 4), (5, 4), (3, 2), (7, 2), (5, 1)] {
            let spec = GroupSpec::translations_rotations(k, h).unwrap();
            assert_eq!(degree_sum(&spec).unwrap(), spec.order());
        }
    }

    #[test]
    fn identity_maps_to_identity() {
        let spec = GroupSpec::translations_rotations(3, 4).unwrap();
        let op = induced_rep_operator(&spec, &spec.identity(), 72).unwrap();
        assert_eq!(op.to_dense().max_abs_diff(&ComplexMatrix::identity(72)), 0.0);
        assert!(induced_rep_operator(&spec, &spec.identity(), 40).is_err());
    }

    #[test]
    fn fourier_matrices_conjugate_diagonal_to_permutation() {
        for h in [1, 2, 3, 4, 8] {
            let (b, c) = fourier_conjugation_matrices(h).unwrap();
            let id = b.matmul(&c).unwrap().scaled(1.0 / h as f64);
            assert!(id.max_abs_diff(&ComplexMatrix::identity(h)) < 1e-12);
            for j in 0..h {
                let psi = shift_operator_complex(h, h, j).unwrap().to_dense();
                let p = b.matmul(&psi).unwrap().matmul(&c).unwrap().scaled(1.0 / h as f64);
                assert!(p.max_abs_diff(&rotation_permutation(h, j)) < 1e-12);
            }
        }
    }
}

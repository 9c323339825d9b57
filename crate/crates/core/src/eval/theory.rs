//! Exact checks of the operator theory: character tables, the induced
//! representation, analytic factorizations, and the topology example.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::{
    analytic_l1_translations, character_table, degree_sum, disentangled_operator,
    fourier_conjugation_matrices, induced_rep_operator, orbit, rotation_permutation,
    shift_operator_complex, shift_operator_perm, tensor_product_operator, verify_isomorphic,
    CharacterTable, GroupElement, GroupSpec, LatentOperator, OperatorPayload,
};
use crate::imaging::{translate_periodic, ImageGrid};
use crate::numkit::ComplexMatrix;
use crate::par::Execution;

pub const TRACE_TOL: f64 = 1e-9;
pub const FACTOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub max_deviation: f64,
}

impl CheckResult {
    /// Passes when `deviation ≤ tol`.
    fn within(name: impl Into<String>, deviation: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: deviation <= tol,
            max_deviation: deviation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TheoryReport {
    pub checks: Vec<CheckResult>,
}

impl TheoryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {:<48} max deviation {:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation
            );
        }
        let _ = writeln!(
            s,
            "{} of {} checks passed",
            self.checks.len() - self.failures().len(),
            self.checks.len()
        );
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoryOptions {
    /// Checks on groups larger than this are skipped.
    pub max_order: usize,
    /// Flips the sign of every shift operator, for testing that the suite
    /// notices a broken operator.
    pub flip_sign: bool,
    pub exec: Execution,
}

impl Default for TheoryOptions {
    fn default() -> Self {
        Self {
            max_order: 60,
            flip_sign: false,
            exec: Execution::Parallel,
        }
    }
}

fn negate(op: LatentOperator) -> Result<LatentOperator> {
    let dense = op.to_dense().scaled(-1.0);
    let n = op.dim();
    LatentOperator::new(
        op.element().clone(),
        n,
        OperatorPayload::Dense(vec![crate::group::DenseBlock {
            offset: 0,
            matrix: dense,
        }]),
    )
}

fn regular_deviation(spec: &GroupSpec, dim: usize, table: &CharacterTable) -> Result<f64> {
    Ok(verify_isomorphic(table, &CharacterTable::regular(spec, dim), f64::INFINITY)?.max_deviation)
}

/// Latent dimension used for cyclic checks of order `k`.
fn cyclic_dim(k: usize) -> usize {
    k * 6
}

/// Shift operators of every order `2..=12` have the regular character.
pub fn shift_character_checks(opts: &TheoryOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for k in 2..=12usize.min(opts.max_order) {
        let spec = GroupSpec::cyclic(k)?;
        let n = cyclic_dim(k);
        let flip = opts.flip_sign;
        let perm = character_table(&spec, opts.exec, |g| {
            let op = shift_operator_perm(k, n, g.indices()[0])?;
            if flip { negate(op) } else { Ok(op) }
        })?;
        out.push(CheckResult::within(
            format!("permutation shift character K={k} N={n}"),
            regular_deviation(&spec, n, &perm)?,
            TRACE_TOL,
        ));
        let cplx = character_table(&spec, opts.exec, |g| shift_operator_complex(k, n, g.indices()[0]))?;
        out.push(CheckResult::within(
            format!("complex shift character K={k} N={n}"),
            regular_deviation(&spec, n, &cplx)?,
            TRACE_TOL,
        ));
    }
    Ok(out)
}

/// The disentangled operator is not the regular representation: at the
/// half turn its trace is `N − 4`, not 0. The check passes when the
/// mismatch is at least `N − 4`.
pub fn disentangled_mismatch_checks(opts: &TheoryOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for k in (2..=12usize.min(opts.max_order)).step_by(2) {
        let spec = GroupSpec::cyclic(k)?;
        let n = cyclic_dim(k);
        let table = character_table(&spec, opts.exec, |g| disentangled_operator(k, n, g.indices()[0]))?;
        let half = table.get(&GroupElement::new(vec![k / 2])).unwrap_or_default();
        let dev = half.norm();
        out.push(CheckResult {
            name: format!("disentangled character mismatch K={k} N={n}"),
            pass: dev >= (n - 4) as f64 - TRACE_TOL,
            max_deviation: dev,
        });
    }
    Ok(out)
}

/// Tensor-product operators for `(K, K') ∈ {2,3,5}²`.
pub fn tensor_character_checks(opts: &TheoryOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for kx in [2, 3, 5] {
        for ky in [2, 3, 5] {
            if kx * ky > opts.max_order {
                continue;
            }
            let spec = GroupSpec::direct(vec![kx, ky])?;
            let n = 2 * kx * ky;
            let table = character_table(&spec, opts.exec, |g| {
                tensor_product_operator(kx, ky, n, g.indices()[0], g.indices()[1])
            })?;
            out.push(CheckResult::within(
                format!("tensor-product character K={kx} K'={ky} N={n}"),
                regular_deviation(&spec, n, &table)?,
                TRACE_TOL,
            ));
        }
    }
    Ok(out)
}

/// Induced representation of `(Z_3 × Z_3) ⋊ Z_4` on 36 dimensions:
/// homomorphism over all element pairs, regular character, degree sum.
pub fn induced_checks(opts: &TheoryOptions) -> Result<Vec<CheckResult>> {
    let spec = GroupSpec::translations_rotations(3, 4)?;
    let n = spec.order();
    if n > opts.max_order {
        return Ok(Vec::new());
    }
    let elems = spec.elements();
    let ops: Vec<ComplexMatrix> = elems
        .iter()
        .map(|g| induced_rep_operator(&spec, g, n).map(|o| o.to_dense()))
        .collect::<Result<_>>()?;
    let devs = opts.exec.map_range(elems.len(), |i| {
        let mut worst = 0.0f64;
        for (j, h) in elems.iter().enumerate() {
            let gh = spec.compose_unchecked(&elems[i], h);
            let prod = ops[i].matmul(&ops[j]).expect("square operators");
            worst = worst.max(prod.max_abs_diff(&ops[spec.position(&gh)]));
        }
        worst
    });
    let hom = devs.into_iter().fold(0.0, f64::max);
    let table = character_table(&spec, opts.exec, |g| induced_rep_operator(&spec, g, n))?;
    let ds = degree_sum(&spec)?;
    Ok(vec![
        CheckResult::within("induced representation homomorphism K=K'=3 |H|=4", hom, TRACE_TOL),
        CheckResult::within(
            "induced representation character K=K'=3 |H|=4",
            regular_deviation(&spec, n, &table)?,
            TRACE_TOL,
        ),
        CheckResult::within(
            "degree sum |H| + ((|A|-1)/|H|)|H|^2 = 36",
            (ds as f64 - n as f64).abs(),
            0.0,
        ),
    ])
}

/// `ψ_y · L₁ · ψ_x = T · L₁` for every shift pair, `K, K' ∈ {2,3,5}`.
pub fn analytic_layer_checks(opts: &TheoryOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for kx in [2, 3, 5] {
        for ky in [2, 3, 5] {
            if kx * ky > opts.max_order {
                continue;
            }
            let n = kx * ky;
            let l1 = ComplexMatrix::from_real(analytic_l1_translations(kx, ky, n)?);
            let mut worst = 0.0f64;
            for k in 0..kx {
                for kp in 0..ky {
                    let px = shift_operator_complex(kx, n, k)?.to_dense();
                    let py = shift_operator_complex(ky, n, kp)?.to_dense();
                    let t = tensor_product_operator(kx, ky, n, k, kp)?.to_dense();
                    let lhs = py.matmul(&l1)?.matmul(&px)?;
                    worst = worst.max(lhs.max_abs_diff(&t.matmul(&l1)?));
                }
            }
            out.push(CheckResult::within(
                format!("stacked translation factorization K={kx} K'={ky}"),
                worst,
                FACTOR_TOL,
            ));
        }
    }
    Ok(out)
}

/// `P_h = (1/|H|)·B·ψ_h·C` for `|H| ∈ {1,2,4,8}`.
pub fn fourier_checks(opts: &TheoryOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for h in [1, 2, 4, 8] {
        if h > opts.max_order {
            continue;
        }
        let (b, c) = fourier_conjugation_matrices(h)?;
        let mut worst = 0.0f64;
        for j in 0..h {
            let psi = shift_operator_complex(h, h, j)?.to_dense();
            let p = b.matmul(&psi)?.matmul(&c)?.scaled(1.0 / h as f64);
            worst = worst.max(p.max_abs_diff(&rotation_permutation(h, j)));
        }
        out.push(CheckResult::within(format!("Fourier conjugation P_h |H|={h}"), worst, FACTOR_TOL));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    /// `(pixels, orbit size)` for each probe image.
    pub orbits: Vec<(Vec<f64>, usize)>,
    pub pass: bool,
    pub text: String,
}

/// Orbits of `[0,0,0]`, `[1,1,1]` and `[1,0,0]` under cyclic translation
/// of a 3-pixel image.
pub fn topology_demo() -> Result<TopologyReport> {
    let spec = GroupSpec::cyclic(3)?;
    let probes = [([0.0, 0.0, 0.0], 1usize), ([1.0, 1.0, 1.0], 1), ([1.0, 0.0, 0.0], 3)];
    let mut orbits = Vec::new();
    let mut pass = true;
    let mut text = String::from("Translations of a 3-pixel image with periodic boundary (|G| = 3):\n");
    for (px, want) in probes {
        let x = ImageGrid::new(1, 3, px.to_vec())?;
        let o = orbit(&x, &spec, |x, g| translate_periodic(x, g.indices()[0] as i64, 0), 0.0);
        pass &= o.len() == want && spec.order() % o.len() == 0;
        let _ = writeln!(text, "  orbit of {px:?}: {} point(s)", o.len());
        orbits.push((px.to_vec(), o.len()));
    }
    text.push_str(
        "The black image is a fixed point while a generic image has 3 distinct translates. \
         A disentangled encoder would have to send every orbit onto the same set of points in \
         the equivariant subspace, which cannot hold for both a 1-point and a 3-point orbit. \
         The obstruction holds for any finite group acting this way.\n",
    );
    Ok(TopologyReport { orbits, pass, text })
}

/// Runs every check that fits `opts.max_order`.
pub fn run_theory_checks(opts: &TheoryOptions) -> Result<TheoryReport> {
    let mut checks = Vec::new();
    checks.extend(shift_character_checks(opts)?);
    checks.extend(disentangled_mismatch_checks(opts)?);
    checks.extend(tensor_character_checks(opts)?);
    checks.extend(induced_checks(opts)?);
    checks.extend(analytic_layer_checks(opts)?);
    checks.extend(fourier_checks(opts)?);
    let topo = topology_demo()?;
    checks.push(CheckResult {
        name: "topology demo orbit sizes 1, 1, 3".into(),
        pass: topo.pass,
        max_deviation: if topo.pass { 0.0 } else { 1.0 },
    });
    Ok(TheoryReport { checks })
}

/// Character checks for the operator family a model uses.
pub fn family_character_check(family: &crate::group::OperatorFamily, dim: usize, exec: Execution) -> Result<CheckResult> {
    let spec = family.group()?;
    let table = character_table(&spec, exec, |g| family.build(g, dim))?;
    let dev = regular_deviation(&spec, dim, &table)?;
    Ok(CheckResult::within(format!("{} character vs regular", family.name()), dev, TRACE_TOL))
}

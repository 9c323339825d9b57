//! Paired samples `(x1, x2 = g·x1, g)` and base-disjoint splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::imaging::{rotate, translate_periodic, ImageGrid, RotationMethod};
use crate::par::Execution;

/// Largest pixel deviation accepted when re-checking a rotated pair.
pub const ROTATION_PAIR_TOL: f64 = 1e-6;

pub const TEST_FRACTION: f64 = 0.5;
pub const VAL_FRACTION: f64 = 0.2;
pub const MIN_SPLIT_BASES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformFactor {
    Rotation,
    TranslateX,
    TranslateY,
}

/// Orders of the image transformations a dataset is built from. An order of
/// 1 disables that factor. Translation index `k` moves the image by `k`
/// pixels; rotation index `j` turns it by `360°·j/rot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub rot: usize,
    pub tx: usize,
    pub ty: usize,
    #[serde(default)]
    pub method: RotationMethod,
}

impl TransformSpec {
    pub fn new(rot: usize, tx: usize, ty: usize) -> Result<Self> {
        let t = Self {
            rot,
            tx,
            ty,
            method: RotationMethod::default(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn rotations(k: usize) -> Result<Self> {
        Self::new(k, 1, 1)
    }

    pub fn with_method(mut self, method: RotationMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rot == 0 || self.tx == 0 || self.ty == 0 {
            return Err(Error::Validation(format!(
                "transform orders must be at least 1, got ({}, {}, {})",
                self.rot, self.tx, self.ty
            )));
        }
        if self.method == RotationMethod::Exact90 && !matches!(self.rot, 1 | 2 | 4) {
            return Err(Error::Unsupported(format!(
                "exact rotation needs order 1, 2 or 4, got {}",
                self.rot
            )));
        }
        Ok(())
    }

    /// Active factors in application order (rotation, x, y). A spec with no
    /// active factor reports a single rotation factor of order 1.
    pub fn factors(&self) -> Vec<(TransformFactor, usize)> {
        let all = [
            (TransformFactor::Rotation, self.rot),
            (TransformFactor::TranslateX, self.tx),
            (TransformFactor::TranslateY, self.ty),
        ];
        let active: Vec<_> = all.into_iter().filter(|&(_, k)| k > 1).collect();
        if active.is_empty() {
            vec![(TransformFactor::Rotation, 1)]
        } else {
            active
        }
    }

    /// Group whose elements label the pairs: cyclic for one active factor,
    /// otherwise the direct product of the active factors.
    pub fn label_group(&self) -> Result<GroupSpec> {
        let orders: Vec<usize> = self.factors().iter().map(|&(_, k)| k).collect();
        if orders.len() == 1 {
            GroupSpec::cyclic(orders[0])
        } else {
            GroupSpec::direct(orders)
        }
    }

    /// Splits a label into `(rotation, x, y)` indices.
    pub fn decompose(&self, g: &GroupElement) -> Result<(usize, usize, usize)> {
        let factors = self.factors();
        let idx = g.indices();
        if idx.len() != factors.len() {
            return Err(Error::Validation(format!(
                "element {g} has {} indices, transforms have {} factors",
                idx.len(),
                factors.len()
            )));
        }
        let mut out = [0usize; 3];
        for (&(f, k), &i) in factors.iter().zip(idx) {
            if i >= k {
                return Err(Error::Validation(format!("index {i} out of range for order {k}")));
            }
            out[f as usize] = i;
        }
        Ok((out[0], out[1], out[2]))
    }

    /// `g·x`: rotate, then translate along x, then along y.
    pub fn apply(&self, x: &ImageGrid, g: &GroupElement) -> Result<ImageGrid> {
        let (j, k, kp) = self.decompose(g)?;
        let rotated = rotate(x, j, self.rot, self.method)?;
        let moved = translate_periodic(&rotated, k as i64, 0);
        Ok(translate_periodic(&moved, 0, kp as i64))
    }

    /// Largest pixel deviation accepted between `x2` and the recomputed `g·x1`.
    pub fn pair_tolerance(&self) -> f64 {
        if self.rot > 1 {
            ROTATION_PAIR_TOL
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub x1: ImageGrid,
    pub x2: ImageGrid,
    pub param: GroupElement,
    /// Index of the base image both samples derive from.
    pub base: usize,
}

impl PairSample {
    /// Checks `x2 = g·x1` within the transform's tolerance.
    pub fn verify(&self, transforms: &TransformSpec) -> Result<()> {
        let expect = transforms.apply(&self.x1, &self.param)?;
        let dev = expect.linf_distance(&self.x2);
        if dev > transforms.pair_tolerance() {
            return Err(Error::Inconsistent(format!(
                "pair from base {} with param {} deviates from its transform by {dev:e}",
                self.base, self.param
            )));
        }
        Ok(())
    }
}

/// Which images play the role of `x1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// `x1` is the untransformed base image: `n·|G|` pairs.
    BaseOnly,
    /// `x1` ranges over the whole orbit of the base image: `n·|G|²` pairs.
    #[default]
    Orbit,
}

/// Builds pairs for every base image and group element. With a cap, a
/// seeded uniform subsample of the pair descriptors is materialized, in
/// enumeration order. Pixels are rounded to `f32` so datasets survive a
/// round trip through disk unchanged.
pub fn build_pairs(
    base: &[ImageGrid],
    transforms: &TransformSpec,
    mode: PairMode,
    cap: Option<usize>,
    seed: u64,
    exec: Execution,
) -> Result<Vec<PairSample>> {
    transforms.validate()?;
    let group = transforms.label_group()?;
    let order = group.order();
    let per_base = match mode {
        PairMode::BaseOnly => order,
        PairMode::Orbit => order * order,
    };
    let total = base.len() * per_base;
    let picks: Vec<usize> = match cap {
        Some(c) if c < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = rand::seq::index::sample(&mut rng, total, c).into_vec();
            v.sort_unstable();
            v
        }
        _ => (0..total).collect(),
    };
    let built = exec.map(&picks, |&flat| -> Result<PairSample> {
        let b = flat / per_base;
        let rest = flat % per_base;
        let (start, g) = (rest / order, group.element_at(rest % order));
        let x1 = match mode {
            PairMode::BaseOnly => base[b].clone(),
            PairMode::Orbit => transforms.apply(&base[b], &group.element_at(start))?,
        }
        .quantized_f32();
        let x2 = transforms.apply(&x1, &g)?.quantized_f32();
        Ok(PairSample {
            x1,
            x2,
            param: g,
            base: b,
        })
    });
    built.into_iter().collect()
}

/// Sizes of the test, validation and training splits for `n` base images.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let n_test = (n as f64 * TEST_FRACTION).round() as usize;
    let rest = n - n_test;
    let n_val = (rest as f64 * VAL_FRACTION).round() as usize;
    (n_test, n_val, rest - n_val)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Splits {
    pub train: Vec<PairSample>,
    pub val: Vec<PairSample>,
    pub test: Vec<PairSample>,
}

/// Partitions pairs by base image: half of the bases go to test, and of the
/// rest a fifth to validation and the remainder to training.
pub fn split(samples: Vec<PairSample>, seed: u64) -> Result<Splits> {
    let mut bases: Vec<usize> = samples.iter().map(|s| s.base).collect();
    bases.sort_unstable();
    bases.dedup();
    if bases.len() < MIN_SPLIT_BASES {
        return Err(Error::Validation(format!(
            "{} base images cannot be split; need at least {MIN_SPLIT_BASES}",
            bases.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bases.shuffle(&mut rng);
    let (n_test, n_val, _) = split_sizes(bases.len());
    let max = *bases.iter().max().unwrap_or(&0);
    // 0 = train, 1 = val, 2 = test
    let mut role = vec![0u8; max + 1];
    for (i, &b) in bases.iter().enumerate() {
        role[b] = if i < n_test {
            2
        } else if i < n_test + n_val {
            1
        } else {
            0
        };
    }
    let mut out = Splits::default();
    for s in samples {
        match role[s.base] {
            2 => out.test.push(s),
            1 => out.val.push(s),
            _ => out.train.push(s),
        }
    }
    Ok(out)
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// `"shapes"` or `"mnist"`.
    pub source: String,
    pub seed: u64,
    pub base_count: usize,
    pub size: usize,
    pub transforms: TransformSpec,
    pub pair_mode: PairMode,
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub train: Vec<PairSample>,
    pub val: Vec<PairSample>,
    pub test: Vec<PairSample>,
    pub spec: GroupSpec,
    pub provenance: Provenance,
}

impl DatasetBundle {
    /// Pairs and splits `base`. The pair subsample and the split use
    /// independent streams derived from `provenance.seed`.
    pub fn assemble(base: &[ImageGrid], provenance: Provenance, exec: Execution) -> Result<Self> {
        let t = &provenance.transforms;
        let pairs = build_pairs(
            base,
            t,
            provenance.pair_mode,
            provenance.cap,
            provenance.seed.wrapping_add(1),
            exec,
        )?;
        let s = split(pairs, provenance.seed.wrapping_add(2))?;
        Ok(Self {
            train: s.train,
            val: s.val,
            test: s.test,
            spec: t.label_group()?,
            provenance,
        })
    }

    pub fn transforms(&self) -> &TransformSpec {
        &self.provenance.transforms
    }

    pub fn pixel_dim(&self) -> usize {
        self.train
            .iter()
            .chain(&self.val)
            .chain(&self.test)
            .next()
            .map_or(0, |s| s.x1.len())
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Re-checks every pair against the declared transforms.
    pub fn verify(&self) -> Result<()> {
        let want = self.transforms().label_group()?;
        if want != self.spec {
            return Err(Error::Inconsistent(
                "dataset group does not match its transforms".into(),
            ));
        }
        for s in self.train.iter().chain(&self.val).chain(&self.test) {
            s.verify(self.transforms())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::gen_shapes;

    fn shapes(n: usize) -> Vec<ImageGrid> {
        gen_shapes(n, 11, 28, Execution::Parallel).unwrap()
    }

    #[test]
    fn counts_per_mode() {
        let t = TransformSpec::rotations(10).unwrap();
        let one = shapes(1);
        assert_eq!(build_pairs(&one, &t, PairMode::BaseOnly, None, 0, Execution::Parallel).unwrap().len(), 10);
        assert_eq!(build_pairs(&one, &t, PairMode::Orbit, None, 0, Execution::Parallel).unwrap().len(), 100);
        let t = TransformSpec::new(4, 5, 5).unwrap();
        assert_eq!(t.label_group().unwrap().order(), 100);
        let p = build_pairs(&shapes(3), &t, PairMode::BaseOnly, Some(50), 0, Execution::Parallel).unwrap();
        assert_eq!(p.len(), 50);
    }

    #[test]
    fn identity_pairs_are_exact() {
        let t = TransformSpec::rotations(10).unwrap();
        for p in build_pairs(&shapes(4), &t, PairMode::Orbit, None, 0, Execution::Parallel).unwrap() {
            if p.param.is_identity() {
                assert_eq!(p.x1, p.x2);
            }
        }
    }

    #[test]
    fn translation_pairs_bit_exact() {
        let t = TransformSpec::new(1, 5, 5).unwrap();
        let pairs = build_pairs(&shapes(3), &t, PairMode::Orbit, Some(300), 5, Execution::Parallel).unwrap();
        for p in &pairs {
            let (_, k, kp) = t.decompose(&p.param).unwrap();
            assert_eq!(translate_periodic(&p.x1, k as i64, kp as i64), p.x2);
            p.verify(&t).unwrap();
        }
    }

    #[test]
    fn rotation_pairs_verify() {
        let t = TransformSpec::new(4, 5, 1).unwrap();
        for p in build_pairs(&shapes(2), &t, PairMode::Orbit, Some(60), 1, Execution::Parallel).unwrap() {
            p.verify(&t).unwrap();
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let t = TransformSpec::rotations(10).unwrap();
        let b = shapes(5);
        let a = build_pairs(&b, &t, PairMode::Orbit, Some(77), 9, Execution::Parallel).unwrap();
        let s = build_pairs(&b, &t, PairMode::Orbit, Some(77), 9, Execution::Sequential).unwrap();
        assert_eq!(a, s);
    }

    #[test]
    fn decompose_follows_active_factors() {
        let t = TransformSpec::new(1, 5, 3).unwrap();
        assert_eq!(t.decompose(&GroupElement::new(vec![2, 1])).unwrap(), (0, 2, 1));
        assert!(t.decompose(&GroupElement::new(vec![2])).is_err());
        let none = TransformSpec::new(1, 1, 1).unwrap();
        assert_eq!(none.label_group().unwrap().order(), 1);
    }

    #[test]
    fn split_ratios_and_disjointness() {
        assert_eq!(split_sizes(100), (50, 10, 40));
        assert_eq!(split_sizes(200), (100, 20, 80));
        let t = TransformSpec::new(1, 2, 1).unwrap();
        let pairs = build_pairs(&shapes(100), &t, PairMode::BaseOnly, None, 0, Execution::Parallel).unwrap();
        let s = split(pairs.clone(), 4).unwrap();
        let ids = |v: &[PairSample]| {
            let mut b: Vec<usize> = v.iter().map(|p| p.base).collect();
            b.dedup();
            b
        };
        let (tr, va, te) = (ids(&s.train), ids(&s.val), ids(&s.test));
        assert_eq!((te.len(), va.len(), tr.len()), (50, 10, 40));
        let mut all: Vec<usize> = tr.iter().chain(&va).chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert_eq!(s.train.len() + s.val.len() + s.test.len(), pairs.len());
        assert_eq!(split(pairs, 4).unwrap(), s);
    }

    #[test]
    fn split_needs_five_bases() {
        let t = TransformSpec::rotations(2).unwrap();
        let pairs = build_pairs(&shapes(4), &t, PairMode::BaseOnly, None, 0, Execution::Parallel).unwrap();
        assert!(matches!(split(pairs, 0), Err(Error::Validation(_))));
    }
}

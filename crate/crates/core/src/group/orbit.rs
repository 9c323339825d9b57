use crate::group::spec::{GroupElement, GroupSpec};
use crate::imaging::ImageGrid;

/// Distinct images among `{g·x : g ∈ G}`; two images count as the same
/// point when their L∞ distance is at most `dedup_tol`.
pub fn orbit<F>(x: &ImageGrid, spec: &GroupSpec, action: F, dedup_tol: f64) -> Vec<ImageGrid>
where
    F: Fn(&ImageGrid, &GroupElement) -> ImageGrid,
{
    let mut points: Vec<ImageGrid> = Vec::new();
    for g in spec.elements() {
        let y = action(x, &g);
        if points.iter().all(|p| p.linf_distance(&y) > dedup_tol) {
            points.push(y);
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::translate_periodic;

    fn strip(px: &[f64]) -> ImageGrid {
        ImageGrid::new(1, px.len(), px.to_vec()).unwrap()
    }

    fn shift(x: &ImageGrid, g: &GroupElement) -> ImageGrid {
        translate_periodic(x, g.indices()[0] as i64, 0)
    }

    #[test]
    fn three_pixel_orbits() {
        let spec = GroupSpec::cyclic(3).unwrap();
        assert_eq!(orbit(&strip(&[0.0, 0.0, 0.0]), &spec, shift, 0.0).len(), 1);
        assert_eq!(orbit(&strip(&[1.0, 0.0, 0.0]), &spec, shift, 0.0).len(), 3);
        assert_eq!(orbit(&strip(&[1.0, 1.0, 1.0]), &spec, shift, 0.0).len(), 1);
    }

    #[test]
    fn orbit_size_divides_group_order() {
        let spec = GroupSpec::cyclic(6).unwrap();
        let x = strip(&[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let n = orbit(&x, &spec, shift, 0.0).len();
        assert_eq!(n, 3);
        assert_eq!(6 % n, 0);
    }
}

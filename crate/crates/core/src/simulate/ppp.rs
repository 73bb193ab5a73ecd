//! Poisson point process on a rectangle and its records.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
}

/// Axis-parallel rectangle `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width >= 0.0 && height >= 0.0 && width.is_finite() && height.is_finite()) {
            return Err(domain(
                "Rect",
                format!("sides must be finite and nonnegative, got {width}×{height}"),
            ));
        }
        Ok(Self { width, height })
    }

    /// Rectangle of area `t` with `width / height = aspect`.
    pub fn with_area(t: f64, aspect: f64) -> Result<Self> {
        if !(t >= 0.0) || !(aspect > 0.0) {
            return Err(domain(
                "Rect::with_area",
                format!("need t ≥ 0 and aspect > 0, got t={t}, aspect={aspect}"),
            ));
        }
        Self::new((t * aspect).sqrt(), (t / aspect).sqrt())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// Records in left-to-right order with their box areas.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordSequence {
    pub records: Vec<Atom>,
    pub box_areas: Vec<f64>,
}

impl RecordSequence {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Draws a Poisson(`area`) number of uniform atoms in `rect`, sorted by `x`.
pub fn sample_ppp<R: Rng + ?Sized>(rect: Rect, rng: &mut R) -> Vec<Atom> {
    let n = poisson_count(rect.area(), rng);
    let mut atoms: Vec<Atom> = (0..n)
        .map(|_| Atom {
            x: rng.random::<f64>() * rect.width,
            y: rng.random::<f64>() * rect.height,
        })
        .collect();
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    atoms
}

/// Atoms of a rectangle of area `t` and shape `aspect = width/height`.
pub fn sample_ppp_rect<R: Rng + ?Sized>(t: f64, aspect: f64, rng: &mut R) -> Result<Vec<Atom>> {
    Ok(sample_ppp(Rect::with_area(t, aspect)?, rng))
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(rng) as usize
}

/// Upper records of `atoms` (sorted by `x`): atoms higher than every atom to
/// their left. Box areas are taken to the north-east corner of `rect`.
pub fn extract_records(atoms: &[Atom], rect: Rect) -> RecordSequence {
    let mut out = RecordSequence::default();
    let mut top = f64::NEG_INFINITY;
    for a in atoms {
        if a.y > top {
            top = a.y;
            out.records.push(*a);
            out.box_areas.push((rect.width - a.x) * (rect.height - a.y));
        }
    }
    out
}

/// Upper and lower records with respect to a horizontal cut at height `h`.
///
/// An upper record is below the cut and higher than every earlier atom below
/// it; a lower record is above the cut and lower than every earlier atom above
/// it. Box areas run to the right edge and to the cut.
pub fn extract_records_cut(atoms: &[Atom], rect: Rect, h: f64) -> (RecordSequence, RecordSequence) {
    let mut upper = RecordSequence::default();
    let mut lower = RecordSequence::default();
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    for a in atoms {
        if a.y < h {
            if a.y > below {
                below = a.y;
                upper.records.push(*a);
                upper.box_areas.push((rect.width - a.x) * (h - a.y));
            }
        } else if a.y < above {
            above = a.y;
            lower.records.push(*a);
            lower.box_areas.push((rect.width - a.x) * (a.y - h));
        }
    }
    (upper, lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::runner::trial_rng;

    #[test]
    fn empty_rectangle_has_no_atoms() {
        let mut rng = trial_rng(0, 0);
        for _ in 0..100 {
            assert!(sample_ppp_rect(0.0, 1.0, &mut rng).unwrap().is_empty());
        }
    }

    #[test]
    fn single_atom_is_a_record() {
        let rect = Rect::new(1.0, 1.0).unwrap();
        let atoms = [Atom { x: 0.3, y: 0.6 }];
        let r = extract_records(&atoms, rect);
        assert_eq!(r.records, atoms.to_vec());
        assert!((r.box_areas[0] - 0.7 * 0.4).abs() < 1e-15);
        assert!(extract_records(&[], rect).is_empty());
    }

    #[test]
    fn records_are_monotone() {
        let mut rng = trial_rng(5, 2);
        let rect = Rect::new(20.0, 1.0).unwrap();
        for _ in 0..50 {
            let atoms = sample_ppp(rect, &mut rng);
            let r = extract_records(&atoms, rect);
            assert!(r
                .records
                .windows(2)
                .all(|w| w[0].x < w[1].x && w[0].y < w[1].y));
            assert!(r.box_areas.windows(2).all(|w| w[0] > w[1]));
            let (up, low) = extract_records_cut(&atoms, rect, 0.5);
            assert!(up.records.iter().all(|a| a.y < 0.5));
            assert!(low.records.windows(2).all(|w| w[0].y > w[1].y));
            assert!(low.box_areas.windows(2).all(|w| w[0] > w[1]));
        }
    }
}

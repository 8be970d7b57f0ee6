use crate::error::{check_dim, invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// `(-h, h)^d`.
    Hypercube { halfwidth: f64 },
    /// `(-h, h)^d` with the closed ℓ¹-ball of radius `c` removed.
    AnnularHypercube { halfwidth: f64, l1_radius: f64 },
    Ball { radius: f64 },
    /// `{ r0 < |x| < r1 }`.
    Annulus { r0: f64, r1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainMetadata {
    pub diam: f64,
    pub adiam: Option<f64>,
    pub delta_defective: Option<f64>,
    pub rad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    dim: usize,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

impl Domain {
    pub fn new(kind: DomainKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be at least 1");
        }
        match kind {
            DomainKind::Hypercube { halfwidth } => positive("halfwidth", halfwidth)?,
            DomainKind::AnnularHypercube { halfwidth, l1_radius } => {
                positive("halfwidth", halfwidth)?;
                positive("l1_radius", l1_radius)?;
                if l1_radius >= halfwidth {
                    return invalid("l1_radius must be smaller than halfwidth");
                }
            }
            DomainKind::Ball { radius } => positive("radius", radius)?,
            DomainKind::Annulus { r0, r1 } => {
                positive("r0", r0)?;
                positive("r1", r1)?;
                if r0 >= r1 {
                    return invalid("annulus needs r0 < r1");
                }
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn hypercube(halfwidth: f64, dim: usize) -> Result<Self> {
        Self::new(DomainKind::Hypercube { halfwidth }, dim)
    }

    pub fn annular_hypercube(halfwidth: f64, l1_radius: f64, dim: usize) -> Result<Self> {
        Self::new(DomainKind::AnnularHypercube { halfwidth, l1_radius }, dim)
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        Self::new(DomainKind::Ball { radius }, dim)
    }

    pub fn annulus(r0: f64, r1: f64, dim: usize) -> Result<Self> {
        Self::new(DomainKind::Annulus { r0, r1 }, dim)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distance to `∂D` for `x ∈ D`, `0` outside.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.distance_unchecked(x))
    }

    /// As [`Domain::distance`] without the dimension check.
    #[inline]
    pub fn distance_unchecked(&self, x: &[f64]) -> f64 {
        match self.kind {
            DomainKind::Hypercube { halfwidth } => (halfwidth - linf(x)).max(0.0),
            DomainKind::AnnularHypercube { halfwidth, l1_radius } => {
                let face = halfwidth - linf(x);
                if face <= 0.0 {
                    return 0.0;
                }
                face.min(l1_ball_distance(x, l1_radius))
            }
            DomainKind::Ball { radius } => (radius - norm2(x)).max(0.0),
            DomainKind::Annulus { r0, r1 } => {
                let n = norm2(x);
                (n - r0).min(r1 - n).max(0.0)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x))
    }

    #[inline]
    pub fn contains_unchecked(&self, x: &[f64]) -> bool {
        self.distance_unchecked(x) > 0.0
    }

    pub fn diam(&self) -> f64 {
        let d = self.dim as f64;
        match self.kind {
            DomainKind::Hypercube { halfwidth }
            | DomainKind::AnnularHypercube { halfwidth, .. } => 2.0 * halfwidth * d.sqrt(),
            DomainKind::Ball { radius } => 2.0 * radius,
            // A 1-d annulus is two intervals; its diameter is still 2 r1.
            DomainKind::Annulus { r1, .. } => 2.0 * r1,
        }
    }

    /// Annular diameter: `diam` for convex kinds, the exterior-ball bound
    /// `diam (1 + diam / r0)` for the annulus, absent for the annular hypercube.
    pub fn adiam(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Hypercube { .. } | DomainKind::Ball { .. } => Some(self.diam()),
            DomainKind::Annulus { r0, .. } => {
                let diam = self.diam();
                Some(diam * (1.0 + diam / r0))
            }
            DomainKind::AnnularHypercube { .. } => None,
        }
    }

    /// Smallest δ for which the defective-convexity condition holds, if below 1.
    pub fn delta_defective(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Hypercube { .. } | DomainKind::Ball { .. } => Some(0.0),
            DomainKind::Annulus { r0, r1 } => {
                let delta = (self.dim as f64 - 1.0) * (r1 / r0 - 1.0);
                (delta < 1.0).then_some(delta)
            }
            DomainKind::AnnularHypercube { .. } => None,
        }
    }

    /// `sup_D r`.
    pub fn rad(&self) -> f64 {
        match self.kind {
            DomainKind::Hypercube { halfwidth } => halfwidth,
            DomainKind::Ball { radius } => radius,
            DomainKind::Annulus { r0, r1 } => 0.5 * (r1 - r0),
            DomainKind::AnnularHypercube { halfwidth, l1_radius } => {
                // r is maximal on the diagonal t(1,..,1), where the face distance
                // h - t meets the distance (d t - c)/√d to the ℓ¹-ball.
                let d = self.dim as f64;
                let sd = d.sqrt();
                let t = (halfwidth * sd + l1_radius) / (d + sd);
                halfwidth - t
            }
        }
    }

    pub fn metadata(&self) -> DomainMetadata {
        DomainMetadata {
            diam: self.diam(),
            adiam: self.adiam(),
            delta_defective: self.delta_defective(),
            rad: self.rad(),
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self.kind, DomainKind::Hypercube { .. } | DomainKind::Ball { .. })
    }

    /// Half side of the smallest centred cube containing `D`.
    pub fn bounding_halfwidth(&self) -> f64 {
        match self.kind {
            DomainKind::Hypercube { halfwidth }
            | DomainKind::AnnularHypercube { halfwidth, .. } => halfwidth,
            DomainKind::Ball { radius } => radius,
            DomainKind::Annulus { r1, .. } => r1,
        }
    }

    /// Lebesgue measure of `D`.
    pub fn volume(&self) -> f64 {
        let d = self.dim;
        match self.kind {
            DomainKind::Hypercube { halfwidth } => (2.0 * halfwidth).powi(d as i32),
            DomainKind::AnnularHypercube { halfwidth, l1_radius } => {
                let fact: f64 = (1..=d).map(|k| k as f64).product();
                (2.0 * halfwidth).powi(d as i32) - (2.0 * l1_radius).powi(d as i32) / fact
            }
            DomainKind::Ball { radius } => unit_ball_volume(d) * radius.powi(d as i32),
            DomainKind::Annulus { r0, r1 } => {
                unit_ball_volume(d) * (r1.powi(d as i32) - r0.powi(d as i32))
            }
        }
    }

    /// Nearest boundary point, for kinds where it has a closed form.
    /// At the centre of a ball the (non-unique) choice `R e₁` is returned.
    pub fn project_to_boundary(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let n = norm2(x);
        let target = match self.kind {
            DomainKind::Ball { radius } => radius,
            DomainKind::Annulus { r0, r1 } => {
                if n - r0 <= r1 - n {
                    r0
                } else {
                    r1
                }
            }
            _ => {
                return Err(Error::Unsupported(
                    "closed-form boundary projection exists only for Ball and Annulus".into(),
                ))
            }
        };
        if n == 0.0 {
            let mut e = vec![0.0; self.dim];
            e[0] = target;
            return Ok(e);
        }
        Ok(x.iter().map(|v| v * target / n).collect())
    }
}

#[inline]
fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[inline]
pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn unit_ball_volume(d: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = 2π/d · V_{d-2}
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Euclidean distance from `x` to the ℓ¹-ball `{|y|₁ ≤ c}` (0 inside).
///
/// The projection onto the cross-polytope soft-thresholds `|x|` at the level
/// θ of the sorted simplex projection, so the squared distance is
/// `Σ min(|x_i|, θ)²`.
pub fn l1_ball_distance(x: &[f64], c: f64) -> f64 {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 <= c {
        return 0.0;
    }
    let mut stack = [0.0f64; 64];
    let mut heap;
    let u: &mut [f64] = if x.len() <= stack.len() {
        &mut stack[..x.len()]
    } else {
        heap = vec![0.0; x.len()];
        &mut heap
    };
    for (ui, xi) in u.iter_mut().zip(x) {
        *ui = xi.abs();
    }
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - c) / (k + 1) as f64;
        if uk > t {
            theta = t;
        } else {
            break;
        }
    }
    x.iter().map(|v| v.abs().min(theta).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let cube = Domain::hypercube(1.0, 2).unwrap();
        assert_eq!(cube.distance(&[0.0, 0.0]).unwrap(), 1.0);
        let ball = Domain::ball(1.0, 3).unwrap();
        assert_eq!(ball.distance(&[0.5, 0.0, 0.0]).unwrap(), 0.5);
        let ac = Domain::annular_hypercube(1.0, 0.5, 2).unwrap();
        assert!((ac.distance(&[0.7, 0.0]).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let cube = Domain::hypercube(1.0, 2).unwrap();
        assert!(matches!(
            cube.distance(&[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn adiam_examples() {
        assert_eq!(Domain::ball(1.0, 3).unwrap().adiam(), Some(2.0));
        let c = Domain::hypercube(1.0, 2).unwrap().adiam().unwrap();
        assert!((c - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Domain::annulus(1.0, 2.0, 3).unwrap().adiam(), Some(20.0));
        assert_eq!(Domain::annular_hypercube(1.0, 0.5, 3).unwrap().adiam(), None);
    }

    #[test]
    fn invalid_shapes() {
        assert!(Domain::annulus(2.0, 1.0, 3).is_err());
        assert!(Domain::annular_hypercube(1.0, 1.0, 3).is_err());
        assert!(Domain::hypercube(0.0, 3).is_err());
        assert!(Domain::ball(1.0, 0).is_err());
    }

    #[test]
    fn volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        let ac = Domain::annular_hypercube(1.0, 0.5, 2).unwrap();
        assert!((ac.volume() - 3.5).abs() < 1e-14);
    }

    #[test]
    fn annular_hypercube_rad_is_attained_on_diagonal() {
        let dom = Domain::annular_hypercube(1.0, 0.5, 10).unwrap();
        let rad = dom.rad();
        let t = 1.0 - rad;
        let x = vec![t; 10];
        assert!((dom.distance(&x).unwrap() - rad).abs() < 1e-12);
    }
}

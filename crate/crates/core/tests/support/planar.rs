//! Planar grasp instances and bounds on their strength that do not use the
//! LP: a sampled primal lower bound and a sampled dual upper bound.
//!
//! Contacts are finger pads on a circle in the `z = 0` plane with inward
//! normals. In the plane each pad's feasible force set is the triangle
//! `{0, cap (n + mu t), cap (n - mu t)}`. Wrenches are `(fx, fy, mz / R)`.

#![allow(dead_code)]

use rand::Rng;
use tandemgrip_core::grasp::{Contact, ContactKind, ContactSet};
use tandemgrip_core::nalgebra::{Matrix3, Vector2, Vector3};

type V2 = Vector2<f64>;
type W = Vector3<f64>;

#[derive(Debug, Clone)]
pub struct PlanarPads {
    pub radius: f64,
    /// Contact angles on the circle, rad.
    pub angles: Vec<f64>,
    pub mu: Vec<f64>,
    pub cap: Vec<f64>,
    /// In-plane pull direction, rad.
    pub pull_angle: f64,
    /// Pull application point.
    pub point: V2,
}

impl PlanarPads {
    pub fn random_three(rng: &mut impl Rng) -> Self {
        let radius = 10.0 + 40.0 * rng.random::<f64>();
        let r = radius * rng.random::<f64>().sqrt() * 0.8;
        let phi = rng.random::<f64>() * std::f64::consts::TAU;
        Self {
            radius,
            angles: (0..3)
                .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
                .collect(),
            mu: (0..3).map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect(),
            cap: (0..3).map(|_| 1.0 + 19.0 * rng.random::<f64>()).collect(),
            pull_angle: rng.random::<f64>() * std::f64::consts::TAU,
            point: V2::new(r * phi.cos(), r * phi.sin()),
        }
    }

    fn position(&self, i: usize) -> V2 {
        V2::new(self.angles[i].cos(), self.angles[i].sin()) * self.radius
    }

    fn normal(&self, i: usize) -> V2 {
        -V2::new(self.angles[i].cos(), self.angles[i].sin())
    }

    fn tangent(&self, i: usize) -> V2 {
        let n = self.normal(i);
        V2::new(-n.y, n.x)
    }

    pub fn direction(&self) -> V2 {
        V2::new(self.pull_angle.cos(), self.pull_angle.sin())
    }

    pub fn contact_set(&self, cone_sides: usize) -> ContactSet {
        let contacts = (0..self.angles.len())
            .map(|i| {
                let p = self.position(i);
                let n = self.normal(i);
                Contact {
                    position: Vector3::new(p.x, p.y, 0.0),
                    normal: Vector3::new(n.x, n.y, 0.0),
                    kind: ContactKind::FingerPad,
                    normal_capacity: self.cap[i],
                    tension_capacity: 0.0,
                    mu: self.mu[i],
                    cone_sides,
                }
            })
            .collect();
        ContactSet {
            fruit_radius: self.radius,
            contacts,
        }
    }

    pub fn load_3d(&self) -> (Vector3<f64>, Vector3<f64>) {
        let u = self.direction();
        (
            Vector3::new(u.x, u.y, 0.0),
            Vector3::new(self.point.x, self.point.y, 0.0),
        )
    }

    fn wrench(&self, at: V2, f: V2) -> W {
        W::new(f.x, f.y, (at.x * f.y - at.y * f.x) / self.radius)
    }

    fn load_wrench(&self) -> W {
        self.wrench(self.point, self.direction())
    }

    /// The two nonzero corners of contact `i`'s force triangle.
    fn corners(&self, i: usize) -> [V2; 2] {
        let (n, t) = (self.normal(i), self.tangent(i));
        [
            (n + t * self.mu[i]) * self.cap[i],
            (n - t * self.mu[i]) * self.cap[i],
        ]
    }

    fn feasible(&self, i: usize, f: V2) -> bool {
        let fn_ = f.dot(&self.normal(i));
        let ft = f.dot(&self.tangent(i)).abs();
        let tol = 1e-9 * (1.0 + self.cap[i]);
        fn_ >= -tol && fn_ <= self.cap[i] + tol && ft <= self.mu[i] * fn_ + tol
    }

    /// Best feasible pull found by fixing one contact at a corner of its
    /// triangle, walking a second along its triangle boundary and solving
    /// for the third contact and the pull.
    pub fn lower_bound(&self, samples_per_edge: usize) -> f64 {
        assert_eq!(self.angles.len(), 3);
        let load = self.load_wrench();
        let mut best: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                let c = 3 - a - b;
                let pc = self.position(c);
                // Unknowns (fcx, fcy, alpha).
                let m = Matrix3::new(
                    1.0,
                    0.0,
                    load.x,
                    0.0,
                    1.0,
                    load.y,
                    -pc.y / self.radius,
                    pc.x / self.radius,
                    load.z,
                );
                let Some(inv) = m.try_inverse() else { continue };
                let [a1, a2] = self.corners(a);
                let [b1, b2] = self.corners(b);
                let zero = V2::zeros();
                let edges = [(zero, b1), (b1, b2), (b2, zero)];
                for fa in [zero, a1, a2] {
                    let wa = self.wrench(self.position(a), fa);
                    for (s, e) in edges {
                        for k in 0..=samples_per_edge {
                            let t = k as f64 / samples_per_edge as f64;
                            let fb = s + (e - s) * t;
                            let rhs = -(wa + self.wrench(self.position(b), fb));
                            let x = inv * rhs;
                            let alpha = x.z;
                            if alpha > best && self.feasible(c, V2::new(x.x, x.y)) {
                                best = alpha;
                            }
                        }
                    }
                }
            }
        }
        best
    }

    /// Dual bound: for any weight `w` with `w . load = 1`, the pull is at
    /// most `sum_i max(0, -w . W(corner))` over each contact's corners.
    fn dual_value(&self, w: &W) -> f64 {
        (0..self.angles.len())
            .map(|i| {
                self.corners(i)
                    .iter()
                    .map(|f| -w.dot(&self.wrench(self.position(i), *f)))
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    /// Smallest dual bound over a Fibonacci sphere of weight directions,
    /// then over the points where the bound's linear pieces meet.
    pub fn upper_bound(&self, directions: usize) -> f64 {
        let load = self.load_wrench();
        let mut best = f64::INFINITY;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        for k in 0..directions {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / directions as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * k as f64;
            let d = W::new(r * th.cos(), r * th.sin(), z);
            let s = d.dot(&load);
            if s > 1e-9 {
                best = best.min(self.dual_value(&(d / s)));
            }
        }
        // Breakpoint planes of each piecewise-linear term.
        let mut planes = Vec::new();
        for i in 0..self.angles.len() {
            let [c1, c2] = self.corners(i);
            let (w1, w2) = (
                self.wrench(self.position(i), c1),
                self.wrench(self.position(i), c2),
            );
            planes.extend([w1, w2, w1 - w2]);
        }
        for p in 0..planes.len() {
            for q in p + 1..planes.len() {
                let m = Matrix3::from_rows(&[
                    load.transpose(),
                    planes[p].transpose(),
                    planes[q].transpose(),
                ]);
                if let Some(inv) = m.try_inverse() {
                    let w = inv * W::new(1.0, 0.0, 0.0);
                    if w.iter().all(|v| v.is_finite()) {
                        best = best.min(self.dual_value(&w));
                    }
                }
            }
        }
        best
    }
}

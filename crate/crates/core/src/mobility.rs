//! Random-waypoint mobility at a fixed altitude inside a circular cell.
//!
//! The base station sits at the cell centre. Every UAV travels in a straight
//! line towards its waypoint at a constant speed; on arrival it draws a new
//! waypoint and a new speed and spends the leftover distance of the step on
//! the new leg. There are no pauses.
//!
//! Waypoints are uniform over the annulus `min_horizontal <= D <= radius`.
//! Because the annulus is not convex, a leg is only accepted when the whole
//! segment keeps at least `min_horizontal` from the base station, so the
//! horizontal-distance bounds hold at every instant, not only at waypoints.

use rand::Rng;

use crate::error::{Error, Result};

/// Rejection-sampling cap for waypoint draws.
pub const MAX_WAYPOINT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Cell shape shared by every UAV in a scenario. Lengths are normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub bs: Point,
    pub radius: f64,
    pub min_horizontal: f64,
    pub altitude: f64,
}

impl Default for CellGeometry {
    fn default() -> Self {
        CellGeometry {
            bs: Point::new(0.0, 0.0),
            radius: 1.0,
            min_horizontal: 0.1,
            altitude: 0.5,
        }
    }
}

impl CellGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.bs.x.is_finite() && self.bs.y.is_finite()) {
            return Err(Error::config("bs_x/bs_y", "must be finite"));
        }
        if !(self.min_horizontal >= 0.0) {
            return Err(Error::config("min_horizontal", "must be >= 0"));
        }
        if !(self.radius > self.min_horizontal) || !self.radius.is_finite() {
            return Err(Error::config("cell_radius", "must exceed min_horizontal"));
        }
        if !(self.altitude > 0.0) || !self.altitude.is_finite() {
            return Err(Error::config("altitude", "must be > 0"));
        }
        Ok(())
    }

    fn admits(&self, p: Point) -> bool {
        let r = p.distance(self.bs);
        r >= self.min_horizontal && r <= self.radius
    }

    /// Smallest distance from the base station to the segment `a`-`b`.
    fn clearance(&self, a: Point, b: Point) -> f64 {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return a.distance(self.bs);
        }
        let t = (((self.bs.x - a.x) * dx + (self.bs.y - a.y) * dy) / len2).clamp(0.0, 1.0);
        Point::new(a.x + t * dx, a.y + t * dy).distance(self.bs)
    }
}

/// Closed speed interval in normalized units per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

impl Default for SpeedRange {
    fn default() -> Self {
        SpeedRange {
            min: 0.005,
            max: 0.02,
        }
    }
}

impl SpeedRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0) || !(self.max >= self.min) || !self.max.is_finite() {
            return Err(Error::config(
                "speed_min/speed_max",
                "need 0 < speed_min <= speed_max",
            ));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.max > self.min {
            rng.random_range(self.min..=self.max)
        } else {
            self.min
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavKinematics {
    pub uav_id: usize,
    pub position: Point,
    pub waypoint: Point,
    pub speed: f64,
}

/// Horizontal distance, slant range and elevation angle (degrees) to the BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub horizontal: f64,
    pub slant: f64,
    pub elevation_deg: f64,
}

/// Draws a point uniformly from the cell annulus.
pub fn sample_waypoint<R: Rng + ?Sized>(rng: &mut R, cell: &CellGeometry) -> Result<Point> {
    sample_with(rng, cell, |p| cell.admits(p))
}

fn sample_with<R, F>(rng: &mut R, cell: &CellGeometry, accept: F) -> Result<Point>
where
    R: Rng + ?Sized,
    F: Fn(Point) -> bool,
{
    for _ in 0..MAX_WAYPOINT_ATTEMPTS {
        let p = Point::new(
            cell.bs.x + rng.random_range(-cell.radius..=cell.radius),
            cell.bs.y + rng.random_range(-cell.radius..=cell.radius),
        );
        if accept(p) {
            return Ok(p);
        }
    }
    Err(Error::config(
        "cell_radius/min_horizontal",
        format!("no admissible waypoint after {MAX_WAYPOINT_ATTEMPTS} draws"),
    ))
}

/// Next waypoint reachable from `from` without entering the exclusion disk.
fn next_waypoint<R: Rng + ?Sized>(rng: &mut R, cell: &CellGeometry, from: Point) -> Result<Point> {
    sample_with(rng, cell, |p| {
        cell.admits(p) && cell.clearance(from, p) >= cell.min_horizontal
    })
}

impl UavKinematics {
    /// Places a UAV at a random admissible position with a first leg and speed.
    pub fn spawn<R: Rng + ?Sized>(
        uav_id: usize,
        rng: &mut R,
        cell: &CellGeometry,
        speeds: &SpeedRange,
    ) -> Result<Self> {
        let position = sample_waypoint(rng, cell)?;
        let waypoint = next_waypoint(rng, cell, position)?;
        Ok(UavKinematics {
            uav_id,
            position,
            waypoint,
            speed: speeds.sample(rng),
        })
    }

    pub fn advance<R: Rng + ?Sized>(
        &self,
        dt: f64,
        rng: &mut R,
        cell: &CellGeometry,
        speeds: &SpeedRange,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Contract(format!("advance needs dt > 0, got {dt}")));
        }
        let mut next = *self;
        let mut budget = self.speed * dt;
        loop {
            let leg = next.position.distance(next.waypoint);
            if leg > budget {
                let f = budget / leg;
                next.position = Point::new(
                    next.position.x + f * (next.waypoint.x - next.position.x),
                    next.position.y + f * (next.waypoint.y - next.position.y),
                );
                return Ok(next);
            }
            budget -= leg;
            next.position = next.waypoint;
            next.waypoint = next_waypoint(rng, cell, next.position)?;
            next.speed = speeds.sample(rng);
            if budget <= 0.0 {
                return Ok(next);
            }
        }
    }

    pub fn geometry(&self, cell: &CellGeometry) -> LinkGeometry {
        geometry(self.position, cell)
    }
}

pub fn geometry(position: Point, cell: &CellGeometry) -> LinkGeometry {
    let horizontal = position.distance(cell.bs);
    let slant = horizontal.hypot(cell.altitude);
    let elevation_deg = (cell.altitude / slant).min(1.0).asin().to_degrees();
    LinkGeometry {
        horizontal,
        slant,
        elevation_deg,
    }
}

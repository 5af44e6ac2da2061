use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{first_appearance_labels, DatasetRecord};
use crate::error::{Error, Result};
use crate::likelihood::Observation;

/// Region id shared by every hallway.
pub const HALLWAY_REGION: usize = 0;

/// Hallway landmarks per unit of hallway length.
const HALLWAY_LANDMARK_DENSITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    pub fn center(&self) -> [f64; 2] {
        [
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        ]
    }

    fn overlaps(&self, other: &Rect) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Room {
    /// Region id, `1..=num_rooms`.
    pub id: usize,
    pub rect: Rect,
}

/// A corridor from `start` (on the edge of room `from`) to `end` (on the edge
/// of room `to`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hallway {
    pub from: usize,
    pub to: usize,
    pub rect: Rect,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub index: usize,
    pub position: [f64; 2],
    /// Room id, or [`HALLWAY_REGION`].
    pub region: usize,
}

/// Rooms connected in a chain by hallways, with landmarks. Serialized as
/// `{rooms, hallways, landmarks, view_radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridworldEnv {
    pub rooms: Vec<Room>,
    /// `hallways[i]` joins room `i + 1` to room `i + 2`.
    pub hallways: Vec<Hallway>,
    pub landmarks: Vec<Landmark>,
    pub view_radius: f64,
}

impl GridworldEnv {
    /// Region of a point: the room containing it, else [`HALLWAY_REGION`] if
    /// a hallway does, else `None`. Room boundaries belong to the room.
    pub fn region_of(&self, p: [f64; 2]) -> Option<usize> {
        if let Some(room) = self.rooms.iter().find(|r| r.rect.contains(p)) {
            return Some(room.id);
        }
        self.hallways
            .iter()
            .any(|h| h.rect.contains(p))
            .then_some(HALLWAY_REGION)
    }

    /// Visibility vector at `p`: landmarks within the view radius and in the
    /// same region.
    pub fn observe(&self, p: [f64; 2]) -> Vec<u8> {
        let region = self.region_of(p);
        let r2 = self.view_radius * self.view_radius;
        self.landmarks
            .iter()
            .map(|l| {
                let dx = l.position[0] - p[0];
                let dy = l.position[1] - p[1];
                u8::from(Some(l.region) == region && dx * dx + dy * dy <= r2)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rooms.len() < 2 {
            return Err(Error::InfeasibleGeometry("need at least two rooms".into()));
        }
        if !(self.view_radius > 0.0) {
            return Err(Error::InvalidParameter("view_radius must be > 0".into()));
        }
        for (i, a) in self.rooms.iter().enumerate() {
            if a.id != i + 1 {
                return Err(Error::InvalidParameter(
                    "room ids must be 1..=num_rooms".into(),
                ));
            }
            if self.rooms[i + 1..].iter().any(|b| a.rect.overlaps(&b.rect)) {
                return Err(Error::InfeasibleGeometry("rooms overlap".into()));
            }
        }
        if self.hallways.len() != self.rooms.len() - 1
            || self
                .hallways
                .iter()
                .enumerate()
                .any(|(i, h)| h.from != i + 1 || h.to != i + 2)
        {
            return Err(Error::InfeasibleGeometry(
                "hallways must chain the rooms in id order".into(),
            ));
        }
        for l in &self.landmarks {
            if self.region_of(l.position) != Some(l.region) {
                return Err(Error::InfeasibleGeometry(format!(
                    "landmark {} lies outside region {}",
                    l.index, l.region
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of [`generate_gridworld`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridworldSpec {
    pub num_rooms: usize,
    /// Inclusive range of landmark counts per room.
    pub landmarks_per_room: (usize, usize),
    pub hallway_width: f64,
    pub view_radius: f64,
    #[serde(default = "default_room_size")]
    pub room_size: f64,
    #[serde(default = "default_hallway_length")]
    pub hallway_length: f64,
    pub seed: u64,
}

fn default_room_size() -> f64 {
    12.0
}

fn default_hallway_length() -> f64 {
    10.0
}

impl GridworldSpec {
    pub fn new(num_rooms: usize, seed: u64) -> Self {
        GridworldSpec {
            num_rooms,
            landmarks_per_room: (6, 10),
            hallway_width: 2.0,
            view_radius: 8.0,
            room_size: default_room_size(),
            hallway_length: default_hallway_length(),
            seed,
        }
    }
}

/// Square rooms on a grid, numbered in boustrophedon order so consecutive
/// rooms are always grid neighbours, each joined to the next by a straight
/// hallway.
pub fn generate_gridworld(spec: &GridworldSpec) -> Result<GridworldEnv> {
    let GridworldSpec {
        num_rooms,
        landmarks_per_room: (lo, hi),
        hallway_width,
        view_radius,
        room_size,
        hallway_length,
        seed,
    } = *spec;
    if num_rooms < 2 {
        return Err(Error::InfeasibleGeometry("need at least two rooms".into()));
    }
    if lo > hi {
        return Err(Error::InvalidParameter("empty landmark count range".into()));
    }
    if !(view_radius > 0.0) {
        return Err(Error::InvalidParameter("view_radius must be > 0".into()));
    }
    if !(room_size > 0.0 && hallway_length > 0.0 && hallway_width > 0.0)
        || hallway_width >= room_size
    {
        return Err(Error::InfeasibleGeometry(format!(
            "hallway width {hallway_width} must be positive and narrower than rooms of size {room_size}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = (num_rooms as f64).sqrt().ceil() as usize;
    let pitch = room_size + hallway_length;
    let cell = |i: usize| {
        let row = i / cols;
        let col = if row % 2 == 0 {
            i % cols
        } else {
            cols - 1 - i % cols
        };
        (col, row)
    };
    let rooms: Vec<Room> = (0..num_rooms)
        .map(|i| {
            let (c, r) = cell(i);
            let x = c as f64 * pitch;
            let y = r as f64 * pitch;
            Room {
                id: i + 1,
                rect: Rect {
                    x_min: x,
                    y_min: y,
                    x_max: x + room_size,
                    y_max: y + room_size,
                },
            }
        })
        .collect();

    let half = 0.5 * hallway_width;
    let hallways: Vec<Hallway> = (0..num_rooms - 1)
        .map(|i| {
            let (a, b) = (&rooms[i].rect, &rooms[i + 1].rect);
            let [ax, ay] = a.center();
            let [bx, by] = b.center();
            let (start, end, rect) = if (ay - by).abs() < 1e-9 {
                let (sx, ex) = if bx > ax {
                    (a.x_max, b.x_min)
                } else {
                    (a.x_min, b.x_max)
                };
                let rect = Rect {
                    x_min: sx.min(ex),
                    y_min: ay - half,
                    x_max: sx.max(ex),
                    y_max: ay + half,
                };
                ([sx, ay], [ex, ay], rect)
            } else {
                let (sy, ey) = if by > ay {
                    (a.y_max, b.y_min)
                } else {
                    (a.y_min, b.y_max)
                };
                let rect = Rect {
                    x_min: ax - half,
                    y_min: sy.min(ey),
                    x_max: ax + half,
                    y_max: sy.max(ey),
                };
                ([ax, sy], [ax, ey], rect)
            };
            Hallway {
                from: i + 1,
                to: i + 2,
                rect,
                start,
                end,
            }
        })
        .collect();

    let mut landmarks = Vec::new();
    let margin = 0.5;
    for room in &rooms {
        let count = rng.random_range(lo..=hi);
        for _ in 0..count {
            let r = &room.rect;
            let position = [
                rng.random_range(r.x_min + margin..r.x_max - margin),
                rng.random_range(r.y_min + margin..r.y_max - margin),
            ];
            landmarks.push(Landmark {
                index: landmarks.len(),
                position,
                region: room.id,
            });
        }
    }
    let per_hallway = ((hallway_length * HALLWAY_LANDMARK_DENSITY).round() as usize).max(1);
    for h in &hallways {
        for j in 0..per_hallway {
            // strictly interior so no landmark sits on a room edge
            let f = (j as f64 + 0.5) / per_hallway as f64;
            let position = [
                h.start[0] + f * (h.end[0] - h.start[0]),
                h.start[1] + f * (h.end[1] - h.start[1]),
            ];
            landmarks.push(Landmark {
                index: landmarks.len(),
                position,
                region: HALLWAY_REGION,
            });
        }
    }

    let env = GridworldEnv {
        rooms,
        hallways,
        landmarks,
        view_radius,
    };
    env.validate()?;
    Ok(env)
}

/// One pass through every room in id order at unit speed.
///
/// Inside each room the agent walks from its entrance to the centre, through
/// two random interior waypoints, and on to the next hallway. Labels are the
/// region ids, relabeled by first appearance.
pub fn simulate_trajectory(env: &GridworldEnv, seed: u64) -> Result<Vec<DatasetRecord>> {
    let points = trajectory_positions(env, seed)?;
    let regions: Vec<usize> = points
        .iter()
        .map(|&p| {
            env.region_of(p).ok_or_else(|| {
                Error::InfeasibleGeometry(format!("trajectory left the map at {p:?}"))
            })
        })
        .collect::<Result<_>>()?;
    let labels = first_appearance_labels(&regions);
    Ok(points
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(index, (&p, label))| DatasetRecord {
            index,
            time: (index + 1) as f64,
            observation: Observation::Binary(env.observe(p)),
            true_cluster: label,
        })
        .collect())
}

/// Positions visited by [`simulate_trajectory`] with the same `seed`.
pub fn trajectory_positions(env: &GridworldEnv, seed: u64) -> Result<Vec<[f64; 2]>> {
    env.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 1.0;
    let mut waypoints: Vec<[f64; 2]> = Vec::new();
    for (i, room) in env.rooms.iter().enumerate() {
        let r = &room.rect;
        if i > 0 {
            waypoints.push(env.hallways[i - 1].end);
        }
        waypoints.push(r.center());
        for _ in 0..2 {
            waypoints.push([
                rng.random_range(r.x_min + margin..r.x_max - margin),
                rng.random_range(r.y_min + margin..r.y_max - margin),
            ]);
        }
        if let Some(h) = env.hallways.get(i) {
            waypoints.push(h.start);
        }
    }
    Ok(discretize(&waypoints))
}

/// Points at unit arc length along the polyline, starting at its first vertex.
fn discretize(waypoints: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = vec![waypoints[0]];
    let mut carry = 0.0;
    for w in waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let mut s = 1.0 - carry;
        while s <= len {
            let f = s / len;
            out.push([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
            s += 1.0;
        }
        carry = len - (s - 1.0);
    }
    out
}

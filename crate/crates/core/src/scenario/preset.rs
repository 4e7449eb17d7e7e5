//! Built-in scenarios.

use super::{
    Axis, Lane, ManeuverLabel, ManeuverOption, ObjectKind, ObjectSweep, RoadNetwork, ScenarioFile,
    Scene, SweepSpec, TrafficObject, SCENARIO_SCHEMA_VERSION,
};
use crate::dynamics::VehicleState;
use crate::geometry::{arc_points, Point, Polyline};

const STEP: f64 = 0.5;

fn option(label: ManeuverLabel, target: Option<&str>) -> ManeuverOption {
    ManeuverOption {
        label,
        target: target.map(str::to_string),
    }
}

fn lane(
    id: &str,
    width: f64,
    points: Vec<Point>,
    maneuvers: Vec<ManeuverOption>,
    successors: &[&str],
) -> Lane {
    Lane {
        id: id.into(),
        width,
        centerline: Polyline::new(points).expect("preset geometry is valid"),
        maneuvers,
        successors: successors.iter().map(|s| s.to_string()).collect(),
    }
}

/// Eastbound arc of the curved main road between two x-coordinates.
struct MainArc {
    center: Point,
}

impl MainArc {
    fn angle_at(&self, radius: f64, x: f64) -> f64 {
        ((x - self.center.x) / radius).acos()
    }

    fn points(&self, radius: f64, x_from: f64, x_to: f64) -> Vec<Point> {
        arc_points(
            self.center,
            radius,
            self.angle_at(radius, x_from),
            self.angle_at(radius, x_to),
            STEP,
        )
    }

    fn y_at(&self, radius: f64, x: f64) -> f64 {
        self.center.y + (radius * radius - (x - self.center.x).powi(2)).sqrt()
    }

    fn point(&self, radius: f64, x: f64) -> Point {
        Point::new(x, self.y_at(radius, x))
    }

    /// Unit tangent in the eastbound direction of travel.
    fn tangent(&self, radius: f64, x: f64) -> (f64, f64) {
        let a = self.angle_at(radius, x);
        (a.sin(), -a.cos())
    }
}

fn cubic_bezier(p0: Point, p1: Point, p2: Point, p3: Point, samples: usize) -> Vec<Point> {
    (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let u = 1.0 - t;
            let (a, b, c, d) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
            Point::new(
                a * p0.x + b * p1.x + c * p2.x + d * p3.x,
                a * p0.y + b * p1.y + c * p2.y + d * p3.y,
            )
        })
        .collect()
}

/// Intersection on a curved road inside a 40 m × 40 m area with two cars and a
/// bicycle, plus the 972-scene sweep over their positions, speeds and
/// accelerations.
///
/// The main road bends over the area from west to east with two eastbound
/// lanes and a bicycle lane on its right edge; a side road leaves southward.
pub fn intersection_preset() -> ScenarioFile {
    let arc = MainArc {
        center: Point::new(20.0, -50.0),
    };
    let (r_left, r_right, r_bike) = (69.5, 66.0, 63.5);
    let (r_outer, r_inner) = (71.25, 62.75);
    let (x_west, x_east) = (-2.0, 42.0);
    let x_turn = 17.0;
    let side_x = 27.0;
    let side_top = 10.0;

    let turn_start = arc.point(r_right, x_turn);
    let (tx, ty) = arc.tangent(r_right, x_turn);
    let turn_end = Point::new(side_x, side_top);
    let turn = cubic_bezier(
        turn_start,
        Point::new(turn_start.x + 5.5 * tx, turn_start.y + 5.5 * ty),
        Point::new(side_x, side_top + 5.5),
        turn_end,
        24,
    );

    use ManeuverLabel::*;
    let lanes = vec![
        lane(
            "main_right_in",
            3.5,
            arc.points(r_right, x_west, x_turn),
            vec![
                option(FollowLane, Some("main_right_out")),
                option(ChangeLane, Some("main_left")),
                option(TurnRight, Some("turn_right")),
            ],
            &["main_right_out", "turn_right"],
        ),
        lane(
            "main_right_out",
            3.5,
            arc.points(r_right, x_turn, x_east),
            vec![
                option(FollowLane, None),
                option(ChangeLane, Some("main_left")),
            ],
            &[],
        ),
        lane(
            "main_left",
            3.5,
            arc.points(r_left, x_west, x_east),
            vec![
                option(FollowLane, None),
                option(ChangeLane, Some("main_right_in")),
            ],
            &[],
        ),
        lane(
            "turn_right",
            3.5,
            turn,
            vec![option(FollowLane, Some("side_south"))],
            &["side_south"],
        ),
        lane(
            "side_south",
            3.5,
            vec![turn_end, Point::new(side_x, -5.0)],
            vec![option(FollowLane, None)],
            &[],
        ),
        lane(
            "bike",
            1.5,
            arc.points(r_bike, x_west, x_east),
            vec![option(FollowLane, None)],
            &[],
        ),
    ];

    let side_w = side_x - 1.75;
    let side_e = side_x + 1.75;
    let curb_x = 21.0;
    let mut curb = arc.points(r_inner, x_west, curb_x);
    curb.push(Point::new(side_w, 9.0));
    curb.push(Point::new(side_w, -2.0));
    let mut east_edge = vec![Point::new(side_e, -2.0)];
    east_edge.extend(arc.points(r_inner, side_e, x_east));
    let road_limits = vec![
        Polyline::new(arc.points(r_outer, x_west, x_east)).unwrap(),
        Polyline::new(curb).unwrap(),
        Polyline::new(east_edge).unwrap(),
    ];

    let on_arc = |radius: f64, x: f64, kmh: f64, ax: f64| {
        let p = arc.point(radius, x);
        let (tx, ty) = arc.tangent(radius, x);
        let mut s = VehicleState::new(p.x, p.y, kmh / 3.6, ty.atan2(tx));
        s.ax = ax;
        s
    };
    let objects = vec![
        TrafficObject::new(
            1,
            ObjectKind::Car,
            "main_right_in",
            on_arc(r_right, 7.0, 30.0, -0.5),
        ),
        TrafficObject::new(
            2,
            ObjectKind::Car,
            "main_left",
            on_arc(r_left, 5.5, 35.0, 0.0),
        ),
        TrafficObject::new(
            3,
            ObjectKind::Bicycle,
            "bike",
            on_arc(r_bike, 12.0, 15.0, 0.0),
        ),
    ];

    let sweep = SweepSpec {
        objects: vec![
            ObjectSweep {
                object: 1,
                position: Axis {
                    span: 10.0,
                    count: 3,
                },
                speed_kmh: Axis {
                    span: 20.0,
                    count: 3,
                },
                accel: Axis {
                    span: 2.5,
                    count: 3,
                },
            },
            ObjectSweep {
                object: 2,
                position: Axis {
                    span: 10.0,
                    count: 3,
                },
                speed_kmh: Axis {
                    span: 20.0,
                    count: 2,
                },
                accel: Axis {
                    span: 2.5,
                    count: 2,
                },
            },
            ObjectSweep {
                object: 3,
                position: Axis {
                    span: 6.0,
                    count: 3,
                },
                speed_kmh: Axis {
                    span: 10.0,
                    count: 1,
                },
                accel: Axis {
                    span: 1.0,
                    count: 1,
                },
            },
        ],
    };

    ScenarioFile {
        schema_version: SCENARIO_SCHEMA_VERSION,
        scene: Scene {
            road: RoadNetwork { lanes, road_limits },
            objects,
            ego: Some(1),
        },
        sweep: Some(sweep),
    }
}

/// Straight two-lane road along the x-axis with a single eastbound car; the
/// sweep yields 300 scenes over position and speed.
pub fn straight_road_preset() -> ScenarioFile {
    let line = |y: f64| vec![Point::new(-10.0, y), Point::new(60.0, y)];
    let lanes = vec![Lane {
        id: "east".into(),
        width: 3.5,
        centerline: Polyline::new(line(-1.75)).unwrap(),
        maneuvers: vec![option(ManeuverLabel::FollowLane, None)],
        successors: vec![],
    }];
    let road_limits = vec![
        Polyline::new(line(-3.5)).unwrap(),
        Polyline::new(line(0.0)).unwrap(),
        Polyline::new(line(3.5)).unwrap(),
    ];
    let car = TrafficObject::new(
        1,
        ObjectKind::Car,
        "east",
        VehicleState::new(5.0, -1.75, 33.0 / 3.6, 0.0),
    );
    ScenarioFile {
        schema_version: SCENARIO_SCHEMA_VERSION,
        scene: Scene {
            road: RoadNetwork { lanes, road_limits },
            objects: vec![car],
            ego: None,
        },
        sweep: Some(SweepSpec {
            objects: vec![ObjectSweep {
                object: 1,
                position: Axis {
                    span: 10.0,
                    count: 20,
                },
                speed_kmh: Axis {
                    span: 36.0,
                    count: 15,
                },
                accel: Axis::fixed(),
            }],
        }),
    }
}

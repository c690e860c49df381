//! Great-circle distances, radius predicates and bounding boxes for
//! filtering tweet corpora down to a monitored region.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, GeoTag};

/// Mean Earth radius in meters (IUGG R1).
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// One statute mile in meters, exact.
pub const MILE_M: f64 = 1_609.344;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Option<Self> {
        if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) {
            Some(Self { lat, lon })
        } else {
            None
        }
    }
}

/// Latitude/longitude rectangle. `west > east` means the box spans the
/// antimeridian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoBox {
    pub south: f64,
    pub west: f64,
    pub north: f64,
    pub east: f64,
}

impl GeoBox {
    pub fn new(south: f64, west: f64, north: f64, east: f64) -> Option<Self> {
        if south <= north {
            Some(Self {
                south,
                west,
                north,
                east,
            })
        } else {
            None
        }
    }
}

/// Great-circle distance in meters on a sphere of radius [`EARTH_RADIUS_M`].
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();

    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Closed-ball membership: points exactly on the circle are kept.
pub fn within_radius(p: GeoPoint, center: GeoPoint, radius_m: f64) -> bool {
    haversine_m(p, center) <= radius_m
}

/// Closed-box membership with antimeridian wrap when `west > east`.
pub fn in_box(p: GeoPoint, b: &GeoBox) -> bool {
    if p.lat < b.south || p.lat > b.north {
        return false;
    }
    if b.west <= b.east {
        b.west <= p.lon && p.lon <= b.east
    } else {
        p.lon >= b.west || p.lon <= b.east
    }
}

/// Keep only tweets whose geotag is a coordinate point inside the radius.
/// Box and place-name geotags are excluded by definition: a region is not
/// evidence the author was at any particular point in it.
pub fn radius_refilter(c: &Corpus, center: GeoPoint, radius_m: f64) -> Corpus {
    c.filter(|t| match &t.geotag {
        Some(GeoTag::Point(p)) => within_radius(*p, center, radius_m),
        _ => false,
    })
}

/// Keep only tweets whose geotag (point or box) intersects the box.
/// A box geotag counts when its area overlaps `b`; place names never match.
pub fn box_filter(c: &Corpus, b: &GeoBox) -> Corpus {
    c.filter(|t| match &t.geotag {
        Some(GeoTag::Point(p)) => in_box(*p, b),
        Some(GeoTag::Box(g)) => boxes_intersect(g, b),
        _ => false,
    })
}

fn boxes_intersect(a: &GeoBox, b: &GeoBox) -> bool {
    if a.north < b.south || b.north < a.south {
        return false;
    }
    lon_spans_overlap(a, b)
}

fn lon_spans_overlap(a: &GeoBox, b: &GeoBox) -> bool {
    // Expand wrapped spans into up to two unwrapped intervals each.
    let spans = |g: &GeoBox| -> Vec<(f64, f64)> {
        if g.west <= g.east {
            vec![(g.west, g.east)]
        } else {
            vec![(g.west, 180.0), (-180.0, g.east)]
        }
    };
    for (aw, ae) in spans(a) {
        for (bw, be) in spans(b) {
            if aw <= be && bw <= ae {
                return true;
            }
        }
    }
    false
}

/// How a corpus's geotags break down. Place names are reported as
/// unresolvable rather than resolved to geometry; a name-configured search
/// is exactly the failure mode this count surfaces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GeotagBreakdown {
    pub points: usize,
    pub boxes: usize,
    pub unresolvable_place_names: usize,
    pub missing: usize,
}

pub fn geotag_breakdown(c: &Corpus) -> GeotagBreakdown {
    let mut out = GeotagBreakdown::default();
    for t in c.tweets() {
        match &t.geotag {
            Some(GeoTag::Point(_)) => out.points += 1,
            Some(GeoTag::Box(_)) => out.boxes += 1,
            Some(GeoTag::PlaceName(_)) => out.unresolvable_place_names += 1,
            None => out.missing += 1,
        }
    }
    out
}

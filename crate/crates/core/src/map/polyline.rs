use crate::geom::{closest_on_segment, Rigid2, Vec2};

/// Minimum spacing between consecutive polyline vertices.
pub const MIN_POINT_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolylineError {
    #[error("polyline needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("polyline point {0} is not finite")]
    NonFinite(usize),
    #[error("polyline points {0} and {next} are coincident", next = .0 + 1)]
    Coincident(usize),
}

/// Result of projecting a point onto a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the foot point from the polyline start.
    pub s: f64,
    /// Signed lateral offset, positive when the point is left of the travel direction.
    pub lateral: f64,
    pub segment: usize,
    pub foot: Vec2,
}

/// An ordered list of 2D points with cached cumulative arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>) -> Result<Self, PolylineError> {
        if points.len() < 2 {
            return Err(PolylineError::TooFewPoints(points.len()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(PolylineError::NonFinite(i));
        }
        let mut cumulative = Vec::with_capacity(points.len());
        cumulative.push(0.0);
        for (i, w) in points.windows(2).enumerate() {
            let gap = w[0].distance(w[1]);
            if gap <= MIN_POINT_GAP {
                return Err(PolylineError::Coincident(i));
            }
            cumulative.push(cumulative[i] + gap);
        }
        Ok(Self { points, cumulative })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn cumulative_arclength(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("non-empty polyline")
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first(&self) -> Vec2 {
        self.points[0]
    }

    pub fn last(&self) -> Vec2 {
        *self.points.last().expect("non-empty polyline")
    }

    pub fn segment(&self, i: usize) -> (Vec2, Vec2) {
        (self.points[i], self.points[i + 1])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Index of the segment containing arc length `s` (clamped to the polyline).
    pub fn segment_at(&self, s: f64) -> usize {
        let n = self.segment_count();
        // first vertex with cumulative > s, minus one
        let idx = self.cumulative.partition_point(|&c| c <= s);
        idx.saturating_sub(1).min(n - 1)
    }

    /// Point at arc length `s`, linearly interpolated; `s` is clamped to `[0, length]`.
    pub fn point_at(&self, s: f64) -> Vec2 {
        let s = s.clamp(0.0, self.length());
        let i = self.segment_at(s);
        let (a, b) = self.segment(i);
        let seg_len = self.cumulative[i + 1] - self.cumulative[i];
        a.lerp(b, (s - self.cumulative[i]) / seg_len)
    }

    /// Unit tangent of the segment containing arc length `s`.
    pub fn tangent_at(&self, s: f64) -> Vec2 {
        let (a, b) = self.segment(self.segment_at(s.clamp(0.0, self.length())));
        (b - a).normalized()
    }

    #[inline]
    fn project_onto_segment(&self, p: Vec2, i: usize) -> (f64, Projection) {
        let (a, b) = self.segment(i);
        let (t, foot) = closest_on_segment(p, a, b);
        let dist = p.distance(foot);
        let side = (b - a).cross(p - a);
        let lateral = if side < 0.0 { -dist } else { dist };
        let s = self.cumulative[i] + t * (self.cumulative[i + 1] - self.cumulative[i]);
        (
            dist,
            Projection {
                s,
                lateral,
                segment: i,
                foot,
            },
        )
    }

    /// Projects onto the globally nearest segment; ties go to the smaller segment index.
    pub fn project(&self, p: Vec2) -> Projection {
        self.project_segments(p, 0..self.segment_count())
            .expect("polyline has at least one segment")
    }

    /// Projects onto the nearest segment among `segments`.
    pub fn project_segments(
        &self,
        p: Vec2,
        segments: impl IntoIterator<Item = usize>,
    ) -> Option<Projection> {
        let mut best: Option<(f64, Projection)> = None;
        for i in segments {
            let (d, proj) = self.project_onto_segment(p, i);
            match best {
                Some((bd, _)) if d >= bd => {}
                _ => best = Some((d, proj)),
            }
        }
        best.map(|(_, proj)| proj)
    }

    /// Unsigned distance from `p` to the polyline.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.project(p).lateral.abs()
    }

    pub fn transformed(&self, g: &Rigid2) -> Polyline {
        let points: Vec<Vec2> = self.points.iter().map(|&p| g.apply_point(p)).collect();
        let cumulative = self.cumulative.clone();
        Polyline { points, cumulative }
    }
}

//! Rasterized plane sets: occupancy grids over a window, topological hulls
//! via border flood fill, crosscuts with their shadows, and bumping-curve
//! construction around a compactum.
//!
//! Compacta are polygons, polylines, or point clouds; everything else in
//! this module works on the grid, so complement components come from flood
//! fill rather than an exact arrangement.

use crate::curve::{
    closest_on_segment, point_segment_dist, segment_segment_dist, OrientedClosedCurve,
};
use crate::error::{Error, Result};
use crate::geom::{Point, Window, GEOM_EPS};

/// A compact plane set given by geometry: a filled simple polygon, a thin
/// polyline, or a finite point cloud.
#[derive(Debug, Clone, PartialEq)]
pub enum Compactum {
    /// Simple closed polygon together with its interior.
    Polygon(Vec<Point>),
    /// Polyline (open chain); no interior.
    Polyline(Vec<Point>),
    /// Finite set of points.
    Points(Vec<Point>),
}

impl Compactum {
    /// The straight segment `[a, b]`.
    pub fn segment(a: Point, b: Point) -> Self {
        Compactum::Polyline(vec![a, b])
    }

    pub fn vertex_list(&self) -> &[Point] {
        match self {
            Compactum::Polygon(v) | Compactum::Polyline(v) | Compactum::Points(v) => v,
        }
    }

    pub fn bounds(&self, margin: f64) -> Result<Window> {
        Window::around(self.vertex_list(), margin)
    }

    /// Exact distance from `p` to the set (zero inside a polygon).
    pub fn dist(&self, p: Point) -> f64 {
        match self {
            Compactum::Polygon(v) => {
                if polygon_contains(v, p) {
                    0.0
                } else {
                    boundary_dist(v, p, true)
                }
            }
            Compactum::Polyline(v) => boundary_dist(v, p, false),
            Compactum::Points(v) => {
                v.iter().map(|q| q.dist(p)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Closest point of the set to `p` (for a polygon, the closest boundary
    /// point when `p` is outside, `p` itself when inside).
    pub fn nearest(&self, p: Point) -> Point {
        match self {
            Compactum::Polygon(v) => {
                if polygon_contains(v, p) {
                    p
                } else {
                    nearest_on_boundary(v, p, true)
                }
            }
            Compactum::Polyline(v) => nearest_on_boundary(v, p, false),
            Compactum::Points(v) => v
                .iter()
                .copied()
                .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
                .unwrap_or(p),
        }
    }

    /// Points along the boundary at spacing `h` (point clouds return the
    /// points themselves).
    pub fn boundary_samples(&self, h: f64) -> Vec<Point> {
        match self {
            Compactum::Polygon(v) => sample_chain(v, h, true),
            Compactum::Polyline(v) => sample_chain(v, h, false),
            Compactum::Points(v) => v.clone(),
        }
    }

    /// Mark this set into a grid.
    pub fn rasterize_into(&self, region: &mut Region) {
        match self {
            Compactum::Polygon(v) => {
                region.fill_polygon(v);
                region.mark_polyline(v, true);
            }
            Compactum::Polyline(v) => region.mark_polyline(v, false),
            Compactum::Points(v) => {
                for &p in v {
                    region.mark_point(p);
                }
            }
        }
    }
}

fn sample_chain(v: &[Point], h: f64, closed: bool) -> Vec<Point> {
    let mut out = Vec::new();
    let n = v.len();
    if n == 0 {
        return out;
    }
    let last = if closed { n } else { n - 1 };
    for i in 0..last {
        let a = v[i];
        let b = v[(i + 1) % n];
        let steps = (a.dist(b) / h).ceil().max(1.0) as usize;
        for k in 0..steps {
            out.push(a.lerp(b, k as f64 / steps as f64));
        }
    }
    if !closed {
        out.push(v[n - 1]);
    }
    out
}

fn boundary_dist(v: &[Point], p: Point, closed: bool) -> f64 {
    let n = v.len();
    if n == 1 {
        return p.dist(v[0]);
    }
    let last = if closed { n } else { n - 1 };
    (0..last)
        .map(|i| point_segment_dist(p, v[i], v[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn nearest_on_boundary(v: &[Point], p: Point, closed: bool) -> Point {
    let n = v.len();
    if n == 1 {
        return v[0];
    }
    let last = if closed { n } else { n - 1 };
    (0..last)
        .map(|i| closest_on_segment(p, v[i], v[(i + 1) % n]).0)
        .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
        .unwrap()
}

/// Even–odd membership for a raw polygon vertex list.
pub fn polygon_contains(v: &[Point], p: Point) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Occupancy grid over a window with square cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    window: Window,
    nx: usize,
    ny: usize,
    cell: f64,
    cells: Vec<bool>,
}

/// Cap on total grid cells; requested resolutions are reduced to fit.
const CELL_BUDGET: usize = 4_000_000;

impl Region {
    /// Empty grid at `resolution` cells per unit (clamped to the cell
    /// budget). Errors on non-positive resolution.
    pub fn empty(window: Window, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(Error::BadResolution(resolution as i64));
        }
        let mut cell = 1.0 / resolution;
        let min_cell = (window.width() * window.height() / CELL_BUDGET as f64).sqrt();
        if cell < min_cell {
            cell = min_cell;
        }
        let nx = (window.width() / cell).ceil().max(4.0) as usize;
        let ny = (window.height() / cell).ceil().max(4.0) as usize;
        Ok(Region { window, nx, ny, cell, cells: vec![false; nx * ny] })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        ix < self.nx && iy < self.ny && self.cells[self.idx(ix, iy)]
    }

    pub fn set(&mut self, ix: usize, iy: usize) {
        if ix < self.nx && iy < self.ny {
            let i = self.idx(ix, iy);
            self.cells[i] = true;
        }
    }

    /// Cell containing `p`, if inside the window grid.
    pub fn locate(&self, p: Point) -> Option<(usize, usize)> {
        let fx = (p.x - self.window.x0) / self.cell;
        let fy = (p.y - self.window.y0) / self.cell;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let ix = fx as usize;
        let iy = fy as usize;
        if ix < self.nx && iy < self.ny {
            Some((ix, iy))
        } else {
            None
        }
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.window.x0 + (ix as f64 + 0.5) * self.cell,
            self.window.y0 + (iy as f64 + 0.5) * self.cell,
        )
    }

    /// Lattice corner (ix, iy) of the grid, in plane coordinates.
    pub fn corner(&self, ix: usize, iy: usize) -> Point {
        Point::new(self.window.x0 + ix as f64 * self.cell, self.window.y0 + iy as f64 * self.cell)
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.locate(p).map_or(false, |(ix, iy)| self.get(ix, iy))
    }

    /// Whether any marked cell lies within `r_cells` (Chebyshev) of `p`'s cell.
    pub fn near_marked(&self, p: Point, r_cells: usize) -> bool {
        let Some((ix, iy)) = self.locate(p) else { return false };
        let r = r_cells as isize;
        for dy in -r..=r {
            for dx in -r..=r {
                let jx = ix as isize + dx;
                let jy = iy as isize + dy;
                if jx >= 0 && jy >= 0 && self.get(jx as usize, jy as usize) {
                    return true;
                }
            }
        }
        false
    }

    pub fn mark_point(&mut self, p: Point) {
        if let Some((ix, iy)) = self.locate(p) {
            self.set(ix, iy);
        }
    }

    /// Mark every cell the segment `[a, b]` passes through (grid traversal).
    pub fn mark_segment(&mut self, a: Point, b: Point) {
        self.mark_point(a);
        self.mark_point(b);
        let (Some((ax, ay)), Some((bx, by))) = (self.locate(a), self.locate(b)) else {
            // Fall back to dense sampling for segments leaving the window.
            let steps = (a.dist(b) / (self.cell * 0.5)).ceil().max(1.0) as usize;
            for k in 0..=steps {
                self.mark_point(a.lerp(b, k as f64 / steps as f64));
            }
            return;
        };
        let (mut ix, mut iy) = (ax as isize, ay as isize);
        let (tx, ty) = (bx as isize, by as isize);
        let d = b - a;
        let step_x: isize = if d.x > 0.0 { 1 } else { -1 };
        let step_y: isize = if d.y > 0.0 { 1 } else { -1 };
        // Parametric distance to the next vertical / horizontal grid line.
        let next_boundary = |i: isize, step: isize, origin: f64, pos: f64, dir: f64| -> f64 {
            if dir == 0.0 {
                return f64::INFINITY;
            }
            let edge = origin + (i + if step > 0 { 1 } else { 0 }) as f64 * self.cell;
            (edge - pos) / dir
        };
        let mut t_max_x = next_boundary(ix, step_x, self.window.x0, a.x, d.x);
        let mut t_max_y = next_boundary(iy, step_y, self.window.y0, a.y, d.y);
        let t_delta_x = if d.x != 0.0 { self.cell / d.x.abs() } else { f64::INFINITY };
        let t_delta_y = if d.y != 0.0 { self.cell / d.y.abs() } else { f64::INFINITY };
        let mut guard = 4 * (self.nx + self.ny);
        loop {
            self.set(ix as usize, iy as usize);
            if (ix, iy) == (tx, ty) || guard == 0 {
                break;
            }
            guard -= 1;
            if t_max_x < t_max_y {
                t_max_x += t_delta_x;
                ix += step_x;
            } else {
                t_max_y += t_delta_y;
                iy += step_y;
            }
            if ix < 0 || iy < 0 || ix as usize >= self.nx || iy as usize >= self.ny {
                break;
            }
        }
    }

    pub fn mark_polyline(&mut self, pts: &[Point], closed: bool) {
        let n = pts.len();
        if n == 0 {
            return;
        }
        let last = if closed { n } else { n - 1 };
        for i in 0..last {
            self.mark_segment(pts[i], pts[(i + 1) % n]);
        }
    }

    /// Even–odd scanline fill of a polygon interior.
    pub fn fill_polygon(&mut self, poly: &[Point]) {
        let n = poly.len();
        for iy in 0..self.ny {
            let y = self.window.y0 + (iy as f64 + 0.5) * self.cell;
            let mut xs: Vec<f64> = Vec::new();
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                if (a.y > y) != (b.y > y) {
                    xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let i0 = ((pair[0] - self.window.x0) / self.cell - 0.5).ceil().max(0.0) as usize;
                let i1 = ((pair[1] - self.window.x0) / self.cell - 0.5).floor() as isize;
                for ix in i0..=(i1.min(self.nx as isize - 1).max(-1)) as usize {
                    self.set(ix, iy);
                }
            }
        }
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.cell * self.cell
    }

    /// 4-connected flood over free (unmarked) cells from the grid border;
    /// returns the reached mask.
    fn border_flood(&self) -> Vec<bool> {
        let mut reached = vec![false; self.cells.len()];
        let mut queue: std::collections::VecDeque<(usize, usize)> = Default::default();
        let push = |ix: usize, iy: usize, reached: &mut Vec<bool>,
                        queue: &mut std::collections::VecDeque<(usize, usize)>| {
            let i = iy * self.nx + ix;
            if !self.cells[i] && !reached[i] {
                reached[i] = true;
                queue.push_back((ix, iy));
            }
        };
        for ix in 0..self.nx {
            push(ix, 0, &mut reached, &mut queue);
            push(ix, self.ny - 1, &mut reached, &mut queue);
        }
        for iy in 0..self.ny {
            push(0, iy, &mut reached, &mut queue);
            push(self.nx - 1, iy, &mut reached, &mut queue);
        }
        while let Some((ix, iy)) = queue.pop_front() {
            let mut neighbors = [(0usize, 0usize); 4];
            let mut k = 0;
            if ix > 0 {
                neighbors[k] = (ix - 1, iy);
                k += 1;
            }
            if ix + 1 < self.nx {
                neighbors[k] = (ix + 1, iy);
                k += 1;
            }
            if iy > 0 {
                neighbors[k] = (ix, iy - 1);
                k += 1;
            }
            if iy + 1 < self.ny {
                neighbors[k] = (ix, iy + 1);
                k += 1;
            }
            for &(jx, jy) in &neighbors[..k] {
                push(jx, jy, &mut reached, &mut queue);
            }
        }
        reached
    }

    /// Topological hull: the marked set together with every bounded
    /// complementary component.
    pub fn hull(&self) -> Region {
        let reached = self.border_flood();
        let mut out = self.clone();
        for i in 0..out.cells.len() {
            out.cells[i] = !reached[i];
        }
        out
    }

    /// Whether the free complement is entirely connected to the border.
    pub fn complement_connected(&self) -> bool {
        let reached = self.border_flood();
        self.cells.iter().zip(&reached).all(|(&m, &r)| m || r)
    }

    /// Cells in `self` but not reached from the border after also blocking
    /// `extra` (used for shadows): returns the bounded free cells.
    pub fn bounded_free_cells(&self) -> Region {
        let reached = self.border_flood();
        let mut out = self.clone();
        for i in 0..out.cells.len() {
            out.cells[i] = !self.cells[i] && !reached[i];
        }
        out
    }

    /// Union in place (grids must share geometry).
    pub fn union_with(&mut self, other: &Region) {
        assert_eq!(self.cells.len(), other.cells.len(), "grid mismatch");
        for (c, o) in self.cells.iter_mut().zip(&other.cells) {
            *c = *c || *o;
        }
    }

    /// Whether every marked cell of `self` is marked in `other`.
    pub fn subset_of(&self, other: &Region) -> bool {
        assert_eq!(self.cells.len(), other.cells.len(), "grid mismatch");
        self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Strict subset: subset and at least one cell smaller.
    pub fn strict_subset_of(&self, other: &Region) -> bool {
        self.subset_of(other) && self.count() < other.count()
    }

    /// Morphological dilation by `rounds` 8-neighborhood steps.
    pub fn dilate(&self, rounds: usize) -> Region {
        let mut cur = self.clone();
        for _ in 0..rounds {
            let mut next = cur.clone();
            for iy in 0..cur.ny {
                for ix in 0..cur.nx {
                    if cur.cells[cur.idx(ix, iy)] {
                        for dy in -1isize..=1 {
                            for dx in -1isize..=1 {
                                let jx = ix as isize + dx;
                                let jy = iy as isize + dy;
                                if jx >= 0
                                    && jy >= 0
                                    && (jx as usize) < cur.nx
                                    && (jy as usize) < cur.ny
                                {
                                    next.set(jx as usize, jy as usize);
                                }
                            }
                        }
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Number of 8-connected components of the marked set.
    pub fn marked_components(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        for start in 0..self.cells.len() {
            if !self.cells[start] || seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                let (ix, iy) = (i % self.nx, i / self.nx);
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let jx = ix as isize + dx;
                        let jy = iy as isize + dy;
                        if jx < 0 || jy < 0 || jx as usize >= self.nx || jy as usize >= self.ny {
                            continue;
                        }
                        let j = jy as usize * self.nx + jx as usize;
                        if self.cells[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        count
    }

    /// Centers of all marked cells.
    pub fn marked_centers(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if self.cells[self.idx(ix, iy)] {
                    out.push(self.cell_center(ix, iy));
                }
            }
        }
        out
    }

    /// Marked cells adjacent (4-neighborhood) to a free cell or the grid
    /// edge.
    pub fn boundary_centers(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if !self.cells[self.idx(ix, iy)] {
                    continue;
                }
                let free = |jx: isize, jy: isize| {
                    jx < 0
                        || jy < 0
                        || jx as usize >= self.nx
                        || jy as usize >= self.ny
                        || !self.cells[jy as usize * self.nx + jx as usize]
                };
                let (x, y) = (ix as isize, iy as isize);
                if free(x - 1, y) || free(x + 1, y) || free(x, y - 1) || free(x, y + 1) {
                    out.push(self.cell_center(ix, iy));
                }
            }
        }
        out
    }

    /// Shortest 4-connected path through free cells from the cell of
    /// `start` to the grid border. Returns cell centers.
    pub fn escape_path(&self, start: Point) -> Option<Vec<Point>> {
        let (sx, sy) = self.locate(start)?;
        if self.get(sx, sy) {
            return None;
        }
        let mut prev: Vec<u32> = vec![u32::MAX; self.cells.len()];
        let s = self.idx(sx, sy);
        prev[s] = s as u32;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back((sx, sy));
        let mut exit = None;
        'bfs: while let Some((ix, iy)) = queue.pop_front() {
            if ix == 0 || iy == 0 || ix == self.nx - 1 || iy == self.ny - 1 {
                exit = Some((ix, iy));
                break 'bfs;
            }
            let steps = [(ix - 1, iy), (ix + 1, iy), (ix, iy - 1), (ix, iy + 1)];
            for (jx, jy) in steps {
                let j = self.idx(jx, jy);
                if !self.cells[j] && prev[j] == u32::MAX {
                    prev[j] = self.idx(ix, iy) as u32;
                    queue.push_back((jx, jy));
                }
            }
        }
        let (mut ix, mut iy) = exit?;
        let mut path = Vec::new();
        loop {
            path.push(self.cell_center(ix, iy));
            let i = self.idx(ix, iy);
            if prev[i] as usize == i {
                break;
            }
            let p = prev[i] as usize;
            ix = p % self.nx;
            iy = p / self.nx;
        }
        path.reverse();
        Some(path)
    }

    /// Outer boundary contour of the marked set as a counterclockwise
    /// polygon of cell corners (collinear runs collapsed).
    pub fn outer_contour(&self) -> Result<Vec<Point>> {
        // Directed lattice edges with the marked cell on the left; outer
        // loops come out counterclockwise, holes clockwise.
        use std::collections::HashMap;
        let mut edges: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        let mut n_edges = 0usize;
        let free = |ix: isize, iy: isize| {
            ix < 0
                || iy < 0
                || ix as usize >= self.nx
                || iy as usize >= self.ny
                || !self.cells[iy as usize * self.nx + ix as usize]
        };
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if !self.cells[self.idx(ix, iy)] {
                    continue;
                }
                let (x, y) = (ix as isize, iy as isize);
                let mut add = |from: (usize, usize), to: (usize, usize)| {
                    edges.entry(from).or_default().push(to);
                    n_edges += 1;
                };
                if free(x, y - 1) {
                    add((ix, iy), (ix + 1, iy));
                }
                if free(x + 1, y) {
                    add((ix + 1, iy), (ix + 1, iy + 1));
                }
                if free(x, y + 1) {
                    add((ix + 1, iy + 1), (ix, iy + 1));
                }
                if free(x - 1, y) {
                    add((ix, iy + 1), (ix, iy));
                }
            }
        }
        if n_edges == 0 {
            return Err(Error::EmptyInput);
        }
        // Stitch loops; at ambiguous corners prefer the left-most turn so
        // loops stay simple.
        let mut best_loop: Vec<(usize, usize)> = Vec::new();
        let mut best_area = 0.0f64;
        let mut visited: std::collections::HashSet<((usize, usize), (usize, usize))> =
            Default::default();
        let keys: Vec<(usize, usize)> = edges.keys().copied().collect();
        for start in keys {
            let Some(&first) = edges.get(&start).and_then(|v| v.first()) else { continue };
            if visited.contains(&(start, first)) {
                continue;
            }
            let mut loop_pts = vec![start];
            let mut cur = start;
            let mut next = first;
            let mut area2 = 0.0f64;
            loop {
                visited.insert((cur, next));
                area2 += (cur.0 as f64) * (next.1 as f64) - (next.0 as f64) * (cur.1 as f64);
                if next == start {
                    break;
                }
                loop_pts.push(next);
                let incoming = (
                    next.0 as isize - cur.0 as isize,
                    next.1 as isize - cur.1 as isize,
                );
                let outs = edges.get(&next).cloned().unwrap_or_default();
                // Left-most turn: rank candidate directions by turn angle.
                let mut best: Option<((usize, usize), i32)> = None;
                for cand in outs {
                    if visited.contains(&(next, cand)) {
                        continue;
                    }
                    let dir = (
                        cand.0 as isize - next.0 as isize,
                        cand.1 as isize - next.1 as isize,
                    );
                    let cross = incoming.0 * dir.1 - incoming.1 * dir.0;
                    let dot = incoming.0 * dir.0 + incoming.1 * dir.1;
                    // Rank: left turn (cross>0) best, straight, then right.
                    let rank = if cross > 0 {
                        3
                    } else if dot > 0 {
                        2
                    } else if cross < 0 {
                        1
                    } else {
                        0
                    };
                    if best.map_or(true, |(_, r)| rank > r) {
                        best = Some((cand, rank));
                    }
                }
                match best {
                    Some((cand, _)) => {
                        cur = next;
                        next = cand;
                    }
                    None => break,
                }
            }
            if area2 / 2.0 > best_area {
                best_area = area2 / 2.0;
                best_loop = loop_pts;
            }
        }
        if best_loop.len() < 4 {
            return Err(Error::EmptyInput);
        }
        // To plane coordinates, collapsing collinear runs.
        let pts: Vec<Point> = best_loop.iter().map(|&(ix, iy)| self.corner(ix, iy)).collect();
        Ok(collapse_collinear(&pts))
    }
}

fn collapse_collinear(pts: &[Point]) -> Vec<Point> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = pts[(i + n - 1) % n];
        let cur = pts[i];
        let next = pts[(i + 1) % n];
        if (cur - prev).cross(next - cur).abs() > 1e-12 {
            out.push(cur);
        }
    }
    out
}

/// Rasterized topological hull `T(X)` of a compactum at the given
/// resolution (cells per unit).
pub fn topological_hull(x: &Compactum, window: Window, resolution: f64) -> Result<Region> {
    let mut region = Region::empty(window, resolution)?;
    x.rasterize_into(&mut region);
    Ok(region.hull())
}

/// A crosscut of the unbounded complement: an open subarc of a curve off
/// the compactum, with endpoints on it, plus the bounded component it cuts
/// off.
#[derive(Debug, Clone)]
pub struct Crosscut {
    /// Polyline from one contact point to the other.
    pub path: Vec<Point>,
    /// Curve parameters of the two contact endpoints.
    pub a: f64,
    pub b: f64,
    /// The bounded complementary component cut off by the crosscut.
    pub shadow: Region,
}

/// Maximal subarcs of `s` off the rasterized compactum `x`, each paired
/// with its shadow. `x` should already be a topological hull.
pub fn crosscut_components(s: &OrientedClosedCurve, x: &Region) -> Result<Vec<Crosscut>> {
    let cell = x.cell_size();
    let n = ((s.length() / (cell * 0.5)).ceil() as usize).clamp(64, 200_000);
    let on_x: Vec<bool> = (0..n)
        .map(|k| {
            let p = s.point_at(k as f64 / n as f64);
            x.near_marked(p, 1)
        })
        .collect();
    let contact_count = on_x.iter().filter(|&&b| b).count();
    if contact_count == 0 {
        return Err(Error::NoContact);
    }
    if contact_count == n {
        return Ok(Vec::new());
    }
    // Nondegeneracy: the contact set must span at least two cells.
    let contact_cells: std::collections::HashSet<(usize, usize)> = (0..n)
        .filter(|&k| on_x[k])
        .filter_map(|k| x.locate(s.point_at(k as f64 / n as f64)))
        .collect();
    if contact_cells.len() < 2 {
        return Err(Error::NoContact);
    }

    let mut cuts = Vec::new();
    // Walk cyclic runs of off-samples.
    let mut k = 0;
    while k < n && !on_x[k] {
        k += 1;
    }
    let first_on = k;
    let mut run: Vec<usize> = Vec::new();
    for step in 0..n {
        let i = (first_on + step) % n;
        if on_x[i] {
            if !run.is_empty() {
                let start = (run[0] + n - 1) % n;
                let end = i;
                let mut path: Vec<Point> =
                    vec![s.point_at(start as f64 / n as f64)];
                path.extend(run.iter().map(|&j| s.point_at(j as f64 / n as f64)));
                path.push(s.point_at(end as f64 / n as f64));
                let length: f64 =
                    path.windows(2).map(|w| w[0].dist(w[1])).sum();
                if length > 2.0 * cell {
                    let shadow = shadow_of(x, &path);
                    cuts.push(Crosscut {
                        path,
                        a: start as f64 / n as f64,
                        b: end as f64 / n as f64,
                        shadow,
                    });
                }
                run.clear();
            }
        } else {
            run.push(i);
        }
    }
    if !run.is_empty() {
        // Wraps past the starting on-sample.
        let start = (run[0] + n - 1) % n;
        let end = first_on;
        let mut path: Vec<Point> = vec![s.point_at(start as f64 / n as f64)];
        path.extend(run.iter().map(|&j| s.point_at(j as f64 / n as f64)));
        path.push(s.point_at(end as f64 / n as f64));
        let length: f64 = path.windows(2).map(|w| w[0].dist(w[1])).sum();
        if length > 2.0 * cell {
            let shadow = shadow_of(x, &path);
            cuts.push(Crosscut { path, a: start as f64 / n as f64, b: end as f64 / n as f64, shadow });
        }
    }
    Ok(cuts)
}

/// Shadow of a crosscut `q` of the complement of the marked set `x`: the
/// bounded free cells once both are blocked.
pub fn shadow_of(x: &Region, q: &[Point]) -> Region {
    let mut blocked = x.clone();
    blocked.mark_polyline(q, false);
    blocked.bounded_free_cells()
}

/// Result of [`bumping_curve`]: the curve, its contact parameters (sorted,
/// in `[0,1)`), and the contact points on the compactum.
#[derive(Debug, Clone)]
pub struct BumpingCurve {
    pub curve: OrientedClosedCurve,
    pub contact_params: Vec<f64>,
    pub contact_points: Vec<Point>,
}

/// Construct a bumping simple closed curve for `x`: a simple closed curve
/// within Hausdorff distance `mesh` of the boundary of `T(x)`, containing
/// `T(x)`, touching `x` at marked contact points, with every arc between
/// consecutive contacts disjoint from its `f`-image.
///
/// `tol` is the fixed-point coincidence threshold: the construction refuses
/// to proceed when `|f(z) - z| < 10 * tol` somewhere on `T(x)`.
pub fn bumping_curve(
    x: &Compactum,
    f: impl Fn(Point) -> Point,
    mesh: f64,
    resolution: f64,
    tol: f64,
) -> Result<BumpingCurve> {
    let window = x.bounds(0.0)?;
    let margin = mesh * 3.0 + window.extent() * 0.1 + 0.05;
    let window = x.bounds(margin)?;
    let region = {
        let mut r = Region::empty(window, resolution)?;
        x.rasterize_into(&mut r);
        r.hull()
    };
    let cell = region.cell_size();
    if cell > mesh / 4.0 {
        return Err(Error::MeshTooCoarse(cell));
    }

    // Refuse when f has a (near-)fixed point on T(x).
    let centers = region.marked_centers();
    let stride = (centers.len() / 20_000).max(1);
    let mut best = (Point::new(0.0, 0.0), f64::INFINITY);
    for p in centers.iter().step_by(stride) {
        let d = f(*p).dist(*p);
        if d < best.1 {
            best = (*p, d);
        }
    }
    // Local pattern-search refinement around the best cell.
    let mut at = best.0;
    let mut step = cell * stride as f64;
    while step > tol {
        let mut improved = false;
        for dir in [
            Point::new(1.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, -1.0),
        ] {
            let q = at + dir * step;
            let d = f(q).dist(q);
            if d < best.1 && (region.contains_point(q) || x.dist(q) <= cell) {
                best = (q, d);
                at = q;
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    if best.1 < 10.0 * tol {
        return Err(Error::FixedPointNearX { at: best.0, min: best.1 });
    }

    // Offset contour at ~mesh/2, then snap contact dips onto x.
    let rounds = ((mesh / (2.0 * cell)).round() as usize).max(1);
    let dilated = region.dilate(rounds);
    if dilated.marked_components() != 1 {
        return Err(Error::MeshTooCoarse(mesh));
    }
    let contour = dilated.outer_contour()?;
    let base = simplify_closed(&contour, 1.2 * cell);

    let mut sites = (base.len() / 12).clamp(4, 64);
    let max_sites = 4096;
    loop {
        match try_bumping(x, &f, &base, sites, &region, cell) {
            Ok(result) => return Ok(result),
            Err(Error::MeshTooCoarse(sep)) if sites * 2 <= max_sites => {
                let _ = sep;
                sites *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

fn try_bumping(
    x: &Compactum,
    f: &impl Fn(Point) -> Point,
    base: &[Point],
    sites: usize,
    hull: &Region,
    cell: f64,
) -> Result<BumpingCurve> {
    let n = base.len();
    let per: f64 = (0..n).map(|i| base[i].dist(base[(i + 1) % n])).sum();
    // Pick site vertices evenly by arc length along the offset contour.
    let mut site_idx: Vec<usize> = Vec::new();
    let mut acc = 0.0;
    let spacing = per / sites as f64;
    let mut next_mark = 0.0;
    for i in 0..n {
        if acc >= next_mark {
            site_idx.push(i);
            next_mark += spacing;
        }
        acc += base[i].dist(base[(i + 1) % n]);
    }
    site_idx.dedup();
    if site_idx.len() < 2 {
        return Err(Error::MeshTooCoarse(per));
    }

    // Replace each site vertex by its nearest point on x (a contact dip).
    let mut verts: Vec<Point> = Vec::with_capacity(n);
    let mut contact_points: Vec<Point> = Vec::new();
    let mut s = 0usize;
    for (i, &p) in base.iter().enumerate() {
        if s < site_idx.len() && site_idx[s] == i {
            s += 1;
            let q = x.nearest(p);
            if contact_points.last().map_or(false, |l: &Point| l.dist(q) <= 2.0 * cell) {
                verts.push(p); // dip would duplicate the previous contact
                continue;
            }
            contact_points.push(q);
            verts.push(q);
        } else {
            verts.push(p);
        }
    }
    if contact_points.len() < 2 {
        return Err(Error::MeshTooCoarse(cell));
    }

    let curve = OrientedClosedCurve::from_vertices(verts).map_err(|_| Error::MeshTooCoarse(cell))?;

    // T(x) must stay inside T(curve): check hull cell centers.
    let hull_centers = hull.marked_centers();
    let stride = (hull_centers.len() / 5_000).max(1);
    for p in hull_centers.iter().step_by(stride) {
        if !curve.contains_closed(*p, cell) {
            return Err(Error::MeshTooCoarse(cell));
        }
    }

    // Contact parameters on the final curve.
    let mut contact_params: Vec<f64> = contact_points
        .iter()
        .map(|q| {
            let (t, _) = curve.project(*q);
            t
        })
        .collect();
    contact_params.sort_by(f64::total_cmp);
    contact_params.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    // Arc separation: every arc must be disjoint from its image.
    let m = contact_params.len();
    for i in 0..m {
        let arc = curve.arc(contact_params[i], contact_params[(i + 1) % m]);
        let pts = arc.sample(128);
        let imgs: Vec<Point> = pts.iter().map(|&p| f(p)).collect();
        let sep = polyline_min_dist(&imgs, &pts);
        if sep <= cell.max(1e-9) {
            return Err(Error::MeshTooCoarse(sep));
        }
    }

    let points = contact_params.iter().map(|&t| curve.point_at(t)).collect();
    Ok(BumpingCurve { curve, contact_params, contact_points: points })
}

/// Minimum distance between two sampled polylines.
pub fn polyline_min_dist(a: &[Point], b: &[Point]) -> f64 {
    let mut min = f64::INFINITY;
    for w in a.windows(2) {
        for v in b.windows(2) {
            min = min.min(segment_segment_dist(w[0], w[1], v[0], v[1]));
        }
    }
    if a.len() == 1 && b.len() > 1 {
        for v in b.windows(2) {
            min = min.min(point_segment_dist(a[0], v[0], v[1]));
        }
    }
    min
}

/// Douglas–Peucker simplification of a closed polyline, falling back to the
/// input when the result is degenerate.
pub fn simplify_closed(pts: &[Point], tol: f64) -> Vec<Point> {
    let n = pts.len();
    if n < 8 {
        return pts.to_vec();
    }
    // Split at index 0 and the farthest vertex from it.
    let far = (1..n)
        .max_by(|&i, &j| pts[i].dist(pts[0]).total_cmp(&pts[j].dist(pts[0])))
        .unwrap();
    let mut half1 = douglas_peucker(&pts[0..=far], tol);
    let mut rest: Vec<Point> = pts[far..n].to_vec();
    rest.push(pts[0]);
    let half2 = douglas_peucker(&rest, tol);
    half1.pop();
    half1.extend_from_slice(&half2[..half2.len() - 1]);
    if half1.len() >= 4 {
        half1
    } else {
        pts.to_vec()
    }
}

fn douglas_peucker(pts: &[Point], tol: f64) -> Vec<Point> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let (mut worst, mut worst_d) = (0usize, -1.0f64);
    for (i, &p) in pts.iter().enumerate().skip(1).take(pts.len() - 2) {
        let d = if a.dist(b) < GEOM_EPS { p.dist(a) } else { point_segment_dist(p, a, b) };
        if d > worst_d {
            worst = i;
            worst_d = d;
        }
    }
    if worst_d <= tol {
        return vec![a, b];
    }
    let mut left = douglas_peucker(&pts[..=worst], tol);
    let right = douglas_peucker(&pts[worst..], tol);
    left.pop();
    left.extend(right);
    left
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_poly(c: Point, half: f64) -> Vec<Point> {
        vec![
            c + Point::new(-half, -half),
            c + Point::new(half, -half),
            c + Point::new(half, half),
            c + Point::new(-half, half),
        ]
    }

    #[test]
    fn hull_fills_annulus() {
        // An annulus-shaped polyline: hull absorbs the hole.
        let window = Window::new(-3.0, -3.0, 3.0, 3.0);
        let mut r = Region::empty(window, 64.0).unwrap();
        let outer: Vec<Point> = (0..128)
            .map(|k| {
                let t = k as f64 / 128.0 * std::f64::consts::TAU;
                Point::new(2.0 * t.cos(), 2.0 * t.sin())
            })
            .collect();
        let inner: Vec<Point> = (0..64)
            .map(|k| {
                let t = k as f64 / 64.0 * std::f64::consts::TAU;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        r.mark_polyline(&outer, true);
        r.mark_polyline(&inner, true);
        let hull = r.hull();
        assert!(hull.contains_point(Point::new(0.0, 0.0)));
        assert!(hull.contains_point(Point::new(1.5, 0.0)));
        assert!(!hull.contains_point(Point::new(2.5, 0.0)));
        // Area close to the full disk of radius 2.
        let disk_area = std::f64::consts::PI * 4.0;
        assert!((hull.area() - disk_area).abs() / disk_area < 0.05);
    }

    #[test]
    fn hull_of_convex_polygon_matches_fill() {
        let window = Window::new(-2.0, -2.0, 2.0, 2.0);
        let poly = square_poly(Point::new(0.0, 0.0), 1.0);
        let mut direct = Region::empty(window, 128.0).unwrap();
        direct.fill_polygon(&poly);
        direct.mark_polyline(&poly, true);
        let hull = direct.hull();
        assert!((hull.area() - direct.area()).abs() / direct.area() < 0.02);
    }

    #[test]
    fn hull_is_idempotent() {
        let window = Window::new(-2.0, -2.0, 2.0, 2.0);
        let mut r = Region::empty(window, 64.0).unwrap();
        r.mark_polyline(&square_poly(Point::new(0.0, 0.0), 1.0), true);
        let h1 = r.hull();
        let h2 = h1.hull();
        assert_eq!(h1, h2);
    }

    #[test]
    fn figure_eight_cloud_fills_both_lobes() {
        // Point-cloud samples of two tangent squares; hull fills both, and
        // the raster area matches the exact polygon fill within 2%.
        let window = Window::new(-3.0, -2.0, 3.0, 2.0);
        let left = square_poly(Point::new(-1.0, 0.0), 1.0);
        let right = square_poly(Point::new(1.0, 0.0), 1.0);
        // Sampling must be denser than the 1/256 cell, or the border flood
        // leaks between dots.
        let mut cloud: Vec<Point> = Vec::new();
        cloud.extend(sample_chain(&left, 0.003, true));
        cloud.extend(sample_chain(&right, 0.003, true));
        let hull = topological_hull(&Compactum::Points(cloud), window, 256.0).unwrap();
        assert!(hull.contains_point(Point::new(-1.0, 0.0)));
        assert!(hull.contains_point(Point::new(1.0, 0.0)));
        let mut exact = Region::empty(window, 256.0).unwrap();
        exact.fill_polygon(&left);
        exact.fill_polygon(&right);
        exact.mark_polyline(&left, true);
        exact.mark_polyline(&right, true);
        let rel = (hull.area() - exact.area()).abs() / exact.area();
        assert!(rel < 0.02, "area mismatch {rel}");
    }

    #[test]
    fn bad_resolution_is_rejected() {
        let window = Window::new(0.0, 0.0, 1.0, 1.0);
        assert!(matches!(Region::empty(window, 0.0), Err(Error::BadResolution(_))));
        assert!(matches!(Region::empty(window, -3.0), Err(Error::BadResolution(_))));
    }

    #[test]
    fn crosscuts_of_comb_over_segment() {
        // A two-toothed comb crossing a segment four times: 4 crosscuts.
        let comb = OrientedClosedCurve::from_vertices(vec![
            Point::new(-3.0, -1.0),
            Point::new(3.0, -1.0),
            Point::new(3.0, -0.3),
            Point::new(2.0, -0.3),
            Point::new(2.0, 0.5),
            Point::new(1.0, 0.5),
            Point::new(1.0, -0.3),
            Point::new(-1.0, -0.3),
            Point::new(-1.0, 0.5),
            Point::new(-2.0, 0.5),
            Point::new(-2.0, -0.3),
            Point::new(-3.0, -0.3),
        ])
        .unwrap();
        let window = Window::new(-4.0, -2.0, 4.0, 2.0);
        let seg = Compactum::segment(Point::new(-2.5, 0.0), Point::new(2.5, 0.0));
        let x = topological_hull(&seg, window, 128.0).unwrap();
        let cuts = crosscut_components(&comb, &x).unwrap();
        assert_eq!(cuts.len(), 4, "expected 4 crosscuts, got {}", cuts.len());
        for cut in &cuts {
            assert!(cut.shadow.count() > 0, "crosscut with empty shadow");
            // Shadow boundary stays near Q union X (rasterized check).
            let mut blocked = x.clone();
            blocked.mark_polyline(&cut.path, false);
            for p in cut.shadow.boundary_centers() {
                assert!(
                    blocked.near_marked(p, 2),
                    "shadow boundary cell {p:?} away from Q ∪ X"
                );
            }
        }
    }

    #[test]
    fn curve_inside_x_has_no_crosscuts() {
        let window = Window::new(-3.0, -3.0, 3.0, 3.0);
        let big = Compactum::Polygon(square_poly(Point::new(0.0, 0.0), 2.0));
        let x = topological_hull(&big, window, 64.0).unwrap();
        let s = OrientedClosedCurve::rectangle(Point::new(0.0, 0.0), 1.0, 1.0).unwrap();
        let cuts = crosscut_components(&s, &x).unwrap();
        assert!(cuts.is_empty());
    }

    #[test]
    fn disjoint_curve_reports_no_contact() {
        let window = Window::new(-6.0, -6.0, 6.0, 6.0);
        let seg = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let x = topological_hull(&seg, window, 64.0).unwrap();
        let s = OrientedClosedCurve::rectangle(Point::new(4.0, 4.0), 1.0, 1.0).unwrap();
        assert!(matches!(crosscut_components(&s, &x), Err(Error::NoContact)));
    }

    #[test]
    fn bumping_curve_around_segment() {
        let seg = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let f = |p: Point| p + Point::new(3.0, 0.0);
        let bc = bumping_curve(&seg, f, 0.1, 256.0, 1e-7).unwrap();
        assert!(bc.contact_params.len() >= 2);
        // The curve stays within mesh of the segment (stadium-like).
        for k in 0..200 {
            let p = bc.curve.point_at(k as f64 / 200.0);
            assert!(
                seg.dist(p) <= 0.1 + 0.02,
                "curve point {p:?} too far from X: {}",
                seg.dist(p)
            );
        }
        // Contacts really are on X.
        for q in &bc.contact_points {
            assert!(seg.dist(*q) <= 0.02, "contact off X: {:?}", q);
        }
        // Segment inside the curve.
        assert!(bc.curve.contains_closed(Point::new(0.0, 0.0), 1e-9));
    }

    #[test]
    fn bumping_curve_around_disk_boundary() {
        let circle: Vec<Point> = (0..96)
            .map(|k| {
                let t = k as f64 / 96.0 * std::f64::consts::TAU;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let x = Compactum::Polygon(circle);
        let f = |p: Point| p + Point::new(3.0, 0.0);
        let bc = bumping_curve(&x, f, 0.12, 256.0, 1e-7).unwrap();
        // Roughly a circle of radius 1 + mesh: all points within the band.
        for k in 0..200 {
            let p = bc.curve.point_at(k as f64 / 200.0);
            assert!(p.norm() <= 1.0 + 0.12 + 0.03 && p.norm() >= 1.0 - 0.03);
        }
    }

    #[test]
    fn bumping_curve_identity_map_fails() {
        let seg = Compactum::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let f = |p: Point| p;
        assert!(matches!(
            bumping_curve(&seg, f, 0.1, 256.0, 1e-7),
            Err(Error::FixedPointNearX { .. })
        ));
    }

    #[test]
    fn escape_path_leaves_fjord() {
        // A U-shaped fjord: path from deep inside reaches the border.
        let window = Window::new(-3.0, -3.0, 3.0, 3.0);
        let u_shape = Compactum::Polygon(vec![
            Point::new(-2.0, -2.0),
            Point::new(2.0, -2.0),
            Point::new(2.0, 2.0),
            Point::new(0.5, 2.0),
            Point::new(0.5, -1.0),
            Point::new(-0.5, -1.0),
            Point::new(-0.5, 2.0),
            Point::new(-2.0, 2.0),
        ]);
        let x = topological_hull(&u_shape, window, 64.0).unwrap();
        let path = x.escape_path(Point::new(0.0, -0.5)).unwrap();
        let last = *path.last().unwrap();
        assert!(x.window().depth(last) < 3.0 * x.cell_size());
        for p in &path {
            assert!(!x.contains_point(*p), "escape path enters X at {p:?}");
        }
    }
}

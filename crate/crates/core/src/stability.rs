//! Structural stability validation.
//!
//! An item is accepted at a position when every extreme point of its CoG
//! uncertainty box lies inside its support polygon, and the support polygon is
//! built only from contact cells that belong to an LBCP (the feasibility map).
//! Such a polygon is itself load-bearable, so accepting a newcomer never
//! invalidates the items underneath it and only the new item is checked.

use alloc::vec::Vec;

use crate::binstate::{BinState, DeltaCog, Item, Lbcp, Placement};
use crate::error::{Error, Result};
use crate::geometry::{clip_rect, contains_region, convex_hull, lattice_hull, ConvexPolygon2D, Point2, Rect2, Scalar};

/// Horizontal projection of the CoG uncertainty box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CogSet {
    pub center: Point2,
    /// Counter-clockwise from the lower-left corner.
    pub extremes: [Point2; 4],
}

impl CogSet {
    /// All four extremes lie in `poly`; by convexity the whole box then does.
    pub fn inside(&self, poly: &ConvexPolygon2D) -> bool {
        contains_region(poly, self.extremes)
    }

    pub fn box_polygon(&self) -> ConvexPolygon2D {
        convex_hull(self.extremes)
    }
}

/// CoG extremes of `item` resting at `placement`: the footprint centre shifted
/// by up to `delta * w` along x and `delta * d` along y. The vertical shift
/// has no influence on a planar containment test and is dropped.
pub fn cog_extremes(item: &Item, placement: Placement, delta: DeltaCog) -> CogSet {
    let w = Scalar::from_integer(item.w.into());
    let d = Scalar::from_integer(item.d.into());
    let cx = Scalar::from_integer(placement.x.into()) + w / 2;
    let cy = Scalar::from_integer(placement.y.into()) + d / 2;
    let hx = delta.ratio() * w;
    let hy = delta.ratio() * d;
    CogSet {
        center: Point2::new(cx, cy),
        extremes: [
            Point2::new(cx - hx, cy - hy),
            Point2::new(cx + hx, cy - hy),
            Point2::new(cx + hx, cy + hy),
            Point2::new(cx - hx, cy + hy),
        ],
    }
}

/// Knobs for the validation pipeline. The default is the exact grid check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Shrink (cells per side) for the contact-robustness window; 0 disables it.
    pub robust_shrink: u32,
    /// Cells whose height is within this many units below the support height
    /// still count as contact. 0 on the grid.
    pub contact_tolerance: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationResult {
    pub valid: bool,
    pub support_polygon: ConvexPolygon2D,
    pub support_height: u32,
    /// Resting placement implied by the query position.
    pub placement: Placement,
}

/// Resting height of anything with footprint `r`: the highest surface under it.
pub fn support_height(state: &BinState, r: &Rect2) -> Option<u32> {
    state.max_height_in(r)
}

/// Support polygon from the heightmap and feasibility map: hull of the cells
/// of `r` at height `hs` that belong to an LBCP.
pub fn support_polygon(state: &BinState, r: &Rect2, hs: u32) -> ConvexPolygon2D {
    contact_hull(state, r, |h| h == hs, true)
}

/// Hull of every contact cell at `hs`, load-bearable or not. This is the
/// purely geometric support polygon; the LBCP one always lies inside it.
pub fn geometric_support_polygon(state: &BinState, r: &Rect2, hs: u32) -> ConvexPolygon2D {
    contact_hull(state, r, |h| h == hs, false)
}

fn contact_hull(state: &BinState, r: &Rect2, is_contact: impl Fn(u32) -> bool, need_feasible: bool) -> ConvexPolygon2D {
    // only the outermost contact cell of each row can contribute hull vertices
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(4 * r.d as usize);
    for y in r.y..r.y_max() {
        let mut lo = None;
        let mut hi = None;
        for x in r.x..r.x_max() {
            if is_contact(state.height_at(x, y)) && (!need_feasible || state.feasible_at(x, y)) {
                lo.get_or_insert(x);
                hi = Some(x);
            }
        }
        if let (Some(lo), Some(hi)) = (lo, hi) {
            pts.extend_from_slice(&[(lo, y), (lo, y + 1), (hi + 1, y), (hi + 1, y + 1)]);
        }
    }
    lattice_hull(&mut pts)
}

/// Support polygon straight from the LBCP set: clip every LBCP at height `hs`
/// to the footprint and hull the grid cells the clipped regions cover.
///
/// Independent of the heightmap and feasibility map; agrees with
/// [`support_polygon`] whenever the maps are consistent with the LBCPs.
pub fn support_polygon_from_lbcps(lbcps: &[Lbcp], r: &Rect2, hs: u32) -> ConvexPolygon2D {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for lbcp in lbcps.iter().filter(|l| l.height == hs) {
        let clipped = clip_rect(&lbcp.polygon, r);
        if clipped.is_degenerate() {
            continue;
        }
        for (x, y) in r.cells() {
            if clipped.contains_cell(x, y) {
                pts.extend_from_slice(&[(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]);
            }
        }
    }
    lattice_hull(&mut pts)
}

/// Hull of the raw clipped LBCP regions at `hs`, without snapping to cells.
/// Always contains [`support_polygon_from_lbcps`].
pub fn support_polygon_clipped(lbcps: &[Lbcp], r: &Rect2, hs: u32) -> ConvexPolygon2D {
    convex_hull(
        lbcps
            .iter()
            .filter(|l| l.height == hs)
            .flat_map(|l| clip_rect(&l.polygon, r).vertices().to_vec()),
    )
}

/// True iff the highest surface under the footprint equals the highest
/// surface under the footprint shrunk by `shrink` cells on every side.
pub fn robust_contact_filter(state: &BinState, item: &Item, x: u32, y: u32, shrink: u32) -> Result<bool> {
    let footprint = item.footprint(x, y);
    let outer = support_height(state, &footprint).ok_or(Error::OutOfBounds(item.id))?;
    let inner = shrunk(item, &footprint, shrink)?;
    Ok(support_height(state, &inner) == Some(outer))
}

fn shrunk(item: &Item, footprint: &Rect2, shrink: u32) -> Result<Rect2> {
    let s = i64::from(shrink);
    let r = Rect2::new(footprint.x + s, footprint.y + s, footprint.w - 2 * s, footprint.d - 2 * s);
    if r.w <= 0 || r.d <= 0 {
        return Err(Error::ShrinkTooLarge { shrink, w: item.w, d: item.d });
    }
    Ok(r)
}

/// Validates `item` dropped at `(x, y)`; it comes to rest on the highest
/// surface under its footprint.
pub fn validate(state: &BinState, item: &Item, x: u32, y: u32) -> Result<ValidationResult> {
    validate_with(state, item, x, y, &ValidateOptions::default())
}

pub fn validate_with(state: &BinState, item: &Item, x: u32, y: u32, opts: &ValidateOptions) -> Result<ValidationResult> {
    let footprint = item.footprint(x, y);
    let hs = support_height(state, &footprint).ok_or(Error::OutOfBounds(item.id))?;
    if hs + item.h > state.dims().h {
        return Err(Error::HeightOverflow(item.id));
    }
    let tol = opts.contact_tolerance;
    let is_contact = |h: u32| h <= hs && hs - h <= tol;

    let (window, robust) = if opts.robust_shrink > 0 {
        let inner = shrunk(item, &footprint, opts.robust_shrink)?;
        let robust = support_height(state, &inner) == Some(hs);
        (inner, robust)
    } else {
        (footprint, true)
    };
    let polygon = contact_hull(state, &window, is_contact, true);
    let placement = Placement::new(x, y, hs);
    let valid = robust && cog_extremes(item, placement, state.delta_cog()).inside(&polygon);
    Ok(ValidationResult {
        valid,
        support_polygon: polygon,
        support_height: hs,
        placement,
    })
}

/// Validates an exact placement, reporting collisions and floating positions
/// separately from instability.
pub fn validate_placement(state: &BinState, item: &Item, placement: Placement) -> Result<ValidationResult> {
    let res = validate(state, item, placement.x, placement.y)?;
    match placement.z.cmp(&res.support_height) {
        core::cmp::Ordering::Less => Err(Error::Collision(item.id, placement.z)),
        core::cmp::Ordering::Greater => Err(Error::Floating(item.id, placement.z)),
        core::cmp::Ordering::Equal => Ok(res),
    }
}

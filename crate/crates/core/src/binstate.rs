//! The authoritative bin representation.
//!
//! A [`BinState`] keeps four views of the same contents mutually consistent:
//! the packed items, the heightmap, the feasibility map and the LBCP set.
//!
//! * heightmap `(x, y)` is the highest item top covering the cell, or 0.
//! * feasmap `(x, y)` is true iff some LBCP at exactly the cell's height
//!   contains the whole cell.
//! * there is one LBCP per packed item plus the floor.
//!
//! [`BinState::apply_pack`] and [`BinState::apply_unpack`] only touch the
//! cells under the affected footprint. [`BinState::rebuild`] recomputes the
//! whole state from the pack history and is the oracle the incremental path
//! is checked against.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon2D, Rect2, Scalar};
use crate::stability;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A cuboid item: `w` along x, `d` along y, `h` along z, in grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub w: u32,
    pub d: u32,
    pub h: u32,
}

impl Item {
    pub const fn new(id: u32, w: u32, d: u32, h: u32) -> Self {
        Self { id: ItemId(id), w, d, h }
    }

    pub fn volume(&self) -> u64 {
        u64::from(self.w) * u64::from(self.d) * u64::from(self.h)
    }

    pub fn footprint(&self, x: u32, y: u32) -> Rect2 {
        Rect2::new(x.into(), y.into(), self.w.into(), self.d.into())
    }

    pub fn fits_in(&self, dims: &BinDims) -> bool {
        (1..=dims.l).contains(&self.w) && (1..=dims.w).contains(&self.d) && (1..=dims.h).contains(&self.h)
    }
}

/// Bin extents: `l` along x, `w` along y, `h` along z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinDims {
    pub l: u32,
    pub w: u32,
    pub h: u32,
}

impl BinDims {
    pub const fn new(l: u32, w: u32, h: u32) -> Self {
        Self { l, w, h }
    }

    pub fn volume(&self) -> u64 {
        u64::from(self.l) * u64::from(self.w) * u64::from(self.h)
    }

    pub fn base(&self) -> Rect2 {
        Rect2::new(0, 0, self.l.into(), self.w.into())
    }

    fn cells(&self) -> usize {
        self.l as usize * self.w as usize
    }
}

/// Lower-corner loading position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Placement {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Placement {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Self { x, y, z }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PackedItem {
    pub item: Item,
    pub placement: Placement,
    /// Monotone pack sequence number; replay order for [`BinState::rebuild`].
    pub order: u64,
}

impl PackedItem {
    pub fn id(&self) -> ItemId {
        self.item.id
    }

    pub fn footprint(&self) -> Rect2 {
        self.item.footprint(self.placement.x, self.placement.y)
    }

    pub fn top(&self) -> u32 {
        self.placement.z + self.item.h
    }

    /// `self` sits somewhere above `other` inside its footprint, so `other`
    /// cannot be lifted out before `self` is gone.
    pub fn blocks(&self, other: &PackedItem) -> bool {
        self.id() != other.id()
            && self.placement.z >= other.top()
            && self.footprint().overlaps(&other.footprint())
    }

    /// `self` rests directly on `other`'s top face.
    pub fn rests_on(&self, other: &PackedItem) -> bool {
        self.placement.z == other.top() && self.footprint().overlaps(&other.footprint())
    }
}

/// CoG uncertainty ratio, held as an exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaCog(Scalar);

impl DeltaCog {
    const DENOMINATOR: i64 = 1_000_000;

    /// Accepts `0 <= delta < 0.5`; the value is rounded to six decimals.
    pub fn from_f64(delta: f64) -> Result<Self> {
        if !delta.is_finite() || !(0.0..0.5).contains(&delta) {
            return Err(Error::InvalidDeltaCog(delta));
        }
        let num = libm::round(delta * Self::DENOMINATOR as f64) as i64;
        Ok(Self(Scalar::new(num, Self::DENOMINATOR)))
    }

    pub fn ratio(&self) -> Scalar {
        self.0
    }

    pub fn as_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LbcpOwner {
    Floor,
    Item(ItemId),
}

/// A load-bearable convex polygon lying at `height`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lbcp {
    pub polygon: ConvexPolygon2D,
    pub height: u32,
    pub owner: LbcpOwner,
}

#[derive(Clone, Debug)]
pub struct BinState {
    dims: BinDims,
    delta_cog: DeltaCog,
    packed: Vec<PackedItem>,
    heightmap: Vec<u32>,
    feasmap: Vec<bool>,
    lbcps: Vec<Lbcp>,
    next_order: u64,
}

/// Layout equality: the pack counter is ignored.
impl PartialEq for BinState {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.delta_cog == other.delta_cog
            && self.packed == other.packed
            && self.heightmap == other.heightmap
            && self.feasmap == other.feasmap
            && self.lbcps == other.lbcps
    }
}

impl BinState {
    pub fn new(dims: BinDims, delta_cog: f64) -> Result<Self> {
        Self::with_delta(dims, DeltaCog::from_f64(delta_cog)?)
    }

    pub fn with_delta(dims: BinDims, delta_cog: DeltaCog) -> Result<Self> {
        if dims.l == 0 || dims.w == 0 || dims.h == 0 {
            return Err(Error::InvalidDims(dims.l, dims.w, dims.h));
        }
        Ok(Self {
            dims,
            delta_cog,
            packed: Vec::new(),
            heightmap: alloc::vec![0; dims.cells()],
            feasmap: alloc::vec![true; dims.cells()],
            lbcps: alloc::vec![Lbcp {
                polygon: ConvexPolygon2D::from_rect(&dims.base()),
                height: 0,
                owner: LbcpOwner::Floor,
            }],
            next_order: 0,
        })
    }

    pub fn dims(&self) -> BinDims {
        self.dims
    }

    pub fn delta_cog(&self) -> DeltaCog {
        self.delta_cog
    }

    /// Packed items in pack order.
    pub fn packed(&self) -> &[PackedItem] {
        &self.packed
    }

    pub fn lbcps(&self) -> &[Lbcp] {
        &self.lbcps
    }

    /// Row-major (`y` rows of `l` cells) surface heights.
    pub fn heightmap(&self) -> &[u32] {
        &self.heightmap
    }

    pub fn feasmap(&self) -> &[bool] {
        &self.feasmap
    }

    #[inline]
    fn idx(&self, x: i64, y: i64) -> usize {
        y as usize * self.dims.l as usize + x as usize
    }

    #[inline]
    pub fn height_at(&self, x: i64, y: i64) -> u32 {
        self.heightmap[self.idx(x, y)]
    }

    #[inline]
    pub fn feasible_at(&self, x: i64, y: i64) -> bool {
        self.feasmap[self.idx(x, y)]
    }

    pub fn in_base(&self, r: &Rect2) -> bool {
        r.w > 0 && r.d > 0 && r.x >= 0 && r.y >= 0 && r.x_max() <= self.dims.l.into() && r.y_max() <= self.dims.w.into()
    }

    /// The `w x d` sub-grid of the heightmap under `r`, row-major.
    pub fn footprint_slice(&self, r: &Rect2) -> Option<Vec<u32>> {
        self.in_base(r).then(|| r.cells().map(|(x, y)| self.height_at(x, y)).collect())
    }

    /// Highest surface under `r`; `None` when `r` leaves the base.
    pub fn max_height_in(&self, r: &Rect2) -> Option<u32> {
        if !self.in_base(r) {
            return None;
        }
        let l = self.dims.l as usize;
        let mut best = 0;
        for y in r.y..r.y_max() {
            let row = y as usize * l;
            let cells = &self.heightmap[row + r.x as usize..row + r.x_max() as usize];
            best = best.max(cells.iter().copied().max().unwrap_or(0));
        }
        Some(best)
    }

    pub fn get(&self, id: ItemId) -> Option<&PackedItem> {
        self.packed.iter().find(|p| p.id() == id)
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.get(id).is_some()
    }

    pub fn lbcp_of(&self, id: ItemId) -> Option<&Lbcp> {
        self.lbcps.iter().find(|l| l.owner == LbcpOwner::Item(id))
    }

    pub fn packed_volume(&self) -> u64 {
        self.packed.iter().map(|p| p.item.volume()).sum()
    }

    /// Packed volume over bin volume.
    pub fn utilization(&self) -> f64 {
        self.packed_volume() as f64 / self.dims.volume() as f64
    }

    /// Items sitting above `id` inside its footprint.
    pub fn blockers_of(&self, id: ItemId) -> impl Iterator<Item = &PackedItem> + '_ {
        let target = self.get(id).copied();
        self.packed
            .iter()
            .filter(move |p| target.is_some_and(|t| p.blocks(&t)))
    }

    /// Places `item` at `placement` and registers `support_polygon` (the
    /// validator's output) as its LBCP.
    pub fn apply_pack(&mut self, item: Item, placement: Placement, support_polygon: ConvexPolygon2D) -> Result<()> {
        if !item.fits_in(&self.dims) {
            return Err(Error::InvalidItem(item.id));
        }
        if self.contains(item.id) {
            return Err(Error::DuplicateItem(item.id));
        }
        let footprint = item.footprint(placement.x, placement.y);
        let support = self.max_height_in(&footprint).ok_or(Error::OutOfBounds(item.id))?;
        if placement.z + item.h > self.dims.h {
            return Err(Error::HeightOverflow(item.id));
        }
        if placement.z < support {
            return Err(Error::Collision(item.id, placement.z));
        }
        if placement.z > support {
            return Err(Error::Floating(item.id, placement.z));
        }
        let cog = stability::cog_extremes(&item, placement, self.delta_cog);
        if !support_polygon.contains_polygon(&cog.box_polygon()) {
            return Err(Error::Unstable(item.id));
        }

        let top = placement.z + item.h;
        for (x, y) in footprint.cells() {
            let i = self.idx(x, y);
            self.heightmap[i] = top;
            // cells of the footprint outside the polygon must not keep a
            // stale flag from the surface they now cover
            self.feasmap[i] = support_polygon.contains_cell(x, y);
        }
        self.lbcps.push(Lbcp {
            polygon: support_polygon,
            height: top,
            owner: LbcpOwner::Item(item.id),
        });
        self.packed.push(PackedItem {
            item,
            placement,
            order: self.next_order,
        });
        self.next_order += 1;
        Ok(())
    }

    /// Removes an item that carries nothing and restores both maps under its
    /// footprint.
    pub fn apply_unpack(&mut self, id: ItemId) -> Result<PackedItem> {
        let pos = self.packed.iter().position(|p| p.id() == id).ok_or(Error::UnknownItem(id))?;
        if let Some(blocker) = self.blockers_of(id).next() {
            return Err(Error::LoadBearing { item: id, blocker: blocker.id() });
        }
        let removed = self.packed.remove(pos);
        self.lbcps.retain(|l| l.owner != LbcpOwner::Item(id));

        let footprint = removed.footprint();
        for (x, y) in footprint.cells() {
            let h = self
                .packed
                .iter()
                .filter(|p| p.footprint().contains_cell(x, y))
                .map(PackedItem::top)
                .max()
                .unwrap_or(0);
            let i = self.idx(x, y);
            self.heightmap[i] = h;
            self.feasmap[i] = self.lbcps.iter().any(|l| l.height == h && l.polygon.contains_cell(x, y));
        }
        Ok(removed)
    }

    /// Rebuilds a state from scratch by replaying `items` in pack order and
    /// re-deriving each LBCP from the polygons of the ones before it.
    pub fn rebuild(items: &[PackedItem], dims: BinDims, delta_cog: DeltaCog) -> Result<Self> {
        let mut state = Self::with_delta(dims, delta_cog)?;
        let mut history: Vec<PackedItem> = items.to_vec();
        history.sort_by_key(|p| p.order);

        for (k, p) in history.iter().enumerate() {
            let id = p.id();
            if !p.item.fits_in(&dims) {
                return Err(Error::InvalidItem(id));
            }
            if history[..k].iter().any(|q| q.id() == id) {
                return Err(Error::DuplicateItem(id));
            }
            let footprint = p.footprint();
            if !state.in_base(&footprint) {
                return Err(Error::OutOfBounds(id));
            }
            if p.top() > dims.h {
                return Err(Error::HeightOverflow(id));
            }
            let support = history[..k]
                .iter()
                .filter(|q| q.footprint().overlaps(&footprint))
                .map(PackedItem::top)
                .max()
                .unwrap_or(0);
            if p.placement.z < support {
                return Err(Error::Collision(id, p.placement.z));
            }
            if p.placement.z > support {
                return Err(Error::Floating(id, p.placement.z));
            }
            let polygon = stability::support_polygon_from_lbcps(&state.lbcps, &footprint, support);
            let cog = stability::cog_extremes(&p.item, p.placement, delta_cog);
            if !polygon.contains_polygon(&cog.box_polygon()) {
                return Err(Error::Unstable(id));
            }
            state.lbcps.push(Lbcp {
                polygon,
                height: p.top(),
                owner: LbcpOwner::Item(id),
            });
        }

        for (x, y) in dims.base().cells() {
            let h = history
                .iter()
                .filter(|q| q.footprint().contains_cell(x, y))
                .map(PackedItem::top)
                .max()
                .unwrap_or(0);
            let i = state.idx(x, y);
            state.heightmap[i] = h;
            state.feasmap[i] = state.lbcps.iter().any(|l| l.height == h && l.polygon.contains_cell(x, y));
        }
        state.next_order = history.last().map_or(0, |p| p.order + 1);
        state.packed = history;
        Ok(state)
    }

    /// Rebuild of this state's own history.
    pub fn rebuilt(&self) -> Result<Self> {
        let mut s = Self::rebuild(&self.packed, self.dims, self.delta_cog)?;
        s.next_order = self.next_order;
        Ok(s)
    }

    /// Next pack sequence number.
    pub fn next_order(&self) -> u64 {
        self.next_order
    }
}

trait CellContains {
    fn contains_cell(&self, x: i64, y: i64) -> bool;
}

impl CellContains for Rect2 {
    fn contains_cell(&self, x: i64, y: i64) -> bool {
        x >= self.x && x < self.x_max() && y >= self.y && y < self.y_max()
    }
}

/// Wire form of a [`BinState`]: the pack history is enough to rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinSnapshot {
    pub dims: BinDims,
    pub delta_cog: f64,
    pub items: Vec<SnapshotItem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotItem {
    pub id: ItemId,
    pub w: u32,
    pub d: u32,
    pub h: u32,
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub order: u64,
}

impl From<&BinState> for BinSnapshot {
    fn from(s: &BinState) -> Self {
        Self {
            dims: s.dims,
            delta_cog: s.delta_cog.as_f64(),
            items: s
                .packed
                .iter()
                .map(|p| SnapshotItem {
                    id: p.id(),
                    w: p.item.w,
                    d: p.item.d,
                    h: p.item.h,
                    x: p.placement.x,
                    y: p.placement.y,
                    z: p.placement.z,
                    order: p.order,
                })
                .collect(),
        }
    }
}

impl TryFrom<BinSnapshot> for BinState {
    type Error = Error;

    fn try_from(s: BinSnapshot) -> Result<Self> {
        let items: Vec<PackedItem> = s
            .items
            .iter()
            .map(|i| PackedItem {
                item: Item { id: i.id, w: i.w, d: i.d, h: i.h },
                placement: Placement::new(i.x, i.y, i.z),
                order: i.order,
            })
            .collect();
        BinState::rebuild(&items, s.dims, DeltaCog::from_f64(s.delta_cog)?)
    }
}

impl Serialize for BinState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        BinSnapshot::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let snap = BinSnapshot::deserialize(deserializer)?;
        BinState::try_from(snap).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::validate;

    fn bin10() -> BinState {
        BinState::new(BinDims::new(10, 10, 10), 0.1).unwrap()
    }

    fn pack(state: &mut BinState, item: Item, x: u32, y: u32) {
        let v = validate(state, &item, x, y).unwrap();
        assert!(v.valid, "{item:?} at ({x},{y}) unstable");
        state.apply_pack(item, v.placement, v.support_polygon).unwrap();
    }

    #[test]
    fn new_bin_is_flat_and_feasible() {
        let s = bin10();
        assert_eq!(s.heightmap().len(), 100);
        assert!(s.heightmap().iter().all(|&h| h == 0));
        assert!(s.feasmap().iter().all(|&f| f));
        assert_eq!(s.lbcps().len(), 1);
        assert_eq!(s.utilization(), 0.0);
    }

    #[test]
    fn unit_bin_floor_is_unit_square() {
        let s = BinState::new(BinDims::new(1, 1, 1), 0.0).unwrap();
        assert_eq!(s.lbcps()[0].polygon, ConvexPolygon2D::from_rect(&Rect2::new(0, 0, 1, 1)));
        assert_eq!(s.lbcps()[0].owner, LbcpOwner::Floor);
    }

    #[test]
    fn invalid_construction() {
        assert_eq!(BinState::new(BinDims::new(0, 3, 3), 0.1), Err(Error::InvalidDims(0, 3, 3)));
        assert!(matches!(BinState::new(BinDims::new(3, 3, 3), 0.5), Err(Error::InvalidDeltaCog(_))));
        assert!(matches!(BinState::new(BinDims::new(3, 3, 3), -0.1), Err(Error::InvalidDeltaCog(_))));
    }

    #[test]
    fn footprint_slice_reads_heights() {
        let mut s = bin10();
        assert_eq!(s.footprint_slice(&Rect2::new(3, 3, 2, 2)).unwrap(), [0, 0, 0, 0]);
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        assert!(s.footprint_slice(&Rect2::new(0, 0, 4, 4)).unwrap().iter().all(|&h| h == 4));
        assert_eq!(s.footprint_slice(&Rect2::new(3, 0, 2, 1)).unwrap(), [4, 0]);
        assert!(s.footprint_slice(&Rect2::new(8, 8, 3, 1)).is_none());
    }

    #[test]
    fn floor_pack_lbcp_is_full_top_face() {
        let mut s = bin10();
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        let lbcp = s.lbcp_of(ItemId(1)).unwrap();
        assert_eq!(lbcp.height, 4);
        assert_eq!(lbcp.polygon, ConvexPolygon2D::from_rect(&Rect2::new(0, 0, 4, 4)));
    }

    #[test]
    fn overhang_clears_stale_cells() {
        let mut s = BinState::new(BinDims::new(10, 10, 10), 0.0).unwrap();
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        // the floor under x in [4,6) is feasible at height 0 before the overhang
        pack(&mut s, Item::new(2, 4, 4, 2), 2, 0);
        for y in 0..4 {
            for x in 2..4 {
                assert!(s.feasible_at(x, y));
            }
            for x in 4..6 {
                assert_eq!(s.height_at(x, y), 6);
                assert!(!s.feasible_at(x, y), "stale cell ({x},{y})");
            }
        }
        assert_eq!(s, s.rebuilt().unwrap());
    }

    #[test]
    fn unpack_round_trip() {
        let mut s = bin10();
        pack(&mut s, Item::new(1, 4, 4, 4), 3, 2);
        s.apply_unpack(ItemId(1)).unwrap();
        assert_eq!(s, bin10());
    }

    #[test]
    fn unpack_top_of_stack_restores_lower_surface() {
        let mut s = bin10();
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        pack(&mut s, Item::new(2, 2, 2, 2), 1, 1);
        assert_eq!(
            s.apply_unpack(ItemId(1)),
            Err(Error::LoadBearing { item: ItemId(1), blocker: ItemId(2) })
        );
        s.apply_unpack(ItemId(2)).unwrap();
        assert!(s.footprint_slice(&Rect2::new(0, 0, 4, 4)).unwrap().iter().all(|&h| h == 4));
        for (x, y) in Rect2::new(0, 0, 4, 4).cells() {
            assert!(s.feasible_at(x, y));
        }
        assert_eq!(s, s.rebuilt().unwrap());
        assert_eq!(s.apply_unpack(ItemId(9)), Err(Error::UnknownItem(ItemId(9))));
    }

    #[test]
    fn pack_errors() {
        let mut s = bin10();
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        let poly = ConvexPolygon2D::from_rect(&Rect2::new(0, 0, 4, 4));
        let it = Item::new(2, 4, 4, 4);
        assert_eq!(s.apply_pack(it, Placement::new(0, 0, 0), poly.clone()), Err(Error::Collision(ItemId(2), 0)));
        assert_eq!(s.apply_pack(it, Placement::new(0, 0, 5), poly.clone()), Err(Error::Floating(ItemId(2), 5)));
        assert_eq!(s.apply_pack(it, Placement::new(8, 0, 0), poly.clone()), Err(Error::OutOfBounds(ItemId(2))));
        assert_eq!(
            s.apply_pack(Item::new(1, 1, 1, 1), Placement::new(5, 5, 0), poly.clone()),
            Err(Error::DuplicateItem(ItemId(1)))
        );
        // a polygon that misses the CoG box is rejected
        let sliver = ConvexPolygon2D::from_rect(&Rect2::new(5, 5, 1, 1));
        assert_eq!(s.apply_pack(Item::new(3, 4, 4, 4), Placement::new(5, 5, 0), sliver), Err(Error::Unstable(ItemId(3))));
        assert_eq!(
            s.apply_pack(Item::new(4, 2, 2, 7), Placement::new(0, 0, 4), poly),
            Err(Error::HeightOverflow(ItemId(4)))
        );
    }

    #[test]
    fn utilization_arithmetic() {
        let mut s = bin10();
        pack(&mut s, Item::new(1, 5, 5, 5), 0, 0);
        pack(&mut s, Item::new(2, 5, 5, 5), 5, 5);
        assert_eq!(s.utilization(), 0.25);
        let mut full = bin10();
        pack(&mut full, Item::new(1, 10, 10, 10), 0, 0);
        assert_eq!(full.utilization(), 1.0);
    }

    #[test]
    fn rebuild_empty_and_floating() {
        let d = DeltaCog::from_f64(0.1).unwrap();
        assert_eq!(BinState::rebuild(&[], BinDims::new(10, 10, 10), d).unwrap(), bin10());
        let mut s = bin10();
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        pack(&mut s, Item::new(2, 4, 4, 2), 0, 0);
        let mut items = s.packed().to_vec();
        items[1].placement.z += 1;
        assert_eq!(BinState::rebuild(&items, s.dims(), d), Err(Error::Floating(ItemId(2), 5)));
        items[1].placement.z = 3;
        assert_eq!(BinState::rebuild(&items, s.dims(), d), Err(Error::Collision(ItemId(2), 3)));
    }

    #[test]
    fn snapshot_json_round_trip() {
        let mut s = bin10();
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        pack(&mut s, Item::new(2, 3, 2, 2), 0, 0);
        let json = serde_json::to_string(&s).unwrap();
        let back: BinState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}

use crate::binstate::ItemId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid bin dimensions {0}x{1}x{2}")]
    InvalidDims(u32, u32, u32),
    #[error("CoG uncertainty ratio {0} outside [0, 0.5)")]
    InvalidDeltaCog(f64),
    #[error("item {0} has dimensions outside [1, bin extent]")]
    InvalidItem(ItemId),
    #[error("item {0} is already packed")]
    DuplicateItem(ItemId),
    #[error("footprint of item {0} leaves the bin base")]
    OutOfBounds(ItemId),
    #[error("item {0} would rise above the bin height")]
    HeightOverflow(ItemId),
    #[error("item {0} intersects packed material below z={1}")]
    Collision(ItemId, u32),
    #[error("item {0} floats above its support surface at z={1}")]
    Floating(ItemId, u32),
    #[error("item {0} is not stable at its placement")]
    Unstable(ItemId),
    #[error("unknown item {0}")]
    UnknownItem(ItemId),
    #[error("item {item} carries item {blocker} and cannot be removed")]
    LoadBearing { item: ItemId, blocker: ItemId },
    #[error("shrink of {shrink} cells empties a {w}x{d} footprint")]
    ShrinkTooLarge { shrink: u32, w: u32, d: u32 },
    #[error("no candidate placement to choose from")]
    EmptyCandidateSet,
    #[error("node has no expandable unpacking move")]
    NoExpandableMove,
    #[error("movement-block relation contains a cycle")]
    PrecedenceCycle,
    #[error("plan target is unreachable")]
    TargetUnreachable,
    #[error("invalid operation in plan: {0}")]
    InvalidOperation(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

//! Online 3D bin packing with load-bearable convex polygon (LBCP) stability
//! validation and stable rearrangement planning.
//!
//! The crate is `no_std` (it needs `alloc`). IO, timing and the command line
//! live in the companion `lbcp-sim` crate.
//!
//! * [`geometry`]: exact planar hulls, clipping and containment.
//! * [`binstate`]: heightmap, feasibility map and LBCP set, kept consistent
//!   under pack/unpack, plus a replay oracle.
//! * [`stability`]: support height, support polygon and the CoG check.
//! * [`placement`]: empty maximal spaces, candidates, masking and the
//!   pluggable policy/value interface.
//! * [`srp`]: MCTS over unpacking moves, precedence graphs and A* refinement.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod binstate;
pub mod error;
pub mod geometry;
pub mod placement;
pub mod srp;
pub mod stability;

pub use binstate::{BinDims, BinState, DeltaCog, Item, ItemId, Lbcp, LbcpOwner, PackedItem, Placement};
pub use error::{Error, Result};
pub use geometry::{ConvexPolygon2D, Point2, Rect2};
pub use placement::{Candidate, Ems, PolicyDecision, PolicyProvider};
pub use srp::{Operation, RearrangementPlan, SrpConfig};
pub use stability::{CogSet, ValidateOptions, ValidationResult};

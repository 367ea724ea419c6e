//! Construction and analysis of finite loops of nilpotency class three with
//! abelian inner mapping groups: nuclear extensions, crosshomomorphism
//! cocycles, group modifications x*y = xy·mu(x,y), and the order-128 loops
//! C(H, mu) built from trilinear alternating forms over F2.

pub mod error;
pub mod ext;
pub mod greedy;
pub mod io;
pub mod iso;
pub mod modify;
pub mod perm;
pub mod report;
pub mod table;

pub use error::{Error, Result};
pub use table::{LoopTable, SubloopMask};

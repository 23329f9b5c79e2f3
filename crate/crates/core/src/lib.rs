pub mod algebra;
pub mod iso;
pub mod poset;
pub mod set;
pub mod upset;
pub mod coloring;
pub mod universal;
pub mod duality;
pub mod morphism;
pub mod partition;
pub mod term;
pub mod decide;
pub mod document;
pub mod dot;
pub mod verify;

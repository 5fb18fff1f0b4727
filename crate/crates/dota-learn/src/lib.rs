pub mod dota;
pub mod dtmm;
pub mod error;
pub mod guard;
pub mod oracle;
pub mod model;
pub mod rational;
pub mod table;
pub mod reference;
pub mod teacher;
pub mod word;

pub mod constraints;
pub mod hypothesis;
pub mod learner;
pub mod bench;

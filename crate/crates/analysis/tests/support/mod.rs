pub mod gen;
pub mod hp;

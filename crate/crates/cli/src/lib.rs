//! Library side of the `mclt` command: rendering, tables and the
//! verification suite, kept here so they can be tested without spawning the
//! binary.

pub mod classes;
pub mod render;
pub mod table;
pub mod verify;

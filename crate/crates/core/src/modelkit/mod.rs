//! Model DSL.

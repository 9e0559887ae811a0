//! Book chapters as doc-tests (wired up later).

//! Empty; see the `acceptance` test target.

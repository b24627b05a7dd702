//! Holds the `acceptance` test target, which runs last in a workspace test
//! run so a failing criterion does not hide the other suites.

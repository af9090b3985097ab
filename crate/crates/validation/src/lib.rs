//! Holds the `acceptance` test target. It lives in its own package so a
//! workspace test run reaches it only after every unit and integration
//! suite has run.

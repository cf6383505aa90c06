pub mod curve_report;
pub mod dissymmetry;
pub mod pi_table;
pub mod zero_scan;

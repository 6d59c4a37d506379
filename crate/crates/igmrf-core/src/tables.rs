//! Published reference values embedded as data files, shared by the
//! acceptance tests and the table-reproduction command.

/// Comparison tolerances. Published values are rounded to two decimals;
/// the bounded 2D column and the 1D models are pinned tighter than the
/// torus columns, whose degenerate eigenspaces make the last dropped
/// vector basis-dependent.
pub mod tolerance {
    pub const TABLE1_BOUND1: f64 = 0.01;
    pub const TABLE1_BOUND1_100: f64 = 0.02;
    pub const TABLE1_OTHER: f64 = 0.02;
    pub const TABLE2: f64 = 0.01;
    pub const TABLE3: f64 = 0.02;
    pub const TABLE4: f64 = 0.01;
    pub const SCALAR_1D: f64 = 0.01;
    pub const RW2_40: f64 = 0.005;
    pub const RW2_100: f64 = 0.05;
    pub const APPLICATION: f64 = 0.01;
}

/// Pinned scalars from the worked 40-node application and the 1D models.
pub mod application {
    pub const RW1_100_SIGMA_REF: f64 = 3.89;
    pub const RW2_40_SIGMA_REF: f64 = 10.486;
    pub const RW2_100_SIGMA_REF: f64 = 41.39;

    pub const MU: f64 = 7.0;
    pub const B: f64 = 2.0;
    pub const ALPHA: f64 = 0.001;
    pub const SIGMA_REF_RW2D_40: f64 = 2.91;

    pub const U_RW2: f64 = 7.5;
    pub const U_RW2D: f64 = 2.08;
    pub const U_MEDIAN: f64 = 4.79;
    pub const B_RW2: f64 = 0.81;
    pub const B_RW2D: f64 = 10.59;
}

pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../data/table2.csv");
pub const TABLE3_CSV: &str = include_str!("../data/table3.csv");
pub const TABLE4_CSV: &str = include_str!("../data/table4.csv");

#[derive(Debug, Clone, Copy)]
pub struct Table1Row {
    pub nodes: usize,
    pub torus1: f64,
    pub torus2: f64,
    pub bound1: f64,
    pub bound2: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Table2Row {
    pub nodes: usize,
    pub rw1: f64,
    pub rw2: f64,
    pub rw2d: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Table3Row {
    pub nodes: usize,
    pub b: f64,
    pub b_rw1: f64,
    pub b_rw2: f64,
    pub b_rw2d: f64,
}

#[derive(Debug, Clone)]
pub struct Table4Row {
    pub level: String,
    pub b: f64,
    pub b_rw2: f64,
    pub b_rw2d: f64,
}

fn data_rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::trim).collect())
}

pub fn table1() -> Vec<Table1Row> {
    data_rows(TABLE1_CSV)
        .map(|f| Table1Row {
            nodes: f[0].parse().expect("nodes"),
            torus1: f[1].parse().expect("torus1"),
            torus2: f[2].parse().expect("torus2"),
            bound1: f[3].parse().expect("bound1"),
            bound2: f[4].parse().expect("bound2"),
        })
        .collect()
}

pub fn table2() -> Vec<Table2Row> {
    data_rows(TABLE2_CSV)
        .map(|f| Table2Row {
            nodes: f[0].parse().expect("nodes"),
            rw1: f[1].parse().expect("rw1"),
            rw2: f[2].parse().expect("rw2"),
            rw2d: f[3].parse().expect("rw2d"),
        })
        .collect()
}

pub fn table3() -> Vec<Table3Row> {
    data_rows(TABLE3_CSV)
        .map(|f| Table3Row {
            nodes: f[0].parse().expect("nodes"),
            b: f[1].parse().expect("b"),
            b_rw1: f[2].parse().expect("b_rw1"),
            b_rw2: f[3].parse().expect("b_rw2"),
            b_rw2d: f[4].parse().expect("b_rw2d"),
        })
        .collect()
}

pub fn table4() -> Vec<Table4Row> {
    data_rows(TABLE4_CSV)
        .map(|f| Table4Row {
            level: f[0].to_string(),
            b: f[1].parse().expect("b"),
            b_rw2: f[2].parse().expect("b_rw2"),
            b_rw2d: f[3].parse().expect("b_rw2d"),
        })
        .collect()
}

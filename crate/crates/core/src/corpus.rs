//! Bundled corpus files.

pub const RHO_RULES: &str = include_str!("../corpus/rho.rules");
pub const EPS_NAIVE_RULES: &str = include_str!("../corpus/eps_naive.rules");
pub const NAT_RULES: &str = include_str!("../corpus/nat.rules");
pub const FIGURE1_RHO: &str = include_str!("../corpus/figure1.rho");

pub const FIRST: &str = include_str!("../corpus/first.binet");
pub const SECOND: &str = include_str!("../corpus/second.binet");
pub const THIRD: &str = include_str!("../corpus/third.binet");
pub const FINAL: &str = include_str!("../corpus/final.binet");

pub const ADD_2_2: &str = include_str!("../corpus/add_2_2.binet");
pub const ADD_3_2: &str = include_str!("../corpus/add_3_2.binet");
pub const ADD_NESTED: &str = include_str!("../corpus/add_nested.binet");

/// Every bundled `.binet` file by name.
pub const BINETS: &[(&str, &str)] = &[
    ("first.binet", FIRST),
    ("second.binet", SECOND),
    ("third.binet", THIRD),
    ("final.binet", FINAL),
    ("add_2_2.binet", ADD_2_2),
    ("add_3_2.binet", ADD_3_2),
    ("add_nested.binet", ADD_NESTED),
];

/// The unary-arithmetic programs.
pub const NAT_PROGRAMS: &[(&str, &str)] = &[
    ("add_2_2.binet", ADD_2_2),
    ("add_3_2.binet", ADD_3_2),
    ("add_nested.binet", ADD_NESTED),
];

/// Every bundled `.rules` file by name.
pub const RULES: &[(&str, &str)] = &[
    ("rho.rules", RHO_RULES),
    ("eps_naive.rules", EPS_NAIVE_RULES),
    ("nat.rules", NAT_RULES),
];

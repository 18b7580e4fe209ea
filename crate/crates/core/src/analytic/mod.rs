//! Semi-closed-form SE bounds: radial integral identities, the Gauss
//! hypergeometric function at complex argument, PGFL-based MGFs,
//! Gil-Pelaez inversion and the fronthaul cut-set bound.

pub mod integrals;
pub mod inversion;
pub mod mgf;
pub mod quadrature;
pub mod se;
pub mod special;
pub mod table;

pub use integrals::{f1_integral, f1_quadrature, f2_integral, f2_quadrature};
pub use inversion::{gil_pelaez_cdf, CdfEstimate, Mgf, WithAtom, Zero};
pub use mgf::{
    mgf_cmi_dl, mgf_cmi_ul, mgf_ici_dl_disjoint, mgf_ici_dl_uc, mgf_ici_ul_disjoint, mgf_ici_ul_uc, mgf_x_dl_disjoint,
    mgf_x_dl_uc, mgf_x_ul_disjoint, mgf_x_ul_uc, MgfModel,
};
pub use quadrature::{Estimate, QuadratureSpec};
pub use se::{
    evaluate, se_cutset, se_disjoint, se_infinite_fronthaul, se_user_centric, Method, Request, ScalarEstimate, SeResult,
};
pub use special::hyp2f1;
pub use table::{ConditionedTable, ExponentTable, Ray, TableGrid};

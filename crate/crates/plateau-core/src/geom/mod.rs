//! Frame kinematics, curve reconstruction, parametric patches, triangle
//! meshes, and discrete curvature estimators used by every other module.

pub mod curve;
pub mod darboux;
pub mod mesh;
pub mod patch;

pub use curve::{estimate_curvature_torsion, frenet_reconstruct, ArcCurve, CurveSample, Frame};
pub use darboux::{darboux_from_frenet, darboux_from_patch, DarbouxField, DarbouxSample, UvCurve};
pub use mesh::{discrete_curvatures, discrete_gauss_bonnet, mesh_from_patch, TriMesh, VertexCurvature};
pub use patch::{
    ConformalHelicoidPatch, Domain, GridPatch, HemispherePatch, ParamPatch, PatchJet,
    PlanarAnnulusPatch, PlanarDiskPatch,
};

//! Sparse matrices and load vectors of the semi-discrete coupled system.
//!
//! Everything is assembled element by element and face by face into
//! coordinate buffers that are concatenated in mesh order and compressed with
//! [`CsrMatrix::from_triplets`], so results do not depend on thread count.

mod forms;
mod load;
mod material;

pub use forms::{
    assemble_coupling, assemble_form, assemble_mass, dof_point, DofPoint, FormParts, MassKind,
};
pub use load::{assemble_load, LoadOperator, LoadTerms, SeparableTerm, SpatialField, TimeFunction};
pub use material::{
    penalty, stabilization_chi, stabilization_eta, BoundaryPenalty, Material, MaterialMap,
    StabilizationParams,
};

use crate::error::Result;
use crate::fespace::DgSpace;
use crate::mesh::PolyMesh;
use crate::sparse::CsrMatrix;

/// The seven matrices of the algebraic system plus the per-element dof blocks
/// the mass matrices are diagonal in.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub m_e1: CsrMatrix,
    pub m_e2: CsrMatrix,
    pub m_e3: CsrMatrix,
    pub a_e: CsrMatrix,
    pub c_e: CsrMatrix,
    pub m_a: CsrMatrix,
    pub a_a: CsrMatrix,
    pub elastic_blocks: Vec<(usize, usize)>,
    pub acoustic_blocks: Vec<(usize, usize)>,
}

impl SystemMatrices {
    pub fn n_elastic(&self) -> usize {
        self.m_e1.nrows()
    }

    pub fn n_acoustic(&self) -> usize {
        self.m_a.nrows()
    }

    /// Acoustic-side coupling, `-C_e^T` by construction.
    pub fn c_a(&self) -> CsrMatrix {
        self.c_e.transpose().scaled(-1.0)
    }

    /// Writes every matrix as `<name>.coo` into `dir`.
    pub fn dump(&self, dir: &std::path::Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let all = [
            ("M_e1", &self.m_e1),
            ("M_e2", &self.m_e2),
            ("M_e3", &self.m_e3),
            ("A_e", &self.a_e),
            ("C_e", &self.c_e),
            ("M_a", &self.m_a),
            ("A_a", &self.a_a),
        ];
        for (name, m) in all {
            let f = std::fs::File::create(dir.join(format!("{name}.coo")))?;
            m.write_coo(std::io::BufWriter::new(f))?;
        }
        Ok(())
    }
}

/// Mesh, spaces, coefficients and penalty parameters of one discretization.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: PolyMesh,
    pub elastic: DgSpace,
    pub acoustic: DgSpace,
    pub materials: MaterialMap,
    pub stabilization: StabilizationParams,
}

impl Discretization {
    pub fn new(mesh: PolyMesh, materials: MaterialMap, stabilization: StabilizationParams) -> Result<Self> {
        materials.validate(mesh.n_elements())?;
        stabilization.validate()?;
        let elastic = DgSpace::elastic(&mesh);
        let acoustic = DgSpace::acoustic(&mesh);
        Ok(Self { mesh, elastic, acoustic, materials, stabilization })
    }

    pub fn uniform(mesh: PolyMesh, material: Material, stabilization: StabilizationParams) -> Result<Self> {
        let materials = MaterialMap::uniform(mesh.n_elements(), material);
        Self::new(mesh, materials, stabilization)
    }

    pub fn space(&self, kind: crate::fespace::SpaceKind) -> &DgSpace {
        match kind {
            crate::fespace::SpaceKind::VectorElastic => &self.elastic,
            crate::fespace::SpaceKind::ScalarAcoustic => &self.acoustic,
        }
    }

    pub fn form(&self, kind: crate::fespace::SpaceKind, parts: FormParts) -> Result<CsrMatrix> {
        assemble_form(&self.mesh, self.space(kind), &self.materials, &self.stabilization, parts)
    }

    pub fn system(&self) -> Result<SystemMatrices> {
        use crate::fespace::SpaceKind::*;
        let mesh = &self.mesh;
        let m = &self.materials;
        let (e, a) = (&self.elastic, &self.acoustic);
        if mesh.face_counts().interface == 0 {
            log::warn!("mesh has no interface faces; the coupling matrix is zero");
        }
        Ok(SystemMatrices {
            m_e1: assemble_mass(mesh, e, m, MassKind::ElasticDensity)?,
            m_e2: assemble_mass(mesh, e, m, MassKind::ElasticDamping)?,
            m_e3: assemble_mass(mesh, e, m, MassKind::ElasticDampingSquared)?,
            a_e: self.form(VectorElastic, FormParts::SIPG)?,
            c_e: assemble_coupling(mesh, e, a, m)?,
            m_a: assemble_mass(mesh, a, m, MassKind::Acoustic)?,
            a_a: self.form(ScalarAcoustic, FormParts::SIPG)?,
            elastic_blocks: e.blocks(),
            acoustic_blocks: a.blocks(),
        })
    }

    /// Matrices of the squared dG norms (volume plus penalty, no consistency terms).
    pub fn norm_matrices(&self) -> Result<(CsrMatrix, CsrMatrix)> {
        use crate::fespace::SpaceKind::*;
        Ok((self.form(VectorElastic, FormParts::DG_NORM)?, self.form(ScalarAcoustic, FormParts::DG_NORM)?))
    }
}

from modules.mesh_io.schemas import MeshMetadata, UnstructuredMesh
from modules.mesh_io.vtk import read_vtk, read_vtk_file, write_vtk, write_vtk_file

__all__ = [
    "MeshMetadata",
    "UnstructuredMesh",
    "read_vtk",
    "read_vtk_file",
    "write_vtk",
    "write_vtk_file",
]

"""Mesh document loading and saving."""

import logging
from pathlib import Path
from typing import Optional, Union

import pydantic

from ..errors import MeshFormatError
from ..models.mesh_document import MeshDocument
from .mesh import Mesh

logger = logging.getLogger(__name__)

MeshSource = Union[str, Path, bytes]


def mesh_to_document(mesh: Mesh) -> MeshDocument:
    return MeshDocument(
        dim=mesh.dim,
        vertices=[[float(x) for x in row] for row in mesh.vertices],
        cells=[[int(i) for i in row] for row in mesh.cells],
    )


def save_mesh(mesh: Mesh, path: Optional[Union[str, Path]] = None) -> bytes:
    """Serialize a mesh; vertices and cells only, facets are re-derived on load."""
    payload = mesh_to_document(mesh).to_json().encode("utf-8")
    if path is not None:
        Path(path).write_bytes(payload)
        logger.info(f"Saved mesh with {mesh.n_cells} cells to {path}")
    return payload


def load_mesh(source: MeshSource) -> Mesh:
    """Load a mesh from a path or from raw document bytes."""
    label: Optional[str] = None
    if isinstance(source, bytes):
        payload = source
    else:
        label = str(source)
        try:
            payload = Path(source).read_bytes()
        except OSError as e:
            raise MeshFormatError(f"cannot read mesh document: {e}", path=label, original_error=e)

    try:
        document = MeshDocument.model_validate_json(payload)
    except pydantic.ValidationError as e:
        message = "vertex index out of range" if "out of range" in str(e) else "malformed mesh document"
        raise MeshFormatError(f"{message}: {e.errors()[0]['msg']}", path=label, original_error=e)

    return Mesh.from_arrays(document.dim, document.vertices, document.cells)


def mesh_io(target: Union[MeshSource, Mesh], direction: str = "load") -> Union[Mesh, bytes]:
    """Dispatch between load (path/bytes -> Mesh) and save (Mesh -> bytes)."""
    if direction == "load":
        if isinstance(target, Mesh):
            raise MeshFormatError("load expects a path or bytes, not a Mesh")
        return load_mesh(target)
    if direction == "save":
        if not isinstance(target, Mesh):
            raise MeshFormatError("save expects a Mesh")
        return save_mesh(target)
    raise MeshFormatError(f"unknown mesh_io direction {direction!r}")

"""Fabrication geometry and evaluation tools for 3D fingerprint targets.

Lengths are millimetres, raster distances pixels.  Submodules:

- ``mesh``, ``meshio``: indexed triangle meshes, validation, STL/OBJ
- ``patterns``: gratings, image I/O, simulated reader impressions
- ``projection``: smooth finger surfaces, scale model, ridge displacement
- ``mold``, ``scaffold``: printable mold halves and the casting fixture
- ``metrology``: ridge-spacing measurement
- ``interop``: genuine/imposter scoring and TAR/FAR
- ``pipeline``, ``cli``: end-to-end runs
"""

__version__ = "0.1.0"

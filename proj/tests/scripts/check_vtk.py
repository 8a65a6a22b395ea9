"""Reads a legacy VTK file with an independent reader and checks its contents.

Usage: check_vtk.py FILE.vtk [expected_cell_type]
Exits non-zero when the file does not parse or fails a check.
"""
import sys

import numpy as np


def read_with_vtk(path):
    import vtk
    from vtk.util.numpy_support import vtk_to_numpy

    reader = vtk.vtkUnstructuredGridReader()
    reader.SetFileName(path)
    reader.ReadAllScalarsOn()
    reader.ReadAllVectorsOn()
    reader.Update()
    grid = reader.GetOutput()
    if grid is None or grid.GetNumberOfPoints() == 0:
        raise RuntimeError("vtk reader returned an empty grid")
    types = np.array([grid.GetCellType(i) for i in range(grid.GetNumberOfCells())])
    pd = grid.GetPointData()
    arrays = {pd.GetArrayName(i): vtk_to_numpy(pd.GetArray(i)) for i in range(pd.GetNumberOfArrays())}
    return grid.GetNumberOfPoints(), types, arrays


def read_with_meshio(path):
    import meshio

    m = meshio.read(path, file_format="vtk")
    types = []
    for block in m.cells:
        code = {"tetra10": 24, "tetra": 10}.get(block.type, -1)
        types.extend([code] * len(block.data))
    return len(m.points), np.array(types), dict(m.point_data)


def main():
    path = sys.argv[1]
    expected = int(sys.argv[2]) if len(sys.argv) > 2 else 24
    try:
        n, types, arrays = read_with_vtk(path)
        reader = "vtk"
    except ImportError:
        n, types, arrays = read_with_meshio(path)
        reader = "meshio"
    problems = []
    if len(types) == 0:
        problems.append("no cells")
    elif not np.all(types == expected):
        problems.append(f"cell types {sorted(set(types.tolist()))}, expected {expected}")
    for name in ("displacement", "MPS", "vonMises"):
        if name not in arrays:
            problems.append(f"missing point array {name}")
            continue
        a = np.asarray(arrays[name])
        if a.shape[0] != n:
            problems.append(f"{name} has {a.shape[0]} rows for {n} points")
        if not np.all(np.isfinite(a)):
            problems.append(f"{name} has non-finite values")
    if problems:
        print(f"FAIL ({reader}): " + "; ".join(problems))
        return 1
    print(f"OK ({reader}): {n} points, {len(types)} cells of type {expected}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

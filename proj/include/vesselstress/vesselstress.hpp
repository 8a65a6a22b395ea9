#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/parallel.hpp"
#include "vesselstress/core/types.hpp"
#include "vesselstress/core/version.hpp"
#include "vesselstress/element/face_load.hpp"
#include "vesselstress/element/material.hpp"
#include "vesselstress/element/quadrature.hpp"
#include "vesselstress/element/tet10.hpp"
#include "vesselstress/mesh/boundary.hpp"
#include "vesselstress/mesh/classify.hpp"
#include "vesselstress/mesh/generators.hpp"
#include "vesselstress/mesh/mesh.hpp"
#include "vesselstress/mesh/msh_io.hpp"
#include "vesselstress/mesh/promote.hpp"
#include "vesselstress/mesh/quality.hpp"
#include "vesselstress/mesh/stl_io.hpp"
#include "vesselstress/pipeline/analysis.hpp"
#include "vesselstress/pipeline/config.hpp"
#include "vesselstress/pipeline/io.hpp"
#include "vesselstress/pipeline/studies.hpp"
#include "vesselstress/solve/assemble.hpp"
#include "vesselstress/solve/cg.hpp"
#include "vesselstress/solve/constraints.hpp"
#include "vesselstress/solve/csr.hpp"
#include "vesselstress/solve/pmg.hpp"
#include "vesselstress/stats/stats.hpp"
#include "vesselstress/stress/stress.hpp"

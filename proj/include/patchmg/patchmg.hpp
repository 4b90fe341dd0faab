#pragma once

// Matrix-free high-order finite element multigrid for the Poisson problem on
// tensor-product meshes, with a multiplicative vertex-patch smoother whose
// local problems are solved by a p-multigrid V-cycle (full or half), and a
// benchmark harness with software FLOP counters.

#include <patchmg/basis.hpp>
#include <patchmg/bench.hpp>
#include <patchmg/cell_kernel.hpp>
#include <patchmg/coloring.hpp>
#include <patchmg/config.hpp>
#include <patchmg/counters.hpp>
#include <patchmg/distributor.hpp>
#include <patchmg/dofs.hpp>
#include <patchmg/fdm.hpp>
#include <patchmg/geometry.hpp>
#include <patchmg/global_operator.hpp>
#include <patchmg/gmres.hpp>
#include <patchmg/h_transfer.hpp>
#include <patchmg/local_solver.hpp>
#include <patchmg/mesh.hpp>
#include <patchmg/multigrid.hpp>
#include <patchmg/p_hierarchy.hpp>
#include <patchmg/quadrature.hpp>
#include <patchmg/smoother.hpp>
#include <patchmg/tensor.hpp>
#include <patchmg/thread_pool.hpp>
#include <patchmg/types.hpp>

/// @file fetistokes.hpp
/// @brief Umbrella header for the FETI-DP incompressible Stokes solver.

#ifndef FETISTOKES_FETISTOKES_HPP
#define FETISTOKES_FETISTOKES_HPP

#include "core/types.hpp"
#include "core/vector_ops.hpp"
#include "core/sparse_matrix.hpp"
#include "core/matrix_market.hpp"
#include "core/direct_factor.hpp"
#include "core/parallel.hpp"
#include "mesh/box_mesh.hpp"
#include "mesh/dof_partition.hpp"
#include "mesh/interface_jump.hpp"
#include "fem/element.hpp"
#include "fem/manufactured.hpp"
#include "fem/assemble.hpp"
#include "dd/change_of_basis.hpp"
#include "dd/reduced_system.hpp"
#include "dd/preconditioners.hpp"
#include "krylov/pcg.hpp"
#include "verify/oracle.hpp"
#include "bench/runner.hpp"

#endif // FETISTOKES_FETISTOKES_HPP

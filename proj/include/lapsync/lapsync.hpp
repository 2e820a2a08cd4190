#pragma once

// Umbrella header for the conductance network design library: H2-optimal
// sparse graph Laplacians for synchronizing identical LC oscillators.

#include "lapsync/deflation.hpp"
#include "lapsync/eig.hpp"
#include "lapsync/errors.hpp"
#include "lapsync/factorizations.hpp"
#include "lapsync/generators.hpp"
#include "lapsync/io.hpp"
#include "lapsync/laplacian.hpp"
#include "lapsync/lyapunov.hpp"
#include "lapsync/matrix.hpp"
#include "lapsync/objective.hpp"
#include "lapsync/sdp.hpp"
#include "lapsync/solver.hpp"
#include "lapsync/sym_matrix.hpp"

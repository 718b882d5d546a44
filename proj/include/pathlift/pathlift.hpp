#pragma once

// Minimal-time path planning on terrain given as the graph of a height
// function: saddle-point trajectory solver, geometry kernels, and the
// brute-force oracles that check them.

#include "pathlift/batch.hpp"
#include "pathlift/commands.hpp"
#include "pathlift/errors.hpp"
#include "pathlift/hamiltonian.hpp"
#include "pathlift/manifest.hpp"
#include "pathlift/manifold.hpp"
#include "pathlift/metric.hpp"
#include "pathlift/oracle.hpp"
#include "pathlift/solver.hpp"
#include "pathlift/speed.hpp"
#include "pathlift/verify.hpp"

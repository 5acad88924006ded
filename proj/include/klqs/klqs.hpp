#pragma once

// Convenience umbrella: the whole library in one include.

#include "baselines.hpp"
#include "combinatorics.hpp"
#include "hamiltonian.hpp"
#include "harness.hpp"
#include "instances.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "search.hpp"
#include "simulator.hpp"
#include "spectral.hpp"

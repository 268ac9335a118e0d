#pragma once

#include "core.hpp"
#include "datasets.hpp"
#include "geometric.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "learning.hpp"
#include "metro.hpp"
#include "parallel.hpp"
#include "physical.hpp"
#include "portfolio.hpp"
#include "random.hpp"
#include "simulation.hpp"
#include "sparse.hpp"

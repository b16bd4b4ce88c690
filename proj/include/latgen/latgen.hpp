// include/latgen/latgen.hpp: umbrella header.

#pragma once

#include "latgen/bounds.hpp"
#include "latgen/exactmat.hpp"
#include "latgen/experiments.hpp"
#include "latgen/groupgen.hpp"
#include "latgen/interval.hpp"
#include "latgen/io.hpp"
#include "latgen/lattice.hpp"
#include "latgen/numeric.hpp"
#include "latgen/region.hpp"
#include "latgen/rng.hpp"
#include "latgen/sampling.hpp"

#pragma once

#include "strichartz/admissible.hpp"
#include "strichartz/bump.hpp"
#include "strichartz/error.hpp"
#include "strichartz/extremizer.hpp"
#include "strichartz/families.hpp"
#include "strichartz/fit.hpp"
#include "strichartz/kernel.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/propagator.hpp"
#include "strichartz/random.hpp"
#include "strichartz/transform.hpp"

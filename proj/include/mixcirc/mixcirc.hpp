#pragma once

// Convenience umbrella for the whole library.

#include "mixcirc/bessel.hpp"
#include "mixcirc/bootstrap.hpp"
#include "mixcirc/circular.hpp"
#include "mixcirc/dataset.hpp"
#include "mixcirc/errors.hpp"
#include "mixcirc/eval.hpp"
#include "mixcirc/io.hpp"
#include "mixcirc/mixture.hpp"
#include "mixcirc/parallel.hpp"
#include "mixcirc/regression.hpp"
#include "mixcirc/rng.hpp"
#include "mixcirc/simulate.hpp"

#pragma once

// Umbrella header for the whole library.

#include "spectral_frechet/bulk_estimator.hpp"
#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/frechet_mean.hpp"
#include "spectral_frechet/frechet_regression.hpp"
#include "spectral_frechet/graph.hpp"
#include "spectral_frechet/parallel.hpp"
#include "spectral_frechet/random_graphs.hpp"
#include "spectral_frechet/rng.hpp"
#include "spectral_frechet/sbm_kernel.hpp"
#include "spectral_frechet/spectrum.hpp"

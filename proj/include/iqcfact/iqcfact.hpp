#pragma once

#include "iqcfact/error.hpp"
#include "iqcfact/tolerances.hpp"
#include "iqcfact/polynomial.hpp"
#include "iqcfact/rational.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/frequency_grid.hpp"
#include "iqcfact/state_space.hpp"
#include "iqcfact/hinf_norm.hpp"
#include "iqcfact/multiplier.hpp"
#include "iqcfact/conditions.hpp"
#include "iqcfact/spectral_factor.hpp"
#include "iqcfact/riccati.hpp"
#include "iqcfact/factorization.hpp"
#include "iqcfact/simulation.hpp"
#include "iqcfact/iqc_analysis.hpp"
#include "iqcfact/example_bundle.hpp"

#pragma once

// Folded higher-order polynomial lattice rules for quasi-Monte Carlo
// integration: construction, analysis, and point generation.

#include "qmcfold/cbc.hpp"
#include "qmcfold/digitspace.hpp"
#include "qmcfold/fft.hpp"
#include "qmcfold/gfpoly.hpp"
#include "qmcfold/io.hpp"
#include "qmcfold/kernel.hpp"
#include "qmcfold/rational.hpp"
#include "qmcfold/spectral.hpp"
#include "qmcfold/util.hpp"

#pragma once

// Umbrella header.

#include "qwalk/axes.hpp"
#include "qwalk/continuum.hpp"
#include "qwalk/dispersion.hpp"
#include "qwalk/fft.hpp"
#include "qwalk/fit.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/matrix.hpp"
#include "qwalk/operator_algebra.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/random.hpp"
#include "qwalk/report.hpp"
#include "qwalk/walk.hpp"

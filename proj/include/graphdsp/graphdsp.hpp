#pragma once

#include "graphdsp/config.hpp"
#include "graphdsp/exact.hpp"
#include "graphdsp/linalg.hpp"
#include "graphdsp/polynomial.hpp"
#include "graphdsp/hermite.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/spectral_basis.hpp"
#include "graphdsp/poly_algebra.hpp"
#include "graphdsp/jordan.hpp"
#include "graphdsp/spectral.hpp"
#include "graphdsp/filtering.hpp"
#include "graphdsp/rng.hpp"
#include "graphdsp/synth.hpp"
#include "graphdsp/apps/lp.hpp"
#include "graphdsp/apps/compression.hpp"
#include "graphdsp/apps/classifier.hpp"
#include "graphdsp/io.hpp"

#pragma once

// Umbrella header for the numerical library (the CLI lives in lsg/cli.hpp).

#include "lsg/error.hpp"
#include "lsg/field_io.hpp"
#include "lsg/geometry.hpp"
#include "lsg/grid.hpp"
#include "lsg/linalg.hpp"
#include "lsg/planewave.hpp"
#include "lsg/qg.hpp"
#include "lsg/quadrature.hpp"
#include "lsg/serialize.hpp"
#include "lsg/spectral.hpp"
#include "lsg/symbols.hpp"

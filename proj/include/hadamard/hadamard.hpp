#pragma once

// Umbrella header.

#include "chains.hpp"
#include "errors.hpp"
#include "explorer.hpp"
#include "expr.hpp"
#include "instances.hpp"
#include "json_io.hpp"
#include "kernelgrid.hpp"
#include "nnmatrix.hpp"
#include "random.hpp"
#include "serialize.hpp"
#include "spectral.hpp"

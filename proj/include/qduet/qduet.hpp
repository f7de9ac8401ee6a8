#pragma once

// Umbrella header for the qduet library.

#include "dynamics.hpp"
#include "errors.hpp"
#include "hilbert.hpp"
#include "lanczos.hpp"
#include "measurement.hpp"
#include "molecule.hpp"
#include "rng.hpp"
#include "toy.hpp"
#include "version.hpp"
